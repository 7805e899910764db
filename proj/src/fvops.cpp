#include "coanda/fvops.hpp"

#include <cmath>
#include <stdexcept>

namespace coanda {

DivScheme divSchemeFromString(const std::string& s) {
    if (s == "linear") return DivScheme::linear;
    if (s == "upwind") return DivScheme::upwind1;
    if (s == "linear_upwind") return DivScheme::linearUpwind;
    if (s == "limited_linear") return DivScheme::limitedLinear;
    throw std::invalid_argument("unknown divergence scheme '" + s + "'");
}

namespace {

// over-relaxed orthogonal coefficient |Sf|^2 / (Sf . d)
double orthoCoeff(const Mesh& mesh, int f) {
    double sd = dot(mesh.faceArea[f], mesh.deltaPN[f]);
    if (sd <= 0.0) throw std::runtime_error("fvops: face/delta orientation defect");
    return magSqr(mesh.faceArea[f]) / sd;
}

void checkFinite(const std::vector<double>& v, const char* what) {
    for (size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw std::runtime_error(std::string("fvops: non-finite ") + what + " " +
                                     std::to_string(i));
}

} // namespace

VectorField greenGaussGrad(const ScalarField& phi, const Mesh& mesh) {
    phi.checkComplete(mesh);
    VectorField g("grad(" + phi.name + ")", mesh);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        double w = mesh.faceWeight[f];
        double phiF = w * phi[mesh.owner[f]] + (1.0 - w) * phi[mesh.neighbour[f]];
        g[mesh.owner[f]] += phiF * mesh.faceArea[f];
        g[mesh.neighbour[f]] -= phiF * mesh.faceArea[f];
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f)
        g[mesh.owner[f]] += phi.boundaryValue(mesh, f) * mesh.faceArea[f];
    for (int c = 0; c < mesh.nCells(); ++c) g[c] /= mesh.cellVolume[c];
    return g;
}

std::vector<Tensor2> greenGaussGrad(const VectorField& u, const Mesh& mesh) {
    u.checkComplete(mesh);
    std::vector<Tensor2> g(mesh.nCells());
    auto add = [&](int c, const Vec2& uf, const Vec2& sf, double sign) {
        g[c].xx += sign * uf.x * sf.x;
        g[c].xy += sign * uf.x * sf.y;
        g[c].yx += sign * uf.y * sf.x;
        g[c].yy += sign * uf.y * sf.y;
    };
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        double w = mesh.faceWeight[f];
        Vec2 uf = w * u[mesh.owner[f]] + (1.0 - w) * u[mesh.neighbour[f]];
        add(mesh.owner[f], uf, mesh.faceArea[f], 1.0);
        add(mesh.neighbour[f], uf, mesh.faceArea[f], -1.0);
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f)
        add(mesh.owner[f], u.boundaryValue(mesh, f), mesh.faceArea[f], 1.0);
    for (int c = 0; c < mesh.nCells(); ++c) {
        double inv = 1.0 / mesh.cellVolume[c];
        g[c] *= inv;
    }
    return g;
}

namespace {

// Implicit pair (cP, cN) and explicit remainder e so that
// F * phi_f ~= cP phi_P + cN phi_N + e.
struct FaceConv {
    double cP = 0.0, cN = 0.0, e = 0.0;
};

FaceConv convFace(DivScheme scheme, double F, double w, const Mesh& mesh, int f,
                  const ScalarField& phi, const VectorField* gradPhi) {
    FaceConv r;
    const int P = mesh.owner[f], N = mesh.neighbour[f];
    switch (scheme) {
        case DivScheme::linear:
            r.cP = F * w;
            r.cN = F * (1.0 - w);
            break;
        case DivScheme::upwind1:
            r.cP = std::max(F, 0.0);
            r.cN = std::min(F, 0.0);
            break;
        case DivScheme::linearUpwind: {
            r.cP = std::max(F, 0.0);
            r.cN = std::min(F, 0.0);
            if (!gradPhi) throw std::runtime_error("linearUpwind needs a gradient field");
            int don = F >= 0.0 ? P : N;
            Vec2 rv = mesh.faceCentre[f] - mesh.cellCentre[don];
            double extrap = dot((*gradPhi)[don], rv);
            // keep the reconstructed face value within the adjacent-cell
            // range; inactive in smooth monotone regions, saturates across
            // unresolved shear layers
            double lo = std::min(phi[P], phi[N]) - phi[don];
            double hi = std::max(phi[P], phi[N]) - phi[don];
            r.e = F * std::clamp(extrap, lo, hi);
            break;
        }
        case DivScheme::limitedLinear: {
            r.cP = std::max(F, 0.0);
            r.cN = std::min(F, 0.0);
            if (!gradPhi) throw std::runtime_error("limitedLinear needs a gradient field");
            const int don = F >= 0.0 ? P : N;
            const int dwn = F >= 0.0 ? N : P;
            double phiLin = w * phi[P] + (1.0 - w) * phi[N];
            double dPhi = phi[dwn] - phi[don];
            Vec2 dCD = mesh.cellCentre[dwn] - mesh.cellCentre[don];
            double gd = 2.0 * dot((*gradPhi)[don], dCD);
            double rr = std::abs(dPhi) > 1e-300 ? gd / dPhi - 1.0
                                                : (std::abs(gd) < 1e-300 ? 1.0 : -1.0);
            double psi = std::clamp(2.0 * rr, 0.0, 1.0);
            r.e = F * psi * (phiLin - phi[don]);
            break;
        }
    }
    return r;
}

} // namespace

std::vector<double> faceInterpolate(const ScalarField& phi, const Mesh& mesh, DivScheme scheme,
                                    const FaceFluxField* flux, const VectorField* gradPhi) {
    phi.checkComplete(mesh);
    if (scheme != DivScheme::linear && !flux)
        throw std::runtime_error("face interpolation: scheme needs a face flux for upwinding");
    if (scheme == DivScheme::linearUpwind && !gradPhi)
        throw std::runtime_error("face interpolation: linearUpwind needs a gradient field");
    std::optional<VectorField> gOwned;
    if (scheme == DivScheme::limitedLinear && !gradPhi) {
        gOwned = greenGaussGrad(phi, mesh);
        gradPhi = &*gOwned;
    }

    std::vector<double> out(mesh.nFaces(), 0.0);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double w = mesh.faceWeight[f];
        const double lin = w * phi[P] + (1.0 - w) * phi[N];
        switch (scheme) {
            case DivScheme::linear:
                out[f] = lin;
                break;
            case DivScheme::upwind1:
                out[f] = (*flux)[f] >= 0.0 ? phi[P] : phi[N];
                break;
            case DivScheme::linearUpwind: {
                int don = (*flux)[f] >= 0.0 ? P : N;
                out[f] = phi[don] + dot((*gradPhi)[don], mesh.faceCentre[f] - mesh.cellCentre[don]);
                break;
            }
            case DivScheme::limitedLinear: {
                double F = (*flux)[f];
                const int don = F >= 0.0 ? P : N;
                const int dwn = F >= 0.0 ? N : P;
                double dPhi = phi[dwn] - phi[don];
                Vec2 dCD = mesh.cellCentre[dwn] - mesh.cellCentre[don];
                double gd = 2.0 * dot((*gradPhi)[don], dCD);
                double rr = std::abs(dPhi) > 1e-300 ? gd / dPhi - 1.0
                                                    : (std::abs(gd) < 1e-300 ? 1.0 : -1.0);
                double psi = std::clamp(2.0 * rr, 0.0, 1.0);
                out[f] = phi[don] + psi * (lin - phi[don]);
                break;
            }
        }
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f)
        out[f] = phi.boundaryValue(mesh, f);
    return out;
}

std::vector<double> faceInterpolateLinear(const std::vector<double>& cellVals, const Mesh& mesh) {
    std::vector<double> out(mesh.nFaces(), 0.0);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        double w = mesh.faceWeight[f];
        out[f] = w * cellVals[mesh.owner[f]] + (1.0 - w) * cellVals[mesh.neighbour[f]];
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) out[f] = cellVals[mesh.owner[f]];
    return out;
}

std::vector<double> fluxDivergence(const FaceFluxField& flux, const Mesh& mesh) {
    std::vector<double> div(mesh.nCells(), 0.0);
    for (int f = 0; f < mesh.nFaces(); ++f) {
        div[mesh.owner[f]] += flux[f];
        if (f < mesh.nInteriorFaces) div[mesh.neighbour[f]] -= flux[f];
    }
    return div;
}

namespace {

// Shared assembly core: applies convection + diffusion for one scalar into
// (diag, upper, lower) and a per-cell explicit source callback.
template <class AddSource>
void assembleCore(const ScalarField& phi, const FaceFluxField& flux, const ScalarField& gamma,
                  const Mesh& mesh, DivScheme scheme, bool bounded, LduSystem& sys,
                  const VectorField* gradPhi, AddSource&& addSource) {
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double F = flux[f];
        const double w = mesh.faceWeight[f];

        FaceConv fc = convFace(scheme, F, w, mesh, f, phi, gradPhi);
        sys.diag[P] += fc.cP;
        sys.upper[f] += fc.cN;
        sys.diag[N] -= fc.cN;
        sys.lower[f] -= fc.cP;
        addSource(P, -fc.e);
        addSource(N, fc.e);

        const double gammaF = w * gamma[P] + (1.0 - w) * gamma[N];
        const double a = gammaF * orthoCoeff(mesh, f);
        sys.diag[P] += a;
        sys.upper[f] -= a;
        sys.diag[N] += a;
        sys.lower[f] -= a;
        if (gradPhi) {
            // deferred non-orthogonal correction: Gamma_f (grad phi)_f . T_f
            Vec2 t = mesh.faceArea[f] - orthoCoeff(mesh, f) * mesh.deltaPN[f];
            Vec2 gf = w * (*gradPhi)[P] + (1.0 - w) * (*gradPhi)[N];
            double corr = gammaF * dot(gf, t);
            addSource(P, corr);
            addSource(N, -corr);
        }

        if (bounded) {
            sys.diag[P] -= F;
            sys.diag[N] += F;
        }
    }

    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) {
        const int P = mesh.owner[f];
        const double F = flux[f];
        const int pi = ScalarField::patchIndexOf(mesh, f);
        const auto& bc = phi.bcs[pi];
        const double gammaB = gamma.boundaryValue(mesh, f);

        if (bc.type == BcType::fixedValue) {
            const double phiB = phi.boundaryValue(mesh, f);
            addSource(P, -F * phiB);
            const double a = gammaB * orthoCoeff(mesh, f);
            sys.diag[P] += a;
            addSource(P, a * phiB);
            if (gradPhi) {
                Vec2 t = mesh.faceArea[f] - orthoCoeff(mesh, f) * mesh.deltaPN[f];
                addSource(P, gammaB * dot((*gradPhi)[P], t));
            }
        } else {
            // zero-gradient extrapolation: implicit convection, no diffusion
            sys.diag[P] += F;
        }
        if (bounded) sys.diag[P] -= F;
    }
}

} // namespace

LduSystem assembleConvectionDiffusion(const ScalarField& phi, const FaceFluxField& flux,
                                      const ScalarField& gamma, const Mesh& mesh,
                                      DivScheme scheme, bool bounded) {
    phi.checkComplete(mesh);
    checkFinite(phi.v, "field value at cell");
    checkFinite(flux.v, "face flux at face");
    checkFinite(gamma.v, "diffusivity at cell");

    LduSystem sys(mesh);
    // gradient serves the scheme extrapolation and the deferred
    // non-orthogonal diffusion correction
    VectorField g = greenGaussGrad(phi, mesh);
    assembleCore(phi, flux, gamma, mesh, scheme, bounded, sys, &g,
                 [&](int c, double s) { sys.source[c] += s; });
    return sys;
}

VectorSystem assembleVectorConvectionDiffusion(const VectorField& u, const FaceFluxField& flux,
                                               const ScalarField& gammaEff, const Mesh& mesh,
                                               DivScheme scheme, bool bounded) {
    u.checkComplete(mesh);
    checkFinite(flux.v, "face flux at face");
    checkFinite(gammaEff.v, "diffusivity at cell");
    for (int c = 0; c < mesh.nCells(); ++c)
        if (!std::isfinite(u[c].x) || !std::isfinite(u[c].y))
            throw std::runtime_error("fvops: non-finite velocity at cell " + std::to_string(c));

    VectorSystem vs{LduSystem(mesh), std::vector<Vec2>(mesh.nCells())};

    // component-wise assembly over shared coefficients: run the scalar core
    // for x, then replay only the explicit parts for y
    auto tensorGrad = greenGaussGrad(u, mesh);

    ScalarField ux("u.x", mesh), uy("u.y", mesh);
    VectorField gx("grad(u.x)", mesh), gy("grad(u.y)", mesh);
    ux.bcs.clear();
    uy.bcs.clear();
    for (const auto& b : u.bcs) {
        BoundaryCondition<double> bx{b.type, b.uniform.x, {}}, by{b.type, b.uniform.y, {}};
        for (const auto& pv : b.perFace) {
            bx.perFace.push_back(pv.x);
            by.perFace.push_back(pv.y);
        }
        ux.bcs.push_back(bx);
        uy.bcs.push_back(by);
    }
    for (int c = 0; c < mesh.nCells(); ++c) {
        ux[c] = u[c].x;
        uy[c] = u[c].y;
        gx[c] = {tensorGrad[c].xx, tensorGrad[c].xy};
        gy[c] = {tensorGrad[c].yx, tensorGrad[c].yy};
    }

    assembleCore(ux, flux, gammaEff, mesh, scheme, bounded, vs.coeffs, &gx,
                 [&](int c, double s) { vs.source[c].x += s; });

    LduSystem dummy(mesh); // coefficients identical; only sources differ
    assembleCore(uy, flux, gammaEff, mesh, scheme, bounded, dummy, &gy,
                 [&](int c, double s) { vs.source[c].y += s; });

    return vs;
}

std::vector<Vec2> explicitStressDivergence(const VectorField& u, const ScalarField& gammaEff,
                                           const Mesh& mesh) {
    auto g = greenGaussGrad(u, mesh);
    // dev2(grad(u)^T) = grad(u)^T - (2/3) tr I
    std::vector<Tensor2> t(mesh.nCells());
    for (int c = 0; c < mesh.nCells(); ++c) {
        double tr23 = (2.0 / 3.0) * (g[c].xx + g[c].yy);
        t[c] = {g[c].xx - tr23, g[c].yx, g[c].xy, g[c].yy - tr23};
    }
    std::vector<Vec2> out(mesh.nCells());
    auto faceTerm = [&](int f, const Tensor2& tf, double nuF) {
        const Vec2& s = mesh.faceArea[f];
        return nuF * Vec2{tf.xx * s.x + tf.xy * s.y, tf.yx * s.x + tf.yy * s.y};
    };
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double w = mesh.faceWeight[f];
        Tensor2 tf{w * t[P].xx + (1 - w) * t[N].xx, w * t[P].xy + (1 - w) * t[N].xy,
                   w * t[P].yx + (1 - w) * t[N].yx, w * t[P].yy + (1 - w) * t[N].yy};
        double nuF = w * gammaEff[P] + (1.0 - w) * gammaEff[N];
        Vec2 c = faceTerm(f, tf, nuF);
        out[P] += c;
        out[N] -= c;
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) {
        const int P = mesh.owner[f];
        out[P] += faceTerm(f, t[P], gammaEff.boundaryValue(mesh, f));
    }
    return out;
}

std::vector<Vec2> explicitVectorLaplacian(const VectorField& u, const Mesh& mesh) {
    auto g = greenGaussGrad(u, mesh);
    std::vector<Vec2> out(mesh.nCells());
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double w = mesh.faceWeight[f];
        const Vec2& s = mesh.faceArea[f];
        Vec2 gxf{w * g[P].xx + (1 - w) * g[N].xx, w * g[P].xy + (1 - w) * g[N].xy};
        Vec2 gyf{w * g[P].yx + (1 - w) * g[N].yx, w * g[P].yy + (1 - w) * g[N].yy};
        Vec2 c{dot(gxf, s), dot(gyf, s)};
        out[P] += c;
        out[N] -= c;
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) {
        const int P = mesh.owner[f];
        const Vec2& s = mesh.faceArea[f];
        out[P] += Vec2{g[P].xx * s.x + g[P].xy * s.y, g[P].yx * s.x + g[P].yy * s.y};
    }
    for (int c = 0; c < mesh.nCells(); ++c) out[c] /= mesh.cellVolume[c];
    return out;
}

FaceFluxField rhieChowFlux(const VectorField& u, const ScalarField& p, const VectorField& gradP,
                           const std::vector<double>& dCell, const Mesh& mesh) {
    for (int c = 0; c < mesh.nCells(); ++c)
        if (!(dCell[c] > 0.0) || !std::isfinite(dCell[c]))
            throw std::runtime_error("rhieChowFlux: singular momentum diagonal at cell " +
                                     std::to_string(c));
    FaceFluxField flux(mesh);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double w = mesh.faceWeight[f];
        Vec2 uf = w * u[P] + (1.0 - w) * u[N];
        double dF = w * dCell[P] + (1.0 - w) * dCell[N];
        Vec2 gpf = w * gradP[P] + (1.0 - w) * gradP[N];
        double a = dF * orthoCoeff(mesh, f);
        flux[f] = dot(uf, mesh.faceArea[f]) - a * ((p[N] - p[P]) - dot(gpf, mesh.deltaPN[f]));
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) {
        const int P = mesh.owner[f];
        const int pi = ScalarField::patchIndexOf(mesh, f);
        if (u.bcs[pi].type == BcType::fixedValue) {
            flux[f] = dot(u.boundaryValue(mesh, f), mesh.faceArea[f]);
        } else {
            flux[f] = dot(u[P], mesh.faceArea[f]);
            if (p.bcs[pi].type == BcType::fixedValue) {
                double a = dCell[P] * orthoCoeff(mesh, f);
                double pb = p.boundaryValue(mesh, f);
                flux[f] -= a * ((pb - p[P]) - dot(gradP[P], mesh.deltaPN[f]));
            }
        }
    }
    return flux;
}

LduSystem assemblePressureCorrection(const FaceFluxField& flux, const std::vector<double>& dCorr,
                                     const ScalarField& p, const Mesh& mesh,
                                     std::vector<double>& faceCoeff) {
    LduSystem sys(mesh);
    faceCoeff.assign(mesh.nFaces(), 0.0);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        const int P = mesh.owner[f], N = mesh.neighbour[f];
        const double w = mesh.faceWeight[f];
        double dF = w * dCorr[P] + (1.0 - w) * dCorr[N];
        double a = dF * orthoCoeff(mesh, f);
        faceCoeff[f] = a;
        sys.diag[P] += a;
        sys.diag[N] += a;
        sys.upper[f] -= a;
        sys.lower[f] -= a;
        sys.source[P] -= flux[f];
        sys.source[N] += flux[f];
    }
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f) {
        const int P = mesh.owner[f];
        const int pi = ScalarField::patchIndexOf(mesh, f);
        if (p.bcs[pi].type == BcType::fixedValue) {
            double a = dCorr[P] * orthoCoeff(mesh, f);
            faceCoeff[f] = a;
            sys.diag[P] += a; // pc = 0 on fixed-pressure boundaries
        }
        sys.source[P] -= flux[f];
    }
    return sys;
}

void relaxSystem(LduSystem& sys, const std::vector<double>& x, double alpha) {
    if (alpha >= 1.0) return;
    for (int c = 0; c < sys.n(); ++c) {
        double d0 = sys.diag[c];
        sys.diag[c] = d0 / alpha;
        sys.source[c] += (sys.diag[c] - d0) * x[c];
    }
}

void relaxSystem(VectorSystem& sys, const VectorField& u, double alpha) {
    if (alpha >= 1.0) return;
    for (int c = 0; c < sys.coeffs.n(); ++c) {
        double d0 = sys.coeffs.diag[c];
        sys.coeffs.diag[c] = d0 / alpha;
        sys.source[c] += (sys.coeffs.diag[c] - d0) * u[c];
    }
}

} // namespace coanda
