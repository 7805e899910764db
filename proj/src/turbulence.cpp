#include "coanda/turbulence.hpp"

#include <cmath>
#include <stdexcept>

namespace coanda {

TurbulenceModelKind turbulenceModelFromString(const std::string& s) {
    if (s == "laminar") return TurbulenceModelKind::laminar;
    if (s == "kOmegaSST") return TurbulenceModelKind::kOmegaSst;
    if (s == "kOmegaSST-CC") return TurbulenceModelKind::kOmegaSstCC;
    if (s == "LaunderSharmaKE") return TurbulenceModelKind::launderSharmaKE;
    throw std::invalid_argument("unknown turbulence model '" + s + "'");
}

bool isOmegaBased(TurbulenceModelKind kind) {
    return kind == TurbulenceModelKind::kOmegaSst || kind == TurbulenceModelKind::kOmegaSstCC;
}

BlendingPoint sstBlendingPoint(double k, double omega, double nu, double wallDist,
                               double gradKdotGradOmega, const SstConstants& c) {
    if (!(omega > 0.0) || !(wallDist > 0.0))
        throw std::domain_error("sst blending: omega and wall distance must be positive");
    BlendingPoint b;
    b.cdKOmega = std::max(2.0 * c.sigmaOmega2 / omega * gradKdotGradOmega, 1e-10);
    double sqrtK = std::sqrt(std::max(k, 0.0));
    double arg1a = sqrtK / (c.betaStar * omega * wallDist);
    double arg1b = 500.0 * nu / (wallDist * wallDist * omega);
    double arg1c = 4.0 * c.sigmaOmega2 * k / (b.cdKOmega * wallDist * wallDist);
    double arg1 = std::min(std::max(arg1a, arg1b), arg1c);
    b.f1 = std::tanh(std::pow(arg1, 4));
    double arg2 = std::max(arg1a, arg1b);
    b.f2 = std::tanh(arg2 * arg2);
    return b;
}

double curvatureFr1(const KinematicsPoint& kin, double omega, const CurvatureConstants& c) {
    const double s2 = 2.0 * (kin.s11 * kin.s11 + kin.s22 * kin.s22 + 2.0 * kin.s12 * kin.s12);
    const double w2 = 4.0 * kin.omega12 * kin.omega12;
    const double magS = std::sqrt(s2);
    const double magW = std::sqrt(w2);

    const double wFloor = 1e-30;
    double rStar = magS / std::max(magW, wFloor);

    // 2 Omega_ik S_jk DS_ij/Dt contracted in 2D (symmetric DS/Dt)
    double numer = 2.0 * kin.omega12 *
                   (kin.s12 * (kin.ds11 - kin.ds22) + (kin.s22 - kin.s11) * kin.ds12);
    double d2 = std::max(s2, 0.09 * omega * omega);
    double rTilde = 2.0 * numer / std::max(magW * d2 * std::sqrt(d2), wFloor);

    double fr1 = (1.0 + c.cr1) * (2.0 * rStar / (1.0 + rStar)) *
                 (1.0 - c.cr3 * std::atan(c.cr2 * rTilde));
    return std::max(std::min(fr1, 1.25), 0.0);
}

double omegaWallValue(double nu, double beta1, double dy) {
    if (!(dy > 0.0)) throw std::domain_error("omega wall value: dy must be positive");
    return 10.0 * 6.0 * nu / (beta1 * dy * dy);
}

double lsFMu(double rt) {
    double d = 1.0 + rt / 50.0;
    return std::exp(-3.4 / (d * d));
}

double lsF2(double rt) { return 1.0 - 0.3 * std::exp(-std::min(rt * rt, 700.0)); }

InletTurbulence isotropicInletEstimates(double uMag, double intensity, double lengthScale,
                                        TurbulenceModelKind kind) {
    const double cMu = 0.09;
    InletTurbulence t;
    t.k = 1.5 * (uMag * intensity) * (uMag * intensity);
    if (isOmegaBased(kind) || kind == TurbulenceModelKind::laminar)
        t.omegaOrEpsilon = std::pow(cMu, -0.25) * std::sqrt(t.k) / lengthScale;
    else
        t.omegaOrEpsilon = std::pow(cMu, 0.75) * std::pow(t.k, 1.5) / lengthScale;
    return t;
}

Forcing vortexForcingInlet(double y, double z, double b, const std::vector<double>& amplitudes) {
    if (y < 0.0 || y > b)
        throw std::domain_error("vortex forcing: y must lie within the slot [0, b]");
    const double spanWavelength = 0.3;
    Forcing f;
    double sy = std::sin(M_PI * y / b);
    for (size_t i = 0; i < amplitudes.size(); ++i) {
        double phase = 2.0 * M_PI * static_cast<double>(i + 1) * z / spanWavelength;
        f.v += amplitudes[i] * std::cos(phase) * sy;
        f.w += amplitudes[i] * std::sin(phase) * sy;
    }
    return f;
}

void TurbulenceState::enforceFloors() {
    lastClipCount = 0;
    const double floor2 = isOmegaBased(kind) ? omegaFloor : epsilonFloor;
    for (int c = 0; c < k.size(); ++c) {
        if (k[c] < kFloor) {
            k[c] = kFloor;
            ++lastClipCount;
        }
        if (omegaOrEpsilon[c] < floor2) {
            omegaOrEpsilon[c] = floor2;
            ++lastClipCount;
        }
    }
}

namespace {
std::vector<double> g_lastKProduction;

void addDdt(LduSystem& sys, const ScalarField& old, const Mesh& mesh, double dt) {
    if (dt <= 0.0) return;
    for (int c = 0; c < mesh.nCells(); ++c) {
        double a = mesh.cellVolume[c] / dt;
        sys.diag[c] += a;
        sys.source[c] += a * old[c];
    }
}
} // namespace

const std::vector<double>& lastAssembledKProduction() { return g_lastKProduction; }

TurbulenceSolveInfo sstUpdate(TurbulenceState& st, const VectorField& u,
                              const std::vector<Tensor2>& gradU, const FaceFluxField& flux,
                              const Mesh& mesh, double nu, double relax, DivScheme scheme,
                              const SolverSpec& solverSpec, double dt) {
    const int n = mesh.nCells();
    const SstConstants& cs = st.sst;
    const bool cc = st.kind == TurbulenceModelKind::kOmegaSstCC;

    VectorField gradK = greenGaussGrad(st.k, mesh);
    VectorField gradW = greenGaussGrad(st.omegaOrEpsilon, mesh);

    std::vector<double> f1(n), f2(n), magSqrS(n), fr1(n, 1.0);
    for (int c = 0; c < n; ++c) {
        double s11 = gradU[c].xx, s22 = gradU[c].yy;
        double s12 = 0.5 * (gradU[c].xy + gradU[c].yx);
        magSqrS[c] = 2.0 * (s11 * s11 + s22 * s22 + 2.0 * s12 * s12);
        BlendingPoint b = sstBlendingPoint(st.k[c], st.omegaOrEpsilon[c], nu,
                                           std::max(mesh.wallDistance[c], 1e-300),
                                           dot(gradK[c], gradW[c]), cs);
        f1[c] = b.f1;
        f2[c] = b.f2;
    }

    if (cc) {
        // strain tensor fields and their advective material derivative
        ScalarField s11f("S11", mesh), s12f("S12", mesh), s22f("S22", mesh);
        for (int c = 0; c < n; ++c) {
            s11f[c] = gradU[c].xx;
            s22f[c] = gradU[c].yy;
            s12f[c] = 0.5 * (gradU[c].xy + gradU[c].yx);
        }
        VectorField g11 = greenGaussGrad(s11f, mesh);
        VectorField g12 = greenGaussGrad(s12f, mesh);
        VectorField g22 = greenGaussGrad(s22f, mesh);
        for (int c = 0; c < n; ++c) {
            KinematicsPoint kin;
            kin.s11 = s11f[c];
            kin.s12 = s12f[c];
            kin.s22 = s22f[c];
            kin.omega12 = 0.5 * (gradU[c].xy - gradU[c].yx);
            kin.ds11 = dot(u[c], g11[c]);
            kin.ds12 = dot(u[c], g12[c]);
            kin.ds22 = dot(u[c], g22[c]);
            fr1[c] = curvatureFr1(kin, st.omegaOrEpsilon[c], st.cc);
            if (st.forceFr1One) fr1[c] = 1.0;
        }
    }

    TurbulenceSolveInfo info;
    g_lastKProduction.assign(n, 0.0);

    // k transport
    {
        ScalarField dkEff("DkEff", mesh, 0.0);
        dkEff.bcs.assign(mesh.patches.size(), BoundaryCondition<double>{BcType::calculated, 0, {}});
        for (int c = 0; c < n; ++c)
            dkEff[c] = nu + cs.blend(f1[c]).sigmaK * st.nut[c];

        LduSystem sys = assembleConvectionDiffusion(st.k, flux, dkEff, mesh, scheme, true);
        addDdt(sys, st.k, mesh, dt);
        for (int c = 0; c < n; ++c) {
            double pk = st.nut[c] * magSqrS[c] * fr1[c];
            double pkLimited = std::min(pk, 10.0 * cs.betaStar * st.k[c] * st.omegaOrEpsilon[c]);
            g_lastKProduction[c] = pkLimited;
            sys.source[c] += pkLimited * mesh.cellVolume[c];
            sys.diag[c] += cs.betaStar * st.omegaOrEpsilon[c] * mesh.cellVolume[c];
        }
        relaxSystem(sys, st.k.v, relax);
        info.kSolve = solve(sys, st.k.v, solverSpec);
    }

    // omega transport
    {
        ScalarField dwEff("DomegaEff", mesh, 0.0);
        dwEff.bcs.assign(mesh.patches.size(), BoundaryCondition<double>{BcType::calculated, 0, {}});
        for (int c = 0; c < n; ++c)
            dwEff[c] = nu + cs.blend(f1[c]).sigmaOmega * st.nut[c];

        LduSystem sys =
            assembleConvectionDiffusion(st.omegaOrEpsilon, flux, dwEff, mesh, scheme, true);
        addDdt(sys, st.omegaOrEpsilon, mesh, dt);
        for (int c = 0; c < n; ++c) {
            auto bl = cs.blend(f1[c]);
            double V = mesh.cellVolume[c];
            sys.source[c] += bl.gamma * magSqrS[c] * fr1[c] * V;
            sys.diag[c] += bl.beta * st.omegaOrEpsilon[c] * V;
            double cd = 2.0 * (1.0 - f1[c]) * cs.sigmaOmega2 / st.omegaOrEpsilon[c] *
                        dot(gradK[c], gradW[c]) * V;
            if (cd >= 0.0)
                sys.source[c] += cd;
            else
                sys.diag[c] += -cd / std::max(st.omegaOrEpsilon[c], st.omegaFloor);
        }
        relaxSystem(sys, st.omegaOrEpsilon.v, relax);
        info.secondSolve = solve(sys, st.omegaOrEpsilon.v, solverSpec);
    }

    st.enforceFloors();
    for (int c = 0; c < n; ++c) {
        double magS = std::sqrt(magSqrS[c]);
        st.nut[c] = cs.a1 * st.k[c] / std::max(cs.a1 * st.omegaOrEpsilon[c], magS * f2[c]);
        st.nut[c] = std::max(st.nut[c], 0.0);
    }
    return info;
}

TurbulenceSolveInfo launderSharmaUpdate(TurbulenceState& st, const VectorField& u,
                                        const std::vector<Tensor2>& gradU,
                                        const FaceFluxField& flux, const Mesh& mesh, double nu,
                                        double relax, DivScheme scheme,
                                        const SolverSpec& solverSpec, double dt) {
    const int n = mesh.nCells();
    const LaunderSharmaConstants& cs = st.ls;

    std::vector<double> magSqrS(n), prodK(n);
    for (int c = 0; c < n; ++c) {
        double s11 = gradU[c].xx, s22 = gradU[c].yy;
        double s12 = 0.5 * (gradU[c].xy + gradU[c].yx);
        magSqrS[c] = 2.0 * (s11 * s11 + s22 * s22 + 2.0 * s12 * s12);
        prodK[c] = st.nut[c] * magSqrS[c];
    }

    // D = 2 nu |grad sqrt(k)|^2 (wall dissipation), E = 2 nu nu_t |lap U|^2
    ScalarField sqrtK("sqrt(k)", mesh);
    sqrtK.bcs.clear();
    for (const auto& b : st.k.bcs) {
        BoundaryCondition<double> sb = b;
        sb.uniform = b.uniform > 0 ? std::sqrt(b.uniform) : 0.0;
        for (auto& pv : sb.perFace) pv = pv > 0 ? std::sqrt(pv) : 0.0;
        sqrtK.bcs.push_back(sb);
    }
    for (int c = 0; c < n; ++c) sqrtK[c] = std::sqrt(std::max(st.k[c], 0.0));
    VectorField gradSqrtK = greenGaussGrad(sqrtK, mesh);
    auto lapU = explicitVectorLaplacian(u, mesh);

    std::vector<double> bigD(n), bigE(n), rt(n);
    for (int c = 0; c < n; ++c) {
        bigD[c] = 2.0 * nu * magSqr(gradSqrtK[c]);
        bigE[c] = 2.0 * nu * st.nut[c] * magSqr(lapU[c]);
        double epsSafe = std::max(st.omegaOrEpsilon[c], st.epsilonFloor);
        rt[c] = st.k[c] * st.k[c] / (epsSafe * nu);
    }

    TurbulenceSolveInfo info;

    // k transport
    {
        ScalarField dkEff("DkEff", mesh, 0.0);
        dkEff.bcs.assign(mesh.patches.size(), BoundaryCondition<double>{BcType::calculated, 0, {}});
        for (int c = 0; c < n; ++c) dkEff[c] = nu + st.nut[c] / cs.sigmaK;
        LduSystem sys = assembleConvectionDiffusion(st.k, flux, dkEff, mesh, scheme, true);
        addDdt(sys, st.k, mesh, dt);
        for (int c = 0; c < n; ++c) {
            double V = mesh.cellVolume[c];
            sys.source[c] += prodK[c] * V;
            double kSafe = std::max(st.k[c], st.kFloor);
            sys.diag[c] += (st.omegaOrEpsilon[c] + bigD[c]) / kSafe * V;
        }
        relaxSystem(sys, st.k.v, relax);
        info.kSolve = solve(sys, st.k.v, solverSpec);
    }

    // homogeneous dissipation transport
    {
        ScalarField deEff("DepsilonEff", mesh, 0.0);
        deEff.bcs.assign(mesh.patches.size(), BoundaryCondition<double>{BcType::calculated, 0, {}});
        for (int c = 0; c < n; ++c) deEff[c] = nu + st.nut[c] / cs.sigmaEps;
        LduSystem sys =
            assembleConvectionDiffusion(st.omegaOrEpsilon, flux, deEff, mesh, scheme, true);
        addDdt(sys, st.omegaOrEpsilon, mesh, dt);
        for (int c = 0; c < n; ++c) {
            double V = mesh.cellVolume[c];
            double kSafe = std::max(st.k[c], st.kFloor);
            double f1damp = 1.0; // Launder-Sharma uses f1 = 1
            sys.source[c] += (cs.c1 * f1damp * st.omegaOrEpsilon[c] / kSafe * prodK[c] + bigE[c]) * V;
            sys.diag[c] += cs.c2 * lsF2(rt[c]) * st.omegaOrEpsilon[c] / kSafe * V;
        }
        relaxSystem(sys, st.omegaOrEpsilon.v, relax);
        info.secondSolve = solve(sys, st.omegaOrEpsilon.v, solverSpec);
    }

    st.enforceFloors();
    for (int c = 0; c < n; ++c) {
        double epsSafe = std::max(st.omegaOrEpsilon[c], st.epsilonFloor);
        double rtNew = st.k[c] * st.k[c] / (epsSafe * nu);
        st.nut[c] = std::max(cs.cMu * lsFMu(rtNew) * st.k[c] * st.k[c] / epsSafe, 0.0);
    }
    return info;
}

TurbulenceSolveInfo turbulenceUpdate(TurbulenceState& st, const VectorField& u,
                                     const FaceFluxField& flux, const Mesh& mesh, double nu,
                                     double relax, DivScheme scheme, const SolverSpec& solverSpec,
                                     double dt) {
    if (st.kind == TurbulenceModelKind::laminar) return {};
    auto gradU = greenGaussGrad(u, mesh);
    if (st.kind == TurbulenceModelKind::launderSharmaKE)
        return launderSharmaUpdate(st, u, gradU, flux, mesh, nu, relax, scheme, solverSpec, dt);
    return sstUpdate(st, u, gradU, flux, mesh, nu, relax, scheme, solverSpec, dt);
}

} // namespace coanda
