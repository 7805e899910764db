#include "coanda/pvcoupling.hpp"

#include <cmath>
#include <stdexcept>

namespace coanda {

void RelaxationSpec::validate() const {
    for (double v : {p, u, k, omega})
        if (!(v > 0.0) || v > 1.0)
            throw std::invalid_argument("relaxation factors must lie in (0, 1]");
}

namespace {

// Pressure-correction boundary conditions mirror the pressure field: pc = 0
// where p is fixed, zero-gradient elsewhere.
ScalarField makePcField(const ScalarField& p, const Mesh& mesh) {
    ScalarField pc("pc", mesh);
    for (size_t i = 0; i < p.bcs.size(); ++i)
        pc.bcs[i] = p.bcs[i].type == BcType::fixedValue
                        ? BoundaryCondition<double>::fixed(0.0)
                        : BoundaryCondition<double>::zeroGrad();
    return pc;
}

struct MomentumResult {
    EquationResidual ux, uy;
    std::vector<double> dRC;   // V / A_transport, for the flux interpolation
    std::vector<double> dCorr; // V / A for the correction step
};

// Assembles, relaxes and solves the momentum predictor in place.
MomentumResult momentumPredictor(CouplingState& state, const Mesh& mesh,
                                 const ScalarField& nuEff, const VectorField& gradP,
                                 double alphaU, bool consistent, DivScheme uScheme,
                                 const SolverSpec& spec, double dt,
                                 const VectorField* uPrev = nullptr, double dtPrev = 0.0,
                                 const PseudoTimeSpec& pseudo = {}) {
    const int n = mesh.nCells();
    VectorSystem msys =
        assembleVectorConvectionDiffusion(state.u, state.phi, nuEff, mesh, uScheme, true);

    auto stress = explicitStressDivergence(state.u, nuEff, mesh);
    for (int c = 0; c < n; ++c)
        msys.source[c] += stress[c] - mesh.cellVolume[c] * gradP[c];

    if (dt > 0.0) {
        if (uPrev && dtPrev > 0.0) {
            // variable-step second-order backward differencing
            double a = (2.0 * dt + dtPrev) / (dt * (dt + dtPrev));
            double b = -(dt + dtPrev) / (dt * dtPrev);
            double cc = dt / (dtPrev * (dt + dtPrev));
            for (int c = 0; c < n; ++c) {
                double V = mesh.cellVolume[c];
                msys.coeffs.diag[c] += a * V;
                msys.source[c] += (-b) * V * state.u[c] + (-cc) * V * (*uPrev)[c];
            }
        } else {
            for (int c = 0; c < n; ++c) {
                double a = mesh.cellVolume[c] / dt;
                msys.coeffs.diag[c] += a;
                msys.source[c] += a * state.u[c];
            }
        }
    }

    relaxSystem(msys, state.u, alphaU);

    if (pseudo.co > 0.0 && dt <= 0.0) {
        for (int c = 0; c < n; ++c) {
            double h = std::sqrt(mesh.cellVolume[c]);
            double uScale = std::max(mag(state.u[c]), pseudo.floor * pseudo.uRef);
            double a = mesh.cellVolume[c] * uScale / (pseudo.co * h);
            msys.coeffs.diag[c] += a;
            msys.source[c] += a * state.u[c];
        }
    }

    // Both interpolation and correction coefficients come from the matrix as
    // solved (relaxed, with the time term): the pressure-gradient content of
    // u* then cancels exactly in the momentum-interpolated flux.
    MomentumResult r;
    r.dRC.resize(n);
    for (int c = 0; c < n; ++c) {
        if (!std::isfinite(msys.coeffs.diag[c]) || !(msys.coeffs.diag[c] > 0.0))
            throw std::runtime_error("momentum predictor: singular diagonal at cell " +
                                     std::to_string(c));
        r.dRC[c] = mesh.cellVolume[c] / msys.coeffs.diag[c];
    }
    std::vector<double> offSum(n, 0.0);
    for (int f = 0; f < mesh.nInteriorFaces; ++f) {
        offSum[mesh.owner[f]] += msys.coeffs.upper[f];
        offSum[mesh.neighbour[f]] += msys.coeffs.lower[f];
    }
    r.dCorr.resize(n);
    for (int c = 0; c < n; ++c) {
        double a = consistent ? msys.coeffs.diag[c] + offSum[c] : msys.coeffs.diag[c];
        if (!(a > 0.0))
            throw std::runtime_error("momentum predictor: non-positive correction diagonal");
        r.dCorr[c] = mesh.cellVolume[c] / a;
    }

    // shared coefficients, per-component sources
    std::vector<double> x(n);
    LduSystem sysX = msys.coeffs;
    for (int c = 0; c < n; ++c) {
        sysX.source[c] = msys.source[c].x;
        x[c] = state.u[c].x;
    }
    SolveResult sx = solve(sysX, x, spec);
    r.ux = {sx.initialResidual, sx.finalResidual, sx.iterations};
    for (int c = 0; c < n; ++c) state.u[c].x = x[c];

    LduSystem sysY = msys.coeffs;
    for (int c = 0; c < n; ++c) {
        sysY.source[c] = msys.source[c].y;
        x[c] = state.u[c].y;
    }
    SolveResult sy = solve(sysY, x, spec);
    r.uy = {sy.initialResidual, sy.finalResidual, sy.iterations};
    for (int c = 0; c < n; ++c) state.u[c].y = x[c];
    return r;
}

// One pressure-correction sweep; updates p, u and the face fluxes. The
// residual is normalised by the total face-flux magnitude, making it a
// relative continuity error.
EquationResidual pressureCorrectionSweep(CouplingState& state, const Mesh& mesh,
                                         const std::vector<double>& dCorr, double alphaP,
                                         const SolverSpec& spec) {
    ScalarField pc = makePcField(state.p, mesh);
    std::vector<double> aFace;
    LduSystem psys = assemblePressureCorrection(state.phi, dCorr, state.p, mesh, aFace);
    double fluxScale = 0.0;
    for (int f = 0; f < mesh.nFaces(); ++f) fluxScale += std::abs(state.phi[f]);
    SolveResult sr = solve(psys, pc.v, spec, std::max(fluxScale, 1e-300));

    for (int f = 0; f < mesh.nInteriorFaces; ++f)
        state.phi[f] -= aFace[f] * (pc[mesh.neighbour[f]] - pc[mesh.owner[f]]);
    for (int f = mesh.nInteriorFaces; f < mesh.nFaces(); ++f)
        if (aFace[f] != 0.0) state.phi[f] -= aFace[f] * (0.0 - pc[mesh.owner[f]]);

    VectorField gradPc = greenGaussGrad(pc, mesh);
    for (int c = 0; c < mesh.nCells(); ++c) {
        state.u[c] -= dCorr[c] * gradPc[c];
        state.p[c] += alphaP * pc[c];
    }
    return {sr.initialResidual, sr.finalResidual, sr.iterations};
}

void continuityReport(const CouplingState& state, const Mesh& mesh, OuterIterationResult& out) {
    auto div = fluxDivergence(state.phi, mesh);
    out.continuityAfter = 0.0;
    out.continuityMax = 0.0;
    for (double d : div) {
        out.continuityAfter += std::abs(d);
        out.continuityMax = std::max(out.continuityMax, std::abs(d));
    }
}

} // namespace

OuterIterationResult simpleOuterIteration(CouplingState& state, const Mesh& mesh,
                                          const ScalarField& nuEff, const RelaxationSpec& relax,
                                          bool consistent, DivScheme uScheme,
                                          const PvSolverSpecs& specs,
                                          const PseudoTimeSpec& pseudo) {
    relax.validate();
    OuterIterationResult out;

    VectorField gradP = greenGaussGrad(state.p, mesh);
    MomentumResult mr = momentumPredictor(state, mesh, nuEff, gradP, relax.u, consistent, uScheme,
                                          specs.momentum, 0.0, nullptr, 0.0, pseudo);
    out.ux = mr.ux;
    out.uy = mr.uy;

    state.phi = rhieChowFlux(state.u, state.p, gradP, mr.dRC, mesh);
    for (double d : fluxDivergence(state.phi, mesh)) out.continuityBefore += std::abs(d);

    out.pc = pressureCorrectionSweep(state, mesh, mr.dCorr, relax.p, specs.pressure);
    continuityReport(state, mesh, out);

    state.residuals["Ux"] = out.ux;
    state.residuals["Uy"] = out.uy;
    state.residuals["p"] = out.pc;
    ++state.outerIter;
    return out;
}

OuterIterationResult pisoTimeStep(CouplingState& state, const Mesh& mesh,
                                  const ScalarField& nuEff, int nCorrectors, double dt,
                                  DivScheme uScheme, const PvSolverSpecs& specs,
                                  const VectorField* uPrev, double dtPrev) {
    if (!(dt > 0.0)) throw std::invalid_argument("piso: dt must be positive");
    if (nCorrectors < 1) throw std::invalid_argument("piso: need at least one corrector");
    OuterIterationResult out;

    // time-level-n state for the time-derivative flux correction: the old
    // velocity enters the interpolated flux smoothly, so the compact
    // (conservative) part of the old flux has to be restored per face
    const VectorField uOld = state.u;
    const FaceFluxField phiOld = state.phi;

    // consistent (SIMPLEC-style) correction diagonal: with the neighbour
    // contributions retained, the full pressure update needs no relaxation
    // at any time-step size
    VectorField gradP = greenGaussGrad(state.p, mesh);
    MomentumResult mr = momentumPredictor(state, mesh, nuEff, gradP, 1.0, true, uScheme,
                                          specs.momentum, dt, uPrev, dtPrev);
    out.ux = mr.ux;
    out.uy = mr.uy;

    const bool bdf2 = uPrev && dtPrev > 0.0;
    const double coeffN = bdf2 ? (dt + dtPrev) / (dt * dtPrev) : 1.0 / dt;
    auto addDdtFluxCorrection = [&](FaceFluxField& flux) {
        for (int f = 0; f < mesh.nFaces(); ++f) {
            const int P = mesh.owner[f];
            const bool interior = f < mesh.nInteriorFaces;
            const double w = interior ? mesh.faceWeight[f] : 1.0;
            const int N = interior ? mesh.neighbour[f] : P;
            double dF = w * mr.dRC[P] + (1.0 - w) * mr.dRC[N];
            Vec2 uf = w * uOld[P] + (1.0 - w) * uOld[N];
            flux[f] += coeffN * dF * (phiOld[f] - dot(uf, mesh.faceArea[f]));
        }
    };

    for (int corr = 0; corr < nCorrectors; ++corr) {
        gradP = greenGaussGrad(state.p, mesh);
        state.phi = rhieChowFlux(state.u, state.p, gradP, mr.dRC, mesh);
        addDdtFluxCorrection(state.phi);
        if (corr == 0)
            for (double d : fluxDivergence(state.phi, mesh)) out.continuityBefore += std::abs(d);
        out.pc = pressureCorrectionSweep(state, mesh, mr.dCorr, 1.0, specs.pressure);
    }
    continuityReport(state, mesh, out);

    state.residuals["Ux"] = out.ux;
    state.residuals["Uy"] = out.uy;
    state.residuals["p"] = out.pc;
    ++state.outerIter;
    state.time += dt;
    return out;
}

double adaptiveDt(const FaceFluxField& phi, const Mesh& mesh, double maxCo, double dtMax) {
    double dt = dtMax;
    for (int f = 0; f < mesh.nFaces(); ++f) {
        double speed = std::abs(phi[f]) / mag(mesh.faceArea[f]);
        if (speed <= 0.0) continue;
        // boundary faces: full cell-crossing distance, not centre-to-face
        double dist = (f < mesh.nInteriorFaces ? 1.0 : 2.0) * mag(mesh.deltaPN[f]);
        dt = std::min(dt, maxCo * dist / speed);
    }
    return dt;
}

bool convergenceCheck(const std::map<std::string, EquationResidual>& residuals,
                      const std::map<std::string, double>& criteria) {
    for (const auto& [name, threshold] : criteria) {
        auto it = residuals.find(name);
        if (it == residuals.end()) return false;
        if (!(it->second.initial <= threshold)) return false;
    }
    return true;
}

} // namespace coanda
