#pragma once

#include <map>
#include <string>

#include "coanda/field.hpp"
#include "coanda/fvops.hpp"
#include "coanda/linsolve.hpp"

namespace coanda {

// Field relaxation applies to the pressure update, equation relaxation
// boosts the momentum/turbulence matrix diagonals.
struct RelaxationSpec {
    double p = 0.7;
    double u = 0.8;
    double k = 0.8;
    double omega = 0.8;

    void validate() const; // all in (0, 1]
    RelaxationSpec scaled(double f) const {
        auto clampUnit = [](double v) { return std::min(v, 1.0); };
        return {clampUnit(p * f), clampUnit(u * f), clampUnit(k * f), clampUnit(omega * f)};
    }
};

struct EquationResidual {
    double initial = 0.0;
    double final = 0.0;
    int iterations = 0;
};

struct CouplingState {
    VectorField u;
    ScalarField p;
    FaceFluxField phi;
    std::map<std::string, EquationResidual> residuals;
    int outerIter = 0;
    double time = 0.0;
};

struct PvSolverSpecs {
    SolverSpec pressure{SolverMethod::symmetricKrylov, PrecondType::incompleteTriangular,
                        1e-8, 0.05, 1000, 0};
    SolverSpec momentum{SolverMethod::nonsymmetricKrylov, PrecondType::incompleteTriangular,
                        1e-8, 0.1, 500, 0};
};

// Pseudo-transient continuation for the steady algorithms: adds a local
// time-step diagonal V/dtau with dtau = co * sqrt(V) / max(|u|, floor*uRef).
// It scales with the cell metrics instead of the transport coefficients, so
// it bounds the velocity response of quiescent far-field cells where the
// implicit relaxation (proportional to the near-zero transport diagonal)
// cannot. Contributes nothing at a converged state. co <= 0 disables it.
struct PseudoTimeSpec {
    double co = 0.0;
    double uRef = 1.0;
    double floor = 0.02;
};

struct OuterIterationResult {
    EquationResidual ux, uy, pc;
    double continuityBefore = 0.0; // sum |div m*| after the predictor
    double continuityAfter = 0.0;  // sum |div m| after the correction
    double continuityMax = 0.0;    // max per-cell |div m| after the correction
};

// One SIMPLE(C) outer iteration: under-relaxed momentum predictor,
// momentum-interpolated fluxes, pressure-correction solve, field updates
// p += alpha_p pc, u += -d grad(pc), m += -a dpc. `consistent` selects the
// SIMPLEC correction diagonal (A + sum of neighbour coefficients).
OuterIterationResult simpleOuterIteration(CouplingState& state, const Mesh& mesh,
                                          const ScalarField& nuEff, const RelaxationSpec& relax,
                                          bool consistent, DivScheme uScheme,
                                          const PvSolverSpecs& specs,
                                          const PseudoTimeSpec& pseudo = {});

// One PISO time step: momentum predictor with an implicit time term and no
// under-relaxation, then nCorrectors pressure-correction sweeps. Implicit
// Euler by default; passing the n-1 level (uPrev with its step dtPrev)
// selects second-order backward differencing.
OuterIterationResult pisoTimeStep(CouplingState& state, const Mesh& mesh,
                                  const ScalarField& nuEff, int nCorrectors, double dt,
                                  DivScheme uScheme, const PvSolverSpecs& specs,
                                  const VectorField* uPrev = nullptr, double dtPrev = 0.0);

// dt = min(dtMax, maxCo * min over faces of cell distance / face speed).
double adaptiveDt(const FaceFluxField& phi, const Mesh& mesh, double maxCo, double dtMax);

// All monitored residuals at or below their thresholds (<= semantics); an
// equation named in the criteria but never solved counts as unconverged.
bool convergenceCheck(const std::map<std::string, EquationResidual>& residuals,
                      const std::map<std::string, double>& criteria);

} // namespace coanda
