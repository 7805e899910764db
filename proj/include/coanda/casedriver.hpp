#pragma once

#include <memory>
#include <string>

#include "coanda/config.hpp"
#include "coanda/io.hpp"
#include "coanda/pvcoupling.hpp"
#include "coanda/turbulence.hpp"

namespace coanda {

class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct RunResult {
    bool converged = false;
    int iterations = 0;
    double time = 0.0;
    double maxYPlus = 0.0;
    double massImbalance = 0.0;   // |sum of boundary fluxes|
    double inletFlux = 0.0;       // |sum over the inlet patch|
    double continuityMax = 0.0;   // max per-cell |div m| at the end
    std::map<std::string, EquationResidual> finalResiduals;
    std::string outputDir;
};

Mesh buildCaseMesh(const CaseConfig& cfg);

// Owns the mesh, fields and turbulence state of one case and drives the
// outer loop. The pieces are public enough for the verification suites to
// iterate manually and inspect the state.
class CaseRunner {
public:
    explicit CaseRunner(const CaseConfig& cfg);
    CaseRunner(const CaseConfig& cfg, Mesh mesh);

    // one outer iteration (steady) or one time step (piso), including the
    // turbulence update and residual bookkeeping
    OuterIterationResult iterate();

    bool convergedNow() const;
    void tightPressureSweep(); // extra sweep with a near-machine pressure solve

    // full orchestration: loop, logs, probes, divergence watch, outputs
    RunResult run();

    const Mesh& mesh() const { return mesh_; }
    CouplingState& state() { return state_; }
    const CouplingState& state() const { return state_; }
    TurbulenceState& turbulence() { return turb_; }
    const CaseConfig& config() const { return cfg_; }

    double inletFlux() const;
    double globalMassImbalance() const;
    double maxContinuityDefect() const;
    double lastDt() const { return lastDt_; }

    void writeOutputs(const std::string& dir) const;
    void loadCheckpointState(const std::string& path);

private:
    void initialiseFields();
    void refreshOutletInflow();
    ScalarField makeNuEff() const;
    RelaxationSpec rampedRelaxation() const;
    void recordTurbulence(const TurbulenceSolveInfo& info);

    CaseConfig cfg_;
    Mesh mesh_;
    CouplingState state_;
    TurbulenceState turb_;
    ScalarField nuEff_;
    VectorField uPrev_;   // previous time level (backward scheme)
    double dtPrev_ = 0.0;
    double lastDt_ = 0.0;
    bool havePrev_ = false;
};

RunResult runCase(const CaseConfig& cfg);

// Wall-normal first-cell-centre distances of a patch (for omega wall values).
std::vector<double> patchWallDistances(const Mesh& mesh, const std::string& patchName);

} // namespace coanda
