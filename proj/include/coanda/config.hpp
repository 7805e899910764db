#pragma once

#include <map>
#include <string>
#include <vector>

#include "coanda/analysis.hpp"
#include "coanda/linsolve.hpp"
#include "coanda/meshgen.hpp"
#include "coanda/pvcoupling.hpp"
#include "coanda/turbulence.hpp"

namespace coanda {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Algorithm { simple, simplec, piso };
enum class InletScaleMode { scaleToMean, scaleToPeak };
enum class TimeScheme { euler, backward };

// Tabulated inlet profile over the normalised slot coordinate eta in [0,1].
struct InletProfile {
    std::vector<double> eta;
    std::vector<double> u;

    void validate() const;
    double sample(double etaQuery) const; // linear interpolation
    double peak() const;

    static InletProfile topHat();
    static InletProfile powerLaw(double exponent, int nPoints = 41);
    static InletProfile fromCsv(const std::string& path);
};

struct CaseConfig {
    // geometry
    CaseKind kind = CaseKind::flatPlate;
    double hJet = 3.8e-2;      // flat plate slot height
    double hStandoff = 2.28e-2;
    double radius = 0.1016;    // cylinder
    double slotHeight = 2.34e-3;

    double nu = 1.59e-5;
    double uJet = 18.4;

    // grid
    bool customGrid = false;
    GridLevel level = GridLevel::coarse;
    GridSpec grid; // resolved (preset or custom)

    // turbulence
    TurbulenceModelKind model = TurbulenceModelKind::kOmegaSst;
    double intensity = 5e-4;
    double lengthScale = 0.0; // 0 = 0.07 * slot height
    SstConstants sst;
    CurvatureConstants cc;
    LaunderSharmaConstants ls;
    bool forceFr1One = false;

    // schemes
    DivScheme divU = DivScheme::linearUpwind;
    DivScheme divTurb = DivScheme::upwind1;

    // algorithm
    Algorithm algorithm = Algorithm::simplec;
    RelaxationSpec relaxation;
    int rampIterations = 0;
    double rampInitialScale = 1.0;
    int nCorrectors = 2;
    double maxCo = 0.8;
    double dtMax = 1e-4;
    double pseudoTimeCo = 0.0; // steady-run pseudo-transient continuation
    TimeScheme timeScheme = TimeScheme::euler;
    // optional late-stage damping: after `settleAfter` outer iterations the
    // run switches to these factors (kills slow far-field limit cycles)
    int settleAfter = 0;
    RelaxationSpec settleRelaxation{0.3, 0.4, 0.4, 0.4};
    double settlePseudoTimeCo = 2.0;

    // run control
    int maxIterations = 10000;
    double endTime = 0.0; // transient runs
    int writeInterval = 0;
    std::map<std::string, double> residualControl;
    bool tightFinalPressure = true;
    std::string restartFrom;

    // solvers
    SolverSpec pressureSolver{SolverMethod::symmetricKrylov, PrecondType::incompleteTriangular,
                              1e-8, 0.05, 1000, 0};
    SolverSpec momentumSolver{SolverMethod::nonsymmetricKrylov, PrecondType::incompleteTriangular,
                              1e-8, 0.1, 500, 0};
    SolverSpec turbulenceSolver{SolverMethod::nonsymmetricKrylov,
                                PrecondType::incompleteTriangular, 1e-8, 0.1, 500, 0};

    // inlet
    std::string inletProfileSpec = "power_law"; // top_hat | power_law | csv path
    double powerLawExponent = 7.0;
    InletScaleMode inletMode = InletScaleMode::scaleToMean;

    std::vector<Vec2> probes;

    // inflow through outlet patches: constrain to the boundary normal
    // (kills artificial recirculation of tangential momentum through open
    // boundaries) or keep the plain zero-gradient extrapolation
    bool outletNormalInflow = true;

    std::string outputDir = "case_out";
    std::vector<std::string> outputFormats{"vtk", "csv"};
    bool squaredCpConvention = false;

    double slotHeightOf() const { return kind == CaseKind::flatPlate ? hJet : slotHeight; }
    double lengthScaleOf() const {
        return lengthScale > 0.0 ? lengthScale : 0.07 * slotHeightOf();
    }
    InletProfile resolveInletProfile() const;
};

// Strict loader: unknown keys are errors with a nearest-key suggestion;
// wrong value types are errors naming the key and expected type.
CaseConfig loadConfig(const std::string& path);
CaseConfig parseConfig(const std::string& jsonText, const std::string& baseDir = ".");

// Per-face inlet velocity vectors (directed along the inward face normal)
// from a tabulated profile sampled at each face's slot coordinate.
std::vector<Vec2> inletVelocityBc(const InletProfile& profile, const Mesh& mesh,
                                  const std::string& patchName, const std::vector<double>& eta,
                                  double uTarget, InletScaleMode mode);

} // namespace coanda
