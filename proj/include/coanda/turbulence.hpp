#pragma once

#include <vector>

#include "coanda/field.hpp"
#include "coanda/fvops.hpp"
#include "coanda/linsolve.hpp"

namespace coanda {

enum class TurbulenceModelKind { laminar, kOmegaSst, kOmegaSstCC, launderSharmaKE };

TurbulenceModelKind turbulenceModelFromString(const std::string& s);
bool isOmegaBased(TurbulenceModelKind kind);

struct SstConstants {
    double alpha1 = 5.0 / 9.0, beta1 = 0.075, sigmaK1 = 0.85, sigmaOmega1 = 0.5;
    double alpha2 = 0.44, beta2 = 0.0828, sigmaK2 = 1.0, sigmaOmega2 = 0.856;
    double betaStar = 0.09, a1 = 0.31;

    struct Blended {
        double sigmaK, sigmaOmega, beta, gamma;
    };
    Blended blend(double f1) const {
        auto mix = [f1](double a, double b) { return f1 * a + (1.0 - f1) * b; };
        return {mix(sigmaK1, sigmaK2), mix(sigmaOmega1, sigmaOmega2), mix(beta1, beta2),
                mix(alpha1, alpha2)};
    }
};

struct CurvatureConstants {
    double cr1 = 1.0, cr2 = 2.0, cr3 = 1.0;
};

struct LaunderSharmaConstants {
    double cMu = 0.09, c1 = 1.44, c2 = 1.92, sigmaK = 1.0, sigmaEps = 1.3;
};

// Pointwise kinematics feeding the curvature-correction function: 2D strain
// and vorticity components plus the material derivative of the strain tensor
// (advective part only in steady runs). No frame rotation anywhere here.
struct KinematicsPoint {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;
    double omega12 = 0.0;
    double ds11 = 0.0, ds12 = 0.0, ds22 = 0.0; // DS_ij/Dt
};

struct BlendingPoint {
    double f1 = 0.0, f2 = 0.0, cdKOmega = 0.0;
};

// --- pointwise formulas -----------------------------------------------------

// tanh blending functions of the SST model, CD_komega floored at 1e-10.
BlendingPoint sstBlendingPoint(double k, double omega, double nu, double wallDist,
                               double gradKdotGradOmega, const SstConstants& c);

// Spalart-Shur rotation/curvature production multiplier, clamped to [0, 1.25].
double curvatureFr1(const KinematicsPoint& kin, double omega, const CurvatureConstants& c);

// omega at a no-slip wall: 10 * 6 nu / (beta1 dy^2), dy the first-cell-centre
// distance.
double omegaWallValue(double nu, double beta1, double dy);

// Launder-Sharma damping functions of the turbulent Reynolds number.
double lsFMu(double rt);
double lsF2(double rt);

// Isotropic-turbulence estimates: k = 1.5 (|U| I)^2 plus the second variable
// for the requested model family (omega = k^0.5 / (C_mu^0.25 L),
// epsilon = C_mu^0.75 k^1.5 / L).
struct InletTurbulence {
    double k = 0.0;
    double omegaOrEpsilon = 0.0;
};
InletTurbulence isotropicInletEstimates(double uMag, double intensity, double lengthScale,
                                        TurbulenceModelKind kind);

// Streamwise-vortex inlet perturbation of the wall-normal and spanwise
// velocity; two modes of spanwise wavelength 0.3 m, amplitudes A_i.
struct Forcing {
    double v = 0.0, w = 0.0;
};
Forcing vortexForcingInlet(double y, double z, double b,
                           const std::vector<double>& amplitudes = {0.05, 0.05});

// --- transported state -------------------------------------------------------

struct TurbulenceState {
    TurbulenceModelKind kind = TurbulenceModelKind::kOmegaSst;
    ScalarField k;
    ScalarField omegaOrEpsilon;
    ScalarField nut;
    SstConstants sst;
    CurvatureConstants cc;
    LaunderSharmaConstants ls;
    double kFloor = 1e-14;
    double omegaFloor = 1e-6;
    double epsilonFloor = 1e-14;
    bool forceFr1One = false; // diagnostic hook: pins f_r1 = 1 in the CC model
    int lastClipCount = 0;

    void enforceFloors();
};

struct TurbulenceSolveInfo {
    SolveResult kSolve;
    SolveResult secondSolve;
};

// One segregated update of k and the second variable from frozen velocity
// data, followed by the eddy-viscosity update. dt <= 0 means steady.
TurbulenceSolveInfo sstUpdate(TurbulenceState& st, const VectorField& u,
                              const std::vector<Tensor2>& gradU, const FaceFluxField& flux,
                              const Mesh& mesh, double nu, double relax, DivScheme scheme,
                              const SolverSpec& solverSpec, double dt = 0.0);

TurbulenceSolveInfo launderSharmaUpdate(TurbulenceState& st, const VectorField& u,
                                        const std::vector<Tensor2>& gradU,
                                        const FaceFluxField& flux, const Mesh& mesh, double nu,
                                        double relax, DivScheme scheme,
                                        const SolverSpec& solverSpec, double dt = 0.0);

// Dispatch on st.kind; laminar is a no-op with nut = 0.
TurbulenceSolveInfo turbulenceUpdate(TurbulenceState& st, const VectorField& u,
                                     const FaceFluxField& flux, const Mesh& mesh, double nu,
                                     double relax, DivScheme scheme, const SolverSpec& solverSpec,
                                     double dt = 0.0);

// Production limiter diagnostic: volume-integrated k production actually
// assembled in the last sstUpdate, per cell (for the limiter property test).
const std::vector<double>& lastAssembledKProduction();

} // namespace coanda
