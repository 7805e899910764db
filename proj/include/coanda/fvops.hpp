#pragma once

#include <optional>
#include <vector>

#include "coanda/field.hpp"
#include "coanda/ldu.hpp"

namespace coanda {

enum class DivScheme { linear, upwind1, linearUpwind, limitedLinear };

DivScheme divSchemeFromString(const std::string& s);

// Green-Gauss cell gradients with linear face interpolation; boundary faces
// use the BC-evaluated face value.
VectorField greenGaussGrad(const ScalarField& phi, const Mesh& mesh);
std::vector<Tensor2> greenGaussGrad(const VectorField& u, const Mesh& mesh);

// Face values of phi under the given scheme. Upwind variants need the flux;
// linearUpwind needs the cell gradient field.
std::vector<double> faceInterpolate(const ScalarField& phi, const Mesh& mesh, DivScheme scheme,
                                    const FaceFluxField* flux = nullptr,
                                    const VectorField* gradPhi = nullptr);

// Linear (weights-based) face interpolation of a plain cell array.
std::vector<double> faceInterpolateLinear(const std::vector<double>& cellVals, const Mesh& mesh);

// Per-cell divergence of a face flux (sum of outward fluxes).
std::vector<double> fluxDivergence(const FaceFluxField& flux, const Mesh& mesh);

// rows implement: sum_f m_f phi_f - sum_f Gamma_f (grad phi . n)_f |Sf| = source.
// Deferred corrections (linear-upwind extrapolation, scheme limiting, the
// non-orthogonal part of diffusion) are evaluated from the current phi and
// moved to the RHS. `bounded` subtracts phi_P * div(m) from each row.
LduSystem assembleConvectionDiffusion(const ScalarField& phi, const FaceFluxField& flux,
                                      const ScalarField& gamma, const Mesh& mesh,
                                      DivScheme scheme, bool bounded = true);

// Same coefficients for both velocity components; sources kept per component.
struct VectorSystem {
    LduSystem coeffs;         // source member unused
    std::vector<Vec2> source; // per-cell RHS
};

VectorSystem assembleVectorConvectionDiffusion(const VectorField& u, const FaceFluxField& flux,
                                               const ScalarField& gammaEff, const Mesh& mesh,
                                               DivScheme scheme, bool bounded = true);

// Explicit div(gammaEff * dev2(grad(u)^T)), volume-integrated per cell; the
// transposed-stress companion of the implicit laplacian in the momentum
// equation.
std::vector<Vec2> explicitStressDivergence(const VectorField& u, const ScalarField& gammaEff,
                                           const Mesh& mesh);

// Explicit Laplacian of each velocity component (div of the Green-Gauss
// gradient), per unit volume.
std::vector<Vec2> explicitVectorLaplacian(const VectorField& u, const Mesh& mesh);

// Momentum-interpolated face fluxes: linear velocity flux minus
// dRC_f * gammaOrtho_f * [(p_N - p_P) - (grad p)_f . d_PN], which suppresses
// checkerboard pressure on the collocated grid. dCell = V/A from the most
// recent momentum coefficients. Boundary faces: fixed-value U gives the BC
// flux; elsewhere the owner velocity is extrapolated and, where p is fixed,
// the same pressure smoothing is applied.
FaceFluxField rhieChowFlux(const VectorField& u, const ScalarField& p, const VectorField& gradP,
                           const std::vector<double>& dCell, const Mesh& mesh);

// Pressure-correction equation: sum_f a_f (pc_P - pc_N) = -div(m*), with
// a_f = dCorr_f |Sf|^2 / (Sf . d). Fixed-value-p patches contribute a
// Dirichlet pc = 0 boundary coefficient. faceCoeff returns a_f for every
// face so the flux update can mirror the equation exactly.
LduSystem assemblePressureCorrection(const FaceFluxField& flux, const std::vector<double>& dCorr,
                                     const ScalarField& p, const Mesh& mesh,
                                     std::vector<double>& faceCoeff);

// Implicit under-relaxation: diag /= alpha, source += (1-alpha)/alpha * diag0 * x.
void relaxSystem(LduSystem& sys, const std::vector<double>& x, double alpha);
void relaxSystem(VectorSystem& sys, const VectorField& u, double alpha);

} // namespace coanda
