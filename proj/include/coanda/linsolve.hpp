#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coanda/ldu.hpp"

namespace coanda {

enum class SolverMethod { symmetricKrylov, nonsymmetricKrylov, smoother };
enum class PrecondType { none, diagonal, incompleteTriangular };

struct SolverSpec {
    SolverMethod method = SolverMethod::symmetricKrylov;
    PrecondType precond = PrecondType::incompleteTriangular;
    double tolerance = 1e-8; // absolute, on the normalised L1 residual
    double relTol = 0.1;     // reduction of the initial residual per solve
    int maxIter = 1000;
    int minIter = 0;

    void validate() const;
};

struct SolveResult {
    int iterations = 0;
    double initialResidual = 0.0;
    double finalResidual = 0.0;
    bool converged = false;
};

class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(const std::string& what) : std::runtime_error(what) {}
};

// Normalised L1 residual scale: sum(|A x - A xRef| + |b - A xRef|) with
// xRef the mean of x, floored to avoid division by zero.
double residualNormFactor(const LduSystem& sys, const std::vector<double>& x);

// Solves in place; x carries the initial guess. Non-convergence at maxIter
// is reported through the result, not an exception; a Krylov recurrence
// breakdown throws BreakdownError. normFactorOverride > 0 replaces the
// field-magnitude normalisation (used by the pressure-correction equation,
// whose natural scale is the total face flux).
SolveResult solve(const LduSystem& sys, std::vector<double>& x, const SolverSpec& spec,
                  double normFactorOverride = 0.0);

// n forward Gauss-Seidel sweeps in place. Throws on zero diagonal.
void smootherSweep(const LduSystem& sys, std::vector<double>& x, int nSweeps);

// Factorised preconditioner, exposed for the linearity property tests.
class Preconditioner {
public:
    Preconditioner(const LduSystem& sys, PrecondType type);
    void apply(const std::vector<double>& r, std::vector<double>& z) const;

private:
    const LduSystem* sys_;
    PrecondType type_;
    std::vector<double> rD_; // reciprocal factor diagonal
    bool symmetric_ = true;
};

} // namespace coanda
