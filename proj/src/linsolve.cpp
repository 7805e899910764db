#include "coanda/linsolve.hpp"

#include <cmath>
#include <numeric>

namespace coanda {

void SolverSpec::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver spec: tolerance must be > 0");
    if (relTol < 0.0 || relTol >= 1.0)
        throw std::invalid_argument("solver spec: relTol must lie in [0, 1)");
    if (maxIter < minIter || minIter < 0)
        throw std::invalid_argument("solver spec: need maxIter >= minIter >= 0");
}

namespace {
constexpr double kSmall = 1e-300;

double l1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}
} // namespace

double residualNormFactor(const LduSystem& sys, const std::vector<double>& x) {
    const int n = sys.n();
    double xRef = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> Ax, Aref(n, 0.0), ones(n, xRef);
    sys.matvec(x, Ax);
    sys.matvec(ones, Aref);
    double s = 0.0;
    for (int c = 0; c < n; ++c)
        s += std::abs(Ax[c] - Aref[c]) + std::abs(sys.source[c] - Aref[c]);
    return std::max(s, kSmall);
}

Preconditioner::Preconditioner(const LduSystem& sys, PrecondType type)
    : sys_(&sys), type_(type), symmetric_(sys.symmetric()) {
    const Mesh& m = *sys.mesh;
    rD_ = sys.diag;
    if (type_ == PrecondType::incompleteTriangular) {
        // zero-fill incomplete factorisation over the mesh sparsity; relies
        // on the upper-triangular face ordering of the mesh
        for (int f = 0; f < m.nInteriorFaces; ++f)
            rD_[m.neighbour[f]] -= sys.upper[f] * sys.lower[f] / rD_[m.owner[f]];
    }
    for (double& d : rD_) {
        if (d == 0.0) throw std::runtime_error("preconditioner: zero pivot");
        d = 1.0 / d;
    }
}

void Preconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
    const Mesh& m = *sys_->mesh;
    const int n = sys_->n();
    z.resize(n);
    if (type_ == PrecondType::none) {
        z = r;
        return;
    }
    for (int c = 0; c < n; ++c) z[c] = rD_[c] * r[c];
    if (type_ == PrecondType::diagonal) return;
    for (int f = 0; f < m.nInteriorFaces; ++f)
        z[m.neighbour[f]] -= rD_[m.neighbour[f]] * sys_->lower[f] * z[m.owner[f]];
    for (int f = m.nInteriorFaces - 1; f >= 0; --f)
        z[m.owner[f]] -= rD_[m.owner[f]] * sys_->upper[f] * z[m.neighbour[f]];
}

namespace {

struct Adjacency {
    std::vector<int> offsets;
    std::vector<int> cols;
    std::vector<double> coeffs;

    explicit Adjacency(const LduSystem& sys) {
        const Mesh& m = *sys.mesh;
        const int n = sys.n();
        std::vector<int> counts(n, 0);
        for (int f = 0; f < m.nInteriorFaces; ++f) {
            ++counts[m.owner[f]];
            ++counts[m.neighbour[f]];
        }
        offsets.assign(n + 1, 0);
        for (int c = 0; c < n; ++c) offsets[c + 1] = offsets[c] + counts[c];
        cols.resize(offsets[n]);
        coeffs.resize(offsets[n]);
        std::vector<int> at(offsets.begin(), offsets.end() - 1);
        for (int f = 0; f < m.nInteriorFaces; ++f) {
            int P = m.owner[f], N = m.neighbour[f];
            cols[at[P]] = N;
            coeffs[at[P]++] = sys.upper[f];
            cols[at[N]] = P;
            coeffs[at[N]++] = sys.lower[f];
        }
    }
};

double normalisedResidual(const LduSystem& sys, const std::vector<double>& x, double normFactor) {
    return l1(sys.residual(x)) / normFactor;
}

SolveResult pcg(const LduSystem& sys, std::vector<double>& x, const SolverSpec& spec,
                double normFactorOverride) {
    const int n = sys.n();
    SolveResult res;
    Preconditioner M(sys, spec.precond);

    double normFactor =
        normFactorOverride > 0.0 ? normFactorOverride : residualNormFactor(sys, x);
    std::vector<double> r = sys.residual(x);
    res.initialResidual = l1(r) / normFactor;
    res.finalResidual = res.initialResidual;
    const double target = std::max(spec.tolerance, spec.relTol * res.initialResidual);
    if (res.initialResidual <= target && spec.minIter == 0) {
        res.converged = true;
        return res;
    }

    std::vector<double> z(n), p(n), Ap(n);
    double rhoOld = 0.0;
    for (int it = 0; it < spec.maxIter; ++it) {
        M.apply(r, z);
        double rho = 0.0;
        for (int c = 0; c < n; ++c) rho += r[c] * z[c];
        if (it == 0) {
            p = z;
        } else {
            if (std::abs(rhoOld) < kSmall) throw BreakdownError("pcg: rho breakdown");
            double beta = rho / rhoOld;
            for (int c = 0; c < n; ++c) p[c] = z[c] + beta * p[c];
        }
        sys.matvec(p, Ap);
        double pAp = 0.0;
        for (int c = 0; c < n; ++c) pAp += p[c] * Ap[c];
        if (std::abs(pAp) < kSmall) throw BreakdownError("pcg: pAp breakdown");
        double alpha = rho / pAp;
        for (int c = 0; c < n; ++c) {
            x[c] += alpha * p[c];
            r[c] -= alpha * Ap[c];
        }
        rhoOld = rho;
        res.iterations = it + 1;
        res.finalResidual = l1(r) / normFactor;
        if (res.finalResidual <= target && res.iterations >= spec.minIter) {
            res.converged = true;
            return res;
        }
    }
    res.converged = res.finalResidual <= target;
    return res;
}

SolveResult bicgstab(const LduSystem& sys, std::vector<double>& x, const SolverSpec& spec,
                     double normFactorOverride) {
    const int n = sys.n();
    SolveResult res;
    Preconditioner M(sys, spec.precond);

    double normFactor =
        normFactorOverride > 0.0 ? normFactorOverride : residualNormFactor(sys, x);
    std::vector<double> r = sys.residual(x);
    res.initialResidual = l1(r) / normFactor;
    res.finalResidual = res.initialResidual;
    const double target = std::max(spec.tolerance, spec.relTol * res.initialResidual);
    if (res.initialResidual <= target && spec.minIter == 0) {
        res.converged = true;
        return res;
    }

    std::vector<double> rTilde = r, p(n, 0.0), v(n, 0.0), pHat(n), s(n), sHat(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < spec.maxIter; ++it) {
        double rho1 = 0.0;
        for (int c = 0; c < n; ++c) rho1 += rTilde[c] * r[c];
        if (std::abs(rho1) < kSmall) throw BreakdownError("bicgstab: rho breakdown");
        if (it == 0) {
            p = r;
        } else {
            double beta = (rho1 / rho) * (alpha / omega);
            for (int c = 0; c < n; ++c) p[c] = r[c] + beta * (p[c] - omega * v[c]);
        }
        M.apply(p, pHat);
        sys.matvec(pHat, v);
        double rtv = 0.0;
        for (int c = 0; c < n; ++c) rtv += rTilde[c] * v[c];
        if (std::abs(rtv) < kSmall) throw BreakdownError("bicgstab: rTilde.v breakdown");
        alpha = rho1 / rtv;
        for (int c = 0; c < n; ++c) s[c] = r[c] - alpha * v[c];

        if (l1(s) / normFactor <= target) {
            for (int c = 0; c < n; ++c) x[c] += alpha * pHat[c];
            r = s;
            res.iterations = it + 1;
            res.finalResidual = l1(r) / normFactor;
            if (res.iterations >= spec.minIter) {
                res.converged = true;
                return res;
            }
        }

        M.apply(s, sHat);
        sys.matvec(sHat, t);
        double tt = 0.0, ts = 0.0;
        for (int c = 0; c < n; ++c) {
            tt += t[c] * t[c];
            ts += t[c] * s[c];
        }
        if (tt < kSmall) throw BreakdownError("bicgstab: t.t breakdown");
        omega = ts / tt;
        for (int c = 0; c < n; ++c) {
            x[c] += alpha * pHat[c] + omega * sHat[c];
            r[c] = s[c] - omega * t[c];
        }
        rho = rho1;
        res.iterations = it + 1;
        res.finalResidual = l1(r) / normFactor;
        if (res.finalResidual <= target && res.iterations >= spec.minIter) {
            res.converged = true;
            return res;
        }
        if (std::abs(omega) < kSmall) throw BreakdownError("bicgstab: omega breakdown");
    }
    res.converged = res.finalResidual <= target;
    return res;
}

} // namespace

void smootherSweep(const LduSystem& sys, std::vector<double>& x, int nSweeps) {
    for (int c = 0; c < sys.n(); ++c)
        if (sys.diag[c] == 0.0)
            throw std::runtime_error("smoother: zero diagonal at row " + std::to_string(c));
    Adjacency adj(sys);
    for (int sweep = 0; sweep < nSweeps; ++sweep) {
        for (int c = 0; c < sys.n(); ++c) {
            double b = sys.source[c];
            for (int k = adj.offsets[c]; k < adj.offsets[c + 1]; ++k)
                b -= adj.coeffs[k] * x[adj.cols[k]];
            x[c] = b / sys.diag[c];
        }
    }
}

SolveResult solve(const LduSystem& sys, std::vector<double>& x, const SolverSpec& spec,
                  double normFactorOverride) {
    spec.validate();
    if (spec.method == SolverMethod::symmetricKrylov) {
        if (!sys.symmetric())
            throw std::invalid_argument("solve: symmetric method on a non-symmetric system");
        return pcg(sys, x, spec, normFactorOverride);
    }
    if (spec.method == SolverMethod::nonsymmetricKrylov)
        return bicgstab(sys, x, spec, normFactorOverride);

    // stationary smoother as a solver
    SolveResult res;
    double normFactor =
        normFactorOverride > 0.0 ? normFactorOverride : residualNormFactor(sys, x);
    res.initialResidual = normalisedResidual(sys, x, normFactor);
    res.finalResidual = res.initialResidual;
    const double target = std::max(spec.tolerance, spec.relTol * res.initialResidual);
    while (res.iterations < spec.maxIter) {
        smootherSweep(sys, x, 1);
        ++res.iterations;
        res.finalResidual = normalisedResidual(sys, x, normFactor);
        if (res.finalResidual <= target && res.iterations >= spec.minIter) break;
    }
    res.converged = res.finalResidual <= target;
    return res;
}

} // namespace coanda
