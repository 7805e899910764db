#include "coanda/ldu.hpp"

#include <cmath>

namespace coanda {

bool LduSystem::symmetric() const {
    for (size_t f = 0; f < upper.size(); ++f)
        if (upper[f] != lower[f]) return false;
    return true;
}

bool LduSystem::diagonallyDominant() const {
    std::vector<double> offSum(n(), 0.0);
    for (int f = 0; f < mesh->nInteriorFaces; ++f) {
        offSum[mesh->owner[f]] += std::abs(upper[f]);
        offSum[mesh->neighbour[f]] += std::abs(lower[f]);
    }
    for (int c = 0; c < n(); ++c)
        if (std::abs(diag[c]) < offSum[c] * (1.0 - 1e-12)) return false;
    return true;
}

void LduSystem::matvec(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n(), 0.0);
    for (int c = 0; c < n(); ++c) y[c] = diag[c] * x[c];
    for (int f = 0; f < mesh->nInteriorFaces; ++f) {
        y[mesh->owner[f]] += upper[f] * x[mesh->neighbour[f]];
        y[mesh->neighbour[f]] += lower[f] * x[mesh->owner[f]];
    }
}

std::vector<double> LduSystem::residual(const std::vector<double>& x) const {
    std::vector<double> r;
    matvec(x, r);
    for (int c = 0; c < n(); ++c) r[c] = source[c] - r[c];
    return r;
}

std::vector<double> LduSystem::rowSums() const {
    std::vector<double> s(diag);
    for (int f = 0; f < mesh->nInteriorFaces; ++f) {
        s[mesh->owner[f]] += upper[f];
        s[mesh->neighbour[f]] += lower[f];
    }
    return s;
}

} // namespace coanda
