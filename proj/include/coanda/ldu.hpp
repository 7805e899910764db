#pragma once

#include <vector>

#include "coanda/mesh.hpp"

namespace coanda {

// Sparse system with one row per cell and off-diagonals only at face
// neighbours, stored face-addressed: row(own): ... + upper[f]*x[nei];
// row(nei): ... + lower[f]*x[own]. Structurally symmetric by construction.
class LduSystem {
public:
    const Mesh* mesh = nullptr;
    std::vector<double> diag;
    std::vector<double> upper; // coefficient of x[neighbour] in owner row
    std::vector<double> lower; // coefficient of x[owner] in neighbour row
    std::vector<double> source;

    LduSystem() = default;
    explicit LduSystem(const Mesh& m)
        : mesh(&m), diag(m.nCells(), 0.0), upper(m.nInteriorFaces, 0.0),
          lower(m.nInteriorFaces, 0.0), source(m.nCells(), 0.0) {}

    int n() const { return static_cast<int>(diag.size()); }
    bool symmetric() const;
    bool diagonallyDominant() const;

    void matvec(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> residual(const std::vector<double>& x) const;

    // b - sum of row coefficients times 1 (used by conservation checks)
    std::vector<double> rowSums() const;
};

} // namespace coanda
