#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coanda/mesh.hpp"

namespace coanda {

enum class BcType {
    fixedValue,   // Dirichlet; uniform or per-face data
    zeroGradient, // Neumann zero
    calculated    // derived field, face value extrapolated like zeroGradient
};

template <class T>
struct BoundaryCondition {
    BcType type = BcType::zeroGradient;
    T uniform{};
    std::vector<T> perFace; // when non-empty, overrides `uniform`

    static BoundaryCondition fixed(T value) { return {BcType::fixedValue, value, {}}; }
    static BoundaryCondition fixedProfile(std::vector<T> values) {
        return {BcType::fixedValue, T{}, std::move(values)};
    }
    static BoundaryCondition zeroGrad() { return {BcType::zeroGradient, T{}, {}}; }
};

// Cell-centred field with one boundary condition per mesh patch.
template <class T>
class Field {
public:
    std::string name;
    std::string units;
    std::vector<T> v;
    std::vector<BoundaryCondition<T>> bcs; // parallel to mesh.patches

    Field() = default;
    Field(std::string nm, const Mesh& mesh, T init = T{}, std::string un = "")
        : name(std::move(nm)), units(std::move(un)),
          v(mesh.nCells(), init), bcs(mesh.patches.size()) {}

    T& operator[](int c) { return v[c]; }
    const T& operator[](int c) const { return v[c]; }
    int size() const { return static_cast<int>(v.size()); }

    BoundaryCondition<T>& bc(const Mesh& mesh, const std::string& patchName) {
        for (size_t i = 0; i < mesh.patches.size(); ++i)
            if (mesh.patches[i].name == patchName) return bcs[i];
        throw std::runtime_error(name + ": no patch '" + patchName + "'");
    }

    void checkComplete(const Mesh& mesh) const {
        if (v.size() != static_cast<size_t>(mesh.nCells()))
            throw std::runtime_error(name + ": value count does not match cell count");
        if (bcs.size() != mesh.patches.size())
            throw std::runtime_error(name + ": missing boundary conditions");
        for (size_t i = 0; i < bcs.size(); ++i)
            if (bcs[i].type == BcType::fixedValue && !bcs[i].perFace.empty() &&
                bcs[i].perFace.size() != static_cast<size_t>(mesh.patches[i].count))
                throw std::runtime_error(name + ": fixed-value data length mismatch on patch '" +
                                         mesh.patches[i].name + "'");
    }

    // Boundary face value for global face id f (must be a boundary face).
    T boundaryValue(const Mesh& mesh, int f) const {
        int pi = patchIndexOf(mesh, f);
        const auto& b = bcs[pi];
        if (b.type == BcType::fixedValue)
            return b.perFace.empty() ? b.uniform : b.perFace[f - mesh.patches[pi].start];
        return v[mesh.owner[f]];
    }

    static int patchIndexOf(const Mesh& mesh, int f) {
        for (size_t i = 0; i < mesh.patches.size(); ++i) {
            const Patch& p = mesh.patches[i];
            if (f >= p.start && f < p.start + p.count) return static_cast<int>(i);
        }
        throw std::runtime_error("face is not a boundary face");
    }
};

using ScalarField = Field<double>;
using VectorField = Field<Vec2>;

// Mass flux through each face (kg/s per unit depth with rho = 1), positive
// from owner to neighbour (outward on boundary faces).
struct FaceFluxField {
    std::vector<double> v;
    explicit FaceFluxField(const Mesh& mesh) : v(mesh.nFaces(), 0.0) {}
    FaceFluxField() = default;
    double& operator[](int f) { return v[f]; }
    double operator[](int f) const { return v[f]; }
};

} // namespace coanda
