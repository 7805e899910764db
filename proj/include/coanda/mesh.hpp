#pragma once

#include <array>
#include <string>
#include <vector>

#include "coanda/vec2.hpp"

namespace coanda {

// Boundary faces are stored after all interior faces, grouped per patch.
struct Patch {
    std::string name;
    int start = 0; // first face id
    int count = 0;
};

struct MeshQualityReport {
    double maxNonOrthoDeg = 0.0; // angle between Sf and owner->neighbour line
    double maxSkewness = 0.0;    // |face centre - PN intersection| / |PN|
    double minVolume = 0.0;
    double maxAspectRatio = 0.0;
};

// Face-addressed 2D mesh of one-cell-deep unit depth. Quantities are per
// unit depth: "volume" is the cell area (m^3/m) and face "area" vectors have
// magnitude equal to the edge length (m^2/m).
//
// Face ordering contract: interior faces first, sorted by (owner, neighbour)
// with owner < neighbour; then boundary faces grouped by patch. This is the
// upper-triangular order the incomplete-factorisation preconditioners need.
class Mesh {
public:
    // cells
    std::vector<Vec2> cellCentre;
    std::vector<double> cellVolume;
    std::vector<double> wallDistance;

    // faces (interior first, then boundary grouped by patch)
    std::vector<int> owner;
    std::vector<int> neighbour; // -1 on boundary faces
    std::vector<Vec2> faceCentre;
    std::vector<Vec2> faceArea; // outward from owner
    int nInteriorFaces = 0;

    std::vector<Patch> patches;

    // generation-time corner points, for export only
    std::vector<Vec2> points;
    std::vector<std::array<int, 4>> cellPoints;

    // derived metrics (filled by finalise)
    std::vector<double> faceWeight; // phi_f = w*phi_own + (1-w)*phi_nei
    std::vector<Vec2> deltaPN;      // interior: x_N - x_P; boundary: x_f - x_P

    int nCells() const { return static_cast<int>(cellVolume.size()); }
    int nFaces() const { return static_cast<int>(owner.size()); }
    int nBoundaryFaces() const { return nFaces() - nInteriorFaces; }

    const Patch& patch(const std::string& name) const;
    bool hasPatch(const std::string& name) const;

    // Computes interpolation weights and deltas, checks cell closedness and
    // positivity. Throws std::runtime_error on a defective mesh.
    void finalise();

    // Exact distance from each cell centre to the nearest point of any face
    // on the given patches.
    void computeWallDistance(const std::vector<std::string>& wallPatches);

    MeshQualityReport qualityReport() const;

    // Versioned binary cache.
    void saveCache(const std::string& path) const;
    static Mesh loadCache(const std::string& path);
};

// Assembles the face-addressed mesh from a logically structured quad grid.
// Vertex (i,j) of an (ni+1) x (nj+1) lattice; cell (i,j) has corners
// (i,j),(i+1,j),(i+1,j+1),(i,j+1). When wrapI is set, column i=ni is
// identified with i=0 except for rows listed in cutRows, which become a
// boundary face pair (cutFrontPatch owned by cell i=0, cutBackPatch owned by
// cell i=ni-1).
class StructuredBuilder {
public:
    int ni = 0, nj = 0;
    std::vector<Vec2> vertices; // (ni+1)*(nj+1), or ni*(nj+1) when wrapped
    bool wrapI = false;
    std::vector<bool> cutRow; // size nj, used only when wrapI

    std::string southPatch, northPatch; // j = 0 and j = nj boundaries
    std::string westPatch, eastPatch;   // i = 0 and i = ni (unwrapped only)
    std::string cutFrontPatch, cutBackPatch;

    // Optional per-row overrides of the west/east patch (e.g. inlet slot in
    // a larger wall). Empty string keeps the default.
    std::vector<std::string> westOverride, eastOverride;

    Vec2& vertex(int i, int j);
    Mesh build() const;
};

} // namespace coanda
