#include "coanda/mesh.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coanda {

const Patch& Mesh::patch(const std::string& name) const {
    for (const auto& p : patches)
        if (p.name == name) return p;
    throw std::runtime_error("mesh: no patch named '" + name + "'");
}

bool Mesh::hasPatch(const std::string& name) const {
    for (const auto& p : patches)
        if (p.name == name) return true;
    return false;
}

void Mesh::finalise() {
    const int nf = nFaces();
    const int nc = nCells();
    faceWeight.assign(nf, 0.5);
    deltaPN.assign(nf, Vec2{});

    for (int f = 0; f < nf; ++f) {
        const Vec2& cP = cellCentre[owner[f]];
        if (f < nInteriorFaces) {
            const Vec2& cN = cellCentre[neighbour[f]];
            Vec2 d = cN - cP;
            deltaPN[f] = d;
            // projection of the face centre onto the PN line
            double dd = magSqr(d);
            if (dd <= 0.0) throw std::runtime_error("mesh: coincident cell centres");
            double t = dot(faceCentre[f] - cP, d) / dd;
            faceWeight[f] = 1.0 - std::clamp(t, 0.0, 1.0);
        } else {
            deltaPN[f] = faceCentre[f] - cP;
            faceWeight[f] = 1.0;
        }
    }

    // closedness and positivity audit
    std::vector<Vec2> sum(nc, Vec2{});
    std::vector<double> perim(nc, 0.0);
    for (int f = 0; f < nf; ++f) {
        sum[owner[f]] += faceArea[f];
        perim[owner[f]] += mag(faceArea[f]);
        if (f < nInteriorFaces) {
            sum[neighbour[f]] -= faceArea[f];
            perim[neighbour[f]] += mag(faceArea[f]);
        }
    }
    for (int c = 0; c < nc; ++c) {
        if (!(cellVolume[c] > 0.0))
            throw std::runtime_error("mesh: non-positive volume at cell " + std::to_string(c));
        if (mag(sum[c]) > 1e-12 * perim[c])
            throw std::runtime_error("mesh: open cell " + std::to_string(c));
    }
}

namespace {

double distToSegment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = magSqr(ab) > 0 ? std::clamp(dot(p - a, ab) / magSqr(ab), 0.0, 1.0) : 0.0;
    return mag(p - (a + t * ab));
}

} // namespace

void Mesh::computeWallDistance(const std::vector<std::string>& wallPatches) {
    // wall faces as segments from the stored cell corners
    struct Seg { Vec2 a, b; };
    std::vector<Seg> segs;
    for (const auto& name : wallPatches) {
        if (!hasPatch(name)) continue;
        const Patch& p = patch(name);
        for (int f = p.start; f < p.start + p.count; ++f) {
            // reconstruct the edge from centre and area vector (edge is
            // perpendicular to the area vector, length |Sf|)
            Vec2 t = unit(Vec2{-faceArea[f].y, faceArea[f].x});
            double half = 0.5 * mag(faceArea[f]);
            segs.push_back({faceCentre[f] - half * t, faceCentre[f] + half * t});
        }
    }
    wallDistance.assign(nCells(), 0.0);
    if (segs.empty()) return;
    for (int c = 0; c < nCells(); ++c) {
        double d = std::numeric_limits<double>::max();
        for (const auto& s : segs) d = std::min(d, distToSegment(cellCentre[c], s.a, s.b));
        wallDistance[c] = d;
    }
}

MeshQualityReport Mesh::qualityReport() const {
    MeshQualityReport r;
    r.minVolume = *std::min_element(cellVolume.begin(), cellVolume.end());
    for (int f = 0; f < nInteriorFaces; ++f) {
        Vec2 d = deltaPN[f];
        double cosA = dot(unit(d), unit(faceArea[f]));
        cosA = std::clamp(cosA, -1.0, 1.0);
        r.maxNonOrthoDeg = std::max(r.maxNonOrthoDeg, std::acos(cosA) * 180.0 / M_PI);
        // skewness: offset of the face centre from the PN line intersection
        const Vec2& cP = cellCentre[owner[f]];
        double t = dot(faceCentre[f] - cP, d) / magSqr(d);
        Vec2 onLine = cP + t * d;
        r.maxSkewness = std::max(r.maxSkewness, mag(faceCentre[f] - onLine) / mag(d));
    }
    // aspect ratio from per-cell face extents
    std::vector<double> maxEdge(nCells(), 0.0), minEdge(nCells(), std::numeric_limits<double>::max());
    for (int f = 0; f < nFaces(); ++f) {
        double len = mag(faceArea[f]);
        for (int c : {owner[f], f < nInteriorFaces ? neighbour[f] : -1}) {
            if (c < 0) continue;
            maxEdge[c] = std::max(maxEdge[c], len);
            minEdge[c] = std::min(minEdge[c], len);
        }
    }
    for (int c = 0; c < nCells(); ++c)
        r.maxAspectRatio = std::max(r.maxAspectRatio, maxEdge[c] / minEdge[c]);
    return r;
}

Vec2& StructuredBuilder::vertex(int i, int j) {
    const int stride = wrapI ? ni : ni + 1;
    return vertices[static_cast<size_t>(j) * stride + (wrapI ? i % ni : i)];
}

Mesh StructuredBuilder::build() const {
    Mesh m;
    const int stride = wrapI ? ni : ni + 1;
    auto vid = [&](int i, int j) { return j * stride + (wrapI ? i % ni : i); };
    auto cid = [&](int i, int j) { return j * ni + i; };

    m.points = vertices;
    m.cellCentre.resize(static_cast<size_t>(ni) * nj);
    m.cellVolume.resize(static_cast<size_t>(ni) * nj);
    m.cellPoints.resize(static_cast<size_t>(ni) * nj);

    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            std::array<int, 4> pts = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
            m.cellPoints[cid(i, j)] = pts;
            // shoelace area and centroid
            double a2 = 0.0;
            Vec2 cen{};
            for (int k = 0; k < 4; ++k) {
                const Vec2& p = vertices[pts[k]];
                const Vec2& q = vertices[pts[(k + 1) % 4]];
                double cross = p.x * q.y - q.x * p.y;
                a2 += cross;
                cen += (p + q) * cross;
            }
            double area = 0.5 * a2;
            if (!(area > 0.0))
                throw std::runtime_error("mesh generation: degenerate cell (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            m.cellVolume[cid(i, j)] = area;
            m.cellCentre[cid(i, j)] = cen / (6.0 * area);
        }
    }

    struct ProtoFace {
        int own, nei;
        Vec2 centre, area;
    };
    std::vector<ProtoFace> interior;
    struct BFace {
        std::string patch;
        int own;
        Vec2 centre, area;
    };
    std::vector<BFace> boundary;

    auto edgeGeom = [&](int va, int vb) {
        const Vec2& a = vertices[va];
        const Vec2& b = vertices[vb];
        // outward normal for a cell traversed counter-clockwise: rotate the
        // edge vector (b-a) by -90 degrees
        Vec2 e = b - a;
        return std::pair<Vec2, Vec2>{0.5 * (a + b), Vec2{e.y, -e.x}};
    };

    // i-direction faces (between cell (i,j) and (i+1,j)); east edge of cell
    // (i,j) runs from vertex (i+1,j) to (i+1,j+1)
    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            bool last = (i == ni - 1);
            auto [c, s] = edgeGeom(vid(i + 1, j), vid(i + 1, j + 1));
            if (!last) {
                interior.push_back({cid(i, j), cid(i + 1, j), c, s});
            } else if (wrapI) {
                if (cutRow[j]) {
                    // boundary pair along the cut
                    boundary.push_back({cutBackPatch, cid(i, j), c, s});
                    boundary.push_back({cutFrontPatch, cid(0, j), c, -1.0 * s});
                } else {
                    interior.push_back({cid(i, j), cid(0, j), c, s});
                }
            } else {
                std::string p = eastPatch;
                if (!eastOverride.empty() && !eastOverride[j].empty()) p = eastOverride[j];
                boundary.push_back({p, cid(i, j), c, s});
            }
        }
    }
    // west boundary of the unwrapped grid
    if (!wrapI) {
        for (int j = 0; j < nj; ++j) {
            auto [c, s] = edgeGeom(vid(0, j + 1), vid(0, j));
            std::string p = westPatch;
            if (!westOverride.empty() && !westOverride[j].empty()) p = westOverride[j];
            boundary.push_back({p, cid(0, j), c, s});
        }
    }
    // j-direction faces; north edge of cell (i,j) from vertex (i+1,j+1) to (i,j+1)
    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            auto [c, s] = edgeGeom(vid(i + 1, j + 1), vid(i, j + 1));
            if (j < nj - 1)
                interior.push_back({cid(i, j), cid(i, j + 1), c, s});
            else
                boundary.push_back({northPatch, cid(i, j), c, s});
        }
    }
    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            if (j == 0) {
                auto [c, s] = edgeGeom(vid(i, 0), vid(i + 1, 0));
                boundary.push_back({southPatch, cid(i, 0), c, s});
            }
        }
    }

    // orient interior faces owner < neighbour, then upper-triangular order
    for (auto& f : interior) {
        if (f.own > f.nei) {
            std::swap(f.own, f.nei);
            f.area = -1.0 * f.area;
        }
    }
    std::sort(interior.begin(), interior.end(), [](const ProtoFace& a, const ProtoFace& b) {
        return a.own != b.own ? a.own < b.own : a.nei < b.nei;
    });

    m.nInteriorFaces = static_cast<int>(interior.size());
    for (const auto& f : interior) {
        m.owner.push_back(f.own);
        m.neighbour.push_back(f.nei);
        m.faceCentre.push_back(f.centre);
        m.faceArea.push_back(f.area);
    }

    // group boundary faces by patch, preserving generation order within one
    std::vector<std::string> order;
    for (const auto& b : boundary)
        if (std::find(order.begin(), order.end(), b.patch) == order.end())
            order.push_back(b.patch);
    for (const auto& name : order) {
        Patch p;
        p.name = name;
        p.start = m.nFaces();
        for (const auto& b : boundary) {
            if (b.patch != name) continue;
            m.owner.push_back(b.own);
            m.neighbour.push_back(-1);
            m.faceCentre.push_back(b.centre);
            m.faceArea.push_back(b.area);
            ++p.count;
        }
        m.patches.push_back(p);
    }

    m.finalise();
    return m;
}

// --- binary cache -----------------------------------------------------------

namespace {
constexpr uint32_t kCacheMagic = 0x434d3244; // "CM2D"
constexpr uint32_t kCacheVersion = 1;

template <class T>
void writePod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void readPod(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
template <class T>
void writeVec(std::ostream& os, const std::vector<T>& v) {
    writePod(os, static_cast<uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}
template <class T>
void readVec(std::istream& is, std::vector<T>& v) {
    uint64_t n = 0;
    readPod(is, n);
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), n * sizeof(T));
}
} // namespace

void Mesh::saveCache(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("mesh cache: cannot write " + path);
    writePod(os, kCacheMagic);
    writePod(os, kCacheVersion);
    writeVec(os, cellCentre);
    writeVec(os, cellVolume);
    writeVec(os, wallDistance);
    writeVec(os, owner);
    writeVec(os, neighbour);
    writeVec(os, faceCentre);
    writeVec(os, faceArea);
    writePod(os, nInteriorFaces);
    writePod(os, static_cast<uint64_t>(patches.size()));
    for (const auto& p : patches) {
        writePod(os, static_cast<uint64_t>(p.name.size()));
        os.write(p.name.data(), p.name.size());
        writePod(os, p.start);
        writePod(os, p.count);
    }
    writeVec(os, points);
    writeVec(os, cellPoints);
}

Mesh Mesh::loadCache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("mesh cache: cannot read " + path);
    uint32_t magic = 0, version = 0;
    readPod(is, magic);
    readPod(is, version);
    if (magic != kCacheMagic || version != kCacheVersion)
        throw std::runtime_error("mesh cache: bad magic/version in " + path);
    Mesh m;
    readVec(is, m.cellCentre);
    readVec(is, m.cellVolume);
    readVec(is, m.wallDistance);
    readVec(is, m.owner);
    readVec(is, m.neighbour);
    readVec(is, m.faceCentre);
    readVec(is, m.faceArea);
    readPod(is, m.nInteriorFaces);
    uint64_t np = 0;
    readPod(is, np);
    m.patches.resize(np);
    for (auto& p : m.patches) {
        uint64_t len = 0;
        readPod(is, len);
        p.name.resize(len);
        is.read(p.name.data(), len);
        readPod(is, p.start);
        readPod(is, p.count);
    }
    readVec(is, m.points);
    readVec(is, m.cellPoints);
    if (!is) throw std::runtime_error("mesh cache: truncated file " + path);
    m.finalise();
    return m;
}

} // namespace coanda
