#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "coanda/meshgen.hpp"

using namespace coanda;

namespace {

// Small uniform Cartesian grid helper shared by several suites.
Mesh cartesianMesh(int ni, int nj, double lx = 1.0, double ly = 1.0) {
    StructuredBuilder b;
    b.ni = ni;
    b.nj = nj;
    b.vertices.resize(static_cast<size_t>(ni + 1) * (nj + 1));
    for (int j = 0; j <= nj; ++j)
        for (int i = 0; i <= ni; ++i)
            b.vertex(i, j) = {lx * i / ni, ly * j / nj};
    b.southPatch = "wall";
    b.northPatch = "outlet";
    b.westPatch = "inlet";
    b.eastPatch = "outlet2";
    Mesh m = b.build();
    m.computeWallDistance({"wall"});
    return m;
}

double totalVolume(const Mesh& m) {
    return std::accumulate(m.cellVolume.begin(), m.cellVolume.end(), 0.0);
}

void checkClosedness(const Mesh& m) {
    std::vector<Vec2> sum(m.nCells());
    std::vector<double> per(m.nCells(), 0.0);
    for (int f = 0; f < m.nFaces(); ++f) {
        sum[m.owner[f]] += m.faceArea[f];
        per[m.owner[f]] += mag(m.faceArea[f]);
        if (f < m.nInteriorFaces) {
            sum[m.neighbour[f]] -= m.faceArea[f];
            per[m.neighbour[f]] += mag(m.faceArea[f]);
        }
    }
    double worst = 0.0;
    for (int c = 0; c < m.nCells(); ++c) worst = std::max(worst, mag(sum[c]) / per[c]);
    CHECK(worst < 1e-12);
}

constexpr double kHj = 3.8e-2, kHs = 2.28e-2, kUPlate = 18.4, kNuPlate = 1.59e-5;
constexpr double kR = 0.1016, kB = 2.34e-3, kUCyl = 48.0, kNuCyl = 1.5e-5;

} // namespace

TEST_CASE("first cell height estimate") {
    CHECK_THROWS_AS(estimateFirstCellHeight(-1, 1e-5, 1, 1), std::domain_error);
    CHECK_THROWS_AS(estimateFirstCellHeight(1, 0, 1, 1), std::domain_error);

    CHECK(estimateFirstCellHeight(kUPlate, kNuPlate, kHj, 0.0) == 0.0);

    double d1 = estimateFirstCellHeight(kUPlate, kNuPlate, kHj, 1.0);
    CHECK(estimateFirstCellHeight(kUPlate, kNuPlate, kHj, 2.0) == doctest::Approx(2.0 * d1));

    // explicit correlation: u_tau = U sqrt(0.0135 Re^(-1/7))
    double re = kUPlate * kHj / kNuPlate;
    double uTau = kUPlate * std::sqrt(0.5 * 0.027 * std::pow(re, -1.0 / 7.0));
    CHECK(d1 == doctest::Approx(kNuPlate / uTau).epsilon(1e-12));
}

TEST_CASE("geometric spacings") {
    auto s = geometricSpacings(1e-5, 1.1, 3);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(1e-5));
    CHECK(s[1] == doctest::Approx(1.1e-5));
    CHECK(s[2] == doctest::Approx(1.21e-5));

    auto eq = geometricSpacings(2e-6, 1.0, 4);
    for (double v : eq) CHECK(v == doctest::Approx(2e-6));

    auto longSeq = geometricSpacings(1e-5, 1.029, 50);
    CHECK(longSeq.back() / longSeq.front() == doctest::Approx(std::pow(1.029, 49)));

    CHECK_THROWS(geometricSpacings(1e-5, 1.1, 0));
}

TEST_CASE("flat plate mesh: counts, patches, invariants") {
    GridSpec spec = flatPlatePreset(GridLevel::coarse);
    Mesh m = generateFlatPlateMesh(spec, kHj, kHs, kUPlate, kNuPlate);

    // grid size near the reference point count (35854 for the coarse level)
    CHECK(m.nCells() > 35854 * 0.85 * 0.85); // cells vs points: one lattice row/col less
    CHECK(m.nCells() < 35854 * 1.15);

    checkClosedness(m);

    // analytic rectangle area
    double area = (235.0 * kHj) * (470.0 * kHj);
    CHECK(totalVolume(m) == doctest::Approx(area).epsilon(1e-9));

    // inlet face heights sum exactly to H_j
    const Patch& inlet = m.patch("inlet");
    double h = 0.0;
    for (int f = inlet.start; f < inlet.start + inlet.count; ++f) h += mag(m.faceArea[f]);
    CHECK(h == doctest::Approx(kHj).epsilon(1e-12));
    // and the slot sits at [H_s, H_s + H_j]
    for (int f = inlet.start; f < inlet.start + inlet.count; ++f) {
        CHECK(m.faceCentre[f].x == doctest::Approx(0.0));
        CHECK(m.faceCentre[f].y > kHs);
        CHECK(m.faceCentre[f].y < kHs + kHj);
    }

    // first-cell-centre height below the y+ estimate
    double dyEst = estimateFirstCellHeight(kUPlate, kNuPlate, kHj, spec.targetYplus);
    const Patch& wall = m.patch("wall");
    for (int f = wall.start; f < wall.start + wall.count; ++f)
        CHECK(m.cellCentre[m.owner[f]].y <= dyEst);

    // wall distance: zero only next to walls, positive elsewhere
    for (int c = 0; c < m.nCells(); ++c) CHECK(m.wallDistance[c] > 0.0);

    CHECK(m.hasPatch("backWall"));
    CHECK(m.hasPatch("outlet"));
}

TEST_CASE("flat plate family: refinement ratio near 1.4") {
    double nCoarse = generateFlatPlateMesh(flatPlatePreset(GridLevel::coarse), kHj, kHs, kUPlate,
                                           kNuPlate)
                         .nCells();
    double nMedium = generateFlatPlateMesh(flatPlatePreset(GridLevel::medium), kHj, kHs, kUPlate,
                                           kNuPlate)
                         .nCells();
    double nFine = generateFlatPlateMesh(flatPlatePreset(GridLevel::fine), kHj, kHs, kUPlate,
                                         kNuPlate)
                       .nCells();
    // 2D: cell-count ratio ~ r^2
    CHECK(std::sqrt(nMedium / nCoarse) == doctest::Approx(1.4).epsilon(0.08));
    CHECK(std::sqrt(nFine / nMedium) == doctest::Approx(1.4).epsilon(0.08));

    CHECK(nMedium == doctest::Approx(70104).epsilon(0.15));
    CHECK(nFine == doctest::Approx(136224).epsilon(0.15));
}

TEST_CASE("cylinder mesh: counts, wall geometry, cut") {
    GridSpec spec = cylinderPreset(GridLevel::coarse);
    Mesh m = generateCylinderMesh(spec, kR, kB, kUCyl, kNuCyl);

    CHECK(m.nCells() > 59850 * 0.85 * 0.85);
    CHECK(m.nCells() < 59850 * 1.15);

    checkClosedness(m);

    // all wall faces on the cylinder surface
    const Patch& wall = m.patch("wall");
    for (int f = wall.start; f < wall.start + wall.count; ++f) {
        // chord midpoint of an inscribed polygon edge sits slightly inside
        double r = mag(m.faceCentre[f]);
        CHECK(r <= kR * (1.0 + 1e-9));
        CHECK(r > kR * 0.999);
    }

    // theta of wall faces spans (0, 360) and is monotone in generation order
    double prev = -1.0;
    for (int f = wall.start; f < wall.start + wall.count; ++f) {
        double th = cylinderTheta(m.faceCentre[f]);
        CHECK(th > 0.0);
        CHECK(th < 360.0);
        CHECK(th > prev);
        prev = th;
    }

    // inlet slot spans [R, R+b] radially at theta = 0
    const Patch& inlet = m.patch("inlet");
    double slotLen = 0.0;
    for (int f = inlet.start; f < inlet.start + inlet.count; ++f) {
        slotLen += mag(m.faceArea[f]);
        CHECK(std::abs(m.faceCentre[f].x) < 1e-12);
        CHECK(m.faceCentre[f].y > kR);
        CHECK(m.faceCentre[f].y < kR + kB + 1e-12);
        // jet direction (inward normal) points towards +x
        CHECK(unit(-1.0 * m.faceArea[f]).x == doctest::Approx(1.0));
    }
    CHECK(slotLen == doctest::Approx(kB).epsilon(1e-12));
    CHECK(m.patch("backWall").count == inlet.count);

    // polygonal annulus area (the discrete circles are inscribed polygons)
    int nth = wall.count;
    double rFar = spec.farExtent * kR;
    double polyArea = 0.5 * nth * std::sin(2.0 * M_PI / nth) * (rFar * rFar - kR * kR);
    CHECK(totalVolume(m) == doctest::Approx(polyArea).epsilon(1e-9));

    CHECK_THROWS_AS(generateCylinderMesh(spec, kR, 2.0 * kR, kUCyl, kNuCyl), std::domain_error);
}

TEST_CASE("cylinder family: counts within 15% of the reference levels") {
    double nCoarse =
        generateCylinderMesh(cylinderPreset(GridLevel::coarse), kR, kB, kUCyl, kNuCyl).nCells();
    double nMedium =
        generateCylinderMesh(cylinderPreset(GridLevel::medium), kR, kB, kUCyl, kNuCyl).nCells();
    double nFine =
        generateCylinderMesh(cylinderPreset(GridLevel::fine), kR, kB, kUCyl, kNuCyl).nCells();
    CHECK(nCoarse == doctest::Approx(59850).epsilon(0.15));
    CHECK(nMedium == doctest::Approx(117120).epsilon(0.15));
    CHECK(nFine == doctest::Approx(229152).epsilon(0.15));
    CHECK(std::sqrt(nMedium / nCoarse) == doctest::Approx(1.4).epsilon(0.08));
    CHECK(std::sqrt(nFine / nMedium) == doctest::Approx(1.4).epsilon(0.08));
}

TEST_CASE("mesh quality report") {
    Mesh cart = cartesianMesh(8, 8);
    MeshQualityReport q = cart.qualityReport();
    CHECK(q.maxNonOrthoDeg == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(q.maxSkewness == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(q.minVolume > 0.0);

    Mesh ogrid = generateCylinderMesh(cylinderPreset(GridLevel::coarse), kR, kB, kUCyl, kNuCyl);
    MeshQualityReport qo = ogrid.qualityReport();
    CHECK(qo.maxNonOrthoDeg > 0.0);
    CHECK(qo.maxNonOrthoDeg < 45.0);
    CHECK(qo.minVolume > 0.0);
}

TEST_CASE("mesh cache round trip") {
    Mesh m = cartesianMesh(5, 4);
    auto path = std::filesystem::temp_directory_path() / "coanda_mesh_test.cache";
    m.saveCache(path.string());
    Mesh r = Mesh::loadCache(path.string());
    CHECK(r.nCells() == m.nCells());
    CHECK(r.nFaces() == m.nFaces());
    CHECK(r.patches.size() == m.patches.size());
    for (int c = 0; c < m.nCells(); ++c) {
        CHECK(r.cellCentre[c].x == m.cellCentre[c].x);
        CHECK(r.cellVolume[c] == m.cellVolume[c]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("grid spec validation") {
    GridSpec s;
    s.expansionRatio = 1.6;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.expansionRatio = 1.1;
    s.nx = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
