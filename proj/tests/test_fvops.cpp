#include <doctest.h>

#include <cmath>

#include "coanda/fvops.hpp"
#include "coanda/linsolve.hpp"
#include "oracles.hpp"

using namespace coanda;

namespace {

Mesh cartesianMesh(int ni, int nj, double lx = 1.0, double ly = 1.0) {
    StructuredBuilder b;
    b.ni = ni;
    b.nj = nj;
    b.vertices.resize(static_cast<size_t>(ni + 1) * (nj + 1));
    for (int j = 0; j <= nj; ++j)
        for (int i = 0; i <= ni; ++i)
            b.vertex(i, j) = {lx * i / ni, ly * j / nj};
    b.southPatch = "south";
    b.northPatch = "north";
    b.westPatch = "west";
    b.eastPatch = "east";
    return b.build();
}

ScalarField fieldOf(const Mesh& m, const std::function<double(double, double)>& f,
                    BcType bc = BcType::zeroGradient) {
    ScalarField phi("phi", m);
    for (int c = 0; c < m.nCells(); ++c) phi[c] = f(m.cellCentre[c].x, m.cellCentre[c].y);
    if (bc == BcType::fixedValue) {
        for (size_t i = 0; i < m.patches.size(); ++i) {
            const Patch& p = m.patches[i];
            std::vector<double> vals(p.count);
            for (int k = 0; k < p.count; ++k)
                vals[k] = f(m.faceCentre[p.start + k].x, m.faceCentre[p.start + k].y);
            phi.bcs[i] = BoundaryCondition<double>::fixedProfile(vals);
        }
    }
    return phi;
}

FaceFluxField uniformFlux(const Mesh& m, Vec2 u) {
    FaceFluxField flux(m);
    for (int f = 0; f < m.nFaces(); ++f) flux[f] = dot(u, m.faceArea[f]);
    return flux;
}

bool interiorCell(const Mesh& m, int c) {
    for (int f = m.nInteriorFaces; f < m.nFaces(); ++f)
        if (m.owner[f] == c) return false;
    return true;
}

} // namespace

TEST_CASE("green-gauss gradient: linear exactness and constants") {
    Mesh m = cartesianMesh(8, 8);
    ScalarField lin = fieldOf(m, [](double x, double y) { return 2.0 * x + 3.0 * y; },
                              BcType::fixedValue);
    VectorField g = greenGaussGrad(lin, m);
    for (int c = 0; c < m.nCells(); ++c) {
        if (!interiorCell(m, c)) continue;
        CHECK(g[c].x == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(g[c].y == doctest::Approx(3.0).epsilon(1e-12));
    }

    ScalarField constant = fieldOf(m, [](double, double) { return 5.5; }, BcType::fixedValue);
    VectorField gc = greenGaussGrad(constant, m);
    for (int c = 0; c < m.nCells(); ++c) {
        CHECK(gc[c].x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(gc[c].y == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("green-gauss gradient: quadratic second-order accuracy") {
    // interior gradient error of phi = x^2 shrinks like O(dx^2)
    double errCoarse = 0.0, errFine = 0.0;
    for (int n : {16, 32}) {
        Mesh m = cartesianMesh(n, n);
        ScalarField q = fieldOf(m, [](double x, double) { return x * x; }, BcType::fixedValue);
        VectorField g = greenGaussGrad(q, m);
        double worst = 0.0;
        for (int c = 0; c < m.nCells(); ++c) {
            if (!interiorCell(m, c)) continue;
            worst = std::max(worst, std::abs(g[c].x - 2.0 * m.cellCentre[c].x));
        }
        (n == 16 ? errCoarse : errFine) = worst;
    }
    // exact for quadratics on uniform grids up to roundoff; allow tiny slack
    CHECK(errCoarse < 1e-10);
    CHECK(errFine < 1e-10);
}

TEST_CASE("face interpolation schemes") {
    Mesh m = cartesianMesh(8, 1, 8.0, 1.0); // 1D strip
    FaceFluxField flux = uniformFlux(m, {1.0, 0.0});

    SUBCASE("uniform field: all schemes reproduce the constant") {
        ScalarField phi = fieldOf(m, [](double, double) { return 3.25; }, BcType::fixedValue);
        VectorField g = greenGaussGrad(phi, m);
        for (auto scheme : {DivScheme::linear, DivScheme::upwind1, DivScheme::linearUpwind,
                            DivScheme::limitedLinear}) {
            auto fv = faceInterpolate(phi, m, scheme, &flux, &g);
            for (int f = 0; f < m.nFaces(); ++f) CHECK(fv[f] == doctest::Approx(3.25));
        }
    }

    SUBCASE("linear field: linear scheme is exact at faces") {
        ScalarField phi = fieldOf(m, [](double x, double) { return 1.0 + 0.5 * x; },
                                  BcType::fixedValue);
        auto fv = faceInterpolate(phi, m, DivScheme::linear);
        for (int f = 0; f < m.nInteriorFaces; ++f)
            CHECK(fv[f] == doctest::Approx(1.0 + 0.5 * m.faceCentre[f].x).epsilon(1e-12));
    }

    SUBCASE("step profile: upwind takes the donor value under both flux signs") {
        ScalarField phi = fieldOf(m, [](double x, double) { return x < 4.0 ? 1.0 : 0.0; });
        auto fwd = faceInterpolate(phi, m, DivScheme::upwind1, &flux);
        FaceFluxField rev = uniformFlux(m, {-1.0, 0.0});
        auto bwd = faceInterpolate(phi, m, DivScheme::upwind1, &rev);
        for (int f = 0; f < m.nInteriorFaces; ++f) {
            CHECK(fwd[f] == phi[m.owner[f]]);
            CHECK(bwd[f] == phi[m.neighbour[f]]);
        }
    }

    SUBCASE("boundedness of upwind and limited linear on a rough field") {
        Mesh m2 = cartesianMesh(10, 10);
        FaceFluxField flux2 = uniformFlux(m2, {1.0, 0.4});
        ScalarField phi = fieldOf(m2, [](double x, double y) {
            return std::sin(37.0 * x) * std::cos(23.0 * y) + ((int)(x * 97) % 3) * 0.2;
        });
        VectorField g = greenGaussGrad(phi, m2);
        for (auto scheme : {DivScheme::upwind1, DivScheme::limitedLinear}) {
            auto fv = faceInterpolate(phi, m2, scheme, &flux2, &g);
            for (int f = 0; f < m2.nInteriorFaces; ++f) {
                double lo = std::min(phi[m2.owner[f]], phi[m2.neighbour[f]]);
                double hi = std::max(phi[m2.owner[f]], phi[m2.neighbour[f]]);
                CHECK(fv[f] >= lo - 1e-12);
                CHECK(fv[f] <= hi + 1e-12);
            }
        }
    }

    SUBCASE("missing inputs are reported") {
        ScalarField phi = fieldOf(m, [](double x, double) { return x; });
        CHECK_THROWS(faceInterpolate(phi, m, DivScheme::upwind1, nullptr));
        CHECK_THROWS(faceInterpolate(phi, m, DivScheme::linearUpwind, &flux, nullptr));
    }
}

TEST_CASE("steady diffusion strip reproduces the linear profile") {
    Mesh m = cartesianMesh(16, 1, 1.0, 0.0625);
    ScalarField phi("phi", m);
    phi.bc(m, "west") = BoundaryCondition<double>::fixed(0.0);
    phi.bc(m, "east") = BoundaryCondition<double>::fixed(1.0);
    // north/south zero-gradient by default
    ScalarField gamma("gamma", m, 1.0);
    FaceFluxField zero(m);
    LduSystem sys = assembleConvectionDiffusion(phi, zero, gamma, m, DivScheme::linear, true);
    CHECK(sys.symmetric());
    CHECK(sys.diagonallyDominant());

    SolverSpec spec{SolverMethod::symmetricKrylov, PrecondType::incompleteTriangular, 1e-14, 0.0,
                    500, 0};
    std::vector<double> x(m.nCells(), 0.0);
    auto res = solve(sys, x, spec);
    CHECK(res.converged);
    for (int c = 0; c < m.nCells(); ++c)
        CHECK(x[c] == doctest::Approx(m.cellCentre[c].x).epsilon(1e-10));
}

TEST_CASE("pure convection of a uniform field has zero residual") {
    Mesh m = cartesianMesh(8, 8);
    FaceFluxField flux = uniformFlux(m, {1.0, 0.5});
    ScalarField phi = fieldOf(m, [](double, double) { return 2.0; }, BcType::fixedValue);
    ScalarField gamma("gamma", m, 0.0);
    LduSystem sys = assembleConvectionDiffusion(phi, flux, gamma, m, DivScheme::upwind1, true);
    auto r = sys.residual(phi.v);
    for (double v : r) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("non-orthogonal correction vanishes on a Cartesian mesh") {
    Mesh m = cartesianMesh(6, 6);
    for (int f = 0; f < m.nInteriorFaces; ++f) {
        Vec2 t = m.faceArea[f] -
                 (magSqr(m.faceArea[f]) / dot(m.faceArea[f], m.deltaPN[f])) * m.deltaPN[f];
        CHECK(mag(t) < 1e-14);
    }
}

TEST_CASE("interior row sums telescope to zero for conservative fluxes") {
    Mesh m = cartesianMesh(8, 8);
    FaceFluxField flux = uniformFlux(m, {0.7, -0.3}); // exactly divergence-free
    ScalarField phi = fieldOf(m, [](double x, double y) { return x + y * y; });
    ScalarField gamma("gamma", m, 0.05);
    LduSystem sys = assembleConvectionDiffusion(phi, flux, gamma, m, DivScheme::upwind1, true);
    auto sums = sys.rowSums();
    for (int c = 0; c < m.nCells(); ++c)
        if (interiorCell(m, c)) CHECK(std::abs(sums[c]) < 1e-12);
}

TEST_CASE("nan input raises an assembly error naming the cell") {
    Mesh m = cartesianMesh(4, 4);
    FaceFluxField flux = uniformFlux(m, {1.0, 0.0});
    ScalarField phi = fieldOf(m, [](double, double) { return 1.0; });
    ScalarField gamma("gamma", m, 0.1);
    phi[7] = std::nan("");
    CHECK_THROWS_WITH_AS(assembleConvectionDiffusion(phi, flux, gamma, m, DivScheme::upwind1),
                         doctest::Contains("cell 7"), std::runtime_error);
}

TEST_CASE("rhie-chow fluxes") {
    Mesh m = cartesianMesh(8, 8);
    std::vector<double> d(m.nCells(), 0.01);

    SUBCASE("uniform velocity and pressure: flux is exactly U.Sf") {
        VectorField u("U", m, {1.5, -0.25});
        for (auto& b : u.bcs) b = BoundaryCondition<Vec2>::fixed({1.5, -0.25});
        ScalarField p("p", m, 3.0);
        VectorField gp = greenGaussGrad(p, m);
        auto flux = rhieChowFlux(u, p, gp, d, m);
        for (int f = 0; f < m.nInteriorFaces; ++f)
            CHECK(flux[f] == doctest::Approx(dot(Vec2{1.5, -0.25}, m.faceArea[f])).epsilon(1e-12));
    }

    SUBCASE("linear pressure: correction vanishes on the uniform grid") {
        VectorField u("U", m, {1.0, 0.0});
        for (auto& b : u.bcs) b = BoundaryCondition<Vec2>::fixed({1.0, 0.0});
        ScalarField p = fieldOf(m, [](double x, double y) { return 4.0 * x - 2.0 * y; },
                                BcType::fixedValue);
        VectorField gp = greenGaussGrad(p, m);
        auto flux = rhieChowFlux(u, p, gp, d, m);
        for (int f = 0; f < m.nInteriorFaces; ++f)
            CHECK(flux[f] == doctest::Approx(dot(Vec2{1.0, 0.0}, m.faceArea[f])).epsilon(1e-9));
    }

    SUBCASE("checkerboard pressure: damping flux opposes the oscillation") {
        VectorField u("U", m, {0.0, 0.0});
        for (auto& b : u.bcs) b = BoundaryCondition<Vec2>::fixed({0.0, 0.0});
        ScalarField p("p", m);
        for (int c = 0; c < m.nCells(); ++c) {
            int i = c % 8, j = c / 8;
            p[c] = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        }
        VectorField gp = greenGaussGrad(p, m);
        auto flux = rhieChowFlux(u, p, gp, d, m);
        int nonzero = 0;
        for (int f = 0; f < m.nInteriorFaces; ++f) {
            double dp = p[m.neighbour[f]] - p[m.owner[f]];
            if (dp != 0.0) {
                // damping flux runs from high to low pressure: sign(flux) = -sign(dp)
                CHECK(flux[f] * dp < 0.0);
                ++nonzero;
            }
        }
        CHECK(nonzero > 0);
    }

    SUBCASE("singular momentum diagonal is rejected") {
        VectorField u("U", m, {1.0, 0.0});
        ScalarField p("p", m);
        VectorField gp = greenGaussGrad(p, m);
        std::vector<double> bad(m.nCells(), 0.0);
        CHECK_THROWS(rhieChowFlux(u, p, gp, bad, m));
    }
}

TEST_CASE("manufactured solution: observed order of the schemes") {
    // phi = sin(pi x) cos(pi y), u = (2, 1), Gamma = 0.05, Dirichlet borders
    const Vec2 uAdv{2.0, 1.0};
    const double gammaVal = 0.05;
    auto exact = [](double x, double y) { return std::sin(M_PI * x) * std::cos(M_PI * y); };
    auto sourceDensity = [&](double x, double y) {
        double sx = std::sin(M_PI * x), cx = std::cos(M_PI * x);
        double sy = std::sin(M_PI * y), cy = std::cos(M_PI * y);
        return uAdv.x * M_PI * cx * cy - uAdv.y * M_PI * sx * sy +
               gammaVal * 2.0 * M_PI * M_PI * sx * cy;
    };

    auto solveOn = [&](int n, DivScheme scheme) {
        Mesh m = cartesianMesh(n, n);
        FaceFluxField flux = uniformFlux(m, uAdv);
        ScalarField phi = fieldOf(m, exact, BcType::fixedValue);
        for (double& v : phi.v) v = 0.0; // solve from scratch
        ScalarField gamma("gamma", m, gammaVal);

        SolverSpec spec{SolverMethod::nonsymmetricKrylov, PrecondType::incompleteTriangular,
                        1e-12, 0.0, 2000, 0};
        // deferred corrections: iterate the assembly to its fixed point
        std::vector<double> x(m.nCells(), 0.0);
        for (int it = 0; it < 60; ++it) {
            LduSystem sys = assembleConvectionDiffusion(phi, flux, gamma, m, scheme, true);
            for (int c = 0; c < m.nCells(); ++c) {
                const auto& cc = m.cellCentre[c];
                double h = 0.5 / n;
                sys.source[c] += oracle::quad2(sourceDensity, cc.x - h, cc.x + h, cc.y - h,
                                               cc.y + h);
            }
            x = phi.v;
            auto res = solve(sys, x, spec);
            double change = 0.0;
            for (int c = 0; c < m.nCells(); ++c) {
                change = std::max(change, std::abs(x[c] - phi[c]));
                phi[c] = x[c];
            }
            if (change < 1e-12 && res.converged) break;
        }
        double num = 0.0, den = 0.0;
        for (int c = 0; c < m.nCells(); ++c) {
            double e = phi[c] - exact(m.cellCentre[c].x, m.cellCentre[c].y);
            num += m.cellVolume[c] * e * e;
            den += m.cellVolume[c];
        }
        return std::sqrt(num / den);
    };

    auto slopeOf = [&](DivScheme scheme) {
        std::vector<int> ns{16, 32, 64};
        std::vector<double> lh, le;
        for (int n : ns) {
            lh.push_back(std::log(1.0 / n));
            le.push_back(std::log(solveOn(n, scheme)));
        }
        double mh = (lh[0] + lh[1] + lh[2]) / 3.0, me = (le[0] + le[1] + le[2]) / 3.0;
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 3; ++i) {
            num += (lh[i] - mh) * (le[i] - me);
            den += (lh[i] - mh) * (lh[i] - mh);
        }
        return num / den;
    };

    CHECK(slopeOf(DivScheme::linear) >= 1.9);
    CHECK(slopeOf(DivScheme::linearUpwind) >= 1.9);
    double up = slopeOf(DivScheme::upwind1);
    CHECK(up >= 0.9);
    CHECK(up <= 1.1);
}
