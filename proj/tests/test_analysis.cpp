#include <doctest.h>

#include <cmath>

#include "coanda/analysis.hpp"
#include "coanda/meshgen.hpp"
#include "oracles.hpp"

using namespace coanda;

TEST_CASE("gci analysis") {
    SUBCASE("cylinder-table values reproduce the reference analysis") {
        GciReport g = gciAnalyze(-1.65e-2, -1.71e-2, -1.94e-2, 1.4);
        CHECK(g.q == doctest::Approx(3.98).epsilon(0.015));
        CHECK(g.gci12 == doctest::Approx(1.60).epsilon(0.02));
        CHECK(g.gci23 == doctest::Approx(5.91).epsilon(0.02));
        CHECK(g.gciRatio == doctest::Approx(0.965).epsilon(0.005));
        CHECK_FALSE(g.oscillatory);
        // extrapolate lies beyond f1, away from f2
        CHECK((g.richardson - g.f1) * (g.f1 - g.f2) > 0.0);
    }
    SUBCASE("constructed order is recovered exactly") {
        // f3 - f2 = r^q (f2 - f1) with q = 2, r = 2
        double f1 = 1.0, f2 = 1.1, f3 = f2 + 4.0 * (f2 - f1);
        GciReport g = gciAnalyze(f1, f2, f3, 2.0);
        CHECK(g.q == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("degenerate order is an error") {
        CHECK_THROWS_AS(gciAnalyze(1.0, 1.0, 1.0, 1.4), std::invalid_argument);
        CHECK_THROWS_AS(gciAnalyze(1.0, 1.1, 1.1, 1.4), std::invalid_argument);
        CHECK_THROWS_AS(gciAnalyze(1.0, 1.1, 1.3, 1.0), std::invalid_argument);
    }
    SUBCASE("oscillatory convergence is flagged and order uses magnitudes") {
        GciReport g = gciAnalyze(7.96e-3, 7.95e-3, 8.03e-3, 1.4);
        CHECK(g.oscillatory);
        CHECK(std::isfinite(g.q));
        CHECK(g.gci12 >= 0.0);
        CHECK(g.gci23 >= 0.0);
    }
    SUBCASE("safety factor scales both indices") {
        GciReport a = gciAnalyze(-1.65e-2, -1.71e-2, -1.94e-2, 1.4, 1.25);
        GciReport b = gciAnalyze(-1.65e-2, -1.71e-2, -1.94e-2, 1.4, 2.5);
        CHECK(b.gci12 == doctest::Approx(2.0 * a.gci12));
        CHECK(b.gci23 == doctest::Approx(2.0 * a.gci23));
        CHECK(b.gciRatio == doctest::Approx(a.gciRatio)); // ratio is F_s-free
    }
    SUBCASE("table text renders") {
        GciReport g = gciAnalyze(-1.65e-2, -1.71e-2, -1.94e-2, 1.4);
        std::string t = g.table();
        CHECK(t.find("GCI12") != std::string::npos);
        CHECK(t.find("Richardson") != std::string::npos);
    }
}

TEST_CASE("zero crossings") {
    SUBCASE("single linear crossing") {
        auto c = detectZeroCrossings({1.0, 2.0}, {0.5, -0.5});
        REQUIRE(c.size() == 1);
        CHECK(c[0].station == doctest::Approx(1.5));
        CHECK(c[0].direction == -1);
    }
    SUBCASE("all positive: none") {
        CHECK(detectZeroCrossings({0, 1, 2}, {0.1, 0.4, 0.2}).empty());
    }
    SUBCASE("piecewise-linear exactness over several crossings") {
        std::vector<double> x{0, 1, 2, 3, 4, 5};
        std::vector<double> v{-2, 2, 1, -1, -3, 6};
        auto c = detectZeroCrossings(x, v);
        REQUIRE(c.size() == 3);
        CHECK(c[0].station == doctest::Approx(0.5));
        CHECK(c[0].direction == 1);
        CHECK(c[1].station == doctest::Approx(2.5));
        CHECK(c[1].direction == -1);
        CHECK(c[2].station == doctest::Approx(4.0 + 1.0 / 3.0));
        CHECK(c[2].direction == 1);
    }
    SUBCASE("needs two stations") {
        CHECK_THROWS_AS(detectZeroCrossings({1.0}, {0.5}), std::invalid_argument);
    }
}

TEST_CASE("reattachment / separation selectors") {
    WallProfile w;
    w.station = {0.05, 0.10, 0.15, 0.20};
    w.cf = {-1e-3, -2e-4, 3e-4, 5e-4}; // recirculation then attached
    auto xr = reattachmentPoint(w);
    REQUIRE(xr.has_value());
    CHECK(*xr > 0.10);
    CHECK(*xr < 0.15);

    WallProfile cyl;
    cyl.station = {10, 90, 180, 220, 260, 300};
    cyl.cf = {2e-3, 1.5e-3, 8e-4, 1e-4, -2e-4, -1e-4};
    auto sep = separationStation(cyl);
    REQUIRE(sep.has_value());
    CHECK(*sep > 220.0);
    CHECK(*sep < 260.0);

    WallProfile attached;
    attached.station = {10, 90};
    attached.cf = {1e-3, 5e-4};
    CHECK_FALSE(separationStation(attached).has_value());
}

TEST_CASE("jet profile from samples") {
    SUBCASE("synthetic peaked profile with a root-find oracle") {
        // u(y) = y exp(1 - y): peak 1 at y = 1; half velocity outward where
        // y exp(1 - y) = 0.5
        auto f = [](double y) { return y * std::exp(1.0 - y); };
        std::vector<double> dist, ut;
        for (int i = 0; i <= 4000; ++i) {
            double y = 5.0 * i / 4000.0;
            dist.push_back(y);
            ut.push_back(f(y));
        }
        JetProfile jp = jetProfileFromSamples(0.0, dist, ut);
        CHECK_FALSE(jp.flagged);
        CHECK(jp.uMax == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(jp.yOfUMax == doctest::Approx(1.0).epsilon(2e-3));
        double yRef = oracle::bisect([&](double y) { return f(y) - 0.5; }, 1.0, 5.0);
        CHECK(yRef == doctest::Approx(2.6783).epsilon(1e-3));
        CHECK(jp.yHalf == doctest::Approx(yRef).epsilon(1e-5));
        CHECK(jp.yHalf >= jp.yOfUMax);
    }
    SUBCASE("uniform profile never halves: flagged") {
        JetProfile jp = jetProfileFromSamples(0.0, {0.0, 1.0, 2.0}, {3.0, 3.0, 3.0});
        CHECK(jp.flagged);
    }
    SUBCASE("reversed-flow station is flagged") {
        JetProfile jp = jetProfileFromSamples(0.0, {0.0, 1.0, 2.0}, {-1.0, -0.5, -0.2});
        CHECK(jp.flagged);
    }
    SUBCASE("linear decay: closed-form half-width") {
        // peak 2 at y = 0, linear to 0 at y = 4: half (u = 1) at y = 2
        JetProfile jp = jetProfileFromSamples(0.0, {0.0, 4.0}, {2.0, 0.0});
        CHECK(jp.yHalf == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("self-similar rescaling scales y2 exactly") {
        std::vector<double> dist, ut;
        for (int i = 0; i <= 2000; ++i) {
            double y = 5.0 * i / 2000.0;
            dist.push_back(y);
            ut.push_back(y * std::exp(1.0 - y));
        }
        JetProfile a = jetProfileFromSamples(0.0, dist, ut);
        const double s = 0.35;
        std::vector<double> dist2(dist);
        for (double& d : dist2) d *= s;
        JetProfile b = jetProfileFromSamples(0.0, dist2, ut);
        CHECK(b.yHalf == doctest::Approx(s * a.yHalf).epsilon(1e-12));
    }
}

TEST_CASE("decay and spread") {
    std::vector<JetProfile> profiles;
    for (int i = 0; i < 4; ++i) {
        JetProfile p;
        p.station = 1.0 + i;
        p.uMax = 10.0 / (1.0 + 0.2 * i);
        p.yHalf = 0.1 * (1.0 + 0.3 * i);
        profiles.push_back(p);
    }

    SUBCASE("normalisation and zero deviation against itself") {
        DecaySpread ds = decayAndSpread(profiles, 10.0, 0.1);
        ReferenceSeries ref{ds.station, ds.uMaxNorm, ds.y2Norm};
        DecaySpread ds2 = decayAndSpread(profiles, 10.0, 0.1, &ref);
        CHECK(ds2.maxDevDecay == doctest::Approx(0.0));
        CHECK(ds2.maxDevSpread == doctest::Approx(0.0));
    }
    SUBCASE("a uniformly offset reference reads as that deviation") {
        DecaySpread base = decayAndSpread(profiles, 10.0, 0.1);
        ReferenceSeries ref{base.station, base.uMaxNorm, base.y2Norm};
        for (double& v : ref.decay) v /= 1.10; // computed is 10% above reference
        DecaySpread ds = decayAndSpread(profiles, 10.0, 0.1, &ref);
        CHECK(ds.maxDevDecay == doctest::Approx(0.10).epsilon(1e-9));
    }
    SUBCASE("ratio invariance under joint rescaling") {
        DecaySpread a = decayAndSpread(profiles, 10.0, 0.1);
        auto scaled = profiles;
        for (auto& p : scaled) p.uMax *= 3.7;
        DecaySpread b = decayAndSpread(scaled, 37.0, 0.1);
        for (size_t i = 0; i < a.uMaxNorm.size(); ++i)
            CHECK(a.uMaxNorm[i] == doctest::Approx(b.uMaxNorm[i]).epsilon(1e-12));
    }
    SUBCASE("needs two profiles") {
        std::vector<JetProfile> one(1);
        CHECK_THROWS_AS(decayAndSpread(one, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("wall profile and coefficients on an analytic field") {
    // Couette-like strip: u = g*y, tau_w = nu*g on the bottom wall
    StructuredBuilder b;
    b.ni = 8;
    b.nj = 4;
    b.vertices.resize(9 * 5);
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 8; ++i) b.vertex(i, j) = {i / 8.0, j / 4.0 * 0.1};
    b.southPatch = "wall";
    b.northPatch = "top";
    b.westPatch = "in";
    b.eastPatch = "out";
    Mesh m = b.build();

    const double g = 40.0, nu = 1.5e-5, uJet = 18.4;
    VectorField u("U", m);
    for (int c = 0; c < m.nCells(); ++c) u[c] = {g * m.cellCentre[c].y, 0.0};
    ScalarField p("p", m, 0.0);

    SUBCASE("quiescent field gives zero Cf and Cp") {
        VectorField u0("U", m, {0, 0});
        WallProfile w = wallProfile(u0, p, m, CaseKind::flatPlate, nu, uJet);
        for (double v : w.cf) CHECK(v == doctest::Approx(0.0));
        for (double v : w.cp) CHECK(v == doctest::Approx(0.0));
        CHECK(averageCp(w) == doctest::Approx(0.0));
    }

    SUBCASE("couette shear is exact; conventions differ by U_jet") {
        WallProfile w = wallProfile(u, p, m, CaseKind::flatPlate, nu, uJet, false);
        for (size_t i = 0; i < w.station.size(); ++i) {
            CHECK(w.tauW[i] == doctest::Approx(nu * g).epsilon(1e-12));
            CHECK(w.cf[i] == doctest::Approx(nu * g / (0.5 * uJet)).epsilon(1e-12));
        }
        WallProfile ws = wallProfile(u, p, m, CaseKind::flatPlate, nu, uJet, true);
        CHECK(ws.cf[0] == doctest::Approx(nu * g / (0.5 * uJet * uJet)).epsilon(1e-12));
        // stations strictly monotone
        for (size_t i = 1; i < w.station.size(); ++i) CHECK(w.station[i] > w.station[i - 1]);
    }

    SUBCASE("uniform pressure maps to the printed Cp normalisation") {
        ScalarField pc("p", m, 0.4);
        WallProfile w = wallProfile(u, pc, m, CaseKind::flatPlate, nu, uJet, false);
        for (double v : w.cp) CHECK(v == doctest::Approx(0.4 / (0.5 * uJet)).epsilon(1e-12));
    }
}

TEST_CASE("jet profile extraction from a mesh field") {
    StructuredBuilder b;
    b.ni = 6;
    b.nj = 40;
    b.vertices.resize(7 * 41);
    for (int j = 0; j <= 40; ++j)
        for (int i = 0; i <= 6; ++i) b.vertex(i, j) = {i / 6.0, 5.0 * j / 40.0};
    b.southPatch = "wall";
    b.northPatch = "top";
    b.westPatch = "in";
    b.eastPatch = "out";
    Mesh m = b.build();

    VectorField u("U", m);
    for (int c = 0; c < m.nCells(); ++c) {
        double y = m.cellCentre[c].y;
        u[c] = {y * std::exp(1.0 - y), 0.0};
    }
    JetProfile jp = jetProfileExtract(u, m, CaseKind::flatPlate, 0.5);
    CHECK_FALSE(jp.flagged);
    CHECK(jp.uMax == doctest::Approx(1.0).epsilon(0.01));
    CHECK(jp.yHalf == doctest::Approx(2.6783).epsilon(0.02));

    CHECK_THROWS_AS(jetProfileExtract(u, m, CaseKind::flatPlate, 7.5), std::invalid_argument);
}
