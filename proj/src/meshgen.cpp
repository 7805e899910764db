#include "coanda/meshgen.hpp"

#include <cmath>
#include <stdexcept>

namespace coanda {

void GridSpec::validate() const {
    if (expansionRatio < 1.0 || expansionRatio > 1.5)
        throw std::invalid_argument("grid spec: expansion ratio must lie in [1.0, 1.5]");
    if (targetYplus <= 0.0)
        throw std::invalid_argument("grid spec: target y+ must be positive");
    if ((nx != 0 && nx < 2) || (ny != 0 && ny < 2))
        throw std::invalid_argument("grid spec: cell counts must be >= 2 per direction");
}

GridLevel gridLevelFromString(const std::string& s) {
    if (s == "coarse") return GridLevel::coarse;
    if (s == "medium") return GridLevel::medium;
    if (s == "fine") return GridLevel::fine;
    throw std::invalid_argument("grid level must be coarse, medium or fine (got '" + s + "')");
}

GridSpec flatPlatePreset(GridLevel level) {
    GridSpec s;
    switch (level) {
        case GridLevel::fine:   s.targetYplus = 0.7;  s.expansionRatio = 1.029; break;
        case GridLevel::medium: s.targetYplus = 0.85; s.expansionRatio = 1.042; break;
        case GridLevel::coarse: s.targetYplus = 1.0;  s.expansionRatio = 1.061; break;
    }
    return s;
}

GridSpec cylinderPreset(GridLevel level) {
    GridSpec s;
    switch (level) {
        case GridLevel::fine:   s.targetYplus = 0.74; s.expansionRatio = 1.1;  s.dx = 6.2e-4; break;
        case GridLevel::medium: s.targetYplus = 0.85; s.expansionRatio = 1.15; s.dx = 8.7e-4; break;
        case GridLevel::coarse: s.targetYplus = 1.0;  s.expansionRatio = 1.24; s.dx = 1.2e-3; break;
    }
    return s;
}

double estimateFirstCellHeight(double uRef, double nu, double lRef, double targetYplus) {
    if (targetYplus == 0.0) return 0.0;
    if (uRef <= 0.0 || nu <= 0.0 || lRef <= 0.0 || targetYplus < 0.0)
        throw std::domain_error("estimateFirstCellHeight: inputs must be positive");
    double rex = uRef * lRef / nu;
    double cf = 0.027 * std::pow(rex, -1.0 / 7.0);
    double uTau = uRef * std::sqrt(0.5 * cf);
    return targetYplus * nu / uTau;
}

std::vector<double> geometricSpacings(double first, double ratio, int n) {
    if (n <= 0) throw std::invalid_argument("geometricSpacings: n must be >= 1");
    if (first <= 0.0 || ratio < 1.0)
        throw std::invalid_argument("geometricSpacings: need first > 0 and ratio >= 1");
    std::vector<double> s(n);
    double d = first;
    for (int i = 0; i < n; ++i) {
        s[i] = d;
        d *= ratio;
    }
    return s;
}

namespace {

// Geometric spacings from `first` with `ratio` covering `length`, rescaled so
// the sum is exactly `length`. The count is the smallest n whose raw sum
// reaches the length, so the rescale factor is <= 1 and the realised first
// spacing never exceeds the request.
std::vector<double> gradedBlock(double first, double ratio, double length) {
    if (first <= 0.0 || length <= 0.0)
        throw std::runtime_error("mesh generation: non-positive spacing request");
    int n;
    if (ratio <= 1.0 + 1e-12) {
        n = std::max(1, static_cast<int>(std::ceil(length / first)));
    } else {
        double target = 1.0 + (ratio - 1.0) * length / first;
        n = std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(ratio))));
    }
    auto s = geometricSpacings(first, ratio, n);
    double sum = 0.0;
    for (double v : s) sum += v;
    for (double& v : s) v *= length / sum;
    return s;
}

// Same but clustered symmetrically from both ends of the block.
std::vector<double> doubleGradedBlock(double first, double ratio, double length) {
    auto half = gradedBlock(first, ratio, 0.5 * length);
    std::vector<double> s(half);
    s.insert(s.end(), half.rbegin(), half.rend());
    return s;
}

// Graded from `first`, capped at `maxSpacing`, covering `length` exactly.
std::vector<double> cappedBlock(double first, double ratio, double maxSpacing, double length) {
    if (first <= 0.0 || length <= 0.0)
        throw std::runtime_error("mesh generation: non-positive spacing request");
    std::vector<double> s;
    double d = first, sum = 0.0;
    while (sum < length) {
        double v = std::min(d, maxSpacing);
        s.push_back(v);
        sum += v;
        d *= ratio;
    }
    for (double& v : s) v *= length / sum;
    return s;
}

std::vector<double> positionsFromSpacings(double start, const std::vector<double>& spacings) {
    std::vector<double> x(spacings.size() + 1);
    x[0] = start;
    for (size_t i = 0; i < spacings.size(); ++i) x[i + 1] = x[i] + spacings[i];
    return x;
}

} // namespace

Mesh generateFlatPlateMesh(const GridSpec& spec, double hJet, double hStandoff,
                           double uJet, double nu) {
    spec.validate();
    if (hJet <= 0.0 || hStandoff <= 0.0)
        throw std::domain_error("flat plate mesh: geometry must be positive");

    const double width = spec.streamwiseExtent * hJet;
    const double height = spec.normalExtent * hJet;
    const double d1 = estimateFirstCellHeight(uJet, nu, hJet, spec.targetYplus);
    const double rho = spec.expansionRatio;

    // wall-normal: graded from the bottom wall, grid lines snapped onto the
    // slot lips so the inlet patch covers exactly [H_s, H_s + H_j]
    auto blockA = gradedBlock(d1, rho, hStandoff);
    auto blockB = gradedBlock(blockA.back() * rho, rho, hJet);
    auto blockC = gradedBlock(blockB.back() * rho, rho, height - hStandoff - hJet);
    std::vector<double> dy(blockA);
    dy.insert(dy.end(), blockB.begin(), blockB.end());
    dy.insert(dy.end(), blockC.begin(), blockC.end());

    // streamwise: clustered at the jet exit plane x = 0
    auto dx = gradedBlock(d1, rho, width);

    auto xs = positionsFromSpacings(0.0, dx);
    auto ys = positionsFromSpacings(0.0, dy);
    const int ni = static_cast<int>(dx.size());
    const int nj = static_cast<int>(dy.size());

    StructuredBuilder b;
    b.ni = ni;
    b.nj = nj;
    b.vertices.resize(static_cast<size_t>(ni + 1) * (nj + 1));
    for (int j = 0; j <= nj; ++j)
        for (int i = 0; i <= ni; ++i) b.vertex(i, j) = {xs[i], ys[j]};

    b.southPatch = "wall";
    b.northPatch = "outlet";
    b.eastPatch = "outlet";
    b.westPatch = "backWall";
    b.westOverride.assign(nj, "");
    const int jLow = static_cast<int>(blockA.size());
    const int jHigh = jLow + static_cast<int>(blockB.size());
    for (int j = jLow; j < jHigh; ++j) b.westOverride[j] = "inlet";

    Mesh m = b.build();
    m.computeWallDistance({"wall", "backWall"});
    return m;
}

double cylinderTheta(const Vec2& p) {
    double t = std::atan2(p.x, p.y) * 180.0 / M_PI; // 0 at top, clockwise to +x
    if (t < 0.0) t += 360.0;
    return t;
}

Mesh generateCylinderMesh(const GridSpec& spec, double radius, double slotHeight,
                          double uJet, double nu) {
    spec.validate();
    if (slotHeight >= radius)
        throw std::domain_error("cylinder mesh: slot height must be smaller than the radius");
    if (radius <= 0.0 || slotHeight <= 0.0)
        throw std::domain_error("cylinder mesh: geometry must be positive");
    if (spec.dx <= 0.0)
        throw std::runtime_error("cylinder mesh: spec needs a streamwise spacing dx");

    const double rFar = spec.farExtent * radius;
    const double d1 = estimateFirstCellHeight(uJet, nu, slotHeight, spec.targetYplus);
    const double rho = spec.expansionRatio;

    // radial: clustered at the cylinder surface and at the nozzle lip
    // (r = R + b), then expanding with a far-field cap on the spacing
    auto slotBlock = doubleGradedBlock(d1, rho, slotHeight);
    auto farBlock = cappedBlock(d1, rho, spec.farSpacingFactor * spec.dx,
                                rFar - radius - slotHeight);
    std::vector<double> dr(slotBlock);
    dr.insert(dr.end(), farBlock.begin(), farBlock.end());
    auto rs = positionsFromSpacings(radius, dr);
    const int nr = static_cast<int>(dr.size());

    const int nth = std::max(8, static_cast<int>(std::lround(2.0 * M_PI * radius / spec.dx)));
    const double dTheta = 2.0 * M_PI / nth;

    StructuredBuilder b;
    b.ni = nth;
    b.nj = nr;
    b.wrapI = true;
    b.vertices.resize(static_cast<size_t>(nth) * (nr + 1));
    for (int j = 0; j <= nr; ++j) {
        for (int i = 0; i < nth; ++i) {
            double th = i * dTheta; // 0 at top, clockwise towards +x
            b.vertex(i, j) = {rs[j] * std::sin(th), rs[j] * std::cos(th)};
        }
    }

    b.southPatch = "wall";
    b.northPatch = "outlet";
    b.cutFrontPatch = "inlet";   // owned by the first column: jet blows in +theta
    b.cutBackPatch = "backWall"; // nozzle back, met by the returning jet
    b.cutRow.assign(nr, false);
    for (int j = 0; j < static_cast<int>(slotBlock.size()); ++j) b.cutRow[j] = true;

    Mesh m = b.build();
    m.computeWallDistance({"wall", "backWall"});
    return m;
}

} // namespace coanda
