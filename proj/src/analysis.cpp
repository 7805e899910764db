#include "coanda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "coanda/meshgen.hpp"

namespace coanda {

CaseKind caseKindFromString(const std::string& s) {
    if (s == "flat_plate") return CaseKind::flatPlate;
    if (s == "cylinder") return CaseKind::cylinder;
    throw std::invalid_argument("geometry type must be flat_plate or cylinder (got '" + s + "')");
}

double dynamicHead(double uJet, bool squaredConvention) {
    return 0.5 * (squaredConvention ? uJet * uJet : uJet);
}

WallProfile wallProfile(const VectorField& u, const ScalarField& p, const Mesh& mesh,
                        CaseKind kind, double nu, double uJet, bool squaredConvention) {
    const Patch& wall = mesh.patch("wall");
    struct Row {
        double station, pw, tau, area;
    };
    std::vector<Row> rows;
    rows.reserve(wall.count);
    for (int f = wall.start; f < wall.start + wall.count; ++f) {
        const int c = mesh.owner[f];
        Vec2 nHat = unit(mesh.faceArea[f]);
        Vec2 tHat;
        double station;
        if (kind == CaseKind::flatPlate) {
            tHat = {1.0, 0.0};
            station = mesh.faceCentre[f].x;
        } else {
            double thetaDeg = cylinderTheta(mesh.faceCentre[f]);
            double th = thetaDeg * M_PI / 180.0;
            tHat = {std::cos(th), -std::sin(th)}; // clockwise, jet direction
            station = thetaDeg;
        }
        double dn = std::abs(dot(mesh.deltaPN[f], nHat));
        double ut = dot(u[c], tHat);
        rows.push_back({station, p.boundaryValue(mesh, f), nu * ut / dn, mag(mesh.faceArea[f])});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.station < b.station;
    });

    WallProfile w;
    const double head = dynamicHead(uJet, squaredConvention);
    for (const auto& r : rows) {
        w.station.push_back(r.station);
        w.wallP.push_back(r.pw);
        w.tauW.push_back(r.tau);
        w.cp.push_back(r.pw / head);
        w.cf.push_back(r.tau / head);
        w.area.push_back(r.area);
    }
    return w;
}

double averageCp(const WallProfile& w) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < w.cp.size(); ++i) {
        num += w.cp[i] * w.area[i];
        den += w.area[i];
    }
    return den > 0 ? num / den : 0.0;
}

double maxYPlus(const VectorField& u, const Mesh& mesh, double nu) {
    double yp = 0.0;
    for (const char* name : {"wall", "backWall"}) {
        if (!mesh.hasPatch(name)) continue;
        const Patch& wall = mesh.patch(name);
        for (int f = wall.start; f < wall.start + wall.count; ++f) {
            const int c = mesh.owner[f];
            Vec2 nHat = unit(mesh.faceArea[f]);
            double dn = std::abs(dot(mesh.deltaPN[f], nHat));
            Vec2 uc = u[c];
            Vec2 ut = uc - dot(uc, nHat) * nHat;
            double tau = nu * mag(ut) / dn;
            yp = std::max(yp, std::sqrt(tau) * dn / nu);
        }
    }
    return yp;
}

std::vector<Crossing> detectZeroCrossings(const std::vector<double>& station,
                                          const std::vector<double>& value) {
    if (station.size() != value.size() || station.size() < 2)
        throw std::invalid_argument("zero crossings need at least two stations");
    std::vector<Crossing> out;
    for (size_t i = 1; i < value.size(); ++i) {
        double a = value[i - 1], b = value[i];
        if (a == 0.0) continue; // crossing attributed to the preceding interval
        if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
            double t = a / (a - b);
            out.push_back({station[i - 1] + t * (station[i] - station[i - 1]), a < 0.0 ? 1 : -1});
        }
    }
    return out;
}

std::optional<double> reattachmentPoint(const WallProfile& w) {
    // the recirculation under the jet closes at the rising crossing that
    // follows the last falling one; corner micro-eddies right at the jet
    // exit produce earlier crossing pairs that do not end the bubble
    auto crossings = detectZeroCrossings(w.station, w.cf);
    std::optional<double> lastFall;
    for (const auto& c : crossings)
        if (c.direction < 0) lastFall = c.station;
    for (const auto& c : crossings)
        if (c.direction > 0 && (!lastFall || c.station > *lastFall)) return c.station;
    return std::nullopt;
}

std::optional<double> separationStation(const WallProfile& w) {
    std::optional<double> last;
    for (const auto& c : detectZeroCrossings(w.station, w.cf))
        if (c.direction < 0) last = c.station;
    return last;
}

JetProfile jetProfileFromSamples(double station, std::vector<double> dist,
                                 std::vector<double> ut) {
    if (dist.size() != ut.size() || dist.empty())
        throw std::invalid_argument("jet profile needs matching non-empty samples");
    JetProfile jp;
    jp.station = station;
    jp.dist = std::move(dist);
    jp.ut = std::move(ut);

    size_t iMax = 0;
    for (size_t i = 1; i < jp.ut.size(); ++i)
        if (jp.ut[i] > jp.ut[iMax]) iMax = i;
    jp.uMax = jp.ut[iMax];
    jp.yOfUMax = jp.dist[iMax];
    if (jp.uMax <= 0.0) {
        jp.flagged = true;
        return jp;
    }
    const double half = 0.5 * jp.uMax;
    for (size_t i = iMax + 1; i < jp.ut.size(); ++i) {
        if (jp.ut[i] <= half) {
            double a = jp.ut[i - 1], b = jp.ut[i];
            double t = (a - half) / (a - b);
            jp.yHalf = jp.dist[i - 1] + t * (jp.dist[i] - jp.dist[i - 1]);
            return jp;
        }
    }
    jp.flagged = true; // never decays to half within the samples
    return jp;
}

JetProfile jetProfileExtract(const VectorField& u, const Mesh& mesh, CaseKind kind,
                             double station, double radius) {
    struct Sample {
        double d, ut;
    };
    std::vector<Sample> samples;
    if (kind == CaseKind::flatPlate) {
        for (int c = 0; c < mesh.nCells(); ++c) {
            const auto& pts = mesh.cellPoints[c];
            double xmin = 1e300, xmax = -1e300;
            for (int pid : pts) {
                xmin = std::min(xmin, mesh.points[pid].x);
                xmax = std::max(xmax, mesh.points[pid].x);
            }
            if (station >= xmin && station < xmax)
                samples.push_back({mesh.cellCentre[c].y, u[c].x});
        }
    } else {
        double th = station * M_PI / 180.0;
        Vec2 tHat{std::cos(th), -std::sin(th)};
        for (int c = 0; c < mesh.nCells(); ++c) {
            const auto& pts = mesh.cellPoints[c];
            double tmin = 1e300, tmax = -1e300;
            for (int pid : pts) {
                double t = cylinderTheta(mesh.points[pid]);
                tmin = std::min(tmin, t);
                tmax = std::max(tmax, t);
            }
            if (tmax - tmin > 180.0) continue; // wrapped cell spanning 0/360
            if (station >= tmin && station < tmax)
                samples.push_back({mag(mesh.cellCentre[c]) - radius, dot(u[c], tHat)});
        }
    }
    if (samples.empty())
        throw std::invalid_argument("jet profile: station outside the domain");
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        return a.d < b.d;
    });
    std::vector<double> dist, ut;
    for (const auto& s : samples) {
        dist.push_back(s.d);
        ut.push_back(s.ut);
    }
    return jetProfileFromSamples(station, std::move(dist), std::move(ut));
}

namespace {
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(it - xs.begin());
    double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}
} // namespace

DecaySpread decayAndSpread(const std::vector<JetProfile>& profiles, double uJet,
                           double lengthNorm, const ReferenceSeries* reference) {
    if (profiles.size() < 2)
        throw std::invalid_argument("decay/spread needs at least two stations");
    DecaySpread out;
    for (const auto& p : profiles) {
        out.station.push_back(p.station);
        out.uMaxNorm.push_back(p.uMax / uJet);
        out.y2Norm.push_back(p.flagged ? 0.0 : p.yHalf / lengthNorm);
    }
    if (reference) {
        for (size_t i = 0; i < out.station.size(); ++i) {
            double rd = interp(reference->station, reference->decay, out.station[i]);
            double rs = interp(reference->station, reference->spread, out.station[i]);
            if (rd != 0.0)
                out.maxDevDecay = std::max(out.maxDevDecay, std::abs(out.uMaxNorm[i] - rd) /
                                                                std::abs(rd));
            if (rs != 0.0)
                out.maxDevSpread = std::max(out.maxDevSpread, std::abs(out.y2Norm[i] - rs) /
                                                                  std::abs(rs));
        }
    }
    return out;
}

GciReport gciAnalyze(double f1, double f2, double f3, double r, double fs) {
    if (!(r > 1.0)) throw std::invalid_argument("gci: refinement ratio must exceed 1");
    const double e21 = f2 - f1;
    const double e32 = f3 - f2;
    if (e21 == 0.0 || e32 == 0.0)
        throw std::invalid_argument("gci: degenerate order (equal successive solutions)");

    GciReport g;
    g.f1 = f1;
    g.f2 = f2;
    g.f3 = f3;
    g.r = r;
    g.fs = fs;
    g.oscillatory = (e32 / e21) < 0.0;
    g.q = std::log(std::abs(e32) / std::abs(e21)) / std::log(r);
    const double rq = std::pow(r, g.q);
    g.gci12 = fs * std::abs(e21 / f1) / (rq - 1.0) * 100.0;
    g.gci23 = fs * std::abs(e32 / f2) / (rq - 1.0) * 100.0;
    g.gciRatio = g.gci23 / (rq * g.gci12);
    g.richardson = f1 + (f1 - f2) / (rq - 1.0);
    return g;
}

std::string GciReport::table() const {
    std::ostringstream os;
    os << "  r      q      GCI12(%)  GCI23(%)  GCI ratio\n";
    char line[128];
    std::snprintf(line, sizeof(line), "  %-6.3g %-6.3g %-9.3g %-9.3g %-9.4g\n", r, q, gci12,
                  gci23, gciRatio);
    os << line;
    std::snprintf(line, sizeof(line), "  Richardson extrapolate: %.6g%s\n", richardson,
                  oscillatory ? "  (oscillatory convergence: order from magnitudes)" : "");
    os << line;
    return os.str();
}

} // namespace coanda
