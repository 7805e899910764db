#include "coanda/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace coanda {

using nlohmann::json;

void InletProfile::validate() const {
    if (eta.size() != u.size() || eta.size() < 2)
        throw ConfigError("inlet profile: need at least two (eta, u) pairs");
    for (size_t i = 0; i < eta.size(); ++i) {
        if (u[i] < 0.0) throw ConfigError("inlet profile: velocities must be >= 0");
        if (i > 0 && !(eta[i] > eta[i - 1]))
            throw ConfigError("inlet profile: eta must be strictly increasing");
    }
    if (eta.front() < 0.0 || eta.back() > 1.0)
        throw ConfigError("inlet profile: eta must lie within [0, 1]");
}

double InletProfile::sample(double q) const {
    if (q <= eta.front()) return u.front();
    if (q >= eta.back()) return u.back();
    auto it = std::upper_bound(eta.begin(), eta.end(), q);
    size_t i = static_cast<size_t>(it - eta.begin());
    double t = (q - eta[i - 1]) / (eta[i] - eta[i - 1]);
    return u[i - 1] + t * (u[i] - u[i - 1]);
}

double InletProfile::peak() const { return *std::max_element(u.begin(), u.end()); }

InletProfile InletProfile::topHat() {
    InletProfile p;
    p.eta = {0.0, 1.0};
    p.u = {1.0, 1.0};
    return p;
}

InletProfile InletProfile::powerLaw(double exponent, int nPoints) {
    InletProfile p;
    for (int i = 0; i < nPoints; ++i) {
        double e = static_cast<double>(i) / (nPoints - 1);
        p.eta.push_back(e);
        p.u.push_back(std::pow(1.0 - std::abs(2.0 * e - 1.0), 1.0 / exponent));
    }
    return p;
}

InletProfile InletProfile::fromCsv(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw ConfigError("inlet profile file does not exist: " + path);
    probe.close();

    InletProfile p;
    std::ifstream is(path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double e, v;
        if (ss >> e >> v) {
            p.eta.push_back(e);
            p.u.push_back(v);
        }
    }
    p.validate();
    return p;
}

InletProfile CaseConfig::resolveInletProfile() const {
    if (inletProfileSpec == "top_hat") return InletProfile::topHat();
    if (inletProfileSpec == "power_law") return InletProfile::powerLaw(powerLawExponent);
    return InletProfile::fromCsv(inletProfileSpec);
}

std::vector<Vec2> inletVelocityBc(const InletProfile& profile, const Mesh& mesh,
                                  const std::string& patchName, const std::vector<double>& eta,
                                  double uTarget, InletScaleMode mode) {
    profile.validate();
    const Patch& patch = mesh.patch(patchName);
    if (eta.size() != static_cast<size_t>(patch.count))
        throw ConfigError("inlet bc: eta count does not match patch face count");

    std::vector<double> raw(patch.count);
    for (int i = 0; i < patch.count; ++i) raw[i] = profile.sample(eta[i]);

    double scale;
    if (mode == InletScaleMode::scaleToPeak) {
        double pk = profile.peak();
        if (!(pk > 0.0)) throw ConfigError("inlet bc: profile peak must be positive");
        scale = uTarget / pk;
    } else {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < patch.count; ++i) {
            double a = mag(mesh.faceArea[patch.start + i]);
            num += raw[i] * a;
            den += a;
        }
        if (!(num > 0.0)) throw ConfigError("inlet bc: profile mean must be positive");
        scale = uTarget * den / num;
    }

    std::vector<Vec2> out(patch.count);
    for (int i = 0; i < patch.count; ++i) {
        Vec2 inward = -1.0 * unit(mesh.faceArea[patch.start + i]);
        out[i] = (scale * raw[i]) * inward;
    }
    return out;
}

// --- strict json loading -----------------------------------------------------

namespace {

int editDistance(const std::string& a, const std::string& b) {
    std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
    for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (std::tolower(a[i - 1]) != std::tolower(b[j - 1]))});
    return d[a.size()][b.size()];
}

void checkKeys(const json& obj, const std::string& scope,
               const std::vector<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
        std::string best;
        int bestDist = 1 << 20;
        for (const auto& cand : allowed) {
            int d = editDistance(key, cand);
            if (d < bestDist) {
                bestDist = d;
                best = cand;
            }
        }
        std::string msg = "unknown key '" + key + "' in " + scope;
        if (bestDist <= std::max<int>(2, static_cast<int>(key.size()) / 3))
            msg += " (did you mean '" + best + "'?)";
        throw ConfigError(msg);
    }
}

double getNum(const json& obj, const std::string& scope, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number())
        throw ConfigError(scope + "." + key + ": expected a number");
    return obj[key].get<double>();
}

int getInt(const json& obj, const std::string& scope, const std::string& key, int dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer())
        throw ConfigError(scope + "." + key + ": expected an integer");
    return obj[key].get<int>();
}

bool getBool(const json& obj, const std::string& scope, const std::string& key, bool dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_boolean()) throw ConfigError(scope + "." + key + ": expected a boolean");
    return obj[key].get<bool>();
}

std::string getStr(const json& obj, const std::string& scope, const std::string& key,
                   const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_string()) throw ConfigError(scope + "." + key + ": expected a string");
    return obj[key].get<std::string>();
}

void parseSolver(const json& s, const std::string& scope, SolverSpec& spec) {
    checkKeys(s, scope, {"tolerance", "relTol", "maxIter", "minIter", "preconditioner"});
    spec.tolerance = getNum(s, scope, "tolerance", spec.tolerance);
    spec.relTol = getNum(s, scope, "relTol", spec.relTol);
    spec.maxIter = getInt(s, scope, "maxIter", spec.maxIter);
    spec.minIter = getInt(s, scope, "minIter", spec.minIter);
    std::string pc = getStr(s, scope, "preconditioner", "");
    if (!pc.empty()) {
        if (pc == "diagonal")
            spec.precond = PrecondType::diagonal;
        else if (pc == "incomplete_triangular")
            spec.precond = PrecondType::incompleteTriangular;
        else if (pc == "none")
            spec.precond = PrecondType::none;
        else
            throw ConfigError(scope + ".preconditioner: unknown value '" + pc + "'");
    }
    spec.validate();
}

} // namespace

CaseConfig parseConfig(const std::string& text, const std::string& baseDir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }

    checkKeys(root, "config",
              {"geometry", "fluid", "U_jet", "grid", "turbulence", "schemes", "algorithm", "run",
               "solvers", "inlet", "probes", "output", "cp_convention", "outlet_inflow"});

    CaseConfig c;

    if (!root.contains("geometry")) throw ConfigError("config: missing required section 'geometry'");
    const json& g = root["geometry"];
    checkKeys(g, "geometry", {"type", "H_j", "H_s", "R", "b"});
    c.kind = caseKindFromString(getStr(g, "geometry", "type", ""));
    c.hJet = getNum(g, "geometry", "H_j", c.hJet);
    c.hStandoff = getNum(g, "geometry", "H_s", c.hStandoff);
    c.radius = getNum(g, "geometry", "R", c.radius);
    c.slotHeight = getNum(g, "geometry", "b", c.slotHeight);
    for (double v : {c.hJet, c.hStandoff, c.radius, c.slotHeight})
        if (!(v > 0.0)) throw ConfigError("geometry: dimensional parameters must be positive");

    if (root.contains("fluid")) {
        checkKeys(root["fluid"], "fluid", {"nu"});
        c.nu = getNum(root["fluid"], "fluid", "nu", c.nu);
    }
    if (c.kind == CaseKind::cylinder) {
        c.nu = root.contains("fluid") ? c.nu : 1.5e-5;
        c.uJet = 48.0;
    }
    c.uJet = getNum(root, "config", "U_jet", c.uJet);

    c.grid = c.kind == CaseKind::flatPlate ? flatPlatePreset(GridLevel::coarse)
                                           : cylinderPreset(GridLevel::coarse);
    if (root.contains("grid")) {
        const json& gr = root["grid"];
        checkKeys(gr, "grid",
                  {"level", "target_yplus", "expansion_ratio", "dx", "far_spacing_factor",
                   "streamwise_extent", "normal_extent", "far_extent", "nx", "ny"});
        std::string level = getStr(gr, "grid", "level", "coarse");
        if (level == "custom") {
            c.customGrid = true;
        } else {
            c.level = gridLevelFromString(level);
            c.grid = c.kind == CaseKind::flatPlate ? flatPlatePreset(c.level)
                                                   : cylinderPreset(c.level);
        }
        c.grid.targetYplus = getNum(gr, "grid", "target_yplus", c.grid.targetYplus);
        c.grid.expansionRatio = getNum(gr, "grid", "expansion_ratio", c.grid.expansionRatio);
        c.grid.dx = getNum(gr, "grid", "dx", c.grid.dx);
        c.grid.farSpacingFactor = getNum(gr, "grid", "far_spacing_factor", c.grid.farSpacingFactor);
        c.grid.streamwiseExtent = getNum(gr, "grid", "streamwise_extent", c.grid.streamwiseExtent);
        c.grid.normalExtent = getNum(gr, "grid", "normal_extent", c.grid.normalExtent);
        c.grid.farExtent = getNum(gr, "grid", "far_extent", c.grid.farExtent);
        c.grid.nx = getInt(gr, "grid", "nx", 0);
        c.grid.ny = getInt(gr, "grid", "ny", 0);
        c.grid.validate();
    }

    if (root.contains("turbulence")) {
        const json& t = root["turbulence"];
        checkKeys(t, "turbulence",
                  {"model", "intensity", "length_scale", "constants", "force_fr1_one"});
        c.model = turbulenceModelFromString(getStr(t, "turbulence", "model", "kOmegaSST"));
        c.intensity = getNum(t, "turbulence", "intensity", c.intensity);
        c.lengthScale = getNum(t, "turbulence", "length_scale", 0.0);
        c.forceFr1One = getBool(t, "turbulence", "force_fr1_one", false);
        if (t.contains("constants")) {
            const json& k = t["constants"];
            checkKeys(k, "turbulence.constants",
                      {"alpha1", "beta1", "sigmaK1", "sigmaOmega1", "alpha2", "beta2", "sigmaK2",
                       "sigmaOmega2", "betaStar", "a1", "cr1", "cr2", "cr3", "cMu", "c1", "c2",
                       "sigmaK", "sigmaEps"});
            auto& s = c.sst;
            s.alpha1 = getNum(k, "constants", "alpha1", s.alpha1);
            s.beta1 = getNum(k, "constants", "beta1", s.beta1);
            s.sigmaK1 = getNum(k, "constants", "sigmaK1", s.sigmaK1);
            s.sigmaOmega1 = getNum(k, "constants", "sigmaOmega1", s.sigmaOmega1);
            s.alpha2 = getNum(k, "constants", "alpha2", s.alpha2);
            s.beta2 = getNum(k, "constants", "beta2", s.beta2);
            s.sigmaK2 = getNum(k, "constants", "sigmaK2", s.sigmaK2);
            s.sigmaOmega2 = getNum(k, "constants", "sigmaOmega2", s.sigmaOmega2);
            s.betaStar = getNum(k, "constants", "betaStar", s.betaStar);
            s.a1 = getNum(k, "constants", "a1", s.a1);
            c.cc.cr1 = getNum(k, "constants", "cr1", c.cc.cr1);
            c.cc.cr2 = getNum(k, "constants", "cr2", c.cc.cr2);
            c.cc.cr3 = getNum(k, "constants", "cr3", c.cc.cr3);
            c.ls.cMu = getNum(k, "constants", "cMu", c.ls.cMu);
            c.ls.c1 = getNum(k, "constants", "c1", c.ls.c1);
            c.ls.c2 = getNum(k, "constants", "c2", c.ls.c2);
            c.ls.sigmaK = getNum(k, "constants", "sigmaK", c.ls.sigmaK);
            c.ls.sigmaEps = getNum(k, "constants", "sigmaEps", c.ls.sigmaEps);
        }
    }

    if (root.contains("schemes")) {
        const json& s = root["schemes"];
        checkKeys(s, "schemes", {"div_U", "div_turb"});
        c.divU = divSchemeFromString(getStr(s, "schemes", "div_U", "linear_upwind"));
        c.divTurb = divSchemeFromString(getStr(s, "schemes", "div_turb", "upwind"));
    }

    if (root.contains("algorithm")) {
        const json& a = root["algorithm"];
        checkKeys(a, "algorithm",
                  {"type", "relaxation", "ramp", "n_correctors", "maxCo", "dt_max",
                   "pseudo_time_co", "time_scheme", "settle"});
        std::string alg = getStr(a, "algorithm", "type", "simplec");
        if (alg == "simple")
            c.algorithm = Algorithm::simple;
        else if (alg == "simplec")
            c.algorithm = Algorithm::simplec;
        else if (alg == "piso")
            c.algorithm = Algorithm::piso;
        else
            throw ConfigError("algorithm.type: unknown value '" + alg + "'");
        if (a.contains("relaxation")) {
            const json& r = a["relaxation"];
            checkKeys(r, "algorithm.relaxation", {"p", "U", "k", "omega"});
            c.relaxation.p = getNum(r, "relaxation", "p", c.relaxation.p);
            c.relaxation.u = getNum(r, "relaxation", "U", c.relaxation.u);
            c.relaxation.k = getNum(r, "relaxation", "k", c.relaxation.k);
            c.relaxation.omega = getNum(r, "relaxation", "omega", c.relaxation.omega);
            c.relaxation.validate();
        }
        if (a.contains("ramp")) {
            const json& r = a["ramp"];
            checkKeys(r, "algorithm.ramp", {"iterations", "initial_scale"});
            c.rampIterations = getInt(r, "ramp", "iterations", 0);
            c.rampInitialScale = getNum(r, "ramp", "initial_scale", 1.0);
        }
        c.nCorrectors = getInt(a, "algorithm", "n_correctors", c.nCorrectors);
        c.maxCo = getNum(a, "algorithm", "maxCo", c.maxCo);
        c.dtMax = getNum(a, "algorithm", "dt_max", c.dtMax);
        c.pseudoTimeCo = getNum(a, "algorithm", "pseudo_time_co", c.pseudoTimeCo);
        if (a.contains("settle")) {
            const json& st = a["settle"];
            checkKeys(st, "algorithm.settle",
                      {"after", "p", "U", "k", "omega", "pseudo_time_co"});
            c.settleAfter = getInt(st, "settle", "after", 0);
            c.settleRelaxation.p = getNum(st, "settle", "p", c.settleRelaxation.p);
            c.settleRelaxation.u = getNum(st, "settle", "U", c.settleRelaxation.u);
            c.settleRelaxation.k = getNum(st, "settle", "k", c.settleRelaxation.k);
            c.settleRelaxation.omega = getNum(st, "settle", "omega", c.settleRelaxation.omega);
            c.settleRelaxation.validate();
            c.settlePseudoTimeCo = getNum(st, "settle", "pseudo_time_co", c.settlePseudoTimeCo);
        }
        std::string ts = getStr(a, "algorithm", "time_scheme", "euler");
        if (ts == "euler")
            c.timeScheme = TimeScheme::euler;
        else if (ts == "backward")
            c.timeScheme = TimeScheme::backward;
        else
            throw ConfigError("algorithm.time_scheme: unknown value '" + ts + "'");
    }

    c.residualControl = {{"p", 1e-7}, {"Ux", 1e-7}, {"Uy", 1e-7}, {"k", 1e-7}, {"omega", 1e-7}};
    if (root.contains("run")) {
        const json& r = root["run"];
        checkKeys(r, "run",
                  {"max_iterations", "end_time", "write_interval", "residual_control",
                   "tight_final_pressure", "restart_from"});
        c.maxIterations = getInt(r, "run", "max_iterations", c.maxIterations);
        c.endTime = getNum(r, "run", "end_time", c.endTime);
        c.writeInterval = getInt(r, "run", "write_interval", c.writeInterval);
        c.tightFinalPressure = getBool(r, "run", "tight_final_pressure", true);
        c.restartFrom = getStr(r, "run", "restart_from", "");
        if (r.contains("residual_control")) {
            const json& rc = r["residual_control"];
            checkKeys(rc, "run.residual_control", {"p", "U", "k", "omega", "epsilon"});
            c.residualControl.clear();
            if (rc.contains("p")) c.residualControl["p"] = getNum(rc, "rc", "p", 1e-7);
            if (rc.contains("U")) {
                double v = getNum(rc, "rc", "U", 1e-7);
                c.residualControl["Ux"] = v;
                c.residualControl["Uy"] = v;
            }
            if (rc.contains("k")) c.residualControl["k"] = getNum(rc, "rc", "k", 1e-7);
            if (rc.contains("omega"))
                c.residualControl["omega"] = getNum(rc, "rc", "omega", 1e-7);
            if (rc.contains("epsilon"))
                c.residualControl["epsilon"] = getNum(rc, "rc", "epsilon", 1e-7);
        }
    }

    if (root.contains("solvers")) {
        const json& s = root["solvers"];
        checkKeys(s, "solvers", {"p", "U", "turbulence"});
        if (s.contains("p")) parseSolver(s["p"], "solvers.p", c.pressureSolver);
        if (s.contains("U")) parseSolver(s["U"], "solvers.U", c.momentumSolver);
        if (s.contains("turbulence"))
            parseSolver(s["turbulence"], "solvers.turbulence", c.turbulenceSolver);
    }

    if (root.contains("inlet")) {
        const json& i = root["inlet"];
        checkKeys(i, "inlet", {"profile", "mode", "power_law_exponent"});
        c.inletProfileSpec = getStr(i, "inlet", "profile", c.inletProfileSpec);
        c.powerLawExponent = getNum(i, "inlet", "power_law_exponent", c.powerLawExponent);
        std::string mode = getStr(i, "inlet", "mode", "");
        if (mode.empty())
            c.inletMode = c.kind == CaseKind::flatPlate ? InletScaleMode::scaleToMean
                                                        : InletScaleMode::scaleToPeak;
        else if (mode == "scale_to_mean")
            c.inletMode = InletScaleMode::scaleToMean;
        else if (mode == "scale_to_peak")
            c.inletMode = InletScaleMode::scaleToPeak;
        else
            throw ConfigError("inlet.mode: unknown value '" + mode + "'");
    } else {
        c.inletMode = c.kind == CaseKind::flatPlate ? InletScaleMode::scaleToMean
                                                    : InletScaleMode::scaleToPeak;
    }
    if (c.inletProfileSpec != "top_hat" && c.inletProfileSpec != "power_law") {
        std::filesystem::path p(c.inletProfileSpec);
        if (p.is_relative()) p = std::filesystem::path(baseDir) / p;
        c.inletProfileSpec = p.string();
        if (!std::filesystem::exists(p))
            throw ConfigError("inlet.profile: file does not exist: " + p.string());
    }

    if (root.contains("probes")) {
        if (!root["probes"].is_array()) throw ConfigError("probes: expected an array of [x, y]");
        for (const auto& pt : root["probes"]) {
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                throw ConfigError("probes: each entry must be [x, y] numbers");
            c.probes.push_back({pt[0].get<double>(), pt[1].get<double>()});
        }
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        checkKeys(o, "output", {"dir", "formats"});
        c.outputDir = getStr(o, "output", "dir", c.outputDir);
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) throw ConfigError("output.formats: expected an array");
            c.outputFormats.clear();
            for (const auto& f : o["formats"]) {
                std::string s = f.get<std::string>();
                if (s != "vtk" && s != "csv")
                    throw ConfigError("output.formats: unknown format '" + s + "'");
                c.outputFormats.push_back(s);
            }
        }
    }

    std::string oi = getStr(root, "config", "outlet_inflow", "normal");
    if (oi == "normal")
        c.outletNormalInflow = true;
    else if (oi == "zero_gradient")
        c.outletNormalInflow = false;
    else
        throw ConfigError("outlet_inflow: expected 'normal' or 'zero_gradient'");

    std::string conv = getStr(root, "config", "cp_convention", "printed");
    if (conv == "printed")
        c.squaredCpConvention = false;
    else if (conv == "squared")
        c.squaredCpConvention = true;
    else
        throw ConfigError("cp_convention: expected 'printed' or 'squared'");

    if (c.model == TurbulenceModelKind::launderSharmaKE) {
        // residual control key follows the second variable
        auto it = c.residualControl.find("omega");
        if (it != c.residualControl.end()) {
            c.residualControl["epsilon"] = it->second;
            c.residualControl.erase("omega");
        }
    }
    return c;
}

CaseConfig loadConfig(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parseConfig(text, std::filesystem::path(path).parent_path().string());
}

} // namespace coanda
