#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coanda/analysis.hpp"
#include "coanda/casedriver.hpp"

using namespace coanda;
namespace fs = std::filesystem;

namespace {

int cmdMesh(const std::string& configPath) {
    CaseConfig cfg = loadConfig(configPath);
    Mesh mesh = buildCaseMesh(cfg);
    MeshQualityReport q = mesh.qualityReport();
    double volume = 0.0;
    for (double v : mesh.cellVolume) volume += v;

    std::printf("mesh: %d cells, %d faces (%d boundary)\n", mesh.nCells(), mesh.nFaces(),
                mesh.nBoundaryFaces());
    for (const auto& p : mesh.patches) std::printf("  patch %-10s %6d faces\n", p.name.c_str(), p.count);
    std::printf("  total volume (per unit depth): %.9g m^3/m\n", volume);
    std::printf("  max non-orthogonality: %.3f deg\n", q.maxNonOrthoDeg);
    std::printf("  max skewness:          %.4f\n", q.maxSkewness);
    std::printf("  min volume:            %.4g\n", q.minVolume);
    std::printf("  max aspect ratio:      %.1f\n", q.maxAspectRatio);

    fs::create_directories(cfg.outputDir);
    mesh.saveCache(cfg.outputDir + "/mesh.cache");
    writeVtkMesh(cfg.outputDir + "/mesh.vtk", mesh);
    std::printf("wrote %s/mesh.cache and mesh.vtk\n", cfg.outputDir.c_str());
    return 0;
}

int cmdRun(const std::string& configPath) {
    CaseConfig cfg = loadConfig(configPath);
    RunResult r = runCase(cfg);
    std::printf("%s after %d iterations (t = %.6g s)\n",
                r.converged ? "converged" : "stopped at budget", r.iterations, r.time);
    for (const auto& [name, res] : r.finalResiduals)
        std::printf("  %-8s residual %.3e\n", name.c_str(), res.initial);
    std::printf("  max y+            %.3f\n", r.maxYPlus);
    std::printf("  inlet flux        %.6g\n", r.inletFlux);
    std::printf("  mass imbalance    %.3e\n", r.massImbalance);
    std::printf("  max cell defect   %.3e\n", r.continuityMax);
    std::printf("outputs in %s\n", r.outputDir.c_str());
    return 0;
}

int cmdPost(const std::string& caseDir, const std::vector<double>& stations) {
    nlohmann::json info;
    {
        std::ifstream is(caseDir + "/case_info.json");
        if (!is) throw IoError("cannot read " + caseDir + "/case_info.json (run the case first)");
        is >> info;
    }
    Mesh mesh = Mesh::loadCache(caseDir + "/mesh.cache");
    Checkpoint ck = readCheckpoint(caseDir + "/checkpoint.bin");

    CaseKind kind = caseKindFromString(info["geometry"].get<std::string>());
    double uJet = info["U_jet"].get<double>();
    double nu = info["nu"].get<double>();
    double radius = info["R"].get<double>();
    bool squared = info["cp_convention"].get<std::string>() == "squared";
    double lengthNorm = kind == CaseKind::flatPlate ? info["H_j"].get<double>()
                                                    : info["b"].get<double>();

    VectorField u("U", mesh);
    ScalarField p("p", mesh);
    u.v = ck.u;
    p.v = ck.p;

    WallProfile w = wallProfile(u, p, mesh, kind, nu, uJet, squared);
    {
        std::ofstream os(caseDir + "/wall_profile.csv");
        os << "# station[" << (kind == CaseKind::flatPlate ? "m" : "deg")
           << "], Cp[-], Cf[-], tau_w[Pa]\n";
        os << "station,Cp,Cf,tau_w\n";
        char buf[160];
        for (size_t i = 0; i < w.station.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", w.station[i], w.cp[i],
                          w.cf[i], w.tauW[i]);
            os << buf;
        }
    }
    std::printf("average Cp on the wall: %.6g\n", averageCp(w));
    if (kind == CaseKind::flatPlate) {
        auto xr = reattachmentPoint(w);
        if (xr)
            std::printf("reattachment at x = %.6g m\n", *xr);
        else
            std::printf("no reattachment point found\n");
    } else {
        auto sep = separationStation(w);
        if (sep)
            std::printf("separation at theta = %.4g deg\n", *sep);
        else
            std::printf("no separation found\n");
    }

    if (!stations.empty()) {
        std::vector<JetProfile> profiles;
        std::ofstream os(caseDir + "/jet_profiles.csv");
        os << "# station, wall-normal distance[m], streamwise velocity[m/s]\n";
        os << "station,dist,ut\n";
        for (double s : stations) {
            JetProfile jp = jetProfileExtract(u, mesh, kind, s, radius);
            profiles.push_back(jp);
            for (size_t i = 0; i < jp.dist.size(); ++i)
                os << s << "," << jp.dist[i] << "," << jp.ut[i] << "\n";
            std::printf("station %-8g U_max = %8.4g at %9.4g m, y2 = %9.4g m%s\n", s, jp.uMax,
                        jp.yOfUMax, jp.yHalf, jp.flagged ? "  [flagged]" : "");
        }
        if (profiles.size() >= 2) {
            DecaySpread ds = decayAndSpread(profiles, uJet, lengthNorm);
            std::ofstream ds_os(caseDir + "/decay_spread.csv");
            ds_os << "# station, U_max/U_jet[-], y2/L[-]\n";
            ds_os << "station,decay,spread\n";
            for (size_t i = 0; i < ds.station.size(); ++i)
                ds_os << ds.station[i] << "," << ds.uMaxNorm[i] << "," << ds.y2Norm[i] << "\n";
        }
    }
    return 0;
}

int cmdGci(double f1, double f2, double f3, double r, double fsafe) {
    GciReport rep = gciAnalyze(f1, f2, f3, r, fsafe);
    std::printf("%s", rep.table().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    // `gci` takes negative positionals (e.g. gci -1.65e-2 ... --r 1.4), which
    // option parsers mistake for flags; handle it by hand
    if (argc >= 2 && std::string(argv[1]) == "gci") {
        std::vector<double> vals;
        double r = 1.4, fsafe = 1.25;
        try {
            for (int i = 2; i < argc; ++i) {
                std::string a = argv[i];
                if (a == "--") continue;
                if (a == "--r" && i + 1 < argc)
                    r = std::stod(argv[++i]);
                else if (a == "--fs" && i + 1 < argc)
                    fsafe = std::stod(argv[++i]);
                else
                    vals.push_back(std::stod(a));
            }
            if (vals.size() != 3) {
                std::fprintf(stderr, "usage: coanda gci <f1> <f2> <f3> [--r 1.4] [--fs 1.25]\n");
                return 2;
            }
            return cmdGci(vals[0], vals[1], vals[2], r, fsafe);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }

    CLI::App app{"coanda: 2D incompressible finite-volume RANS solver and verification toolkit"};
    app.require_subcommand(1);

    std::string configPath, caseDir;
    std::vector<double> stations;
    double f1 = 0, f2 = 0, f3 = 0, ratio = 1.4, fsafe = 1.25;

    auto* meshCmd = app.add_subcommand("mesh", "generate the grid and report quality metrics");
    meshCmd->add_option("config", configPath, "case configuration file")->required();

    auto* runCmd = app.add_subcommand("run", "solve the case");
    runCmd->add_option("config", configPath, "case configuration file")->required();

    auto* postCmd = app.add_subcommand("post", "wall/jet profiles from a solved case directory");
    postCmd->add_option("casedir", caseDir, "case output directory")->required();
    postCmd->add_option("--stations", stations, "profile stations (x in m / theta in deg)");

    auto* gciCmd = app.add_subcommand("gci", "grid convergence index from three solutions");
    gciCmd->add_option("f1", f1, "fine-grid value")->required();
    gciCmd->add_option("f2", f2, "medium-grid value")->required();
    gciCmd->add_option("f3", f3, "coarse-grid value")->required();
    gciCmd->add_option("--r", ratio, "refinement ratio (default 1.4)");
    gciCmd->add_option("--fs", fsafe, "safety factor (default 1.25)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (meshCmd->parsed()) return cmdMesh(configPath);
        if (runCmd->parsed()) return cmdRun(configPath);
        if (postCmd->parsed()) return cmdPost(caseDir, stations);
        if (gciCmd->parsed()) return cmdGci(f1, f2, f3, ratio, fsafe);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
