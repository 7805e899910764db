#include "coanda/casedriver.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "coanda/analysis.hpp"

namespace coanda {

namespace fs = std::filesystem;

Mesh buildCaseMesh(const CaseConfig& cfg) {
    if (cfg.kind == CaseKind::flatPlate)
        return generateFlatPlateMesh(cfg.grid, cfg.hJet, cfg.hStandoff, cfg.uJet, cfg.nu);
    return generateCylinderMesh(cfg.grid, cfg.radius, cfg.slotHeight, cfg.uJet, cfg.nu);
}

std::vector<double> patchWallDistances(const Mesh& mesh, const std::string& patchName) {
    const Patch& p = mesh.patch(patchName);
    std::vector<double> d(p.count);
    for (int i = 0; i < p.count; ++i) {
        int f = p.start + i;
        d[i] = std::abs(dot(mesh.deltaPN[f], unit(mesh.faceArea[f])));
    }
    return d;
}

CaseRunner::CaseRunner(const CaseConfig& cfg) : CaseRunner(cfg, buildCaseMesh(cfg)) {}

CaseRunner::CaseRunner(const CaseConfig& cfg, Mesh mesh)
    : cfg_(cfg), mesh_(std::move(mesh)) {
    initialiseFields();
}

void CaseRunner::initialiseFields() {
    const Mesh& m = mesh_;
    state_.u = VectorField("U", m, {0.0, 0.0}, "m/s");
    state_.p = ScalarField("p", m, 0.0, "m2/s2");
    state_.phi = FaceFluxField(m);

    // velocity: profiled inlet, no-slip walls, zero-gradient outlet
    InletProfile profile = cfg_.resolveInletProfile();
    const Patch& inlet = m.patch("inlet");
    std::vector<double> eta(inlet.count);
    for (int i = 0; i < inlet.count; ++i) {
        const Vec2& fc = m.faceCentre[inlet.start + i];
        eta[i] = cfg_.kind == CaseKind::flatPlate
                     ? (fc.y - cfg_.hStandoff) / cfg_.hJet
                     : (mag(fc) - cfg_.radius) / cfg_.slotHeight;
    }
    auto inletU = inletVelocityBc(profile, m, "inlet", eta, cfg_.uJet, cfg_.inletMode);
    state_.u.bc(m, "inlet") = BoundaryCondition<Vec2>::fixedProfile(inletU);
    state_.u.bc(m, "wall") = BoundaryCondition<Vec2>::fixed({0.0, 0.0});
    if (m.hasPatch("backWall"))
        state_.u.bc(m, "backWall") = BoundaryCondition<Vec2>::fixed({0.0, 0.0});
    state_.u.bc(m, "outlet") = BoundaryCondition<Vec2>::zeroGrad();

    state_.p.bc(m, "outlet") = BoundaryCondition<double>::fixed(0.0);

    // turbulence: quiescent interior at the isotropic inlet estimates
    turb_.kind = cfg_.model;
    turb_.sst = cfg_.sst;
    turb_.cc = cfg_.cc;
    turb_.ls = cfg_.ls;
    turb_.forceFr1One = cfg_.forceFr1One;
    const bool omegaBased = isOmegaBased(cfg_.model);
    auto est = isotropicInletEstimates(cfg_.uJet, cfg_.intensity, cfg_.lengthScaleOf(),
                                       cfg_.model);
    double nut0;
    if (omegaBased || cfg_.model == TurbulenceModelKind::laminar) {
        nut0 = est.omegaOrEpsilon > 0 ? est.k / est.omegaOrEpsilon : 0.0;
    } else {
        double rt = est.k * est.k / (std::max(est.omegaOrEpsilon, 1e-300) * cfg_.nu);
        nut0 = cfg_.ls.cMu * lsFMu(rt) * est.k * est.k / std::max(est.omegaOrEpsilon, 1e-300);
    }

    turb_.k = ScalarField("k", m, std::max(est.k, turb_.kFloor), "m2/s2");
    turb_.omegaOrEpsilon = ScalarField(omegaBased ? "omega" : "epsilon", m,
                                       std::max(est.omegaOrEpsilon,
                                                omegaBased ? turb_.omegaFloor : turb_.epsilonFloor),
                                       omegaBased ? "1/s" : "m2/s3");
    turb_.nut = ScalarField("nut", m, nut0, "m2/s");

    turb_.k.bc(m, "inlet") = BoundaryCondition<double>::fixed(est.k);
    turb_.omegaOrEpsilon.bc(m, "inlet") = BoundaryCondition<double>::fixed(est.omegaOrEpsilon);
    turb_.nut.bc(m, "inlet") = BoundaryCondition<double>{BcType::calculated, nut0, {}};
    turb_.nut.bc(m, "outlet") = BoundaryCondition<double>{BcType::calculated, nut0, {}};
    for (const char* wallName : {"wall", "backWall"}) {
        if (!m.hasPatch(wallName)) continue;
        turb_.k.bc(m, wallName) = BoundaryCondition<double>::fixed(0.0);
        turb_.nut.bc(m, wallName) = BoundaryCondition<double>::fixed(0.0);
        if (omegaBased) {
            auto dy = patchWallDistances(m, wallName);
            std::vector<double> wallOmega(dy.size());
            for (size_t i = 0; i < dy.size(); ++i)
                wallOmega[i] = omegaWallValue(cfg_.nu, cfg_.sst.beta1, dy[i]);
            turb_.omegaOrEpsilon.bc(m, wallName) =
                BoundaryCondition<double>::fixedProfile(wallOmega);
        } else {
            turb_.omegaOrEpsilon.bc(m, wallName) = BoundaryCondition<double>::fixed(0.0);
        }
    }

    // boundary fluxes from the fixed-value velocity faces
    for (int f = m.nInteriorFaces; f < m.nFaces(); ++f) {
        int pi = ScalarField::patchIndexOf(m, f);
        if (state_.u.bcs[pi].type == BcType::fixedValue)
            state_.phi[f] = dot(state_.u.boundaryValue(m, f), m.faceArea[f]);
    }

    nuEff_ = makeNuEff();

    if (!cfg_.restartFrom.empty()) {
        fs::path p(cfg_.restartFrom);
        if (fs::is_directory(p)) p /= "checkpoint.bin";
        loadCheckpointState(p.string());
    }

    // probe sanity: all locations inside the domain
    for (const auto& pt : cfg_.probes) {
        bool inside;
        if (cfg_.kind == CaseKind::flatPlate) {
            inside = pt.x >= 0.0 && pt.x <= cfg_.grid.streamwiseExtent * cfg_.hJet &&
                     pt.y >= 0.0 && pt.y <= cfg_.grid.normalExtent * cfg_.hJet;
        } else {
            double r = mag(pt);
            inside = r >= cfg_.radius && r <= cfg_.grid.farExtent * cfg_.radius;
        }
        if (!inside)
            throw ConfigError("probe location outside the domain: (" + std::to_string(pt.x) +
                              ", " + std::to_string(pt.y) + ")");
    }
}

ScalarField CaseRunner::makeNuEff() const {
    ScalarField nuEff("nuEff", mesh_, cfg_.nu, "m2/s");
    for (int c = 0; c < mesh_.nCells(); ++c) nuEff[c] = cfg_.nu + turb_.nut[c];
    for (size_t i = 0; i < mesh_.patches.size(); ++i) {
        const auto& nb = turb_.nut.bcs[i];
        if (nb.type == BcType::fixedValue && nb.perFace.empty())
            nuEff.bcs[i] = BoundaryCondition<double>::fixed(cfg_.nu + nb.uniform);
        else
            nuEff.bcs[i] = BoundaryCondition<double>{BcType::calculated, cfg_.nu, {}};
    }
    return nuEff;
}

RelaxationSpec CaseRunner::rampedRelaxation() const {
    if (cfg_.settleAfter > 0 && state_.outerIter >= cfg_.settleAfter)
        return cfg_.settleRelaxation;
    if (cfg_.rampIterations <= 0 || state_.outerIter >= cfg_.rampIterations)
        return cfg_.relaxation;
    double t = static_cast<double>(state_.outerIter) / cfg_.rampIterations;
    double s = cfg_.rampInitialScale + (1.0 - cfg_.rampInitialScale) * t;
    return cfg_.relaxation.scaled(s);
}

void CaseRunner::recordTurbulence(const TurbulenceSolveInfo& info) {
    state_.residuals["k"] = {info.kSolve.initialResidual, info.kSolve.finalResidual,
                             info.kSolve.iterations};
    const std::string second = isOmegaBased(cfg_.model) ? "omega" : "epsilon";
    state_.residuals[second] = {info.secondSolve.initialResidual, info.secondSolve.finalResidual,
                                info.secondSolve.iterations};
}

void CaseRunner::refreshOutletInflow() {
    if (!cfg_.outletNormalInflow || !mesh_.hasPatch("outlet")) return;
    const Patch& p = mesh_.patch("outlet");
    std::vector<Vec2> vals(p.count);
    for (int i = 0; i < p.count; ++i) {
        int f = p.start + i;
        if (state_.phi[f] >= 0.0) {
            vals[i] = state_.u[mesh_.owner[f]]; // outflow: zero-gradient
        } else {
            // inflow enters along the boundary normal at the flux-consistent
            // speed; no tangential momentum is recycled into the domain
            double area = mag(mesh_.faceArea[f]);
            vals[i] = (state_.phi[f] / (area * area)) * mesh_.faceArea[f];
        }
    }
    state_.u.bc(mesh_, "outlet") = BoundaryCondition<Vec2>::fixedProfile(vals);
}

OuterIterationResult CaseRunner::iterate() {
    refreshOutletInflow();
    PvSolverSpecs specs{cfg_.pressureSolver, cfg_.momentumSolver};
    RelaxationSpec relax = rampedRelaxation();
    OuterIterationResult out;

    if (cfg_.algorithm == Algorithm::piso) {
        double dt = adaptiveDt(state_.phi, mesh_, cfg_.maxCo, cfg_.dtMax);
        VectorField uAtEntry = state_.u;
        const VectorField* prev =
            (cfg_.timeScheme == TimeScheme::backward && havePrev_) ? &uPrev_ : nullptr;
        out = pisoTimeStep(state_, mesh_, nuEff_, cfg_.nCorrectors, dt, cfg_.divU, specs, prev,
                           dtPrev_);
        uPrev_ = std::move(uAtEntry);
        dtPrev_ = dt;
        lastDt_ = dt;
        havePrev_ = true;
        if (cfg_.model != TurbulenceModelKind::laminar) {
            auto info = turbulenceUpdate(turb_, state_.u, state_.phi, mesh_, cfg_.nu,
                                         relax.k, cfg_.divTurb, cfg_.turbulenceSolver, dt);
            recordTurbulence(info);
            nuEff_ = makeNuEff();
        }
    } else {
        bool consistent = cfg_.algorithm == Algorithm::simplec;
        double pco = (cfg_.settleAfter > 0 && state_.outerIter >= cfg_.settleAfter)
                         ? cfg_.settlePseudoTimeCo
                         : cfg_.pseudoTimeCo;
        PseudoTimeSpec pseudo{pco, cfg_.uJet, 0.02};
        out = simpleOuterIteration(state_, mesh_, nuEff_, relax, consistent, cfg_.divU, specs,
                                   pseudo);
        if (cfg_.model != TurbulenceModelKind::laminar) {
            auto info = turbulenceUpdate(turb_, state_.u, state_.phi, mesh_, cfg_.nu,
                                         relax.k, cfg_.divTurb, cfg_.turbulenceSolver, 0.0);
            recordTurbulence(info);
            nuEff_ = makeNuEff();
        }
    }
    return out;
}

bool CaseRunner::convergedNow() const {
    if (state_.outerIter == 0) return false;
    return convergenceCheck(state_.residuals, cfg_.residualControl);
}

void CaseRunner::tightPressureSweep() {
    PvSolverSpecs specs{cfg_.pressureSolver, cfg_.momentumSolver};
    specs.pressure.tolerance = 1e-15;
    specs.pressure.relTol = 0.0;
    specs.pressure.maxIter = std::max(specs.pressure.maxIter, 20000);
    bool consistent = cfg_.algorithm != Algorithm::simple;
    RelaxationSpec relax = cfg_.relaxation;
    PseudoTimeSpec pseudo{cfg_.pseudoTimeCo, cfg_.uJet, 0.02};
    // two passes: the second solve restarts the Krylov space on the
    // remaining defect and grinds the per-cell continuity to near roundoff
    simpleOuterIteration(state_, mesh_, nuEff_, relax, consistent, cfg_.divU, specs, pseudo);
    simpleOuterIteration(state_, mesh_, nuEff_, relax, consistent, cfg_.divU, specs, pseudo);
}

double CaseRunner::inletFlux() const {
    const Patch& inlet = mesh_.patch("inlet");
    double q = 0.0;
    for (int f = inlet.start; f < inlet.start + inlet.count; ++f) q += state_.phi[f];
    return std::abs(q);
}

double CaseRunner::globalMassImbalance() const {
    double q = 0.0;
    for (int f = mesh_.nInteriorFaces; f < mesh_.nFaces(); ++f) q += state_.phi[f];
    return std::abs(q);
}

double CaseRunner::maxContinuityDefect() const {
    auto div = fluxDivergence(state_.phi, mesh_);
    double m = 0.0;
    for (double d : div) m = std::max(m, std::abs(d));
    return m;
}

void CaseRunner::loadCheckpointState(const std::string& path) {
    Checkpoint c = readCheckpoint(path);
    if (c.u.size() != static_cast<size_t>(mesh_.nCells()) ||
        c.phi.size() != static_cast<size_t>(mesh_.nFaces()))
        throw IoError("checkpoint does not match the mesh: " + path);
    state_.u.v = c.u;
    state_.p.v = c.p;
    state_.phi.v = c.phi;
    turb_.k.v = c.k;
    turb_.omegaOrEpsilon.v = c.second;
    turb_.nut.v = c.nut;
    state_.outerIter = c.outerIter;
    state_.time = c.time;
    nuEff_ = makeNuEff();
}

void CaseRunner::writeOutputs(const std::string& dir) const {
    fs::create_directories(dir);
    const TurbulenceState* t =
        cfg_.model == TurbulenceModelKind::laminar ? nullptr : &turb_;
    for (const auto& fmt : cfg_.outputFormats) {
        if (fmt == "vtk") writeVtkFields(dir + "/fields.vtk", mesh_, state_.u, state_.p, t);
        if (fmt == "csv") writeFieldsCsv(dir + "/fields.csv", mesh_, state_.u, state_.p, t);
    }
    Checkpoint c;
    c.outerIter = state_.outerIter;
    c.time = state_.time;
    c.u = state_.u.v;
    c.p = state_.p.v;
    c.phi = state_.phi.v;
    c.k = turb_.k.v;
    c.second = turb_.omegaOrEpsilon.v;
    c.nut = turb_.nut.v;
    writeCheckpoint(dir + "/checkpoint.bin", c);
    mesh_.saveCache(dir + "/mesh.cache");

    nlohmann::json info;
    info["geometry"] = cfg_.kind == CaseKind::flatPlate ? "flat_plate" : "cylinder";
    info["H_j"] = cfg_.hJet;
    info["H_s"] = cfg_.hStandoff;
    info["R"] = cfg_.radius;
    info["b"] = cfg_.slotHeight;
    info["nu"] = cfg_.nu;
    info["U_jet"] = cfg_.uJet;
    info["model"] = cfg_.model == TurbulenceModelKind::laminar ? "laminar"
                    : cfg_.model == TurbulenceModelKind::kOmegaSst ? "kOmegaSST"
                    : cfg_.model == TurbulenceModelKind::kOmegaSstCC ? "kOmegaSST-CC"
                                                                     : "LaunderSharmaKE";
    info["cp_convention"] = cfg_.squaredCpConvention ? "squared" : "printed";
    std::ofstream os(dir + "/case_info.json");
    os << info.dump(2) << "\n";
}

RunResult runCase(const CaseConfig& cfg) {
    CaseRunner runner(cfg);
    return runner.run();
}

RunResult CaseRunner::run() {
    RunResult result;
    result.outputDir = cfg_.outputDir;
    fs::create_directories(cfg_.outputDir);

    ResidualLog log(cfg_.outputDir + "/residuals.csv");
    std::ofstream probeFile;
    std::vector<int> probeCells;
    if (!cfg_.probes.empty()) {
        probeFile.open(cfg_.outputDir + "/probes.csv");
        probeFile << "iteration_or_time,probe_id,x,y,u,v,p\n";
        for (const auto& pt : cfg_.probes) {
            int best = 0;
            double bestD = 1e300;
            for (int c = 0; c < mesh_.nCells(); ++c) {
                double d = magSqr(mesh_.cellCentre[c] - pt);
                if (d < bestD) {
                    bestD = d;
                    best = c;
                }
            }
            probeCells.push_back(best);
        }
    }

    std::map<std::string, double> baselineResiduals;
    int divergenceStreak = 0;
    const bool transient = cfg_.algorithm == Algorithm::piso;
    const int startIter = state_.outerIter;

    auto logIteration = [&]() {
        double t = transient ? state_.time : static_cast<double>(state_.outerIter);
        for (const auto& [name, r] : state_.residuals)
            log.append(t, name, r.initial, r.final, r.iterations);
        for (size_t i = 0; i < probeCells.size(); ++i) {
            int c = probeCells[i];
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%.10g,%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", t, i,
                          mesh_.cellCentre[c].x, mesh_.cellCentre[c].y, state_.u[c].x,
                          state_.u[c].y, state_.p[c]);
            probeFile << buf;
        }
    };

    bool converged = false;
    try {
        while (state_.outerIter - startIter < cfg_.maxIterations) {
            if (transient && cfg_.endTime > 0.0 && state_.time >= cfg_.endTime) break;
            iterate();
            logIteration();

            for (const auto& [name, r] : state_.residuals) {
                if (!std::isfinite(r.initial))
                    throw DivergenceError("residual of " + name + " is not finite at iteration " +
                                          std::to_string(state_.outerIter));
                auto it = baselineResiduals.find(name);
                if (it == baselineResiduals.end()) baselineResiduals[name] = r.initial;
            }
            bool growing = false;
            for (const auto& [name, r] : state_.residuals)
                if (r.initial > 1e3 * std::max(baselineResiduals[name], 1e-300)) growing = true;
            divergenceStreak = growing ? divergenceStreak + 1 : 0;
            if (divergenceStreak >= 50)
                throw DivergenceError(
                    "residuals grew beyond 1000x their initial level for 50 iterations "
                    "(divergence) at iteration " +
                    std::to_string(state_.outerIter));

            if (cfg_.writeInterval > 0 &&
                (state_.outerIter - startIter) % cfg_.writeInterval == 0)
                writeOutputs(cfg_.outputDir);

            if (!transient && convergedNow()) {
                if (cfg_.tightFinalPressure) {
                    tightPressureSweep();
                    logIteration();
                }
                converged = true;
                break;
            }
        }
    } catch (const DivergenceError&) {
        writeOutputs(cfg_.outputDir); // preserve the last state for inspection
        throw;
    }

    result.converged = converged || (transient && cfg_.endTime > 0.0);
    result.iterations = state_.outerIter - startIter;
    result.time = state_.time;
    result.finalResiduals = state_.residuals;
    result.maxYPlus = maxYPlus(state_.u, mesh_, cfg_.nu);
    result.inletFlux = inletFlux();
    result.massImbalance = globalMassImbalance();
    result.continuityMax = maxContinuityDefect();
    writeOutputs(cfg_.outputDir);

    nlohmann::json summary;
    summary["converged"] = result.converged;
    summary["iterations"] = result.iterations;
    summary["time"] = result.time;
    summary["max_yplus"] = result.maxYPlus;
    summary["inlet_flux"] = result.inletFlux;
    summary["mass_imbalance"] = result.massImbalance;
    summary["continuity_max"] = result.continuityMax;
    summary["turbulence_clip_count"] = turb_.lastClipCount;
    for (const auto& [name, r] : state_.residuals)
        summary["final_residuals"][name] = r.initial;
    std::ofstream os(cfg_.outputDir + "/summary.json");
    os << summary.dump(2) << "\n";
    return result;
}

} // namespace coanda
