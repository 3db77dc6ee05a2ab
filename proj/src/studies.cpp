#include "poro/studies.hpp"

#include "poro/assembly.hpp"
#include "poro/errors.hpp"
#include "poro/output.hpp"
#include "poro/registry.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace poro {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace

ScenarioRun run_scenario(const ScenarioConfig& cfg) {
    auto mesh = build_mesh(cfg.mesh);
    auto solver = std::make_shared<Solver>(mesh, cfg.material, make_loads(cfg.loads, cfg.load_amplitude), cfg.picard);
    const InitialData init = make_initial(cfg.initial, cfg.initial_amplitude);
    const State s0 = solver->initialize(init.u0, init.p0);
    RunConfig rc;
    rc.dt = cfg.dt;
    rc.n_steps = cfg.n_steps;
    rc.snapshot_every = cfg.write_vtk ? cfg.output_every : 0;
    rc.diagnostics = cfg.diagnostics;
    return {solver, run(*solver, s0, rc)};
}

void write_run_outputs(const ScenarioConfig& cfg, const ScenarioRun& run, const std::filesystem::path& dir,
                       const std::string& command) {
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    write_diagnostics_csv(csv, run.result.diagnostics);
    write_file(dir / "diagnostics.csv", csv.str());
    if (cfg.write_vtk) {
        for (const State& s : run.result.snapshots) {
            const int step = static_cast<int>(std::lround(s.t / cfg.dt));
            char name[64];
            std::snprintf(name, sizeof name, "state_%06d.vtk", step);
            std::ostringstream vtk;
            write_vtk(vtk, *run.solver, s, cfg.name + " t=" + g17(s.t));
            write_file(dir / name, vtk.str());
        }
    }
    write_file(dir / "manifest.json", run_manifest_json(cfg, *run.solver, run.result, command) + "\n");
}

double observed_order(const std::vector<double>& x, const std::vector<double>& err) {
    if (x.size() != err.size() || x.size() < 2) throw ValidationError("observed_order needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MmsRow mms_single(const ScenarioConfig& base, const std::string& case_id, double amplitude, int n, double dt,
                  int steps) {
    const MmsCase mc = make_mms_case(case_id, amplitude);
    MeshSpec ms = base.mesh;
    ms.file.clear();
    if (ms.generator.empty()) ms.generator = "centered_square";
    ms.n = n;
    ms.refine = 0;
    auto mesh = build_mesh(ms);
    Solver solver(mesh, base.material, mc.loads(base.material), base.picard);
    State s = solver.initialize(mc.u_at(0.0), mc.p_at(0.0));
    MmsRow row;
    row.n = n;
    row.h = mesh->max_edge_length();
    row.dt = dt;
    row.steps = steps;
    for (int k = 0; k < steps; ++k) {
        StepReport rep;
        State next = solver.picard_solve(s, dt, &rep);
        next.t = (k + 1) * dt;
        s = std::move(next);
        row.max_picard = std::max(row.max_picard, rep.iterations);
    }
    const double T = s.t;
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(solver.space_u().num_dofs());
    const Eigen::VectorXd zero_s = Eigen::VectorXd::Zero(solver.space_s().num_dofs());
    row.err_u_l2 = l2_error(solver.space_u(), s.u, mc.u_at(T));
    row.err_u_h1 = std::hypot(row.err_u_l2, h1_seminorm_error(solver.space_u(), s.u, mc.grad_u_at(T)));
    row.err_p_l2 = l2_error(solver.space_s(), s.p, mc.p_at(T));
    row.norm_u_h1 = std::hypot(l2_error(solver.space_u(), zero_u, mc.u_at(T)),
                               h1_seminorm_error(solver.space_u(), zero_u, mc.grad_u_at(T)));
    row.norm_p_l2 = l2_error(solver.space_s(), zero_s, mc.p_at(T));
    return row;
}

namespace {

void finish_table(MmsTable& t, bool spatial) {
    std::vector<double> x, eu, el, ep;
    for (const auto& r : t.rows) {
        x.push_back(spatial ? r.h : r.dt);
        eu.push_back(r.err_u_h1);
        el.push_back(r.err_u_l2);
        ep.push_back(r.err_p_l2);
    }
    if (t.rows.size() >= 2) {
        t.order_u_h1 = observed_order(x, eu);
        t.order_u_l2 = observed_order(x, el);
        t.order_p_l2 = observed_order(x, ep);
    }
    t.monotone = strictly_decreasing(eu) && strictly_decreasing(el) && strictly_decreasing(ep);
}

}  // namespace

MmsTable mms_spatial(const ScenarioConfig& base) {
    const auto& m = base.mms;
    if (m.levels.size() < 2) throw ConfigError("spatial study needs at least two mesh levels");
    MmsTable t;
    t.case_id = m.case_id;
    t.study = "spatial";
    t.fd_residual = make_mms_case(m.case_id, m.amplitude).fd_residual(base.material);
    if (t.fd_residual > 1e-6)
        throw ValidationError("manufactured loads fail the finite-difference check (residual " + g17(t.fd_residual) + ")");
    for (int n : m.levels) {
        const double h = 1.0 / n;
        const int steps = std::max(1, static_cast<int>(std::ceil(m.spatial_T / (m.dt_factor * h * h) - 1e-9)));
        t.rows.push_back(mms_single(base, m.case_id, m.amplitude, n, m.spatial_T / steps, steps));
    }
    finish_table(t, true);
    return t;
}

MmsTable mms_temporal(const ScenarioConfig& base) {
    const auto& m = base.mms;
    if (m.temporal_dts.size() < 2) throw ConfigError("temporal study needs at least two step sizes");
    MmsTable t;
    t.case_id = m.case_id;
    t.study = "temporal";
    t.fd_residual = make_mms_case(m.case_id, m.amplitude).fd_residual(base.material);
    if (t.fd_residual > 1e-6)
        throw ValidationError("manufactured loads fail the finite-difference check (residual " + g17(t.fd_residual) + ")");
    for (double dt : m.temporal_dts) {
        const int steps = std::max(1, static_cast<int>(std::lround(m.temporal_T / dt)));
        t.rows.push_back(mms_single(base, m.case_id, m.amplitude, m.temporal_n, dt, steps));
    }
    finish_table(t, false);
    return t;
}

std::string mms_table_csv(const MmsTable& t) {
    std::ostringstream os;
    os << "n,h,dt,steps,err_u_h1,err_u_l2,err_p_l2,max_picard\n";
    for (const auto& r : t.rows)
        os << r.n << ',' << g17(r.h) << ',' << g17(r.dt) << ',' << r.steps << ',' << g17(r.err_u_h1) << ','
           << g17(r.err_u_l2) << ',' << g17(r.err_p_l2) << ',' << r.max_picard << '\n';
    return os.str();
}

std::string mms_table_text(const MmsTable& t) {
    std::ostringstream os;
    char buf[256];
    os << "case " << t.case_id << ", " << t.study << " study (finite-difference load check " << t.fd_residual << ")\n";
    std::snprintf(buf, sizeof buf, "%5s %10s %10s %6s %12s %12s %12s\n", "n", "h", "dt", "steps", "|u|H1 err",
                  "|u|L2 err", "|p|L2 err");
    os << buf;
    for (const auto& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%5d %10.4g %10.4g %6d %12.4e %12.4e %12.4e\n", r.n, r.h, r.dt, r.steps,
                      r.err_u_h1, r.err_u_l2, r.err_p_l2);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "observed orders: u H1 %.3f, u L2 %.3f, p L2 %.3f\n", t.order_u_h1, t.order_u_l2,
                  t.order_p_l2);
    os << buf;
    if (!t.monotone) os << "warning: error sequence is not monotone\n";
    return os.str();
}

SweepReport sweep_c0(const ScenarioConfig& base, const std::vector<double>& c0s, bool parallel) {
    if (c0s.empty()) throw ConfigError("c0 list is empty");
    for (std::size_t i = 0; i < c0s.size(); ++i) {
        if (!(c0s[i] > 0)) throw ConfigError("c0 values must be positive");
        if (i > 0 && !(c0s[i] < c0s[i - 1])) throw ConfigError("c0 list must be strictly decreasing");
    }
    auto one = [&base](double c0) {
        SweepEntry e;
        e.c0 = c0;
        try {
            ScenarioConfig cfg = base;
            cfg.material.c0 = c0;
            cfg.write_vtk = false;
            ScenarioRun r = run_scenario(cfg);
            e.final_state = r.result.final_state;
            e.ok = r.result.complete;
            e.failure = r.result.failure;
            e.biot = biot_limit_residual(*r.solver, e.final_state);
        } catch (const Error& ex) {
            e.ok = false;
            e.failure = ex.what();
        }
        return e;
    };
    SweepReport rep;
    if (parallel) {
        std::vector<std::future<SweepEntry>> jobs;
        for (double c0 : c0s) jobs.push_back(std::async(std::launch::async, one, c0));
        for (auto& j : jobs) rep.runs.push_back(j.get());
    } else {
        for (double c0 : c0s) rep.runs.push_back(one(c0));
    }

    // Norms need the operators of one mesh; every run shares it.
    auto mesh = build_mesh(base.mesh);
    const Space su(mesh, SpaceKind::VectorQuadratic), ss(mesh, SpaceKind::ScalarLinear);
    const CsrMatrix h1 = assemble_h1_gram(su), mass = assemble_mass(ss);
    std::vector<double> biots;
    const SweepEntry* prev = nullptr;
    for (const auto& e : rep.runs) {
        if (!e.ok) continue;
        biots.push_back(e.biot.total);
        if (prev) {
            const Eigen::VectorXd du = e.final_state.u - prev->final_state.u;
            const Eigen::VectorXd de = e.final_state.eta - prev->final_state.eta;
            rep.du_h1.push_back(std::sqrt(std::max(0.0, h1.quadratic_form(du))));
            rep.deta_l2.push_back(std::sqrt(std::max(0.0, mass.quadratic_form(de))));
        }
        prev = &e;
    }
    rep.cauchy_decreasing = strictly_decreasing(rep.du_h1) && strictly_decreasing(rep.deta_l2);
    rep.biot_decreasing = strictly_decreasing(biots);
    return rep;
}

std::string sweep_csv(const SweepReport& r) {
    std::ostringstream os;
    os << "c0,ok,biot_constraint,biot_pressure,biot_total,du_h1_to_next,deta_l2_to_next\n";
    std::size_t pair = 0;
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& e = r.runs[i];
        os << g17(e.c0) << ',' << (e.ok ? 1 : 0) << ',' << g17(e.biot.constraint) << ',' << g17(e.biot.pressure) << ','
           << g17(e.biot.total) << ',';
        bool has_next = false;
        if (e.ok)
            for (std::size_t k = i + 1; k < r.runs.size(); ++k)
                if (r.runs[k].ok) {
                    has_next = true;
                    break;
                }
        if (has_next && pair < r.du_h1.size()) {
            os << g17(r.du_h1[pair]) << ',' << g17(r.deta_l2[pair]);
            ++pair;
        } else {
            os << ',';
        }
        os << '\n';
    }
    return os.str();
}

std::string sweep_json(const ScenarioConfig& base, const SweepReport& r) {
    nlohmann::ordered_json j;
    j["scenario"] = base.name;
    j["seed"] = base.seed;
    j["input_hash"] = git_blob_sha1(base.text);
    auto runs = nlohmann::ordered_json::array();
    for (const auto& e : r.runs)
        runs.push_back({{"c0", e.c0},
                        {"ok", e.ok},
                        {"failure", e.failure},
                        {"biot_constraint", e.biot.constraint},
                        {"biot_pressure", e.biot.pressure},
                        {"biot_total", e.biot.total}});
    j["runs"] = runs;
    j["cauchy_du_h1"] = r.du_h1;
    j["cauchy_deta_l2"] = r.deta_l2;
    j["cauchy_decreasing"] = r.cauchy_decreasing;
    j["biot_decreasing"] = r.biot_decreasing;
    return j.dump(2);
}

}  // namespace poro
