#include "poro/config.hpp"
#include "poro/constants.hpp"
#include "poro/errors.hpp"
#include "poro/mesh.hpp"
#include "poro/output.hpp"
#include "poro/studies.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace poro;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAssert = 4;

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    bool assert_checks = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "scenario file (YAML)");
    if (needs_config) opt->required();
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_flag("--quiet", c.quiet, "print only failures");
    cmd->add_flag("--assert", c.assert_checks, "exit 4 when an acceptance check fails");
}

ScenarioConfig resolve(const Common& c, ScenarioConfig fallback) {
    ScenarioConfig cfg = c.config.empty() ? std::move(fallback) : load_config(c.config);
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.constants.seed = *c.seed;
    }
    return cfg;
}

struct Checks {
    bool quiet;
    int failed = 0;
    void operator()(bool ok, const std::string& what) {
        if (!ok) ++failed;
        if (!ok || !quiet) std::printf("%s %s\n", ok ? "PASS" : "FAIL", what.c_str());
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int cmd_run(const Common& c) {
    const ScenarioConfig cfg = resolve(c, standard_scenario());
    const fs::path dir = c.out.empty() ? fs::path("out") / cfg.name : fs::path(c.out);
    ScenarioRun run = run_scenario(cfg);
    write_run_outputs(cfg, run, dir, "run");
    const auto& res = run.result;
    if (!c.quiet)
        std::printf("%s: %zu steps to t = %.6g, outputs in %s\n", cfg.name.c_str(), res.reports.size(),
                    res.final_state.t, dir.string().c_str());
    if (!res.complete) {
        std::fprintf(stderr, "solver failure: %s\n", res.failure.c_str());
        if (!res.reports.empty()) {
            const auto& last = res.reports.back();
            std::fprintf(stderr, "last accepted step: %d Picard iterations, final increment %.3e\n", last.iterations,
                         last.increments.empty() ? 0.0 : last.increments.back());
        }
        return kExitSolver;
    }
    if (!c.assert_checks) return 0;
    double eta = 0, uq = 0, xi = 0;
    bool blowup = false;
    for (const auto& r : res.diagnostics) {
        eta = std::max(eta, r.invariants.eta_defect);
        uq = std::max(uq, r.invariants.u_minus_q);
        xi = std::max(xi, r.invariants.xi_recon_defect);
        blowup = blowup || r.monitor.blowup;
    }
    Checks check{c.quiet};
    check(eta <= 1e-10, "fluid content conservation defect " + fmt("%.3e", eta));
    check(uq <= 1e-10, "C_u - C_q defect " + fmt("%.3e", uq));
    check(xi <= 1e-9, "C_xi reconstruction defect " + fmt("%.3e", xi));
    check(!blowup, "estimate monitor without blow-up");
    return check.failed ? kExitAssert : 0;
}

int cmd_mms(const Common& c, const std::string& case_id, const std::string& study, double amplitude) {
    ScenarioConfig cfg = resolve(c, standard_scenario());
    if (!case_id.empty()) cfg.mms.case_id = case_id;
    if (!std::isnan(amplitude)) cfg.mms.amplitude = amplitude;
    const fs::path dir = c.out.empty() ? fs::path("out") / ("mms_" + cfg.mms.case_id) : fs::path(c.out);
    Checks check{c.quiet};
    if (cfg.mms.case_id == "linear") {
        const MmsRow r = mms_single(cfg, "linear", cfg.mms.amplitude, cfg.mms.levels.front(), cfg.dt, 3);
        const double eu = r.err_u_h1 / r.norm_u_h1, ep = r.err_p_l2 / r.norm_p_l2;
        if (!c.quiet) std::printf("in-space case on n = %d: relative errors u H1 %.3e, p L2 %.3e\n", r.n, eu, ep);
        if (c.assert_checks) check(eu <= 1e-11 && ep <= 1e-11, "in-space solution reproduced");
        return check.failed ? kExitAssert : 0;
    }
    for (const std::string s : {"spatial", "temporal"}) {
        if (study != "both" && study != s) continue;
        const MmsTable t = s == "spatial" ? mms_spatial(cfg) : mms_temporal(cfg);
        write_file(dir / (s + ".csv"), mms_table_csv(t));
        if (!c.quiet) std::printf("%s", mms_table_text(t).c_str());
        if (c.assert_checks) {
            const double need = s == "spatial" ? 1.8 : 0.9;
            check(t.order_u_h1 >= need && t.order_p_l2 >= need,
                  s + " orders u H1 " + fmt("%.3f", t.order_u_h1) + ", p L2 " + fmt("%.3f", t.order_p_l2) +
                      " (need " + fmt("%.1f", need) + ")");
        }
    }
    return check.failed ? kExitAssert : 0;
}

int cmd_sweep(const Common& c, std::vector<double> c0s, bool serial) {
    const ScenarioConfig cfg = resolve(c, standard_scenario());
    if (c0s.empty()) c0s = cfg.sweep_c0;
    const fs::path dir = c.out.empty() ? fs::path("out") / "sweep_c0" : fs::path(c.out);
    const SweepReport rep = sweep_c0(cfg, c0s, !serial);
    write_file(dir / "sweep.csv", sweep_csv(rep));
    write_file(dir / "sweep.json", sweep_json(cfg, rep) + "\n");
    if (!c.quiet) {
        for (const auto& e : rep.runs)
            std::printf("c0 = %-8g %s biot residual %.3e%s%s\n", e.c0, e.ok ? "ok    " : "FAILED", e.biot.total,
                        e.ok ? "" : "  ", e.failure.c_str());
        for (std::size_t i = 0; i < rep.du_h1.size(); ++i)
            std::printf("pair %zu: |du|_H1 %.3e  |deta|_L2 %.3e\n", i, rep.du_h1[i], rep.deta_l2[i]);
    }
    if (!c.assert_checks) return 0;
    Checks check{c.quiet};
    bool all_ok = true;
    for (const auto& e : rep.runs) all_ok = all_ok && e.ok;
    check(all_ok, "every sweep run completed");
    check(rep.cauchy_decreasing, "Cauchy differences strictly decreasing");
    check(rep.biot_decreasing, "Biot residual decreasing");
    return check.failed ? kExitAssert : 0;
}

int cmd_constants(const Common& c, double delta, int samples, bool linear_only) {
    ScenarioConfig cfg = resolve(c, ScenarioConfig{});
    ConstantsConfig k = cfg.constants;
    if (!std::isnan(delta)) k.bounds.delta = delta;
    if (samples > 0) k.n_samples = samples;
    if (linear_only) k.linear_only = true;
    k.bounds.validate();
    const EmpiricalConstants e = estimate_constants(k);
    const std::string json = constants_report_json(k, e);
    if (!c.out.empty()) write_file(fs::path(c.out) / "constants.json", json + "\n");
    if (!c.quiet) std::printf("%s\n", json.c_str());
    if (!c.assert_checks) return 0;
    Checks check{c.quiet};
    check(!e.outside_monotone_regime, "sampled fields inside the monotone regime");
    check(e.C2_coercivity >= 0.9 * k.mu, "C2 >= 0.9 mu (" + fmt("%.6g", e.C2_coercivity) + ")");
    return check.failed ? kExitAssert : 0;
}

int cmd_mesh_gen(const Common& c, const std::string& generator, int n, int refine) {
    MeshSpec spec;
    spec.generator = generator;
    spec.n = n;
    spec.refine = refine;
    if (n < 1 || refine < 0) throw ConfigError("mesh-gen needs n >= 1 and refine >= 0");
    auto mesh = build_mesh(spec);
    if (c.out.empty()) {
        write_mesh(*mesh, std::cout);
    } else {
        const fs::path p(c.out);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_mesh(*mesh, p);
        if (!c.quiet)
            std::printf("wrote %s: %d vertices, %d cells\n", p.string().c_str(), mesh->num_vertices(),
                        mesh->num_cells());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poro: nonlinear poroelasticity solver"};
    app.require_subcommand(1);

    Common run_c, mms_c, sweep_c, const_c, mesh_c;
    auto* run = app.add_subcommand("run", "run a scenario and write CSV, VTK and manifest");
    add_common(run, run_c, true);

    auto* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    add_common(mms, mms_c, false);
    std::string mms_case, mms_study = "both";
    double mms_amp = std::nan("");
    mms->add_option("--case", mms_case, "trig or linear");
    mms->add_option("--study", mms_study, "spatial, temporal or both")
        ->check(CLI::IsMember({"spatial", "temporal", "both"}));
    mms->add_option("--amplitude", mms_amp, "manufactured amplitude");

    auto* sweep = app.add_subcommand("sweep-c0", "c0 -> 0 sweep towards the Biot limit");
    add_common(sweep, sweep_c, false);
    std::vector<double> c0s;
    bool serial = false;
    sweep->add_option("--c0", c0s, "strictly decreasing c0 values")->delimiter(',');
    sweep->add_flag("--serial", serial, "run one c0 at a time");

    auto* constants = app.add_subcommand("constants", "sample the constitutive constants");
    add_common(constants, const_c, false);
    double delta = std::nan("");
    int samples = 0;
    bool linear_only = false;
    constants->add_option("--delta", delta, "pointwise gradient amplitude cap");
    constants->add_option("--samples", samples, "number of field pairs");
    constants->add_flag("--linear-only", linear_only, "drop the nonlinear stress");

    auto* mesh_gen = app.add_subcommand("mesh-gen", "write a generated mesh");
    add_common(mesh_gen, mesh_c, false);
    std::string generator = "centered_square";
    int n = 8, refine = 0;
    mesh_gen->add_option("--generator", generator, "centered_square or unit_square")
        ->check(CLI::IsMember({"centered_square", "unit_square"}));
    mesh_gen->add_option("--n", n, "cells per side");
    mesh_gen->add_option("--refine", refine, "uniform refinements");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_c);
        if (*mms) return cmd_mms(mms_c, mms_case, mms_study, mms_amp);
        if (*sweep) return cmd_sweep(sweep_c, c0s, serial);
        if (*constants) return cmd_constants(const_c, delta, samples, linear_only);
        if (*mesh_gen) return cmd_mesh_gen(mesh_c, generator, n, refine);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        const auto& h = e.increments();
        std::fprintf(stderr, "increment history:");
        for (std::size_t i = h.size() > 8 ? h.size() - 8 : 0; i < h.size(); ++i) std::fprintf(stderr, " %.3e", h[i]);
        std::fprintf(stderr, "\n");
        return kExitSolver;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
