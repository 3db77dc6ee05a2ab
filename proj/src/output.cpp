#include "poro/output.hpp"

#include "poro/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <Eigen/Core>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace poro {

const char* const kVersion = "0.1.0";

const char* const kDiagnosticsCsvHeader =
    "step,t,J,E,energy_residual,C_eta_defect,C_xi_recon_defect,C_u_minus_C_q,bundle,picard_iters";

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* pairing_name(StressPairing p) {
    return p == StressPairing::SymmetricGradient ? "symmetric-gradient" : "full-gradient";
}

nlohmann::ordered_json vec_json(const Eigen::VectorXd& v) {
    auto a = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

nlohmann::ordered_json config_json(const ScenarioConfig& c) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["source"] = c.source;
    j["seed"] = c.seed;
    j["mesh"] = {{"generator", c.mesh.generator}, {"n", c.mesh.n}, {"refine", c.mesh.refine}, {"file", c.mesh.file}};
    const auto& m = c.material;
    j["material"] = {{"mu", m.mu},
                     {"lambda", m.lambda},
                     {"alpha", m.alpha},
                     {"c0", m.c0},
                     {"K", {{m.K(0, 0), m.K(0, 1)}, {m.K(1, 0), m.K(1, 1)}}},
                     {"mu_f", m.mu_f},
                     {"rho_f", m.rho_f},
                     {"g", {m.g_vec.x(), m.g_vec.y()}}};
    j["loads"] = {{"id", c.loads}, {"amplitude", c.load_amplitude}};
    j["initial"] = {{"id", c.initial}, {"amplitude", c.initial_amplitude}};
    j["time"] = {{"dt", c.dt}, {"n_steps", c.n_steps}};
    j["picard"] = {{"tol", c.picard.tol},
                   {"maxit", c.picard.maxit},
                   {"damping", c.picard.damping},
                   {"auto_damping", c.picard.auto_damping},
                   {"nonlinear", c.picard.nonlinear},
                   {"pairing", pairing_name(c.picard.pairing)}};
    j["diagnostics"] = {{"energy_rule", energy_rule_name(c.diagnostics.rule)},
                        {"c2", c.diagnostics.c2},
                        {"blowup_factor", c.diagnostics.blowup_factor}};
    j["output"] = {{"every", c.output_every}, {"vtk", c.write_vtk}};
    return j;
}

}  // namespace

std::string git_blob_sha1(std::string_view content) {
    const std::string head = "blob " + std::to_string(content.size()) + '\0';
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error("cannot allocate a digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, head.data(), head.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error("SHA-1 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

void write_diagnostics_csv(std::ostream& out, const DiagnosticsSeries& rows) {
    out << kDiagnosticsCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.step << ',' << g17(r.t) << ',' << g17(r.energy.J) << ',' << g17(r.energy.E) << ','
            << g17(r.energy.residual) << ',' << g17(r.invariants.eta_defect) << ','
            << g17(r.invariants.xi_recon_defect) << ',' << g17(r.invariants.u_minus_q) << ','
            << g17(r.monitor.bundle) << ',' << r.picard_iterations << '\n';
    }
}

void write_vtk(std::ostream& out, const Solver& solver, const State& s, const std::string& title) {
    const Mesh& mesh = solver.mesh();
    const int nv = mesh.num_vertices();
    out << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices()) out << g17(v.x()) << ' ' << g17(v.y()) << " 0\n";
    out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
    for (const auto& c : mesh.cells()) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";
    out << "POINT_DATA " << nv << '\n';
    // Quadratic displacement nodes start with the vertices.
    out << "VECTORS u double\n";
    for (int v = 0; v < nv; ++v) out << g17(s.u(2 * v)) << ' ' << g17(s.u(2 * v + 1)) << " 0\n";
    const std::pair<const char*, const Eigen::VectorXd*> scalars[] = {
        {"p", &s.p}, {"q", &s.q}, {"xi", &s.xi}, {"eta", &s.eta}};
    for (const auto& [name, vec] : scalars) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v) out << g17((*vec)(v)) << '\n';
    }
}

std::string config_echo_json(const ScenarioConfig& cfg) { return config_json(cfg).dump(2); }

std::string run_manifest_json(const ScenarioConfig& cfg, const Solver& solver, const RunResult& result,
                              const std::string& command) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["versions"] = {{"poro", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"openssl", OPENSSL_VERSION_TEXT}};
    j["seed"] = cfg.seed;
    j["input_hash"] = git_blob_sha1(cfg.text);
    j["choices"] = {
        {"nonlinear_load_pairing", pairing_name(solver.picard().pairing)},
        {"energy_rule", energy_rule_name(cfg.diagnostics.rule)},
        {"time_integration", "backward Euler, monolithic (u, xi, eta) solve per Picard iteration"},
        {"rigid_motions", "Lagrange multipliers enforce (u, r) = 0 for translations and rotation"},
        {"initial_rm_component_removed", vec_json(solver.removed_rm_component())},
        {"elements", "quadratic vector displacement, linear xi and eta"},
    };
    const Mesh& mesh = solver.mesh();
    j["mesh"] = {{"vertices", mesh.num_vertices()}, {"cells", mesh.num_cells()}, {"h_max", mesh.max_edge_length()}};
    j["dofs"] = {{"u", solver.space_u().num_dofs()}, {"scalar", solver.space_s().num_dofs()}};
    nlohmann::ordered_json outcome;
    outcome["complete"] = result.complete;
    outcome["failure"] = result.failure;
    outcome["steps_taken"] = static_cast<int>(result.reports.size());
    outcome["final_time"] = result.final_state.t;
    int max_it = 0;
    for (const auto& r : result.reports) max_it = std::max(max_it, r.iterations);
    outcome["max_picard_iterations"] = max_it;
    if (!result.diagnostics.empty()) {
        const auto& last = result.diagnostics.back();
        outcome["energy_residual"] = last.energy.residual;
        outcome["J"] = last.energy.J;
        outcome["blowup"] = last.monitor.blowup;
    }
    j["outcome"] = outcome;
    return j.dump(2);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace poro
