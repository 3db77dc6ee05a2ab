#include "poro/config.hpp"

#include "poro/errors.hpp"
#include "poro/registry.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace poro {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& what) const {
        throw ParseError(source_, line_of(n), what);
    }

    void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) const {
        if (!map.IsMap()) fail(map, "'" + where + "' must be a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + where + "'");
        }
    }

    template <class T>
    void get(const YAML::Node& map, const char* key, T& out) const {
        const YAML::Node n = map[key];
        if (!n) return;
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, std::string("bad value for '") + key + "'");
        }
    }

    void get_positive(const YAML::Node& map, const char* key, double& out) const {
        get(map, key, out);
        if (map[key] && !(std::isfinite(out) && out > 0)) fail(map[key], std::string("'") + key + "' must be positive");
    }

    void get_vec2(const YAML::Node& map, const char* key, Eigen::Vector2d& out) const {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsSequence() || n.size() != 2) fail(n, std::string("'") + key + "' must be a 2-vector");
        std::vector<double> v;
        get(map, key, v);
        out = Eigen::Vector2d(v[0], v[1]);
    }

    void get_mat2(const YAML::Node& map, const char* key, Eigen::Matrix2d& out) const {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsSequence() || n.size() != 2 || !n[0].IsSequence() || n[0].size() != 2 || !n[1].IsSequence() ||
            n[1].size() != 2)
            fail(n, std::string("'") + key + "' must be a 2x2 matrix");
        std::vector<std::vector<double>> v;
        get(map, key, v);
        out << v[0][0], v[0][1], v[1][0], v[1][1];
    }

private:
    std::string source_;
};

template <class T>
void require_known(const Reader& r, const YAML::Node& n, const std::string& id, const std::vector<T>& known,
                   const char* what) {
    if (std::find(known.begin(), known.end(), id) == known.end()) {
        std::string list;
        for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
        r.fail(n, std::string("unknown ") + what + " '" + id + "' (known: " + list + ")");
    }
}

}  // namespace

ScenarioConfig standard_scenario(double amplitude) {
    ScenarioConfig c;
    c.name = "standard";
    c.material.g_vec = Eigen::Vector2d(0.0, -0.1);
    c.load_amplitude = amplitude;
    return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(source, e.mark.line + 1, e.msg);
    }
    ScenarioConfig c;
    c.source = source;
    c.text = text;
    if (!root || root.IsNull()) return c;
    Reader r(source);
    r.check_keys(root, "top level",
                 {"name", "mesh", "material", "loads", "initial", "time", "picard", "diagnostics", "output", "seed",
                  "sweep", "mms", "constants"});
    r.get(root, "name", c.name);
    r.get(root, "seed", c.seed);

    if (auto m = root["mesh"]) {
        r.check_keys(m, "mesh", {"generator", "n", "refine", "file"});
        r.get(m, "generator", c.mesh.generator);
        r.get(m, "n", c.mesh.n);
        r.get(m, "refine", c.mesh.refine);
        r.get(m, "file", c.mesh.file);
        if (m["file"]) c.mesh.generator.clear();
        if (!c.mesh.generator.empty() && c.mesh.generator != "centered_square" && c.mesh.generator != "unit_square")
            r.fail(m["generator"], "unknown mesh generator '" + c.mesh.generator + "' (known: centered_square, unit_square)");
        if (c.mesh.n < 1) r.fail(m["n"], "'n' must be at least 1");
        if (c.mesh.refine < 0) r.fail(m["refine"], "'refine' must be nonnegative");
    }
    if (auto m = root["material"]) {
        r.check_keys(m, "material", {"mu", "lambda", "alpha", "c0", "K", "mu_f", "rho_f", "g"});
        auto& p = c.material;
        r.get(m, "mu", p.mu);
        r.get(m, "lambda", p.lambda);
        r.get(m, "alpha", p.alpha);
        r.get(m, "c0", p.c0);
        r.get_mat2(m, "K", p.K);
        r.get(m, "mu_f", p.mu_f);
        r.get(m, "rho_f", p.rho_f);
        r.get_vec2(m, "g", p.g_vec);
        try {
            p.validate();
        } catch (const ValidationError& e) {
            r.fail(m, e.what());
        }
    }
    if (auto m = root["loads"]) {
        r.check_keys(m, "loads", {"id", "amplitude"});
        r.get(m, "id", c.loads);
        r.get(m, "amplitude", c.load_amplitude);
        require_known(r, m["id"] ? m["id"] : m, c.loads, load_ids(), "load set");
        if (!std::isfinite(c.load_amplitude)) r.fail(m, "'amplitude' must be finite");
    }
    if (auto m = root["initial"]) {
        r.check_keys(m, "initial", {"id", "amplitude"});
        r.get(m, "id", c.initial);
        r.get(m, "amplitude", c.initial_amplitude);
        require_known(r, m["id"] ? m["id"] : m, c.initial, initial_ids(), "initial data");
        if (!std::isfinite(c.initial_amplitude)) r.fail(m, "'amplitude' must be finite");
    }
    if (auto m = root["time"]) {
        r.check_keys(m, "time", {"dt", "n_steps"});
        r.get_positive(m, "dt", c.dt);
        r.get(m, "n_steps", c.n_steps);
        if (c.n_steps < 1) r.fail(m["n_steps"] ? m["n_steps"] : m, "'n_steps' must be at least 1");
    }
    if (auto m = root["picard"]) {
        r.check_keys(m, "picard", {"tol", "maxit", "damping", "auto_damping", "nonlinear", "pairing"});
        r.get_positive(m, "tol", c.picard.tol);
        r.get(m, "maxit", c.picard.maxit);
        r.get(m, "damping", c.picard.damping);
        r.get(m, "auto_damping", c.picard.auto_damping);
        r.get(m, "nonlinear", c.picard.nonlinear);
        if (c.picard.maxit < 1) r.fail(m["maxit"], "'maxit' must be at least 1");
        if (!(c.picard.damping > 0 && c.picard.damping <= 1)) r.fail(m["damping"], "'damping' must lie in (0, 1]");
        std::string pairing = "symmetric";
        r.get(m, "pairing", pairing);
        if (pairing == "symmetric")
            c.picard.pairing = StressPairing::SymmetricGradient;
        else if (pairing == "full")
            c.picard.pairing = StressPairing::FullGradient;
        else
            r.fail(m["pairing"], "unknown pairing '" + pairing + "' (known: symmetric, full)");
    }
    if (auto m = root["diagnostics"]) {
        r.check_keys(m, "diagnostics", {"energy_rule", "c2", "blowup_factor"});
        std::string rule = energy_rule_name(c.diagnostics.rule);
        r.get(m, "energy_rule", rule);
        try {
            c.diagnostics.rule = parse_energy_rule(rule);
        } catch (const Error& e) {
            r.fail(m["energy_rule"], e.what());
        }
        r.get(m, "c2", c.diagnostics.c2);
        r.get_positive(m, "blowup_factor", c.diagnostics.blowup_factor);
    }
    if (auto m = root["output"]) {
        r.check_keys(m, "output", {"every", "vtk"});
        r.get(m, "every", c.output_every);
        r.get(m, "vtk", c.write_vtk);
        if (c.output_every < 0) r.fail(m["every"], "'every' must be nonnegative");
    }
    if (auto m = root["sweep"]) {
        r.check_keys(m, "sweep", {"c0"});
        r.get(m, "c0", c.sweep_c0);
        if (c.sweep_c0.empty()) r.fail(m, "'c0' list must not be empty");
        for (std::size_t i = 0; i < c.sweep_c0.size(); ++i) {
            if (!(c.sweep_c0[i] > 0)) r.fail(m["c0"], "c0 values must be positive");
            if (i > 0 && !(c.sweep_c0[i] < c.sweep_c0[i - 1])) r.fail(m["c0"], "c0 list must be strictly decreasing");
        }
    }
    if (auto m = root["mms"]) {
        r.check_keys(m, "mms",
                     {"case", "amplitude", "levels", "dt_factor", "spatial_T", "temporal_n", "temporal_dts", "temporal_T"});
        auto& s = c.mms;
        r.get(m, "case", s.case_id);
        require_known(r, m["case"] ? m["case"] : m, s.case_id, mms_case_ids(), "manufactured solution");
        r.get(m, "amplitude", s.amplitude);
        r.get(m, "levels", s.levels);
        r.get_positive(m, "dt_factor", s.dt_factor);
        r.get_positive(m, "spatial_T", s.spatial_T);
        r.get(m, "temporal_n", s.temporal_n);
        r.get(m, "temporal_dts", s.temporal_dts);
        r.get_positive(m, "temporal_T", s.temporal_T);
        if (s.levels.empty() || *std::min_element(s.levels.begin(), s.levels.end()) < 1)
            r.fail(m["levels"] ? m["levels"] : m, "'levels' must be positive mesh sizes");
        for (double dt : s.temporal_dts)
            if (!(dt > 0)) r.fail(m["temporal_dts"], "'temporal_dts' must be positive");
    }
    if (auto m = root["constants"]) {
        r.check_keys(m, "constants", {"n_samples", "mu", "lambda", "linear_only", "mesh_n", "modes", "grad_lower",
                                      "grad_upper", "frob_lower", "frob_upper", "delta"});
        auto& k = c.constants;
        r.get(m, "n_samples", k.n_samples);
        r.get_positive(m, "mu", k.mu);
        r.get(m, "lambda", k.lambda);
        r.get(m, "linear_only", k.linear_only);
        r.get(m, "mesh_n", k.mesh_n);
        r.get(m, "modes", k.modes);
        r.get(m, "grad_lower", k.bounds.grad_lower);
        r.get(m, "grad_upper", k.bounds.grad_upper);
        r.get(m, "frob_lower", k.bounds.frob_lower);
        r.get(m, "frob_upper", k.bounds.frob_upper);
        r.get(m, "delta", k.bounds.delta);
        if (k.n_samples < 1) r.fail(m["n_samples"], "'n_samples' must be at least 1");
        try {
            k.bounds.validate();
        } catch (const ValidationError& e) {
            r.fail(m, e.what());
        }
    }
    c.constants.seed = c.seed;
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::shared_ptr<const Mesh> build_mesh(const MeshSpec& spec) {
    Mesh m = [&] {
        if (!spec.file.empty()) return read_mesh(std::filesystem::path(spec.file));
        if (spec.generator == "unit_square") return unit_square_mesh(spec.n);
        if (spec.generator == "centered_square") return centered_square_mesh(spec.n);
        throw ConfigError("unknown mesh generator '" + spec.generator + "'");
    }();
    for (int i = 0; i < spec.refine; ++i) m = refine_uniform(m);
    return std::make_shared<const Mesh>(std::move(m));
}

}  // namespace poro
