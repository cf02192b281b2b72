#include "xfer/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "xfer/dynamics/potential.hpp"

namespace xfer {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto t = trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto t = trim(v);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

std::string fmt(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>)
            s += fmt(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define XF_DOUBLE(sec, member, name)                                                               \
    Field {                                                                                        \
        sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
            [](const ExperimentConfig& c) { return fmt(c.member); }                                \
    }
#define XF_UINT(sec, member, name)                                                               \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_uint(name, v); }, \
            [](const ExperimentConfig& c) { return std::to_string(c.member); }                   \
    }
#define XF_BOOL(sec, member, name)                                                               \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = to_bool(name, v); }, \
            [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }   \
    }
#define XF_STRING(sec, member, name)                                                           \
    Field {                                                                                    \
        sec, name, [](ExperimentConfig& c, const std::string& v) { c.member = trim(v); },       \
            [](const ExperimentConfig& c) { return c.member; }                                 \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        XF_STRING("run", method, "method"),
        XF_STRING("run", output, "output"),
        XF_STRING("system", system.potential, "potential"),
        XF_DOUBLE("system", system.sigma, "sigma"),
        XF_DOUBLE("system", system.h, "h"),
        XF_UINT("system", system.steps, "steps"),
        XF_UINT("system", system.seed, "seed"),
        Field{"system", "x0",
              [](ExperimentConfig& c, const std::string& v) {
                  c.system.x0.clear();
                  for (const auto& s : split_list(v)) c.system.x0.push_back(to_double("x0", s));
              },
              [](const ExperimentConfig& c) { return fmt_list(c.system.x0); }},
        XF_UINT("system", system.stride, "stride"),
        Field{"discretization", "lower",
              [](ExperimentConfig& c, const std::string& v) {
                  c.discretization.lower.clear();
                  for (const auto& s : split_list(v)) c.discretization.lower.push_back(to_double("lower", s));
              },
              [](const ExperimentConfig& c) { return fmt_list(c.discretization.lower); }},
        Field{"discretization", "upper",
              [](ExperimentConfig& c, const std::string& v) {
                  c.discretization.upper.clear();
                  for (const auto& s : split_list(v)) c.discretization.upper.push_back(to_double("upper", s));
              },
              [](const ExperimentConfig& c) { return fmt_list(c.discretization.upper); }},
        Field{"discretization", "boxes",
              [](ExperimentConfig& c, const std::string& v) {
                  c.discretization.boxes.clear();
                  for (const auto& s : split_list(v)) c.discretization.boxes.push_back(to_uint("boxes", s));
              },
              [](const ExperimentConfig& c) { return fmt_list(c.discretization.boxes); }},
        XF_UINT("discretization", discretization.points_per_box, "points_per_box"),
        XF_BOOL("discretization", discretization.allow_empty_rows, "allow_empty_rows"),
        XF_UINT("discretization", discretization.samples, "samples"),
        XF_UINT("discretization", discretization.basis_order, "basis_order"),
        XF_BOOL("discretization", discretization.basis_scaled, "basis_scaled"),
        XF_STRING("solver", solver.problem, "problem"),
        XF_STRING("solver", solver.format, "format"),
        XF_UINT("solver", solver.count, "count"),
        XF_DOUBLE("solver", solver.theta, "theta"),
        XF_DOUBLE("solver", solver.eps, "eps"),
        XF_DOUBLE("solver", solver.operator_eps, "operator_eps"),
        XF_UINT("solver", solver.rank_cap, "rank_cap"),
        XF_UINT("solver", solver.operator_rank_cap, "operator_rank_cap"),
        XF_UINT("solver", solver.max_iters, "max_iters"),
        XF_DOUBLE("solver", solver.tol, "tol"),
        XF_DOUBLE("solver", solver.deflation_offset, "deflation_offset"),
        XF_DOUBLE("solver", solver.als_tol, "als_tol"),
        XF_UINT("solver", solver.als_max_sweeps, "als_max_sweeps"),
        XF_UINT("solver", solver.als_rank_padding, "als_rank_padding"),
    };
    return table;
}

#undef XF_DOUBLE
#undef XF_UINT
#undef XF_BOOL
#undef XF_STRING

const Field& field(const std::string& key) {
    for (const auto& f : fields())
        if (key == f.key) return f;
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
}

std::string config_key_section(const std::string& key) { return field(key).section; }

void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    field(key).set(cfg, value);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "run" && section != "system" && section != "discretization" && section != "solver")
                throw ConfigError("unknown config section '" + section + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const Field& f = field(key);
        if (section != f.section)
            throw ConfigError("key '" + key + "' belongs in section [" + f.section + "]");
        if (!seen.insert(key).second) throw ConfigError("key '" + key + "' given twice");
        f.set(cfg, t.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig resolve_config(ExperimentConfig cfg) {
    if (cfg.system.potential.empty()) throw ConfigError("key 'potential' is required");
    if (cfg.method.empty()) throw ConfigError("key 'method' is required");
    if (cfg.method != "ulam" && cfg.method != "edmd")
        throw ConfigError("key 'method' must be ulam or edmd, got '" + cfg.method + "'");
    if (cfg.solver.problem != "pf" && cfg.solver.problem != "koopman")
        throw ConfigError("key 'problem' must be pf or koopman, got '" + cfg.solver.problem + "'");
    if (cfg.solver.format != "tt" && cfg.solver.format != "dense" && cfg.solver.format != "both")
        throw ConfigError("key 'format' must be tt, dense or both, got '" + cfg.solver.format + "'");
    if (!(cfg.system.sigma >= 0.0)) throw ConfigError("key 'sigma' must be nonnegative");
    if (!(cfg.system.h > 0.0)) throw ConfigError("key 'h' must be positive");
    if (cfg.solver.count == 0) throw ConfigError("key 'count' must be at least 1");
    if (cfg.system.stride == 0) throw ConfigError("key 'stride' must be at least 1");

    const Potential pot = parse_potential(cfg.system.potential);
    const std::size_t d = pot.dim();
    cfg.system.potential = pot.describe();

    auto& disc = cfg.discretization;
    if (disc.lower.empty() != disc.upper.empty()) throw ConfigError("keys 'lower' and 'upper' must be given together");
    if (disc.lower.empty()) {
        disc.lower.assign(d, -2.0);
        disc.upper.assign(d, 2.0);
        if (pot.name() == "triple_well3d") {
            disc.lower[1] = -1.0;
            disc.upper[1] = 2.0;
        }
    }
    auto broadcast = [d](auto& v, const char* key) {
        if (v.size() == 1) v.assign(d, v[0]);
        if (v.size() != d)
            throw ConfigError("key '" + std::string(key) + "' needs 1 or " + std::to_string(d) + " entries");
    };
    broadcast(disc.lower, "lower");
    broadcast(disc.upper, "upper");
    broadcast(disc.boxes, "boxes");
    for (std::size_t mu = 0; mu < d; ++mu) {
        if (!(disc.lower[mu] < disc.upper[mu])) throw ConfigError("key 'lower' must be below 'upper' in every dimension");
        if (disc.boxes[mu] == 0) throw ConfigError("key 'boxes' must be positive");
    }
    if (cfg.system.x0.empty()) cfg.system.x0.assign(d, 0.0);
    broadcast(cfg.system.x0, "x0");
    return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::string out, section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

}  // namespace xfer
