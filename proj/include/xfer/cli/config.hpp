#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xfer/error.hpp"

namespace xfer {

struct SystemSection {
    std::string potential;
    double sigma = 0.7;
    double h = 1e-3;
    std::size_t steps = 10000;
    std::uint64_t seed = 1;
    /// Start of the `simulate` trajectory; empty means the origin.
    std::vector<double> x0;
    std::size_t stride = 10;
};

struct DiscretizationSection {
    /// Empty lower/upper select the default domain of the potential.
    std::vector<double> lower, upper;
    /// One entry per dimension; a single entry applies to every dimension.
    std::vector<std::size_t> boxes{10};
    std::size_t points_per_box = 100;
    bool allow_empty_rows = false;
    std::size_t samples = 10000;
    std::size_t basis_order = 3;
    bool basis_scaled = true;
};

struct SolverSection {
    std::string problem = "pf";
    std::string format = "tt";
    std::size_t count = 3;
    double theta = 0.99;
    double eps = 1e-10;
    double operator_eps = 1e-10;
    std::size_t rank_cap = 0;
    std::size_t operator_rank_cap = 0;
    std::size_t max_iters = 500;
    double tol = 1e-9;
    double deflation_offset = 0.02;
    double als_tol = 1e-12;
    std::size_t als_max_sweeps = 10;
    std::size_t als_rank_padding = 2;
};

struct ExperimentConfig {
    std::string method;
    std::string output = "out";
    SystemSection system;
    DiscretizationSection discretization;
    SolverSection solver;
};

/// Parses `key = value` lines grouped under [run], [system], [discretization] and [solver]. Lines starting with
/// '#' or ';' are comments. Throws ConfigError naming the offending key or line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Assigns one key as if it appeared in its section of a config file.
void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Every accepted key, in canonical order.
std::vector<std::string> config_keys();
std::string config_key_section(const std::string& key);

/// Checks required fields and consistency, then fills the domain and broadcasts per-dimension lists.
ExperimentConfig resolve_config(ExperimentConfig cfg);

/// Canonical text listing every field; parse_config(config_to_text(c)) reproduces c exactly.
std::string config_to_text(const ExperimentConfig& cfg);

}  // namespace xfer
