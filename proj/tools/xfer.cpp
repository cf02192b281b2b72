#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "xfer/cli/pipeline.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct RunArgs {
    std::string config;
    std::map<std::string, std::string> overrides;
};

void add_config_flags(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--config", args.config, "Config file (INI) or manifest.json of an earlier run");
    for (const auto& key : xfer::config_keys())
        cmd->add_option("--" + key, args.overrides[key], "Overrides [" + xfer::config_key_section(key) + "] " + key);
}

xfer::ExperimentConfig build_config(CLI::App* cmd, const RunArgs& args, std::string& source) {
    xfer::ExperimentConfig cfg;
    if (!args.config.empty()) std::tie(cfg, source) = xfer::load_config_or_manifest(args.config);
    for (const auto& [key, value] : args.overrides)
        if (cmd->count("--" + key) > 0) xfer::set_config_key(cfg, key, value);
    return cfg;
}

void print_manifest(const xfer::RunManifest& m) {
    std::printf("%-6s %5s %22s %12s %6s %s\n", "format", "k", "lambda", "residual", "iters", "converged");
    for (const auto& r : m.eigenvalues)
        std::printf("%-6s %5zu %22.15f %12.3e %6zu %s\n", r.format.c_str(), r.index, r.lambda, r.residual,
                    r.iterations, r.converged ? "yes" : "no");
    for (const auto& [stage, sec] : m.stage_seconds) std::printf("stage %-12s %10.3f s\n", stage.c_str(), sec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer operator spectra with tensor trains"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    RunArgs sim_args, ulam_args, edmd_args, eig_args;
    std::string traj_path;
    auto* sim = app.add_subcommand("simulate", "Integrate one SDE trajectory and write it as CSV");
    add_config_flags(sim, sim_args);
    sim->add_option("--trajectory", traj_path, "Output CSV (default: <output>/trajectory.csv)");

    auto* ulam = app.add_subcommand("ulam", "Ulam discretization, truncation and eigensolve");
    add_config_flags(ulam, ulam_args);
    auto* edmd = app.add_subcommand("edmd", "EDMD discretization, truncation and eigensolve");
    add_config_flags(edmd, edmd_args);
    auto* eig = app.add_subcommand("eig", "Full pipeline with the method named in the config");
    add_config_flags(eig, eig_args);

    std::string cmp_a, cmp_b;
    std::size_t cmp_index = 1;
    auto* cmp = app.add_subcommand("compare", "Per-box l2 error between two eigenvector artifacts");
    cmp->add_option("a", cmp_a, "Run directory, grid CSV or TTD1 dump")->required();
    cmp->add_option("b", cmp_b, "Run directory, grid CSV or TTD1 dump")->required();
    cmp->add_option("--index", cmp_index, "Eigenvector index for run directories")->check(CLI::PositiveNumber);

    std::string conv_in, conv_out;
    double conv_eps = 1e-14;
    auto* conv = app.add_subcommand("convert", "Convert between dense CSV and TTD1 dumps");
    conv->add_option("input", conv_in)->required();
    conv->add_option("output", conv_out)->required();
    conv->add_option("--eps", conv_eps, "Relative accuracy for dense to TT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        auto run_with = [&](CLI::App* cmd, const RunArgs& args, const char* method) {
            std::string source;
            xfer::ExperimentConfig cfg = build_config(cmd, args, source);
            if (method) cfg.method = method;
            print_manifest(xfer::run(cfg, source));
        };
        if (*sim) {
            std::string source;
            const auto cfg = xfer::resolve_config(build_config(sim, sim_args, source));
            std::filesystem::create_directories(cfg.output);
            const std::string path = traj_path.empty() ? cfg.output + "/trajectory.csv" : traj_path;
            xfer::simulate(cfg, path);
            std::printf("wrote %s\n", path.c_str());
        } else if (*ulam) {
            run_with(ulam, ulam_args, "ulam");
        } else if (*edmd) {
            run_with(edmd, edmd_args, "edmd");
        } else if (*eig) {
            run_with(eig, eig_args, nullptr);
        } else if (*cmp) {
            const auto rep = xfer::compare_runs(cmp_a, cmp_b, cmp_index);
            std::printf("boxes %zu\nerror %.6e\n", rep.boxes, rep.error);
            if (rep.error_a_density) std::printf("error_a_vs_density %.6e\n", *rep.error_a_density);
            if (rep.error_b_density) std::printf("error_b_vs_density %.6e\n", *rep.error_b_density);
        } else if (*conv) {
            xfer::convert(conv_in, conv_out, conv_eps);
        }
    } catch (const xfer::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.config_problem() ? kConfigError : kNumericalError;
    } catch (const xfer::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const xfer::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    }
    return 0;
}
