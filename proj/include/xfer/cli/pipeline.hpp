#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "xfer/cli/config.hpp"
#include "xfer/core/full_tensor.hpp"
#include "xfer/edmd/basis.hpp"
#include "xfer/formats/tt.hpp"
#include "xfer/ulam/box_grid.hpp"

namespace xfer {

/// A pipeline stage failed. Artifacts written before the failure are kept, and the manifest records the stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what, bool config_problem)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)), config_problem_(config_problem) {}
    const std::string& stage() const { return stage_; }
    bool config_problem() const { return config_problem_; }

private:
    std::string stage_;
    bool config_problem_;
};

struct EigenRow {
    std::string format;
    std::size_t index = 0;
    double lambda = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double theta = 0.0;
    std::vector<std::size_t> ranks;
};

struct RunManifest {
    std::string config_text;
    std::string config_source;
    std::map<std::string, std::string> versions;
    std::vector<std::pair<std::string, double>> stage_seconds;
    std::optional<nlohmann::json> retained_mass;
    std::vector<std::size_t> operator_ranks;
    std::vector<std::size_t> mass_ranks;
    std::vector<EigenRow> eigenvalues;
    std::vector<std::string> artifacts;
    std::string status = "ok";
    std::string failed_stage;
    std::string error;

    nlohmann::json to_json() const;
};

/// Runs assembly, operator truncation and the eigensolver(s), writing into cfg.output:
/// eigenvalues.csv, eigvec_<format>_<k>.{ttd1,csv}, grid_<format>_<k>.csv and manifest.json.
RunManifest run(const ExperimentConfig& cfg, const std::string& source_text = {});

/// Simulates one trajectory from system.x0 and writes t,x1,...,xd every `stride` steps.
void simulate(const ExperimentConfig& cfg, const std::string& csv_path);

/// Eigenvector values on the box centers (Ulam: the entries themselves).
FullTensor emit_grid_function(const FullTensor& v, const BoxGrid& grid);
FullTensor emit_grid_function(const TTVector& v, const BoxGrid& grid);
/// EDMD: eigenfunction sum_i xi_i Psi_i evaluated at the box centers.
FullTensor emit_grid_function(const FullTensor& xi, const TensorBasis& basis, const BoxGrid& grid);
FullTensor emit_grid_function(const TTVector& xi, const TensorBasis& basis, const BoxGrid& grid);

struct CompareReport {
    std::size_t boxes = 0;
    /// (1/k) ||v_a - v_b||_2 after unit normalization and sign alignment.
    double error = 0.0;
    /// Same error against the analytic invariant density on the box centers, when run a has one.
    std::optional<double> error_a_density, error_b_density;
};

/// Compares two eigenvector artifacts. Each argument is a run directory (grid function `index`, TT preferred
/// over dense), a grid CSV or a TTD1 dump.
CompareReport compare_runs(const std::string& a, const std::string& b, std::size_t index = 1);

/// e = (1/k) ||v_a - v_b||_2 with both vectors scaled to unit norm and v_b's sign matched to v_a.
double aligned_error(const FullTensor& a, const FullTensor& b);

/// Dense CSV <-> TTD1 conversion chosen by file extension.
void convert(const std::string& in, const std::string& out, double eps = 1e-14);

/// Loads a config from an INI file or from the manifest of a previous run.
std::pair<ExperimentConfig, std::string> load_config_or_manifest(const std::string& path);

BoxGrid grid_of(const ExperimentConfig& cfg);
TensorBasis basis_of(const ExperimentConfig& cfg);

}  // namespace xfer
