#include "xfer/cli/pipeline.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "xfer/dynamics/sde.hpp"
#include "xfer/edmd/edmd.hpp"
#include "xfer/eigsolve/eigsolve.hpp"
#include "xfer/ulam/assembly.hpp"

namespace fs = std::filesystem;

namespace xfer {
namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::map<std::string, std::string> versions() {
    std::map<std::string, std::string> v;
    v["xfer"] = "1.0.0";
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
    v["compiler"] = __VERSION__;
#endif
#ifdef _OPENMP
    v["openmp"] = std::to_string(_OPENMP);
#else
    v["openmp"] = "off";
#endif
    return v;
}

EigConfig eig_config(const ExperimentConfig& c) {
    EigConfig e;
    const auto& s = c.solver;
    e.theta = s.theta;
    e.eps = s.eps;
    if (s.rank_cap > 0) e.rank_cap = s.rank_cap;
    e.max_iters = s.max_iters;
    e.tol = s.tol;
    e.seed = c.system.seed;
    e.deflation_offset = s.deflation_offset;
    e.als.tol = s.als_tol;
    e.als.max_sweeps = s.als_max_sweeps;
    e.als.rank_padding = s.als_rank_padding;
    e.als.rank_cap = e.rank_cap;
    e.als.seed = c.system.seed;
    return e;
}

SdeSystem sde_of(const ExperimentConfig& c) {
    return SdeSystem{parse_potential(c.system.potential), c.system.sigma, c.system.h, c.system.steps};
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
    std::ofstream os(dir / "manifest.json");
    if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
    os << m.to_json().dump(2) << '\n';
}

class Runner {
public:
    Runner(RunManifest& m, fs::path dir) : man_(m), dir_(std::move(dir)) {}

    template <class F>
    auto stage(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto done = [&] {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            man_.stage_seconds.emplace_back(name, dt.count());
        };
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                done();
                return;
            } else {
                auto r = f();
                done();
                return r;
            }
        } catch (const ConfigError& e) {
            fail(name, e.what(), true);
        } catch (const IoError& e) {
            fail(name, e.what(), true);
        } catch (const std::exception& e) {
            fail(name, e.what(), false);
        }
        throw std::logic_error("unreachable");
    }

    void artifact(const std::string& file) { man_.artifacts.push_back(file); }
    const fs::path& dir() const { return dir_; }

private:
    [[noreturn]] void fail(const std::string& name, const std::string& what, bool config) {
        man_.status = "failed";
        man_.failed_stage = name;
        man_.error = what;
        try {
            write_manifest(man_, dir_);
        } catch (const std::exception&) {
        }
        throw StageError(name, what, config);
    }

    RunManifest& man_;
    fs::path dir_;
};

template <class Vec>
EigenRow row_of(const std::string& format, std::size_t k, const EigResult<Vec>& r) {
    EigenRow row{format, k, r.lambda, r.residual, r.iterations, r.converged, r.theta, {}};
    if constexpr (std::is_same_v<Vec, TTVector>) row.ranks = r.vector.ranks();
    return row;
}

void write_eigen_table(const std::vector<EigenRow>& rows, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "format,index,lambda,residual,iterations,converged,theta\n";
    for (const auto& r : rows)
        os << r.format << ',' << r.index << ',' << g17(r.lambda) << ',' << g17(r.residual) << ',' << r.iterations
           << ',' << (r.converged ? 1 : 0) << ',' << g17(r.theta) << '\n';
}

FullTensor load_vector(const std::string& path, std::size_t index) {
    fs::path p(path);
    if (fs::is_directory(p)) {
        for (const char* f : {"tt", "dense"}) {
            const fs::path c = p / ("grid_" + std::string(f) + "_" + std::to_string(index) + ".csv");
            if (fs::exists(c)) return read_csv(c.string());
        }
        throw IoError("run directory " + path + " has no grid function " + std::to_string(index));
    }
    if (p.extension() == ".ttd1") return densify(read_ttd1(path));
    if (p.extension() == ".csv") return read_csv(path);
    throw IoError("unrecognized eigenvector artifact " + path);
}

std::optional<FullTensor> density_of_run(const std::string& path) {
    const fs::path manifest = fs::path(path) / "manifest.json";
    if (!fs::is_directory(path) || !fs::exists(manifest)) return std::nullopt;
    const ExperimentConfig cfg = load_config_or_manifest(manifest.string()).first;
    if (cfg.method != "ulam" || cfg.solver.problem != "pf" || !(cfg.system.sigma > 0.0)) return std::nullopt;
    return evaluate_on_centers(grid_of(cfg), analytic_invariant_density(parse_potential(cfg.system.potential),
                                                                        cfg.system.sigma));
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["status"] = status;
    if (status != "ok") {
        j["failed_stage"] = failed_stage;
        j["error"] = error;
    }
    j["config"] = config_text;
    j["config_source"] = config_source;
    j["versions"] = versions;
    nlohmann::json st = nlohmann::json::array();
    for (const auto& [name, sec] : stage_seconds) st.push_back({{"stage", name}, {"seconds", sec}});
    j["stages"] = st;
    if (retained_mass) j["retained_mass"] = *retained_mass;
    j["operator_ranks"] = operator_ranks;
    j["mass_ranks"] = mass_ranks;
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& r : eigenvalues)
        ev.push_back({{"format", r.format},
                      {"index", r.index},
                      {"lambda", r.lambda},
                      {"residual", r.residual},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"theta", r.theta},
                      {"ranks", r.ranks}});
    j["eigenvalues"] = ev;
    j["artifacts"] = artifacts;
    return j;
}

BoxGrid grid_of(const ExperimentConfig& cfg) {
    const auto& d = cfg.discretization;
    return BoxGrid(d.lower, d.upper, ModeShape(d.boxes));
}

TensorBasis basis_of(const ExperimentConfig& cfg) {
    const auto& d = cfg.discretization;
    std::vector<BasisSet1D> sets;
    for (std::size_t mu = 0; mu < d.lower.size(); ++mu) {
        std::optional<std::pair<double, double>> scale;
        if (d.basis_scaled) scale = std::make_pair(d.lower[mu], d.upper[mu]);
        sets.push_back(BasisSet1D::monomials(d.basis_order, scale));
    }
    return TensorBasis(std::move(sets));
}

FullTensor emit_grid_function(const FullTensor& v, const BoxGrid& grid) {
    if (v.shape() != grid.shape())
        throw DimensionError("eigenvector shape " + v.shape().to_string() + " does not match the grid " +
                             grid.shape().to_string());
    return v;
}

FullTensor emit_grid_function(const TTVector& v, const BoxGrid& grid) { return emit_grid_function(densify(v), grid); }

namespace {
template <class Vec>
FullTensor eval_on_centers(const Vec& xi, const TensorBasis& basis, const BoxGrid& grid) {
    if (basis.dim() != grid.dim()) throw DimensionError("basis and grid dimensions differ");
    FullTensor out(grid.shape());
    std::vector<std::size_t> idx(grid.dim());
    for (std::size_t l = 0; l < out.size(); ++l) {
        unravel0(l, grid.shape(), idx.data());
        MultiIndex i(idx.size());
        for (std::size_t mu = 0; mu < idx.size(); ++mu) i[mu] = idx[mu] + 1;
        const Point c = grid.center(i);
        out[l] = eval_eigenfunction(xi, basis, c);
    }
    return out;
}
}  // namespace

FullTensor emit_grid_function(const FullTensor& xi, const TensorBasis& basis, const BoxGrid& grid) {
    return eval_on_centers(xi, basis, grid);
}

FullTensor emit_grid_function(const TTVector& xi, const TensorBasis& basis, const BoxGrid& grid) {
    return eval_on_centers(xi, basis, grid);
}

double aligned_error(const FullTensor& a, const FullTensor& b) {
    if (a.shape() != b.shape())
        throw DimensionError("cannot compare shapes " + a.shape().to_string() + " and " + b.shape().to_string());
    const double na = norm(a), nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw RangeError("cannot compare a zero vector");
    const double sign = inner(a, b) < 0.0 ? -1.0 : 1.0;
    const FullTensor diff = axpy(-sign / nb, b, scale(1.0 / na, a));
    return norm(diff) / static_cast<double>(a.size());
}

CompareReport compare_runs(const std::string& a, const std::string& b, std::size_t index) {
    const FullTensor va = load_vector(a, index), vb = load_vector(b, index);
    CompareReport rep;
    rep.boxes = va.size();
    rep.error = aligned_error(va, vb);
    if (const auto mu = density_of_run(a)) {
        rep.error_a_density = aligned_error(*mu, va);
        rep.error_b_density = aligned_error(*mu, vb);
    }
    return rep;
}

void convert(const std::string& in, const std::string& out, double eps) {
    const auto ein = fs::path(in).extension(), eout = fs::path(out).extension();
    if (ein == ".csv" && eout == ".ttd1") {
        write_ttd1(out, full_to_tt(read_csv(in), eps));
    } else if (ein == ".ttd1" && eout == ".csv") {
        write_csv(out, densify(read_ttd1(in)));
    } else {
        throw ConfigError("convert supports .csv -> .ttd1 and .ttd1 -> .csv, got " + in + " -> " + out);
    }
}

std::pair<ExperimentConfig, std::string> load_config_or_manifest(const std::string& path) {
    const std::string text = read_text(path);
    if (fs::path(path).extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("manifest " + path + " is not valid JSON: " + e.what());
        }
        if (!j.contains("config") || !j["config"].is_string()) throw ConfigError("manifest " + path + " lacks 'config'");
        const std::string cfg = j["config"].get<std::string>();
        return {parse_config(cfg), cfg};
    }
    return {parse_config(text), text};
}

void simulate(const ExperimentConfig& raw, const std::string& csv_path) {
    const ExperimentConfig cfg = resolve_config(raw);
    const SdeSystem sys = sde_of(cfg);
    std::ofstream os(csv_path);
    if (!os) throw IoError("cannot write " + csv_path);
    os << 't';
    for (std::size_t mu = 1; mu <= sys.dim(); ++mu) os << ",x" << mu;
    os << '\n';
    RandomStream rng(cfg.system.seed, StreamPurpose::Noise, 0xffffffffu, 0xffffffffu);
    simulate_trajectory(sys, cfg.system.x0, rng, cfg.system.steps, cfg.system.stride,
                        [&](double t, std::span<const double> x) {
                            os << g17(t);
                            for (double v : x) os << ',' << g17(v);
                            os << '\n';
                        });
}

RunManifest run(const ExperimentConfig& raw, const std::string& source_text) {
    RunManifest man;
    man.config_source = source_text;
    man.versions = versions();
    const ExperimentConfig cfg = resolve_config(raw);
    man.config_text = config_to_text(cfg);

    const fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StageError("setup", "cannot create output directory " + dir.string() + ": " + ec.message(), true);
    Runner R(man, dir);

    const auto& sol = cfg.solver;
    const bool want_tt = sol.format != "dense", want_dense = sol.format != "tt";
    const bool pf = sol.problem == "pf";
    const EigConfig ecfg = eig_config(cfg);
    const std::optional<std::size_t> op_cap =
        sol.operator_rank_cap > 0 ? std::optional<std::size_t>(sol.operator_rank_cap) : std::nullopt;
    const BoxGrid grid = grid_of(cfg);
    const SdeSystem sys = sde_of(cfg);

    std::vector<TTEigResult> tt_res;
    std::vector<DenseEigResult> dense_res;
    std::optional<TensorBasis> basis;

    if (cfg.method == "ulam") {
        const TransitionCP P = R.stage("assemble", [&] {
            AssemblyOptions opts;
            opts.allow_empty_rows = cfg.discretization.allow_empty_rows;
            return assemble_tensor(grid, sys, cfg.discretization.points_per_box, cfg.system.seed, opts);
        });
        man.retained_mass = nlohmann::json{{"per_box", P.mass.per_box},
                                           {"total_fraction", P.mass.total_fraction()},
                                           {"min_fraction", P.mass.min_fraction()},
                                           {"empty_rows", P.mass.empty_rows.size()},
                                           {"transitions", P.rank()}};
        if (want_tt) {
            const TTOperator Pt = R.stage("truncate", [&] {
                const TTOperator T = truncate_operator(P, sol.operator_eps, op_cap);
                return pf ? tt_transpose(T) : T;
            });
            man.operator_ranks = Pt.ranks();
            tt_res = R.stage("solve_tt", [&] { return leading_eigenpairs(Pt, nullptr, sol.count, ecfg); });
        }
        if (want_dense) {
            dense_res = R.stage("solve_dense", [&] {
                const FullOperator D = densify(P);
                return leading_eigenpairs(pf ? transpose(D) : D, nullptr, sol.count, ecfg);
            });
        }
    } else {
        basis = basis_of(cfg);
        const EdmdCP E = R.stage("assemble", [&] {
            const EdmdData data = sample_edmd_data(cfg.discretization.lower, cfg.discretization.upper,
                                                   cfg.discretization.samples, sde_point_map(sys), cfg.system.seed);
            return assemble_edmd_cp(*basis, data);
        });
        const OuterProductSum M = pf ? pf_right_operator(E) : koopman_right_operator(E);
        if (want_tt) {
            const auto [Mt, Gt] = R.stage("truncate", [&] {
                return std::make_pair(truncate_operator(M, sol.operator_eps, op_cap),
                                      truncate_operator(E.G, sol.operator_eps, op_cap));
            });
            man.operator_ranks = Mt.ranks();
            man.mass_ranks = Gt.ranks();
            tt_res = R.stage("solve_tt", [&] { return leading_eigenpairs(Mt, &Gt, sol.count, ecfg); });
        }
        if (want_dense) {
            dense_res = R.stage("solve_dense", [&] {
                const FullOperator Md = densify(M), Gd = densify(E.G);
                return leading_eigenpairs(Md, &Gd, sol.count, ecfg);
            });
        }
    }

    R.stage("write", [&] {
        for (std::size_t k = 0; k < tt_res.size(); ++k) {
            const std::string n = std::to_string(k + 1);
            man.eigenvalues.push_back(row_of("tt", k + 1, tt_res[k]));
            write_ttd1((dir / ("eigvec_tt_" + n + ".ttd1")).string(), tt_res[k].vector);
            R.artifact("eigvec_tt_" + n + ".ttd1");
            const FullTensor g = basis ? emit_grid_function(tt_res[k].vector, *basis, grid)
                                       : emit_grid_function(tt_res[k].vector, grid);
            write_csv((dir / ("grid_tt_" + n + ".csv")).string(), g);
            R.artifact("grid_tt_" + n + ".csv");
        }
        for (std::size_t k = 0; k < dense_res.size(); ++k) {
            const std::string n = std::to_string(k + 1);
            man.eigenvalues.push_back(row_of("dense", k + 1, dense_res[k]));
            write_csv((dir / ("eigvec_dense_" + n + ".csv")).string(), dense_res[k].vector);
            R.artifact("eigvec_dense_" + n + ".csv");
            const FullTensor g = basis ? emit_grid_function(dense_res[k].vector, *basis, grid)
                                       : emit_grid_function(dense_res[k].vector, grid);
            write_csv((dir / ("grid_dense_" + n + ".csv")).string(), g);
            R.artifact("grid_dense_" + n + ".csv");
        }
        write_eigen_table(man.eigenvalues, dir / "eigenvalues.csv");
        R.artifact("eigenvalues.csv");
    });
    write_manifest(man, dir);
    return man;
}

}  // namespace xfer
