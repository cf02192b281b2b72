#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xfer/eigsolve/als.hpp"
#include "xfer/formats/cp.hpp"
#include "xfer/formats/tt.hpp"
#include "xfer/ulam/assembly.hpp"

namespace xfer {

struct EigConfig {
    double theta = 0.99;
    /// Relative truncation applied to every TT iterate.
    double eps = 1e-10;
    std::optional<std::size_t> rank_cap;
    std::size_t max_iters = 500;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    /// Inner linear solver for TT inverse iterations.
    AlsConfig als;
    /// Each further eigenpair uses shift min(theta_prev, lambda_prev - deflation_offset).
    double deflation_offset = 0.02;
    std::size_t densify_guard = kDefaultDensifyGuard;
};

template <class Vec>
struct EigResult {
    double lambda = 0.0;
    Vec vector;
    /// ||A v - lambda B v|| / ||v||, recomputed from the returned pair.
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Shift actually used (differs from the configured one after a singular-shift retry).
    double theta = 0.0;
    std::vector<double> history;
};

using TTEigResult = EigResult<TTVector>;
using DenseEigResult = EigResult<FullTensor>;

// Largest-magnitude eigenpair by truncated power iteration.
TTEigResult power_iteration(const TTOperator& A, const EigConfig& cfg);
DenseEigResult power_iteration(const FullOperator& A, const EigConfig& cfg);

// Eigenpair nearest cfg.theta by shifted inverse iteration.
TTEigResult inverse_power_iteration(const TTOperator& A, const EigConfig& cfg);
DenseEigResult inverse_power_iteration(const FullOperator& A, const EigConfig& cfg);

// Generalized pair A v = lambda B v nearest cfg.theta. For a left problem pass the transposed operators.
TTEigResult generalized_inverse_power_iteration(const TTOperator& A, const TTOperator& B, const EigConfig& cfg);
DenseEigResult generalized_inverse_power_iteration(const FullOperator& A, const FullOperator& B, const EigConfig& cfg);

// Oracle: shifted inverse iteration on the dense matrices with an LU factorization of A - theta B.
DenseEigResult dense_generalized_eig(const FullOperator& A, const FullOperator& B, double theta, double tol = 1e-12,
                                     std::uint64_t seed = 1);

// `count` eigenpairs found one after another. Earlier pairs are removed by oblique projection with the matching
// left eigenvectors, and the shift moves below each eigenvalue found. B = nullptr means the identity.
std::vector<TTEigResult> leading_eigenpairs(const TTOperator& A, const TTOperator* B, std::size_t count,
                                            const EigConfig& cfg);
std::vector<DenseEigResult> leading_eigenpairs(const FullOperator& A, const FullOperator* B, std::size_t count,
                                               const EigConfig& cfg);

double eig_residual(const TTOperator& A, const TTOperator* B, double lambda, const TTVector& v);
double eig_residual(const FullOperator& A, const FullOperator* B, double lambda, const FullTensor& v);

// Unit Frobenius norm; sign chosen so the largest-magnitude entry is positive (TT: only when the tensor fits
// `guard`, otherwise so the entry sum is positive).
void normalize_eigenvector(TTVector& v, std::size_t guard = kDefaultDensifyGuard);
void normalize_eigenvector(FullTensor& v);

// Low-rank TT form of an operator with relative accuracy eps.
TTOperator truncate_operator(const TTOperator& A, double eps, std::optional<std::size_t> r_max = std::nullopt,
                             RoundReport* report = nullptr);
TTOperator truncate_operator(const CPOperator& A, double eps, std::optional<std::size_t> r_max = std::nullopt,
                             RoundReport* report = nullptr);
TTOperator truncate_operator(const OuterProductSum& A, double eps, std::optional<std::size_t> r_max = std::nullopt,
                             RoundReport* report = nullptr, std::size_t guard = kDefaultDensifyGuard);
TTOperator truncate_operator(const TransitionCP& P, double eps, std::optional<std::size_t> r_max = std::nullopt,
                             RoundReport* report = nullptr, std::size_t guard = kDefaultDensifyGuard);

}  // namespace xfer
