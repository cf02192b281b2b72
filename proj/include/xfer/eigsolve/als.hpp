#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xfer/formats/tt.hpp"

namespace xfer {

struct AlsConfig {
    /// Per-bond ranks of the solution (d - 1 entries). Empty: rank of the right-hand side plus `rank_padding`.
    std::vector<std::size_t> ranks;
    std::size_t rank_padding = 2;
    std::optional<std::size_t> rank_cap;
    /// Sweeps per rank level.
    std::size_t max_sweeps = 10;
    /// When sweeps stall above `tol`, widen every bond by max(rank_padding, r/2) (up to rank_cap and the full
    /// rank) and continue from the current iterate. Ignored when `ranks` is given.
    bool adaptive_ranks = true;
    /// Stop once ||Mx - b|| / ||b|| drops below this.
    double tol = 1e-12;
    /// Stop when a full sweep improves the residual by less than this factor.
    double stagnation = 1e-3;
    /// Residual above which a finished solve is reported as non-convergence.
    double fail_residual = 1e-2;
    std::uint64_t seed = 1;
};

struct AlsReport {
    double residual = 0.0;  ///< ||Mx - b|| / ||b|| of the returned x
    std::size_t sweeps = 0;
    std::size_t rank_increases = 0;
    /// Relative residual after every half sweep, starting with the initial guess.
    std::vector<double> history;
    std::vector<std::size_t> ranks;
    bool regularized = false;
};

/// Alternating linear scheme for M x = b at fixed TT ranks: each step minimizes ||M x - b|| over one core with the
/// others held fixed, sweeping left to right and back. `x0` (default: b) seeds the iteration and is padded to the
/// target ranks. Throws SolverError if the final relative residual exceeds cfg.fail_residual.
TTVector als_linear_solve(const TTOperator& M, const TTVector& b, const AlsConfig& cfg = {},
                          AlsReport* report = nullptr, const TTVector* x0 = nullptr);

}  // namespace xfer
