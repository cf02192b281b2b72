#pragma once

#include <functional>
#include <span>

#include "xfer/dynamics/potential.hpp"
#include "xfer/dynamics/rng.hpp"

namespace xfer {

/// Overdamped Langevin dynamics dX = -grad V(X) dt + sigma dW, discretized by Euler-Maruyama.
/// One flow-map evaluation S integrates `steps` steps of size h, i.e. over [0, steps * h].
struct SdeSystem {
    Potential potential;
    double sigma = 0.7;
    double h = 1e-3;
    std::size_t steps = 10000;

    std::size_t dim() const { return potential.dim(); }
    double interval() const { return static_cast<double>(steps) * h; }
};

/// x' = x - grad V(x) h + sigma sqrt(h) xi. Throws DivergenceError on a non-finite result.
Point em_step(const SdeSystem& sys, std::span<const double> x, RandomStream& rng);

/// `steps` Euler-Maruyama steps from x with consecutive increments of rng.
Point flow_map(const SdeSystem& sys, std::span<const double> x, RandomStream& rng);

/// Integrates `steps` steps and reports every `stride`-th state (including the start) to `sink(t, x)`.
void simulate_trajectory(const SdeSystem& sys, std::span<const double> x0, RandomStream& rng, std::size_t steps,
                         std::size_t stride, const std::function<void(double, std::span<const double>)>& sink);

}  // namespace xfer
