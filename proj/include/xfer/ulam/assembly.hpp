#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "xfer/dynamics/rng.hpp"
#include "xfer/dynamics/sde.hpp"
#include "xfer/formats/cp.hpp"
#include "xfer/formats/tt.hpp"
#include "xfer/ulam/box_grid.hpp"

namespace xfer {

/// n points per box for every box of a grid, stored box-major in linear box order.
struct BoxPoints {
    std::size_t dim = 0;
    std::size_t boxes = 0;
    std::size_t per_box = 0;
    std::vector<double> coords;

    std::span<const double> point(std::size_t box0, std::size_t l) const {
        return {coords.data() + (box0 * per_box + l) * dim, dim};
    }
    std::span<double> point(std::size_t box0, std::size_t l) {
        return {coords.data() + (box0 * per_box + l) * dim, dim};
    }
};

/// A (possibly random) map of one point; the stream is private to that point.
using PointMap = std::function<Point(std::span<const double>, RandomStream&)>;

/// Flow map of the SDE as a PointMap.
PointMap sde_point_map(const SdeSystem& sys);

/// Point l of box î is drawn from stream (seed, TestPoints, î, l) and lies in that box.
BoxPoints sample_test_points(const BoxGrid& grid, std::size_t n, std::uint64_t seed);

/// Applies `map` to every point; point l of box î uses stream (seed, Noise, î, l). Runs in parallel over
/// boxes when built with OpenMP; the result does not depend on the thread count.
BoxPoints map_points(const BoxPoints& points, const PointMap& map, std::uint64_t seed);

struct AssemblyOptions {
    /// Leave rows without kept points at zero instead of throwing EmptyRowError.
    bool allow_empty_rows = false;
};

struct RetainedMass {
    std::vector<std::size_t> kept;    ///< kept points per box, linear order
    std::size_t per_box = 0;
    std::vector<std::size_t> empty_rows;  ///< zero-based boxes with no kept point

    double total_fraction() const;
    double min_fraction() const;
};

struct TransitionDense {
    Eigen::MatrixXd P;
    RetainedMass mass;
};

/// One nonzero (i, j) transition with zero-based multi-indices.
struct TransitionEntry {
    std::vector<std::uint32_t> from, to;
    std::uint32_t count = 0;
    double weight = 0.0;
};

/// Ulam tensor as a sum of weighted elementary operators e^i ⊗ e^j, one per distinct transition, ordered
/// by (î, ĵ).
struct TransitionCP {
    ModeShape shape;
    std::size_t per_box = 0;
    std::vector<TransitionEntry> entries;
    RetainedMass mass;

    std::size_t rank() const { return entries.size(); }
    CPOperator to_cp() const;
};

TransitionDense assemble_dense(const BoxGrid& grid, const BoxPoints& points, const BoxPoints& images,
                               const AssemblyOptions& opts = {});
TransitionDense assemble_dense(const BoxGrid& grid, const SdeSystem& sys, std::size_t n, std::uint64_t seed,
                               const AssemblyOptions& opts = {});

TransitionCP assemble_tensor(const BoxGrid& grid, const BoxPoints& points, const BoxPoints& images,
                             const AssemblyOptions& opts = {});
TransitionCP assemble_tensor(const BoxGrid& grid, const SdeSystem& sys, std::size_t n, std::uint64_t seed,
                             const AssemblyOptions& opts = {});

FullOperator densify(const TransitionCP& P, std::size_t guard = kDefaultDensifyGuard);

FullTensor subtensor_row_sums(const TransitionCP& P);
FullTensor subtensor_row_sums(const FullOperator& P);

/// TT approximation of the Ulam tensor with relative accuracy eps. Small problems go through the dense
/// operator, larger ones accumulate the elementary terms in chunks with intermediate rounding.
TTOperator transition_to_tt(const TransitionCP& P, double eps, std::optional<std::size_t> r_max = std::nullopt,
                            std::size_t guard = kDefaultDensifyGuard, RoundReport* report = nullptr);

}  // namespace xfer
