#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "xfer/core/full_tensor.hpp"
#include "xfer/dynamics/potential.hpp"

namespace xfer {

/// Uniform partition of [a_1,b_1] x ... x [a_d,b_d] into k_1 x ... x k_d boxes. Subintervals are half-open
/// [a + (i-1)w, a + i w) except the last, which also contains b.
class BoxGrid {
public:
    BoxGrid(std::vector<double> lower, std::vector<double> upper, ModeShape boxes);

    std::size_t dim() const { return lower_.size(); }
    const ModeShape& shape() const { return shape_; }
    double lower(std::size_t mu) const { return lower_[mu]; }
    double upper(std::size_t mu) const { return upper_[mu]; }
    double width(std::size_t mu) const { return width_[mu]; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }

    /// 1-based subinterval of coordinate x in mode mu, or nullopt when x leaves [a_mu, b_mu].
    std::optional<std::size_t> subinterval(std::size_t mu, double x) const;

    Point center(const MultiIndex& i) const;
    double box_volume() const;

private:
    std::vector<double> lower_, upper_, width_;
    ModeShape shape_;
};

/// Box multi-index containing x, or nullopt (Outside).
std::optional<MultiIndex> ind(const BoxGrid& grid, std::span<const double> x);

/// Product of per-mode interval indicators; 1 exactly when x lies in box i.
int indicator_product(const BoxGrid& grid, const MultiIndex& i, std::span<const double> x);

/// f evaluated at every box center, in linear-index order.
FullTensor evaluate_on_centers(const BoxGrid& grid, const std::function<double(std::span<const double>)>& f);

}  // namespace xfer
