#include "xfer/ulam/box_grid.hpp"

#include <cmath>

#include "xfer/error.hpp"

namespace xfer {

BoxGrid::BoxGrid(std::vector<double> lower, std::vector<double> upper, ModeShape boxes)
    : lower_(std::move(lower)), upper_(std::move(upper)), shape_(std::move(boxes)) {
    if (lower_.size() != shape_.order() || upper_.size() != shape_.order())
        throw DimensionError("grid bounds and box counts have different dimensions");
    for (std::size_t mu = 0; mu < dim(); ++mu) {
        if (!(upper_[mu] > lower_[mu]) || !std::isfinite(lower_[mu]) || !std::isfinite(upper_[mu]))
            throw RangeError("grid interval " + std::to_string(mu + 1) + " is empty or not finite");
        width_.push_back((upper_[mu] - lower_[mu]) / static_cast<double>(shape_[mu]));
    }
}

std::optional<std::size_t> BoxGrid::subinterval(std::size_t mu, double x) const {
    if (!(x >= lower_[mu] && x <= upper_[mu])) return std::nullopt;
    const double t = std::floor((x - lower_[mu]) / width_[mu]);
    const std::size_t k = shape_[mu];
    const std::size_t i = t < 0 ? 0 : std::min(static_cast<std::size_t>(t), k - 1);
    return i + 1;
}

Point BoxGrid::center(const MultiIndex& i) const {
    multiindex_to_linear(i, shape_);
    Point c(dim());
    for (std::size_t mu = 0; mu < dim(); ++mu)
        c[mu] = lower_[mu] + (static_cast<double>(i[mu]) - 0.5) * width_[mu];
    return c;
}

double BoxGrid::box_volume() const {
    double v = 1.0;
    for (double w : width_) v *= w;
    return v;
}

std::optional<MultiIndex> ind(const BoxGrid& grid, std::span<const double> x) {
    if (x.size() != grid.dim()) throw DimensionError("point dimension does not match grid");
    MultiIndex i(grid.dim());
    for (std::size_t mu = 0; mu < grid.dim(); ++mu) {
        const auto s = grid.subinterval(mu, x[mu]);
        if (!s) return std::nullopt;
        i[mu] = *s;
    }
    return i;
}

int indicator_product(const BoxGrid& grid, const MultiIndex& i, std::span<const double> x) {
    multiindex_to_linear(i, grid.shape());
    int prod = 1;
    for (std::size_t mu = 0; mu < grid.dim(); ++mu) {
        const auto s = grid.subinterval(mu, x[mu]);
        prod *= (s && *s == i[mu]) ? 1 : 0;
    }
    return prod;
}

FullTensor evaluate_on_centers(const BoxGrid& grid, const std::function<double(std::span<const double>)>& f) {
    FullTensor out(grid.shape());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.center(linear_to_multiindex(k + 1, grid.shape())));
    return out;
}

}  // namespace xfer
