#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace xfer {

/// Mode sizes (k_1, ..., k_d) of a tensor space.
class ModeShape {
public:
    ModeShape() = default;
    ModeShape(std::initializer_list<std::size_t> sizes);
    explicit ModeShape(std::vector<std::size_t> sizes);

    std::size_t order() const { return sizes_.size(); }
    std::size_t operator[](std::size_t mu) const { return sizes_[mu]; }
    const std::vector<std::size_t>& sizes() const { return sizes_; }

    /// Product of all mode sizes (the number of boxes or basis functions).
    std::size_t total() const { return total_; }

    /// Stride of mode mu in the first-index-fastest linearization.
    std::size_t stride(std::size_t mu) const;

    std::string to_string() const;

    friend bool operator==(const ModeShape& a, const ModeShape& b) { return a.sizes_ == b.sizes_; }
    friend bool operator!=(const ModeShape& a, const ModeShape& b) { return !(a == b); }

private:
    std::vector<std::size_t> sizes_;
    std::size_t total_ = 0;
};

/// 1-based multi-index (i_1, ..., i_d).
using MultiIndex = std::vector<std::size_t>;

/// î = 1 + sum_mu (prod_{nu<mu} k_nu)(i_mu - 1). Throws RangeError naming the mode on bad input.
std::size_t multiindex_to_linear(const MultiIndex& i, const ModeShape& shape);

/// Inverse of multiindex_to_linear.
MultiIndex linear_to_multiindex(std::size_t linear, const ModeShape& shape);

/// Zero-based variants used internally; no validation.
std::size_t linear0(const std::size_t* idx0, const ModeShape& shape);
void unravel0(std::size_t linear, const ModeShape& shape, std::size_t* idx0);

}  // namespace xfer
