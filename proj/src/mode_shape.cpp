#include "xfer/core/mode_shape.hpp"

#include <sstream>

#include "xfer/error.hpp"

namespace xfer {

ModeShape::ModeShape(std::initializer_list<std::size_t> sizes) : ModeShape(std::vector<std::size_t>(sizes)) {}

ModeShape::ModeShape(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DimensionError("ModeShape needs at least one mode");
    total_ = 1;
    for (std::size_t mu = 0; mu < sizes_.size(); ++mu) {
        if (sizes_[mu] == 0) throw DimensionError("mode " + std::to_string(mu + 1) + " has size 0");
        total_ *= sizes_[mu];
    }
}

std::size_t ModeShape::stride(std::size_t mu) const {
    std::size_t s = 1;
    for (std::size_t nu = 0; nu < mu; ++nu) s *= sizes_[nu];
    return s;
}

std::string ModeShape::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t mu = 0; mu < sizes_.size(); ++mu) os << (mu ? "," : "") << sizes_[mu];
    os << ')';
    return os.str();
}

std::size_t multiindex_to_linear(const MultiIndex& i, const ModeShape& shape) {
    if (i.size() != shape.order())
        throw DimensionError("multi-index has " + std::to_string(i.size()) + " entries, shape " +
                             shape.to_string() + " has order " + std::to_string(shape.order()));
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (std::size_t mu = 0; mu < i.size(); ++mu) {
        if (i[mu] < 1 || i[mu] > shape[mu])
            throw RangeError("index " + std::to_string(i[mu]) + " out of range [1," + std::to_string(shape[mu]) +
                             "] in mode " + std::to_string(mu + 1));
        lin += stride * (i[mu] - 1);
        stride *= shape[mu];
    }
    return lin + 1;
}

MultiIndex linear_to_multiindex(std::size_t linear, const ModeShape& shape) {
    if (linear < 1 || linear > shape.total())
        throw RangeError("linear index " + std::to_string(linear) + " out of range [1," +
                         std::to_string(shape.total()) + "]");
    MultiIndex out(shape.order());
    std::size_t r = linear - 1;
    for (std::size_t mu = 0; mu < shape.order(); ++mu) {
        out[mu] = r % shape[mu] + 1;
        r /= shape[mu];
    }
    return out;
}

std::size_t linear0(const std::size_t* idx0, const ModeShape& shape) {
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (std::size_t mu = 0; mu < shape.order(); ++mu) {
        lin += stride * idx0[mu];
        stride *= shape[mu];
    }
    return lin;
}

void unravel0(std::size_t linear, const ModeShape& shape, std::size_t* idx0) {
    for (std::size_t mu = 0; mu < shape.order(); ++mu) {
        idx0[mu] = linear % shape[mu];
        linear /= shape[mu];
    }
}

}  // namespace xfer
