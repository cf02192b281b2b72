#include "xfer/edmd/basis.hpp"

#include <cmath>
#include <cstdio>

#include "xfer/error.hpp"

namespace xfer {

BasisSet1D BasisSet1D::monomials(std::size_t max_order, std::optional<std::pair<double, double>> scale) {
    if (scale && !(scale->second > scale->first)) throw RangeError("monomial scaling interval is empty");
    BasisSet1D b;
    b.family_ = Family::Monomials;
    b.size_ = max_order + 1;
    b.scale_ = scale;
    return b;
}

BasisSet1D BasisSet1D::gaussians(std::vector<double> centers, double width) {
    if (centers.empty()) throw RangeError("gaussian basis needs at least one center");
    if (!(width > 0.0)) throw RangeError("gaussian width must be positive");
    BasisSet1D b;
    b.family_ = Family::Gaussians;
    b.size_ = centers.size();
    b.centers_ = std::move(centers);
    b.width_ = width;
    return b;
}

std::string BasisSet1D::describe() const {
    char buf[128];
    if (family_ == Family::Gaussians) {
        std::snprintf(buf, sizeof buf, "gaussians(count=%zu,width=%.17g)", size_, width_);
        return buf;
    }
    if (scale_) {
        std::snprintf(buf, sizeof buf, "monomials(max_order=%zu,scale=[%.17g,%.17g])", size_ - 1, scale_->first,
                      scale_->second);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "monomials(max_order=%zu)", size_ - 1);
    return buf;
}

void BasisSet1D::evaluate(double x, double* out) const {
    if (family_ == Family::Gaussians) {
        for (std::size_t i = 0; i < size_; ++i) {
            const double z = (x - centers_[i]) / width_;
            out[i] = std::exp(-0.5 * z * z);
        }
        return;
    }
    const double t = scale_ ? (2.0 * x - (scale_->first + scale_->second)) / (scale_->second - scale_->first) : x;
    double p = 1.0;
    for (std::size_t i = 0; i < size_; ++i) {
        out[i] = p;
        p *= t;
    }
}

Eigen::VectorXd BasisSet1D::evaluate(double x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size_));
    evaluate(x, v.data());
    return v;
}

TensorBasis::TensorBasis(std::vector<BasisSet1D> sets) : sets_(std::move(sets)) {
    std::vector<std::size_t> k;
    for (const auto& s : sets_) k.push_back(s.size());
    shape_ = ModeShape(k);
}

std::vector<Eigen::VectorXd> eval_psi_factors(const TensorBasis& basis, std::span<const double> x) {
    if (x.size() != basis.dim()) throw DimensionError("point dimension does not match basis");
    std::vector<Eigen::VectorXd> f;
    f.reserve(basis.dim());
    for (std::size_t mu = 0; mu < basis.dim(); ++mu) {
        f.push_back(basis[mu].evaluate(x[mu]));
        if (!f.back().allFinite())
            throw EvaluationError("non-finite basis value in mode " + std::to_string(mu + 1));
    }
    return f;
}

CPTensor eval_psi_rank1(const TensorBasis& basis, std::span<const double> x) {
    CPTensor t(basis.shape());
    t.add_term(eval_psi_factors(basis, x));
    return t;
}

FullTensor eval_psi_full(const TensorBasis& basis, std::span<const double> x) {
    const auto f = eval_psi_factors(basis, x);
    const ModeShape& shape = basis.shape();
    FullTensor out(shape);
    std::vector<std::size_t> idx(shape.order(), 0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double p = 1.0;
        for (std::size_t mu = 0; mu < shape.order(); ++mu) p *= f[mu][static_cast<Eigen::Index>(idx[mu])];
        out[k] = p;
        for (std::size_t mu = 0; mu < shape.order(); ++mu) {
            if (++idx[mu] < shape[mu]) break;
            idx[mu] = 0;
        }
    }
    return out;
}

}  // namespace xfer
