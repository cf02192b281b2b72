#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "xfer/core/full_tensor.hpp"
#include "xfer/formats/cp.hpp"

namespace xfer {

/// Basis functions psi^1..psi^k of one coordinate.
///
/// Monomials are psi^i(x) = t^(i-1) with t = x, or t the affine image of x under [a,b] -> [-1,1] when a
/// scaling interval is set. Gaussians are psi^i(x) = exp(-(x - c_i)^2 / (2 s^2)).
class BasisSet1D {
public:
    enum class Family { Monomials, Gaussians };

    static BasisSet1D monomials(std::size_t max_order, std::optional<std::pair<double, double>> scale = std::nullopt);
    static BasisSet1D gaussians(std::vector<double> centers, double width);

    Family family() const { return family_; }
    std::size_t size() const { return size_; }
    const std::optional<std::pair<double, double>>& scale() const { return scale_; }
    std::string describe() const;

    /// Writes psi^1(x), ..., psi^k(x) into out (size k).
    void evaluate(double x, double* out) const;
    Eigen::VectorXd evaluate(double x) const;

private:
    Family family_ = Family::Monomials;
    std::size_t size_ = 1;
    std::optional<std::pair<double, double>> scale_;
    std::vector<double> centers_;
    double width_ = 1.0;
};

/// Product basis Psi[i](x) = prod_mu psi_mu^{i_mu}(x_mu).
class TensorBasis {
public:
    TensorBasis() = default;
    explicit TensorBasis(std::vector<BasisSet1D> sets);

    std::size_t dim() const { return sets_.size(); }
    const ModeShape& shape() const { return shape_; }
    const BasisSet1D& operator[](std::size_t mu) const { return sets_[mu]; }

private:
    std::vector<BasisSet1D> sets_;
    ModeShape shape_;
};

/// Factors psi~_mu(x_mu) of the rank-1 tensor Psi(x). Throws EvaluationError naming the mode on a
/// non-finite value.
std::vector<Eigen::VectorXd> eval_psi_factors(const TensorBasis& basis, std::span<const double> x);
CPTensor eval_psi_rank1(const TensorBasis& basis, std::span<const double> x);
/// Psi(x) in full storage, entries multiplied in mode order.
FullTensor eval_psi_full(const TensorBasis& basis, std::span<const double> x);

}  // namespace xfer
