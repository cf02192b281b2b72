#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xfer/core/full_tensor.hpp"
#include "xfer/formats/cp.hpp"

namespace xfer {

/// Third-order TT core of shape (r0, k, r1), entry (a, i, b) at a + r0 (i + k b).
/// The left unfolding (r0 k) x r1 and right unfolding r0 x (k r1) are plain column-major views.
struct TTCore {
    std::size_t r0 = 1, k = 1, r1 = 1;
    std::vector<double> data;

    TTCore() : data(1, 0.0) {}
    TTCore(std::size_t r0_, std::size_t k_, std::size_t r1_) : r0(r0_), k(k_), r1(r1_), data(r0_ * k_ * r1_, 0.0) {}

    double& operator()(std::size_t a, std::size_t i, std::size_t b) { return data[a + r0 * (i + k * b)]; }
    double operator()(std::size_t a, std::size_t i, std::size_t b) const { return data[a + r0 * (i + k * b)]; }

    using Map = Eigen::Map<Eigen::MatrixXd>;
    using CMap = Eigen::Map<const Eigen::MatrixXd>;
    Map left() { return {data.data(), Eigen::Index(r0 * k), Eigen::Index(r1)}; }
    CMap left() const { return {data.data(), Eigen::Index(r0 * k), Eigen::Index(r1)}; }
    Map right() { return {data.data(), Eigen::Index(r0), Eigen::Index(k * r1)}; }
    CMap right() const { return {data.data(), Eigen::Index(r0), Eigen::Index(k * r1)}; }
    /// r0 x r1 slice for mode index i (strided view, copied).
    Eigen::MatrixXd slice(std::size_t i) const;
};

/// Tensor train vector with rank vector (1, r_1, ..., r_{d-1}, 1).
class TTVector {
public:
    TTVector() = default;
    TTVector(ModeShape shape, std::vector<TTCore> cores);

    static TTVector zeros(const ModeShape& shape);
    static TTVector unit(const ModeShape& shape, const MultiIndex& i);
    static TTVector ones(const ModeShape& shape);
    static TTVector rank1(const ModeShape& shape, const std::vector<Eigen::VectorXd>& factors);

    const ModeShape& shape() const { return shape_; }
    std::size_t order() const { return cores_.size(); }
    const TTCore& core(std::size_t mu) const { return cores_[mu]; }
    TTCore& core(std::size_t mu) { return cores_[mu]; }
    const std::vector<TTCore>& cores() const { return cores_; }
    std::vector<TTCore>& cores() { return cores_; }

    std::vector<std::size_t> ranks() const;
    std::size_t max_rank() const;
    /// Number of stored doubles.
    std::size_t storage() const;

    void validate() const;

private:
    ModeShape shape_;
    std::vector<TTCore> cores_;
};

/// Tensor train operator. Core entry (a, i, j, b) sits at a + r0 (i + n (j + m b)), so each core is a vector core
/// with combined mode index i + n j; operator rounding reuses vector rounding on that view.
class TTOperator {
public:
    TTOperator() = default;
    TTOperator(ModeShape rows, ModeShape cols, std::vector<TTCore> cores);

    static TTOperator identity(const ModeShape& shape);
    static TTOperator from_vector(const ModeShape& rows, const ModeShape& cols, TTVector v);

    const ModeShape& row_shape() const { return rows_; }
    const ModeShape& col_shape() const { return cols_; }
    std::size_t order() const { return cores_.size(); }
    const TTCore& core(std::size_t mu) const { return cores_[mu]; }
    TTCore& core(std::size_t mu) { return cores_[mu]; }
    const std::vector<TTCore>& cores() const { return cores_; }

    double core_at(std::size_t mu, std::size_t a, std::size_t i, std::size_t j, std::size_t b) const {
        const TTCore& c = cores_[mu];
        return c.data[a + c.r0 * (i + rows_[mu] * (j + cols_[mu] * b))];
    }

    std::vector<std::size_t> ranks() const;
    std::size_t max_rank() const;

    /// View as a TT vector over combined modes n_mu * m_mu.
    TTVector as_vector() const;

private:
    ModeShape rows_, cols_;
    std::vector<TTCore> cores_;
};

// Construction from other formats.
TTVector cp_to_tt(const CPTensor& v);
TTOperator cp_to_tt(const CPOperator& A);

// Arithmetic. Ranks add under tt_add and multiply under tt_apply.
TTVector tt_add(const TTVector& v, const TTVector& w);
TTOperator tt_add(const TTOperator& A, const TTOperator& B);
TTVector tt_scale(double alpha, const TTVector& v);
TTOperator tt_scale(double alpha, const TTOperator& A);
double tt_inner(const TTVector& v, const TTVector& w);
double tt_norm(const TTVector& v);
TTVector tt_apply(const TTOperator& A, const TTVector& v);
TTOperator tt_transpose(const TTOperator& A);
double tt_entry(const TTVector& v, const MultiIndex& i);
double tt_entry(const TTOperator& A, const MultiIndex& i, const MultiIndex& j);
/// Sum of all entries, by contraction with the all-ones tensor.
double tt_sum(const TTVector& v);

FullTensor densify(const TTVector& v, std::size_t guard = kDefaultDensifyGuard);
FullOperator densify(const TTOperator& A, std::size_t guard = kDefaultDensifyGuard);

/// Right-to-left orthogonalization: cores 2..d become right-orthonormal, the first core carries the norm.
void right_orthogonalize(TTVector& v);
/// Left-to-right orthogonalization: cores 1..d-1 become left-orthonormal.
void left_orthogonalize(TTVector& v);

struct RoundReport {
    std::vector<std::size_t> ranks;
    /// Norm of the discarded part, ||v - T(v)||.
    double abs_error = 0.0;
    /// abs_error / ||v|| (0 for the zero tensor).
    double rel_error = 0.0;
    double input_norm = 0.0;
    /// Smallest ratio sigma_r / delta over bonds whose kept rank r exceeds 1 (infinity if none). A value above 1
    /// means rounding the result again with the same tolerance keeps all ranks.
    double kept_margin = 0.0;
};

/// Relative floor applied to the rounding tolerance so that eps = 0 still drops round-off singular values.
inline constexpr double kRoundoffFloor = 1e-15;

/// Truncation T(v): ||v - T(v)|| <= eps ||v|| unless the rank cap binds; then the delivered error is reported.
TTVector tt_round(const TTVector& v, double eps, std::optional<std::size_t> r_max = std::nullopt,
                  RoundReport* report = nullptr);
TTOperator tt_round(const TTOperator& A, double eps, std::optional<std::size_t> r_max = std::nullopt,
                    RoundReport* report = nullptr);

/// TT-SVD of a dense tensor with the same error contract as tt_round.
TTVector full_to_tt(const FullTensor& v, double eps, std::optional<std::size_t> r_max = std::nullopt,
                    RoundReport* report = nullptr);
TTOperator full_to_tt(const FullOperator& A, double eps, std::optional<std::size_t> r_max = std::nullopt,
                      RoundReport* report = nullptr);

// Binary dumps: TTD1 for vectors, TTO1 for operators.
void write_ttd1(std::ostream& os, const TTVector& v);
void write_ttd1(const std::string& path, const TTVector& v);
TTVector read_ttd1(std::istream& is);
TTVector read_ttd1(const std::string& path);
void write_tto1(std::ostream& os, const TTOperator& A);
void write_tto1(const std::string& path, const TTOperator& A);
TTOperator read_tto1(std::istream& is);
TTOperator read_tto1(const std::string& path);

}  // namespace xfer
