#pragma once

#include <Eigen/Core>
#include <vector>

#include "xfer/core/full_tensor.hpp"

namespace xfer {

/// Canonical (r-term) tensor: sum over terms of v_1 ⊗ ... ⊗ v_d.
struct CPTensor {
    ModeShape shape;
    std::vector<std::vector<Eigen::VectorXd>> terms;

    explicit CPTensor(ModeShape s = ModeShape{1}) : shape(std::move(s)) {}
    std::size_t rank() const { return terms.size(); }
    void add_term(std::vector<Eigen::VectorXd> factors);
};

/// Canonical operator: sum over terms of A_1 ⊗ ... ⊗ A_d with A_mu of size rows_mu x cols_mu.
struct CPOperator {
    ModeShape rows, cols;
    std::vector<std::vector<Eigen::MatrixXd>> terms;

    CPOperator() : rows{1}, cols{1} {}
    CPOperator(ModeShape r, ModeShape c) : rows(std::move(r)), cols(std::move(c)) {}
    std::size_t rank() const { return terms.size(); }
    void add_term(std::vector<Eigen::MatrixXd> factors);

    static CPOperator identity(const ModeShape& shape);
};

/// Weighted sum of elementary operators w_l (a_1 ⊗ ... ⊗ a_d) ⊗ (b_1 ⊗ ... ⊗ b_d), i.e. outer products of two
/// rank-1 tensors. This is how the EDMD tensors arise from data.
struct OuterProductSum {
    ModeShape rows, cols;
    std::vector<double> weights;
    std::vector<std::vector<Eigen::VectorXd>> left, right;

    OuterProductSum() : rows{1}, cols{1} {}
    OuterProductSum(ModeShape r, ModeShape c) : rows(std::move(r)), cols(std::move(c)) {}
    std::size_t rank() const { return weights.size(); }
    void add_term(double w, std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b);

    /// Mode matrices a_mu b_mu^T with the weight folded into the first mode.
    CPOperator to_cp() const;
};

CPTensor cp_add(const CPTensor& v, const CPTensor& w);
CPOperator cp_add(const CPOperator& A, const CPOperator& B);
CPTensor cp_apply(const CPOperator& A, const CPTensor& v);

/// Rank-1 entry product v_1[i_1] * ... * v_d[i_d] accumulated in mode order.
FullTensor densify_rank1(const ModeShape& shape, const std::vector<Eigen::VectorXd>& factors);

FullTensor densify(const CPTensor& v, std::size_t guard = kDefaultDensifyGuard);
FullOperator densify(const CPOperator& A, std::size_t guard = kDefaultDensifyGuard);
FullOperator densify(const OuterProductSum& A, std::size_t guard = kDefaultDensifyGuard);

void check_guard(std::size_t entries, std::size_t guard, const char* what);

}  // namespace xfer
