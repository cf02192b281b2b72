#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Core>

#include "xfer/edmd/basis.hpp"
#include "xfer/formats/cp.hpp"
#include "xfer/formats/tt.hpp"
#include "xfer/ulam/assembly.hpp"

namespace xfer {

// Snapshot pairs: column l of X is x_l, column l of Y is y_l = S(x_l).
struct EdmdData {
    Eigen::MatrixXd X, Y;
    std::size_t size() const { return static_cast<std::size_t>(X.cols()); }
};

// x_l uniform on the box [lower, upper] from stream (seed, Samples, l); y_l = map(x_l) with stream (seed, Noise, l, 2^32-1).
EdmdData sample_edmd_data(std::span<const double> lower, std::span<const double> upper, std::size_t m,
                          const PointMap& map, std::uint64_t seed);

struct EdmdDense {
    Eigen::MatrixXd A, G;
    std::size_t m = 0;
};

// A = (1/m) sum Psi(y) ⊗ Psi(x), G = (1/m) sum Psi(x) ⊗ Psi(x), kept as outer-product sums.
struct EdmdCP {
    OuterProductSum A, G;
    std::size_t m = 0;
};

EdmdDense assemble_edmd_dense(const TensorBasis& basis, const EdmdData& data);
EdmdCP assemble_edmd_cp(const TensorBasis& basis, const EdmdData& data);

struct KoopmanMatrix {
    Eigen::MatrixXd Kt;  // K^T = A G^+
    std::size_t effective_rank = 0;
    double condition = 0.0;  // sigma_max / smallest kept sigma
    double svd_tol = 0.0;
};

KoopmanMatrix koopman_matrix(const EdmdDense& e, double svd_tol = 1e-12);

// Left problems xi M1 = lambda xi M2. Koopman: (A, G); Perron-Frobenius: (A^T, G).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> koopman_eigproblem_matrices(const EdmdDense& e);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> pf_eigproblem_matrices(const EdmdDense& e);

// The same problems written as right problems M xi = lambda G xi, for the tensor solvers:
// Koopman uses M = A^T, Perron-Frobenius uses M = A.
OuterProductSum koopman_right_operator(const EdmdCP& e);
OuterProductSum pf_right_operator(const EdmdCP& e);

// phi(x) = <xi, Psi(x)>. The TT version contracts core by core.
double eval_eigenfunction(const FullTensor& xi, const TensorBasis& basis, std::span<const double> x);
double eval_eigenfunction(const CPTensor& xi, const TensorBasis& basis, std::span<const double> x);
double eval_eigenfunction(const TTVector& xi, const TensorBasis& basis, std::span<const double> x);

}  // namespace xfer
