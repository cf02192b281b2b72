#include "xfer/edmd/edmd.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "xfer/error.hpp"

namespace xfer {

namespace {

void check_data(const TensorBasis& basis, const EdmdData& data) {
    if (data.X.cols() == 0) throw EmptyDataError("EDMD needs at least one sample pair");
    if (data.X.cols() != data.Y.cols()) throw DimensionError("X and Y hold different sample counts");
    if (static_cast<std::size_t>(data.X.rows()) != basis.dim() || static_cast<std::size_t>(data.Y.rows()) != basis.dim())
        throw DimensionError("sample dimension does not match basis");
}

std::span<const double> column(const Eigen::MatrixXd& M, Eigen::Index l) {
    return {M.data() + l * M.rows(), static_cast<std::size_t>(M.rows())};
}

}  // namespace

EdmdData sample_edmd_data(std::span<const double> lower, std::span<const double> upper, std::size_t m,
                          const PointMap& map, std::uint64_t seed) {
    if (lower.size() != upper.size()) throw DimensionError("sampling box bounds differ in dimension");
    if (m > 0xffffffffu) throw CapacityError("too many samples");
    const auto d = static_cast<Eigen::Index>(lower.size());
    EdmdData out{Eigen::MatrixXd(d, static_cast<Eigen::Index>(m)), Eigen::MatrixXd(d, static_cast<Eigen::Index>(m))};
    std::vector<std::exception_ptr> failures(m);
    const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t l = 0; l < mm; ++l) {
        try {
            RandomStream pos(seed, StreamPurpose::Samples, static_cast<std::uint32_t>(l));
            Point x(lower.size());
            for (std::size_t mu = 0; mu < x.size(); ++mu) x[mu] = lower[mu] + pos.uniform() * (upper[mu] - lower[mu]);
            RandomStream noise(seed, StreamPurpose::Noise, static_cast<std::uint32_t>(l), 0xffffffffu);
            const Point y = map(x, noise);
            if (y.size() != x.size()) throw DimensionError("map returned a point of wrong dimension");
            for (Eigen::Index mu = 0; mu < d; ++mu) {
                out.X(mu, l) = x[static_cast<std::size_t>(mu)];
                out.Y(mu, l) = y[static_cast<std::size_t>(mu)];
            }
        } catch (...) {
            failures[static_cast<std::size_t>(l)] = std::current_exception();
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

EdmdDense assemble_edmd_dense(const TensorBasis& basis, const EdmdData& data) {
    check_data(basis, data);
    const std::size_t K = basis.shape().total();
    const std::size_t m = data.size();
    const double w = 1.0 / static_cast<double>(m);
    EdmdDense out{Eigen::MatrixXd::Zero(Eigen::Index(K), Eigen::Index(K)), Eigen::MatrixXd::Zero(Eigen::Index(K), Eigen::Index(K)), m};

    constexpr std::size_t kBlock = 256;
    std::vector<FullTensor> px, py;
    for (std::size_t start = 0; start < m; start += kBlock) {
        const std::size_t stop = std::min(m, start + kBlock);
        px.clear();
        py.clear();
        for (std::size_t l = start; l < stop; ++l) {
            px.push_back(eval_psi_full(basis, column(data.X, Eigen::Index(l))));
            py.push_back(eval_psi_full(basis, column(data.Y, Eigen::Index(l))));
        }
        // Each column is owned by one thread and every entry accumulates samples in index order.
        const auto KK = static_cast<std::ptrdiff_t>(K);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t jj = 0; jj < KK; ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            double* a = out.A.data() + j * K;
            double* g = out.G.data() + j * K;
            for (std::size_t s = 0; s < px.size(); ++s) {
                const double xj = px[s][j];
                for (std::size_t i = 0; i < K; ++i) {
                    a[i] += w * (py[s][i] * xj);
                    g[i] += w * (px[s][i] * xj);
                }
            }
        }
    }
    return out;
}

EdmdCP assemble_edmd_cp(const TensorBasis& basis, const EdmdData& data) {
    check_data(basis, data);
    const std::size_t m = data.size();
    const double w = 1.0 / static_cast<double>(m);
    EdmdCP out{OuterProductSum(basis.shape(), basis.shape()), OuterProductSum(basis.shape(), basis.shape()), m};
    for (std::size_t l = 0; l < m; ++l) {
        auto fx = eval_psi_factors(basis, column(data.X, Eigen::Index(l)));
        auto fy = eval_psi_factors(basis, column(data.Y, Eigen::Index(l)));
        out.A.add_term(w, fy, fx);
        out.G.add_term(w, fx, fx);
    }
    return out;
}

KoopmanMatrix koopman_matrix(const EdmdDense& e, double svd_tol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(e.G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s[0] > 0.0)) throw DegenerateDataError("Gram matrix G is zero");
    KoopmanMatrix out;
    out.svd_tol = svd_tol;
    const double cut = svd_tol * s[0];
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s[k] > cut) {
            inv[k] = 1.0 / s[k];
            ++out.effective_rank;
        }
    out.condition = s[0] / s[static_cast<Eigen::Index>(out.effective_rank) - 1];
    const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    out.Kt = e.A * pinv;
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> koopman_eigproblem_matrices(const EdmdDense& e) { return {e.A, e.G}; }

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> pf_eigproblem_matrices(const EdmdDense& e) {
    return {e.A.transpose(), e.G};
}

OuterProductSum koopman_right_operator(const EdmdCP& e) {
    OuterProductSum t(e.A.cols, e.A.rows);
    t.weights = e.A.weights;
    t.left = e.A.right;
    t.right = e.A.left;
    return t;
}

OuterProductSum pf_right_operator(const EdmdCP& e) { return e.A; }

double eval_eigenfunction(const FullTensor& xi, const TensorBasis& basis, std::span<const double> x) {
    if (xi.shape() != basis.shape()) throw DimensionError("coefficient tensor shape does not match basis");
    return inner(xi, eval_psi_full(basis, x));
}

double eval_eigenfunction(const CPTensor& xi, const TensorBasis& basis, std::span<const double> x) {
    if (xi.shape != basis.shape()) throw DimensionError("coefficient tensor shape does not match basis");
    const auto f = eval_psi_factors(basis, x);
    double sum = 0.0;
    for (const auto& term : xi.terms) {
        double p = 1.0;
        for (std::size_t mu = 0; mu < f.size(); ++mu) p *= term[mu].dot(f[mu]);
        sum += p;
    }
    return sum;
}

double eval_eigenfunction(const TTVector& xi, const TensorBasis& basis, std::span<const double> x) {
    if (xi.shape() != basis.shape()) throw DimensionError("coefficient tensor shape does not match basis");
    const auto f = eval_psi_factors(basis, x);
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Ones(1);
    for (std::size_t mu = 0; mu < xi.order(); ++mu) {
        const TTCore& c = xi.core(mu);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Eigen::Index(c.r0), Eigen::Index(c.r1));
        for (std::size_t i = 0; i < c.k; ++i) M += f[mu][Eigen::Index(i)] * c.slice(i);
        r = r * M;
    }
    return r(0);
}

}  // namespace xfer
