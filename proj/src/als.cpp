#include "xfer/eigsolve/als.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "xfer/dynamics/rng.hpp"
#include "xfer/error.hpp"

namespace xfer {

namespace {

using Mat = Eigen::MatrixXd;
using Idx = Eigen::Index;

std::size_t sat_mul(std::size_t a, std::size_t b) {
    const std::size_t lim = std::numeric_limits<std::size_t>::max() / 4;
    return (a != 0 && b > lim / a) ? lim : a * b;
}

// Core of M x at one mode, with combined ranks a + R0 rho and b + R1 tau.
TTCore apply_core(const TTCore& mc, std::size_t n, std::size_t m, const TTCore& xc) {
    const std::size_t R0 = mc.r0, R1 = mc.r1, r0 = xc.r0, r1 = xc.r1;
    TTCore z(R0 * r0, n, R1 * r1);
    for (std::size_t b = 0; b < R1; ++b) {
        const Eigen::Map<const Mat> Mb(mc.data.data() + R0 * n * m * b, Idx(R0 * n), Idx(m));
        for (std::size_t tau = 0; tau < r1; ++tau) {
            const Eigen::Map<const Mat> Xt(xc.data.data() + r0 * m * tau, Idx(r0), Idx(m));
            const Mat P = Mb * Xt.transpose();  // (a, i) x rho
            for (std::size_t rho = 0; rho < r0; ++rho)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t a = 0; a < R0; ++a) z(a + R0 * rho, i, b + R1 * tau) = P(Idx(a + R0 * i), Idx(rho));
        }
    }
    return z;
}

Mat upper_r(const Mat& K) {
    const Idx q = std::min(K.rows(), K.cols());
    Eigen::HouseholderQR<Mat> qr(K);
    return qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
}

class AlsState {
public:
    AlsState(const TTOperator& M, const TTVector& b, TTVector x) : M_(M), b_(b), x_(std::move(x)), d_(b.order()) {
        LY_.resize(d_ + 1);
        LB_.resize(d_ + 1);
        WY_.resize(d_ + 1);
        WB_.resize(d_ + 1);
        LY_[0] = LB_[0] = Mat::Ones(1, 1);
        WY_[d_] = WB_[d_] = Mat::Ones(1, 1);
        right_orthogonalize(x_);
        for (std::size_t mu = d_; mu-- > 1;) update_right(mu);
    }

    const TTVector& x() const { return x_; }

    // Optimizes core mu; returns ||M x - b|| after the update.
    double solve(std::size_t mu, bool& regularized) {
        Mat B;
        Eigen::VectorXd g;
        local_system(mu, B, g);
        TTCore& c = x_.core(mu);
        Eigen::Map<Eigen::VectorXd> cv(c.data.data(), Idx(c.data.size()));
        const double old_res = (B * cv - g).norm();

        Mat N = Mat::Zero(B.cols(), B.cols());
        N.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose());
        N = N.selfadjointView<Eigen::Lower>();
        const Eigen::VectorXd h = B.transpose() * g;
        Eigen::LLT<Mat> llt(N);
        if (llt.info() != Eigen::Success) {
            const double ridge = 1e-12 * std::max(N.trace(), std::numeric_limits<double>::min()) / double(N.rows());
            spdlog::warn("ALS: singular local system at core {} ({}x{}); adding ridge {:.3g}", mu + 1, N.rows(),
                         N.cols(), ridge);
            N.diagonal().array() += ridge;
            llt.compute(N);
            regularized = true;
        }
        Eigen::VectorXd sol = llt.solve(h);
        sol += llt.solve(h - N * sol);
        const double new_res = (B * sol - g).norm();
        if (sol.allFinite() && new_res <= old_res) {
            cv = sol;
            return new_res;
        }
        return old_res;
    }

    void move_right(std::size_t mu) {
        TTCore& c = x_.core(mu);
        TTCore& nx = x_.core(mu + 1);
        Eigen::HouseholderQR<Mat> qr(c.left());
        const Idx r = Idx(c.r1);
        const Mat Q = qr.householderQ() * Mat::Identity(c.left().rows(), r);
        const Mat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        c.left() = Q;
        const Mat nr = R * nx.right();
        nx.right() = nr;
        update_left(mu);
    }

    void move_left(std::size_t mu) {
        TTCore& c = x_.core(mu);
        TTCore& pv = x_.core(mu - 1);
        const Mat Ct = c.right().transpose();
        Eigen::HouseholderQR<Mat> qr(Ct);
        const Idx r = Idx(c.r0);
        const Mat Q = qr.householderQ() * Mat::Identity(Ct.rows(), r);
        const Mat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        c.right() = Q.transpose();
        const Mat pl = pv.left() * R.transpose();
        pv.left() = pl;
        update_right(mu);
    }

private:
    std::size_t n(std::size_t mu) const { return M_.row_shape()[mu]; }

    // Frames at bond mu + 1 from those at bond mu.
    void update_left(std::size_t mu) {
        const TTCore z = apply_core(M_.core(mu), n(mu), n(mu), x_.core(mu));
        const TTCore& bc = b_.core(mu);
        const Idx q = LY_[mu].rows();
        const Mat KY = LY_[mu] * z.right();   // q x (n * beta)
        const Mat KB = LB_[mu] * bc.right();  // q x (n * s1)
        Mat K(q * Idx(n(mu)), Idx(z.r1 + bc.r1));
        K.leftCols(Idx(z.r1)) = Eigen::Map<const Mat>(KY.data(), q * Idx(n(mu)), Idx(z.r1));
        K.rightCols(Idx(bc.r1)) = Eigen::Map<const Mat>(KB.data(), q * Idx(n(mu)), Idx(bc.r1));
        const Mat R = upper_r(K);
        LY_[mu + 1] = R.leftCols(Idx(z.r1));
        LB_[mu + 1] = R.rightCols(Idx(bc.r1));
    }

    // Frames at bond mu from those at bond mu + 1.
    void update_right(std::size_t mu) {
        const TTCore z = apply_core(M_.core(mu), n(mu), n(mu), x_.core(mu));
        const TTCore& bc = b_.core(mu);
        const Mat& W = WY_[mu + 1];
        const Mat& V = WB_[mu + 1];
        const Idx q = W.rows();
        const std::size_t k = n(mu);
        const Mat PY = z.left() * W.transpose();   // (alpha, i) x t
        const Mat PB = bc.left() * V.transpose();  // (sigma, i) x t
        Mat K(Idx(k) * q, Idx(z.r0 + bc.r0));
        for (Idx t = 0; t < q; ++t)
            for (std::size_t i = 0; i < k; ++i) {
                const Idx row = Idx(i) + Idx(k) * t;
                for (std::size_t a = 0; a < z.r0; ++a) K(row, Idx(a)) = PY(Idx(a + z.r0 * i), t);
                for (std::size_t s = 0; s < bc.r0; ++s) K(row, Idx(z.r0 + s)) = PB(Idx(s + bc.r0 * i), t);
            }
        const Mat R = upper_r(K);
        WY_[mu] = R.leftCols(Idx(z.r0));
        WB_[mu] = R.rightCols(Idx(bc.r0));
    }

    // Coefficients of M x - b in the joint frames at core mu are B vec(core) - g.
    void local_system(std::size_t mu, Mat& B, Eigen::VectorXd& g) const {
        const TTCore& mc = M_.core(mu);
        const TTCore& xc = x_.core(mu);
        const TTCore& bc = b_.core(mu);
        const std::size_t k = n(mu), R0 = mc.r0, R1 = mc.r1, r0 = xc.r0, r1 = xc.r1;
        const Mat& L = LY_[mu];
        const Mat& W = WY_[mu + 1];
        const Idx qL = L.rows(), qR = W.rows();
        const Idx rows = qL * Idx(k) * qR;

        const Mat T1 = LB_[mu] * bc.right();  // qL x (k s1)
        const Mat T2 = Eigen::Map<const Mat>(T1.data(), qL * Idx(k), Idx(bc.r1)) * WB_[mu + 1].transpose();
        g = Eigen::Map<const Eigen::VectorXd>(T2.data(), rows);

        B.resize(rows, Idx(r0 * k * r1));
        const Eigen::Map<const Mat> Mr(mc.data.data(), Idx(R0), Idx(k * k * R1));
        for (std::size_t rho = 0; rho < r0; ++rho) {
            const Mat H = L.middleCols(Idx(R0 * rho), Idx(R0)) * Mr;  // qL x (k k R1)
            const Eigen::Map<const Mat> Hm(H.data(), qL * Idx(k * k), Idx(R1));
            for (std::size_t tau = 0; tau < r1; ++tau) {
                const Mat G = Hm * W.middleCols(Idx(R1 * tau), Idx(R1)).transpose();  // (p, i, j) x t
                for (std::size_t j = 0; j < k; ++j) {
                    const Idx col = Idx(rho + r0 * (j + k * tau));
                    for (Idx t = 0; t < qR; ++t)
                        B.col(col).segment(t * qL * Idx(k), qL * Idx(k)) =
                            G.col(t).segment(Idx(j) * qL * Idx(k), qL * Idx(k));
                }
            }
        }
    }

    const TTOperator& M_;
    const TTVector& b_;
    TTVector x_;
    std::size_t d_;
    std::vector<Mat> LY_, LB_, WY_, WB_;
};

std::vector<std::size_t> target_ranks(const TTVector& b, const TTVector& x0, const AlsConfig& cfg) {
    const std::size_t d = b.order();
    const auto rb = b.ranks(), rx = x0.ranks();
    std::vector<std::size_t> t(d + 1, 1);
    for (std::size_t mu = 1; mu < d; ++mu) {
        std::size_t r = cfg.ranks.empty() ? std::max(rb[mu], rx[mu]) + cfg.rank_padding : cfg.ranks.at(mu - 1);
        if (cfg.rank_cap) r = std::min(r, *cfg.rank_cap);
        t[mu] = std::max<std::size_t>(r, 1);
    }
    for (std::size_t mu = 1; mu < d; ++mu) t[mu] = std::min(t[mu], sat_mul(t[mu - 1], b.shape()[mu - 1]));
    for (std::size_t mu = d; mu-- > 1;) t[mu] = std::min(t[mu], sat_mul(t[mu + 1], b.shape()[mu]));
    return t;
}

TTVector pad(const TTVector& x, const std::vector<std::size_t>& t, std::uint64_t seed) {
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < x.order(); ++mu) {
        const TTCore& c = x.core(mu);
        TTCore nc(t[mu], c.k, t[mu + 1]);
        double amp = 0.0;
        for (double v : c.data) amp = std::max(amp, std::abs(v));
        amp = 1e-8 * (amp > 0 ? amp : 1.0);
        RandomStream rng(seed, StreamPurpose::InitialGuess, 0x415u, static_cast<std::uint32_t>(mu));
        for (std::size_t b = 0; b < nc.r1; ++b)
            for (std::size_t i = 0; i < nc.k; ++i)
                for (std::size_t a = 0; a < nc.r0; ++a)
                    nc(a, i, b) = (a < c.r0 && b < c.r1) ? c(a, i, b) : amp * (2.0 * rng.uniform() - 1.0);
        cores.push_back(std::move(nc));
    }
    return TTVector(x.shape(), std::move(cores));
}

}  // namespace

TTVector als_linear_solve(const TTOperator& M, const TTVector& b, const AlsConfig& cfg, AlsReport* report,
                          const TTVector* x0) {
    if (M.row_shape() != M.col_shape()) throw DimensionError("ALS needs a square operator");
    if (M.col_shape() != b.shape()) throw DimensionError("ALS right-hand side does not match operator");
    if (x0 && x0->shape() != b.shape()) throw DimensionError("ALS initial guess does not match operator");
    if (!cfg.ranks.empty() && cfg.ranks.size() + 1 != b.order())
        throw DimensionError("ALS rank vector needs one entry per bond");

    AlsReport rep;
    const double bnorm = tt_norm(b);
    if (bnorm == 0.0) {
        rep.ranks = std::vector<std::size_t>(b.order() + 1, 1);
        rep.history = {0.0};
        if (report) *report = rep;
        return TTVector::zeros(b.shape());
    }

    TTVector start = x0 ? *x0 : b;
    auto t = target_ranks(b, start, cfg);
    const auto rs = start.ranks();
    for (std::size_t mu = 1; mu < b.order(); ++mu)
        if (rs[mu] > t[mu]) {
            start = tt_round(start, 0.0, *std::min_element(t.begin() + 1, t.end() - 1));
            t = target_ranks(b, start, cfg);
            break;
        }
    const std::size_t d = b.order();
    TTVector x = pad(start, t, cfg.seed);
    double res = std::numeric_limits<double>::infinity();
    for (;;) {
        AlsState st(M, b, std::move(x));
        res = st.solve(0, rep.regularized) / bnorm;
        rep.history.push_back(res);
        double sweep_start = res;
        for (std::size_t sweep = 0; sweep < cfg.max_sweeps && d > 1; ++sweep) {
            for (std::size_t mu = 0; mu + 1 < d; ++mu) {
                st.move_right(mu);
                res = st.solve(mu + 1, rep.regularized) / bnorm;
            }
            rep.history.push_back(res);
            for (std::size_t mu = d - 1; mu >= 1; --mu) {
                st.move_left(mu);
                res = st.solve(mu - 1, rep.regularized) / bnorm;
            }
            rep.history.push_back(res);
            ++rep.sweeps;
            if (res <= cfg.tol || res > (1.0 - cfg.stagnation) * sweep_start) break;
            sweep_start = res;
        }
        x = st.x();
        if (res <= cfg.tol || !cfg.adaptive_ranks || !cfg.ranks.empty() || d < 2) break;
        auto grown = t;
        for (std::size_t mu = 1; mu < d; ++mu) {
            grown[mu] = t[mu] + std::max<std::size_t>({cfg.rank_padding, t[mu] / 2, 1});
            if (cfg.rank_cap) grown[mu] = std::min(grown[mu], *cfg.rank_cap);
        }
        for (std::size_t mu = 1; mu < d; ++mu) grown[mu] = std::min(grown[mu], sat_mul(grown[mu - 1], b.shape()[mu - 1]));
        for (std::size_t mu = d; mu-- > 1;) grown[mu] = std::min(grown[mu], sat_mul(grown[mu + 1], b.shape()[mu]));
        if (grown == t) break;
        t = grown;
        ++rep.rank_increases;
        x = pad(x, t, cfg.seed + rep.rank_increases);
    }
    rep.ranks = x.ranks();
    rep.residual = res;
    if (report) *report = rep;
    if (!(res <= cfg.fail_residual))
        throw SolverError("ALS did not converge: relative residual " + std::to_string(res), res);
    return x;
}

}  // namespace xfer
