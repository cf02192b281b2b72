#include "xfer/eigsolve/eigsolve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <functional>
#include <limits>

#include <spdlog/spdlog.h>

#include "xfer/dynamics/rng.hpp"
#include "xfer/error.hpp"

namespace xfer {

namespace {

std::vector<Eigen::VectorXd> guess_factors(const ModeShape& s, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> f;
    for (std::size_t mu = 0; mu < s.order(); ++mu) {
        RandomStream rng(seed, StreamPurpose::InitialGuess, static_cast<std::uint32_t>(mu));
        Eigen::VectorXd v(static_cast<Eigen::Index>(s[mu]));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
        f.push_back(v / v.norm());
    }
    return f;
}

struct TTOps {
    using Vec = TTVector;
    const TTOperator& A;
    const TTOperator* B;
    const EigConfig& cfg;
    std::optional<TTOperator> shifted;

    Vec initial() const { return TTVector::rank1(A.col_shape(), guess_factors(A.col_shape(), cfg.seed)); }
    Vec apply_A(const Vec& v) const { return tt_apply(A, v); }
    Vec apply_B(const Vec& v) const { return B ? tt_apply(*B, v) : v; }
    Vec truncate(const Vec& v) const { return tt_round(v, cfg.eps, cfg.rank_cap); }
    double set_shift(double theta) {
        const TTOperator I = B ? *B : TTOperator::identity(A.col_shape());
        shifted = tt_round(tt_add(A, tt_scale(-theta, I)), 1e-14);
        return theta;
    }
    Vec solve(const Vec& rhs, const Vec& guess) const { return als_linear_solve(*shifted, rhs, cfg.als, nullptr, &guess); }
    static double dot(const Vec& a, const Vec& b) { return tt_inner(a, b); }
    static double norm(const Vec& a) { return tt_norm(a); }
    static Vec comb(double a, const Vec& x, double b, const Vec& y) { return tt_add(tt_scale(a, x), tt_scale(b, y)); }
    static Vec scale(double a, const Vec& x) { return tt_scale(a, x); }
    void finish(Vec& v) const { normalize_eigenvector(v, cfg.densify_guard); }
    double residual(double lambda, const Vec& v) const { return eig_residual(A, B, lambda, v); }
};

struct DenseOps {
    using Vec = FullTensor;
    const FullOperator& A;
    const FullOperator* B;
    const EigConfig& cfg;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    Vec initial() const { return densify_rank1(A.col_shape(), guess_factors(A.col_shape(), cfg.seed)); }
    Vec apply_A(const Vec& v) const { return apply(A, v); }
    Vec apply_B(const Vec& v) const { return B ? apply(*B, v) : v; }
    Vec truncate(const Vec& v) const { return v; }
    bool factor(double theta) {
        Eigen::MatrixXd M = A.matrix();
        if (B)
            M -= theta * B->matrix();
        else
            M.diagonal().array() -= theta;
        lu.compute(M);
        const double rc = lu.rcond();
        return rc > 1e-15 && std::isfinite(rc);
    }
    double set_shift(double theta) {
        if (factor(theta)) return theta;
        const double retry = theta + 1e-8;
        spdlog::warn("shifted system singular at theta={}; retrying at {}", theta, retry);
        if (factor(retry)) return retry;
        throw SolverError("shifted system A - theta B is singular at theta=" + std::to_string(theta));
    }
    Vec solve(const Vec& rhs, const Vec&) const { return from(lu.solve(rhs.vec()), rhs.shape()); }
    static Vec from(const Eigen::VectorXd& x, const ModeShape& s) { return FullTensor(s, std::vector<double>(x.data(), x.data() + x.size())); }
    static double dot(const Vec& a, const Vec& b) { return inner(a, b); }
    static double norm(const Vec& a) { return xfer::norm(a); }
    static Vec comb(double a, const Vec& x, double b, const Vec& y) { return axpy(a, x, scale(b, y)); }
    static Vec scale(double a, const Vec& x) { return xfer::scale(a, x); }
    void finish(Vec& v) const { normalize_eigenvector(v); }
    double residual(double lambda, const Vec& v) const { return eig_residual(A, B, lambda, v); }
};

template <class Vec>
struct Deflation {
    // v <- v - sum u_j <z_j, v>
    std::vector<Vec> u, z;
};

template <class Ops>
typename Ops::Vec project(const Ops& ops, typename Ops::Vec v, const Deflation<typename Ops::Vec>& D) {
    if (D.u.empty()) return v;
    for (std::size_t j = 0; j < D.u.size(); ++j) v = Ops::comb(1.0, v, -Ops::dot(D.z[j], v), D.u[j]);
    return ops.truncate(v);
}

template <class Ops>
EigResult<typename Ops::Vec> iterate(Ops& ops, bool power, double theta, const Deflation<typename Ops::Vec>& D,
                                     const EigConfig& cfg) {
    using Vec = typename Ops::Vec;
    if (!(cfg.tol > 0.0) || cfg.max_iters == 0) throw RangeError("eigensolver needs tol > 0 and max_iters >= 1");
    EigResult<Vec> out;
    out.theta = theta;

    auto unit = [&](const Vec& w) {
        const double nw = Ops::norm(w);
        if (!(nw > 0.0) || !std::isfinite(nw))
            throw BreakdownError("iterate vanished after truncation; increase the rank cap");
        return Ops::scale(1.0 / nw, w);
    };

    Vec v = unit(project(ops, ops.truncate(ops.initial()), D));
    Vec tav = power ? ops.truncate(ops.apply_A(v)) : v;
    Vec prev = v;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> steps;
    std::size_t last_rr = 0;
    bool moved = false;
    bool nudged = false;

    for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
        Vec w = power ? tav : ops.truncate(ops.solve(ops.truncate(ops.apply_B(v)), v));
        prev = v;
        v = unit(project(ops, std::move(w), D));

        moved = false;
        const Vec Av = ops.apply_A(v);
        const Vec Bv = ops.apply_B(v);
        double lam;
        if (power) {
            tav = ops.truncate(Av);
            lam = Ops::dot(v, tav);
        } else {
            const double vbv = Ops::dot(v, Bv);
            if (!(std::abs(vbv) > 1e-14 * Ops::norm(Bv)))
                throw SolverError("indefinite pairing: <v, Bv> vanishes for the current iterate");
            lam = Ops::dot(v, Av) / vbv;
        }
        const double res = Ops::norm(Ops::comb(1.0, Av, -lam, Bv));
        const double step = std::abs(lam - lambda);
        out.history.push_back(lam);
        out.iterations = it;
        steps.push_back(std::isnan(step) ? std::numeric_limits<double>::infinity() : step);
        lambda = lam;
        if (step <= cfg.tol * std::max(1.0, std::abs(lam)) && res <= 10.0 * cfg.tol) {
            out.converged = true;
            break;
        }

        // Stagnating iterates (e.g. two eigenvalues equally close to the shift): Rayleigh-Ritz on the last two,
        // then move the working shift halfway toward the selected Ritz value.
        if (!power && it >= 6 && it - last_rr >= 5 && steps.back() > 0.5 * steps[steps.size() - 4]) {
            last_rr = it;
            Vec q = Ops::comb(1.0, prev, -Ops::dot(prev, v), v);
            const double nq = Ops::norm(q);
            if (nq > 1e-13) {
                q = Ops::scale(1.0 / nq, q);
                const Vec Aq = ops.apply_A(q), Bq = ops.apply_B(q);
                Eigen::MatrixXd a(2, 2), b(2, 2);
                a << Ops::dot(v, Av), Ops::dot(v, Aq), Ops::dot(q, Av), Ops::dot(q, Aq);
                b << Ops::dot(v, Bv), Ops::dot(v, Bq), Ops::dot(q, Bv), Ops::dot(q, Bq);
                Eigen::EigenSolver<Eigen::MatrixXd> es(b.partialPivLu().solve(a), false);
                int pick = -1;
                double best = std::numeric_limits<double>::infinity();
                for (int k = 0; k < 2; ++k) {
                    const auto mu = es.eigenvalues()[k];
                    if (!std::isfinite(mu.real()) || std::abs(mu.imag()) > 1e-12 * std::max(1.0, std::abs(mu))) continue;
                    const double score = std::abs(mu.real() - theta);
                    if (score < best) {
                        best = score;
                        pick = k;
                    }
                }
                if (pick >= 0) {
                    const Eigen::MatrixXd M = a - es.eigenvalues()[pick].real() * b;
                    const Eigen::Vector2d y = M.row(0).norm() >= M.row(1).norm() ? Eigen::Vector2d(-M(0, 1), M(0, 0))
                                                                                 : Eigen::Vector2d(-M(1, 1), M(1, 0));
                    v = unit(project(ops, ops.truncate(Ops::comb(y[0], v, y[1], q)), D));
                    moved = true;
                    const double mu = es.eigenvalues()[pick].real();
                    if (!nudged && mu != theta) {
                        ops.set_shift(0.5 * (theta + mu));
                        nudged = true;
                    }
                }
            }
        }
    }
    if (moved) lambda = power ? Ops::dot(v, tav) : Ops::dot(v, ops.apply_A(v)) / Ops::dot(v, ops.apply_B(v));
    ops.finish(v);
    out.lambda = lambda;
    out.residual = ops.residual(lambda, v);
    out.vector = std::move(v);
    return out;
}

template <class Ops>
std::vector<EigResult<typename Ops::Vec>> leading(Ops& ops, Ops& opsT, const std::function<typename Ops::Vec(const typename Ops::Vec&)>& applyBT,
                                                  std::size_t count, const EigConfig& cfg) {
    using Vec = typename Ops::Vec;
    std::vector<EigResult<Vec>> out;
    Deflation<Vec> right, left;
    double theta = cfg.theta;
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0) theta = std::min(theta, out.back().lambda - cfg.deflation_offset);
        const double used = ops.set_shift(theta);
        out.push_back(iterate(ops, false, used, right, cfg));
        if (k + 1 == count) break;
        opsT.set_shift(used);
        const auto lres = iterate(opsT, false, used, left, cfg);
        const Vec& u = out.back().vector;
        const Vec& w = lres.vector;
        const Vec Bu = ops.apply_B(u);
        const double denom = Ops::dot(w, Bu);
        if (!(std::abs(denom) > 1e-12))
            throw SolverError("left and right eigenvectors are B-orthogonal; cannot deflate eigenvalue " +
                              std::to_string(out.back().lambda));
        right.u.push_back(u);
        right.z.push_back(Ops::scale(1.0 / denom, applyBT(w)));
        left.u.push_back(w);
        left.z.push_back(Ops::scale(1.0 / denom, Bu));
    }
    return out;
}

// Sums operator chunks with intermediate rounding so that the total discarded norm stays below eps times the
// norm of the result.
TTOperator round_in_chunks(std::size_t chunks, const std::function<TTOperator(std::size_t)>& chunk, double eps,
                           std::optional<std::size_t> r_max, RoundReport* report) {
    const double eps_mid = 0.5 * eps / static_cast<double>(std::max<std::size_t>(chunks, 1));
    std::optional<TTOperator> acc;
    RoundReport rep;
    double abs_err = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        TTOperator t = chunk(c);
        t = acc ? tt_add(*acc, t) : t;
        acc = tt_round(t, eps_mid, std::nullopt, &rep);
        abs_err += rep.abs_error;
    }
    TTOperator out = tt_round(*acc, 0.5 * eps, r_max, &rep);
    if (report) {
        *report = rep;
        report->abs_error = abs_err + rep.abs_error;
        report->input_norm = rep.input_norm;
        report->rel_error = rep.input_norm > 0 ? report->abs_error / rep.input_norm : 0.0;
    }
    return out;
}

}  // namespace

double eig_residual(const TTOperator& A, const TTOperator* B, double lambda, const TTVector& v) {
    const TTVector Bv = B ? tt_apply(*B, v) : v;
    return tt_norm(tt_add(tt_apply(A, v), tt_scale(-lambda, Bv))) / tt_norm(v);
}

double eig_residual(const FullOperator& A, const FullOperator* B, double lambda, const FullTensor& v) {
    const FullTensor Bv = B ? apply(*B, v) : v;
    return norm(axpy(-lambda, Bv, apply(A, v))) / norm(v);
}

void normalize_eigenvector(FullTensor& v) {
    const double n = norm(v);
    if (!(n > 0.0)) throw BreakdownError("cannot normalize a zero eigenvector");
    std::size_t arg = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (std::abs(v[k]) > std::abs(v[arg])) arg = k;
    v = scale((v[arg] < 0 ? -1.0 : 1.0) / n, v);
}

void normalize_eigenvector(TTVector& v, std::size_t guard) {
    const double n = tt_norm(v);
    if (!(n > 0.0)) throw BreakdownError("cannot normalize a zero eigenvector");
    double sign;
    if (v.shape().total() <= guard) {
        const FullTensor f = densify(v, guard);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < f.size(); ++k)
            if (std::abs(f[k]) > std::abs(f[arg])) arg = k;
        sign = f[arg] < 0 ? -1.0 : 1.0;
    } else {
        sign = tt_sum(v) < 0 ? -1.0 : 1.0;
    }
    v = tt_scale(sign / n, v);
}

TTEigResult power_iteration(const TTOperator& A, const EigConfig& cfg) {
    TTOps ops{A, nullptr, cfg, {}};
    return iterate(ops, true, 0.0, {}, cfg);
}

DenseEigResult power_iteration(const FullOperator& A, const EigConfig& cfg) {
    DenseOps ops{A, nullptr, cfg, {}};
    return iterate(ops, true, 0.0, {}, cfg);
}

TTEigResult inverse_power_iteration(const TTOperator& A, const EigConfig& cfg) {
    TTOps ops{A, nullptr, cfg, {}};
    return iterate(ops, false, ops.set_shift(cfg.theta), {}, cfg);
}

DenseEigResult inverse_power_iteration(const FullOperator& A, const EigConfig& cfg) {
    DenseOps ops{A, nullptr, cfg, {}};
    return iterate(ops, false, ops.set_shift(cfg.theta), {}, cfg);
}

TTEigResult generalized_inverse_power_iteration(const TTOperator& A, const TTOperator& B, const EigConfig& cfg) {
    TTOps ops{A, &B, cfg, {}};
    return iterate(ops, false, ops.set_shift(cfg.theta), {}, cfg);
}

DenseEigResult generalized_inverse_power_iteration(const FullOperator& A, const FullOperator& B, const EigConfig& cfg) {
    DenseOps ops{A, &B, cfg, {}};
    return iterate(ops, false, ops.set_shift(cfg.theta), {}, cfg);
}

DenseEigResult dense_generalized_eig(const FullOperator& A, const FullOperator& B, double theta, double tol,
                                     std::uint64_t seed) {
    EigConfig cfg;
    cfg.theta = theta;
    cfg.tol = tol;
    cfg.seed = seed;
    cfg.max_iters = 2000;
    return generalized_inverse_power_iteration(A, B, cfg);
}

std::vector<TTEigResult> leading_eigenpairs(const TTOperator& A, const TTOperator* B, std::size_t count,
                                            const EigConfig& cfg) {
    const TTOperator At = tt_transpose(A);
    const std::optional<TTOperator> Bt = B ? std::optional<TTOperator>(tt_transpose(*B)) : std::nullopt;
    TTOps ops{A, B, cfg, {}};
    TTOps opsT{At, Bt ? &*Bt : nullptr, cfg, {}};
    const auto bt = [&](const TTVector& w) { return Bt ? tt_round(tt_apply(*Bt, w), cfg.eps, cfg.rank_cap) : w; };
    return leading<TTOps>(ops, opsT, bt, count, cfg);
}

std::vector<DenseEigResult> leading_eigenpairs(const FullOperator& A, const FullOperator* B, std::size_t count,
                                               const EigConfig& cfg) {
    const FullOperator At = transpose(A);
    const std::optional<FullOperator> Bt = B ? std::optional<FullOperator>(transpose(*B)) : std::nullopt;
    DenseOps ops{A, B, cfg, {}};
    DenseOps opsT{At, Bt ? &*Bt : nullptr, cfg, {}};
    const auto bt = [&](const FullTensor& w) { return Bt ? apply(*Bt, w) : w; };
    return leading<DenseOps>(ops, opsT, bt, count, cfg);
}

TTOperator truncate_operator(const TTOperator& A, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    return tt_round(A, eps, r_max, report);
}

TTOperator truncate_operator(const CPOperator& A, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    constexpr std::size_t kChunk = 128;
    if (A.rank() <= kChunk) return tt_round(cp_to_tt(A), eps, r_max, report);
    const std::size_t chunks = (A.rank() + kChunk - 1) / kChunk;
    return round_in_chunks(
        chunks,
        [&](std::size_t c) {
            CPOperator part(A.rows, A.cols);
            const auto first = A.terms.begin() + static_cast<std::ptrdiff_t>(c * kChunk);
            part.terms.assign(first, first + static_cast<std::ptrdiff_t>(std::min(kChunk, A.rank() - c * kChunk)));
            return cp_to_tt(part);
        },
        eps, r_max, report);
}

TTOperator truncate_operator(const OuterProductSum& A, double eps, std::optional<std::size_t> r_max,
                             RoundReport* report, std::size_t guard) {
    const std::size_t R = A.rows.total(), C = A.cols.total();
    if (R <= guard / std::max<std::size_t>(C, 1)) return full_to_tt(densify(A, guard), eps, r_max, report);
    constexpr std::size_t kChunk = 128;
    const std::size_t chunks = std::max<std::size_t>(1, (A.rank() + kChunk - 1) / kChunk);
    return round_in_chunks(
        chunks,
        [&](std::size_t c) {
            OuterProductSum part(A.rows, A.cols);
            for (std::size_t l = c * kChunk; l < std::min(A.rank(), (c + 1) * kChunk); ++l)
                part.add_term(A.weights[l], A.left[l], A.right[l]);
            return cp_to_tt(part.to_cp());
        },
        eps, r_max, report);
}

TTOperator truncate_operator(const TransitionCP& P, double eps, std::optional<std::size_t> r_max, RoundReport* report,
                             std::size_t guard) {
    return transition_to_tt(P, eps, r_max, guard, report);
}

}  // namespace xfer
