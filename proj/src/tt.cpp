#include "xfer/formats/tt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "xfer/error.hpp"

namespace xfer {

Eigen::MatrixXd TTCore::slice(std::size_t i) const {
    Eigen::MatrixXd s(r0, r1);
    for (std::size_t b = 0; b < r1; ++b)
        for (std::size_t a = 0; a < r0; ++a) s(a, b) = (*this)(a, i, b);
    return s;
}

// ---------------------------------------------------------------------------------------------------------------
// TTVector

TTVector::TTVector(ModeShape shape, std::vector<TTCore> cores) : shape_(std::move(shape)), cores_(std::move(cores)) {
    validate();
}

void TTVector::validate() const {
    const std::size_t d = shape_.order();
    if (cores_.size() != d) throw DimensionError("TT vector needs one core per mode");
    for (std::size_t mu = 0; mu < d; ++mu) {
        const TTCore& c = cores_[mu];
        if (c.k != shape_[mu]) throw DimensionError("TT core " + std::to_string(mu + 1) + " has wrong mode size");
        if (c.data.size() != c.r0 * c.k * c.r1) throw DimensionError("TT core storage size mismatch");
        if (mu > 0 && cores_[mu - 1].r1 != c.r0)
            throw DimensionError("TT ranks do not chain between cores " + std::to_string(mu) + " and " +
                                 std::to_string(mu + 1));
    }
    if (cores_.front().r0 != 1 || cores_.back().r1 != 1) throw DimensionError("TT boundary ranks must be 1");
}

TTVector TTVector::zeros(const ModeShape& shape) {
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < shape.order(); ++mu) cores.emplace_back(1, shape[mu], 1);
    return TTVector(shape, std::move(cores));
}

TTVector TTVector::unit(const ModeShape& shape, const MultiIndex& i) {
    multiindex_to_linear(i, shape);
    TTVector v = zeros(shape);
    for (std::size_t mu = 0; mu < shape.order(); ++mu) v.core(mu).data[i[mu] - 1] = 1.0;
    return v;
}

TTVector TTVector::ones(const ModeShape& shape) {
    TTVector v = zeros(shape);
    for (auto& c : v.cores()) std::fill(c.data.begin(), c.data.end(), 1.0);
    return v;
}

TTVector TTVector::rank1(const ModeShape& shape, const std::vector<Eigen::VectorXd>& factors) {
    if (factors.size() != shape.order()) throw DimensionError("rank-1 TT needs one factor per mode");
    TTVector v = zeros(shape);
    for (std::size_t mu = 0; mu < shape.order(); ++mu) {
        if (static_cast<std::size_t>(factors[mu].size()) != shape[mu])
            throw DimensionError("rank-1 TT factor has wrong length");
        std::copy(factors[mu].data(), factors[mu].data() + shape[mu], v.core(mu).data.begin());
    }
    return v;
}

std::vector<std::size_t> TTVector::ranks() const {
    std::vector<std::size_t> r{1};
    for (const auto& c : cores_) r.push_back(c.r1);
    return r;
}

std::size_t TTVector::max_rank() const {
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
}

std::size_t TTVector::storage() const {
    std::size_t n = 0;
    for (const auto& c : cores_) n += c.data.size();
    return n;
}

// ---------------------------------------------------------------------------------------------------------------
// TTOperator

TTOperator::TTOperator(ModeShape rows, ModeShape cols, std::vector<TTCore> cores)
    : rows_(std::move(rows)), cols_(std::move(cols)), cores_(std::move(cores)) {
    if (rows_.order() != cols_.order()) throw DimensionError("TT operator row/column orders differ");
    std::vector<std::size_t> comb(rows_.order());
    for (std::size_t mu = 0; mu < comb.size(); ++mu) comb[mu] = rows_[mu] * cols_[mu];
    TTVector(ModeShape(comb), cores_);  // validates the chain
}

TTOperator TTOperator::identity(const ModeShape& shape) {
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < shape.order(); ++mu) {
        const std::size_t k = shape[mu];
        TTCore c(1, k * k, 1);
        for (std::size_t i = 0; i < k; ++i) c.data[i + k * i] = 1.0;
        cores.push_back(std::move(c));
    }
    return TTOperator(shape, shape, std::move(cores));
}

TTOperator TTOperator::from_vector(const ModeShape& rows, const ModeShape& cols, TTVector v) {
    return TTOperator(rows, cols, std::move(v.cores()));
}

std::vector<std::size_t> TTOperator::ranks() const {
    std::vector<std::size_t> r{1};
    for (const auto& c : cores_) r.push_back(c.r1);
    return r;
}

std::size_t TTOperator::max_rank() const {
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
}

TTVector TTOperator::as_vector() const {
    std::vector<std::size_t> comb(rows_.order());
    for (std::size_t mu = 0; mu < comb.size(); ++mu) comb[mu] = rows_[mu] * cols_[mu];
    return TTVector(ModeShape(comb), cores_);
}

// ---------------------------------------------------------------------------------------------------------------
// Conversions

namespace {

// Block-diagonal embedding of r rank-one terms whose mode-mu factor is given by fill(l, mu, core_slice_setter).
template <class Factor>
std::vector<TTCore> embed_terms(const std::vector<std::size_t>& modes, std::size_t r, Factor&& factor) {
    const std::size_t d = modes.size();
    std::vector<TTCore> cores;
    if (r == 0) {
        for (std::size_t mu = 0; mu < d; ++mu) cores.emplace_back(1, modes[mu], 1);
        return cores;
    }
    if (d == 1) {
        TTCore c(1, modes[0], 1);
        for (std::size_t l = 0; l < r; ++l)
            for (std::size_t i = 0; i < modes[0]; ++i) c.data[i] += factor(l, 0, i);
        cores.push_back(std::move(c));
        return cores;
    }
    for (std::size_t mu = 0; mu < d; ++mu) {
        const std::size_t r0 = mu == 0 ? 1 : r;
        const std::size_t r1 = mu + 1 == d ? 1 : r;
        TTCore c(r0, modes[mu], r1);
        for (std::size_t l = 0; l < r; ++l) {
            const std::size_t a = mu == 0 ? 0 : l;
            const std::size_t b = mu + 1 == d ? 0 : l;
            for (std::size_t i = 0; i < modes[mu]; ++i) c(a, i, b) = factor(l, mu, i);
        }
        cores.push_back(std::move(c));
    }
    return cores;
}

}  // namespace

TTVector cp_to_tt(const CPTensor& v) {
    auto cores = embed_terms(v.shape.sizes(), v.rank(),
                             [&](std::size_t l, std::size_t mu, std::size_t i) { return v.terms[l][mu][i]; });
    return TTVector(v.shape, std::move(cores));
}

TTOperator cp_to_tt(const CPOperator& A) {
    std::vector<std::size_t> comb(A.rows.order());
    for (std::size_t mu = 0; mu < comb.size(); ++mu) comb[mu] = A.rows[mu] * A.cols[mu];
    auto cores = embed_terms(comb, A.rank(), [&](std::size_t l, std::size_t mu, std::size_t c) {
        const std::size_t n = A.rows[mu];
        return A.terms[l][mu](c % n, c / n);
    });
    return TTOperator(A.rows, A.cols, std::move(cores));
}

// ---------------------------------------------------------------------------------------------------------------
// Arithmetic

namespace {

std::vector<TTCore> add_cores(const std::vector<TTCore>& v, const std::vector<TTCore>& w) {
    const std::size_t d = v.size();
    std::vector<TTCore> out;
    if (d == 1) {
        TTCore c = v[0];
        for (std::size_t k = 0; k < c.data.size(); ++k) c.data[k] += w[0].data[k];
        out.push_back(std::move(c));
        return out;
    }
    for (std::size_t mu = 0; mu < d; ++mu) {
        const TTCore& a = v[mu];
        const TTCore& b = w[mu];
        const bool first = mu == 0, last = mu + 1 == d;
        const std::size_t r0 = first ? 1 : a.r0 + b.r0;
        const std::size_t r1 = last ? 1 : a.r1 + b.r1;
        TTCore c(r0, a.k, r1);
        const std::size_t oa0 = 0, ob0 = first ? 0 : a.r0;
        const std::size_t oa1 = 0, ob1 = last ? 0 : a.r1;
        for (std::size_t y = 0; y < a.r1; ++y)
            for (std::size_t i = 0; i < a.k; ++i)
                for (std::size_t x = 0; x < a.r0; ++x) c(oa0 + x, i, oa1 + y) = a(x, i, y);
        for (std::size_t y = 0; y < b.r1; ++y)
            for (std::size_t i = 0; i < b.k; ++i)
                for (std::size_t x = 0; x < b.r0; ++x) c(ob0 + x, i, ob1 + y) = b(x, i, y);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

TTVector tt_add(const TTVector& v, const TTVector& w) {
    if (v.shape() != w.shape()) throw DimensionError("tt_add: shape mismatch " + v.shape().to_string() + " vs " +
                                                     w.shape().to_string());
    return TTVector(v.shape(), add_cores(v.cores(), w.cores()));
}

TTOperator tt_add(const TTOperator& A, const TTOperator& B) {
    if (A.row_shape() != B.row_shape() || A.col_shape() != B.col_shape())
        throw DimensionError("tt_add: operator shape mismatch");
    return TTOperator(A.row_shape(), A.col_shape(), add_cores(A.cores(), B.cores()));
}

TTVector tt_scale(double alpha, const TTVector& v) {
    TTVector out(v);
    for (auto& x : out.core(0).data) x *= alpha;
    return out;
}

TTOperator tt_scale(double alpha, const TTOperator& A) {
    TTOperator out(A);
    for (auto& x : out.core(0).data) x *= alpha;
    return out;
}

double tt_inner(const TTVector& v, const TTVector& w) {
    if (v.shape() != w.shape()) throw DimensionError("tt_inner: shape mismatch");
    Eigen::MatrixXd L = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t mu = 0; mu < v.order(); ++mu) {
        const TTCore& a = v.core(mu);
        const TTCore& b = w.core(mu);
        // T = L * right(b), viewed as (a.r0 * k) x b.r1.
        Eigen::MatrixXd T = L * b.right();
        Eigen::Map<const Eigen::MatrixXd> Tl(T.data(), Eigen::Index(a.r0 * a.k), Eigen::Index(b.r1));
        L = a.left().transpose() * Tl;
    }
    return L(0, 0);
}

double tt_sum(const TTVector& v) { return tt_inner(v, TTVector::ones(v.shape())); }

double tt_norm(const TTVector& v) {
    TTVector w(v);
    right_orthogonalize(w);
    return Eigen::Map<const Eigen::VectorXd>(w.core(0).data.data(), Eigen::Index(w.core(0).data.size())).norm();
}

TTVector tt_apply(const TTOperator& A, const TTVector& v) {
    if (A.col_shape() != v.shape())
        throw DimensionError("tt_apply: operator columns " + A.col_shape().to_string() + " vs vector " +
                             v.shape().to_string());
    const std::size_t d = v.order();
    std::vector<TTCore> out;
    for (std::size_t mu = 0; mu < d; ++mu) {
        const TTCore& ac = A.core(mu);
        const TTCore& vc = v.core(mu);
        const std::size_t n = A.row_shape()[mu], m = A.col_shape()[mu];
        const std::size_t R0 = ac.r0, R1 = ac.r1, q0 = vc.r0, q1 = vc.r1;
        Eigen::MatrixXd Am(R0 * n * R1, m);
        for (std::size_t b = 0; b < R1; ++b)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t a = 0; a < R0; ++a)
                        Am(a + R0 * (i + n * b), j) = ac.data[a + R0 * (i + n * (j + m * b))];
        Eigen::MatrixXd Vm(m, q0 * q1);
        for (std::size_t beta = 0; beta < q1; ++beta)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t alpha = 0; alpha < q0; ++alpha) Vm(j, alpha + q0 * beta) = vc(alpha, j, beta);
        const Eigen::MatrixXd P = Am * Vm;
        TTCore w(R0 * q0, n, R1 * q1);
        for (std::size_t beta = 0; beta < q1; ++beta)
            for (std::size_t b = 0; b < R1; ++b)
                for (std::size_t alpha = 0; alpha < q0; ++alpha)
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t a = 0; a < R0; ++a)
                            w(a + R0 * alpha, i, b + R1 * beta) = P(a + R0 * (i + n * b), alpha + q0 * beta);
        out.push_back(std::move(w));
    }
    return TTVector(A.row_shape(), std::move(out));
}

TTOperator tt_transpose(const TTOperator& A) {
    std::vector<TTCore> out;
    for (std::size_t mu = 0; mu < A.order(); ++mu) {
        const TTCore& c = A.core(mu);
        const std::size_t n = A.row_shape()[mu], m = A.col_shape()[mu];
        TTCore t(c.r0, c.k, c.r1);
        for (std::size_t b = 0; b < c.r1; ++b)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t a = 0; a < c.r0; ++a)
                        t.data[a + c.r0 * (j + m * (i + n * b))] = c.data[a + c.r0 * (i + n * (j + m * b))];
        out.push_back(std::move(t));
    }
    return TTOperator(A.col_shape(), A.row_shape(), std::move(out));
}

double tt_entry(const TTVector& v, const MultiIndex& i) {
    multiindex_to_linear(i, v.shape());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Ones(1);
    for (std::size_t mu = 0; mu < v.order(); ++mu) acc = acc * v.core(mu).slice(i[mu] - 1);
    return acc(0);
}

double tt_entry(const TTOperator& A, const MultiIndex& i, const MultiIndex& j) {
    multiindex_to_linear(i, A.row_shape());
    multiindex_to_linear(j, A.col_shape());
    MultiIndex c(i.size());
    for (std::size_t mu = 0; mu < i.size(); ++mu) c[mu] = (i[mu] - 1) + A.row_shape()[mu] * (j[mu] - 1) + 1;
    return tt_entry(A.as_vector(), c);
}

FullTensor densify(const TTVector& v, std::size_t guard) {
    check_guard(v.shape().total(), guard, "densify(TTVector)");
    Eigen::MatrixXd T = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t mu = 0; mu < v.order(); ++mu) {
        const TTCore& c = v.core(mu);
        Eigen::MatrixXd P = T * c.right();
        T = Eigen::Map<Eigen::MatrixXd>(P.data(), T.rows() * Eigen::Index(c.k), Eigen::Index(c.r1));
    }
    return FullTensor(v.shape(), std::vector<double>(T.data(), T.data() + T.size()));
}

FullOperator densify(const TTOperator& A, std::size_t guard) {
    check_guard(A.row_shape().total() * A.col_shape().total(), guard, "densify(TTOperator)");
    const FullTensor flat = densify(A.as_vector(), guard);
    const std::size_t d = A.order();
    FullOperator out(A.row_shape(), A.col_shape());
    std::vector<std::size_t> c(d), ri(d), ci(d);
    for (std::size_t k = 0; k < flat.size(); ++k) {
        unravel0(k, flat.shape(), c.data());
        for (std::size_t mu = 0; mu < d; ++mu) {
            ri[mu] = c[mu] % A.row_shape()[mu];
            ci[mu] = c[mu] / A.row_shape()[mu];
        }
        out.at0(linear0(ri.data(), A.row_shape()), linear0(ci.data(), A.col_shape())) = flat[k];
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------------------
// Orthogonalization and rounding

void right_orthogonalize(TTVector& v) {
    for (std::size_t mu = v.order(); mu-- > 1;) {
        TTCore& c = v.core(mu);
        TTCore& p = v.core(mu - 1);
        const Eigen::MatrixXd Mt = c.right().transpose();  // (k r1) x r0
        const Eigen::Index rnew = std::min(Mt.rows(), Mt.cols());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Mt);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(Mt.rows(), rnew);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(rnew).triangularView<Eigen::Upper>();
        TTCore nc(rnew, c.k, c.r1);
        nc.right() = Q.transpose();
        TTCore np(p.r0, p.k, rnew);
        np.left() = p.left() * R.transpose();
        c = std::move(nc);
        p = std::move(np);
    }
}

void left_orthogonalize(TTVector& v) {
    for (std::size_t mu = 0; mu + 1 < v.order(); ++mu) {
        TTCore& c = v.core(mu);
        TTCore& nx = v.core(mu + 1);
        const auto L = c.left();
        const Eigen::Index rnew = std::min(L.rows(), L.cols());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(L);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(L.rows(), rnew);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(rnew).triangularView<Eigen::Upper>();
        TTCore nc(c.r0, c.k, rnew);
        nc.left() = Q;
        TTCore nn(rnew, nx.k, nx.r1);
        nn.right() = R * nx.right();
        c = std::move(nc);
        nx = std::move(nn);
    }
}

namespace {

// Smallest rank whose discarded tail has squared norm <= delta2, capped. Returns the rank and the discarded tail.
std::pair<Eigen::Index, double> choose_rank(const Eigen::VectorXd& s, double delta2, std::optional<std::size_t> r_max) {
    const Eigen::Index n = s.size();
    Eigen::Index r = n;
    double tail = 0.0;
    while (r > 1) {
        const double next = tail + s(r - 1) * s(r - 1);
        if (next > delta2) break;
        tail = next;
        --r;
    }
    if (r_max && r > static_cast<Eigen::Index>(*r_max)) {
        const Eigen::Index cap = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(*r_max));
        for (Eigen::Index j = r - 1; j >= cap; --j) tail += s(j) * s(j);
        r = cap;
    }
    return {r, tail};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double bond_delta2(double eps, double nrm, std::size_t d) {
    const double e = std::max(eps, kRoundoffFloor);
    return d > 1 ? e * e * nrm * nrm / static_cast<double>(d - 1) : 0.0;
}

void update_margin(double& margin, const Eigen::VectorXd& s, Eigen::Index r, double delta2) {
    if (r > 1 && delta2 > 0.0) margin = std::min(margin, s(r - 1) / std::sqrt(delta2));
}

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& M) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

void fill_report(RoundReport* report, const TTVector& out, double discarded2, double nrm, double margin) {
    if (!report) return;
    report->kept_margin = margin;
    report->ranks = out.ranks();
    report->abs_error = std::sqrt(discarded2);
    report->input_norm = nrm;
    report->rel_error = nrm > 0.0 ? report->abs_error / nrm : 0.0;
}

}  // namespace

TTVector tt_round(const TTVector& v, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    if (eps < 0.0) throw RangeError("tt_round: negative tolerance");
    const std::size_t d = v.order();
    TTVector w(v);
    right_orthogonalize(w);
    const double nrm =
        Eigen::Map<const Eigen::VectorXd>(w.core(0).data.data(), Eigen::Index(w.core(0).data.size())).norm();
    if (nrm == 0.0) {
        TTVector z = TTVector::zeros(v.shape());
        fill_report(report, z, 0.0, 0.0, kInf);
        return z;
    }
    if (d == 1) {
        fill_report(report, w, 0.0, nrm, kInf);
        return w;
    }
    const double delta2 = bond_delta2(eps, nrm, d);
    double discarded2 = 0.0;
    double margin = kInf;
    for (std::size_t mu = 0; mu + 1 < d; ++mu) {
        TTCore& c = w.core(mu);
        TTCore& nx = w.core(mu + 1);
        const auto svd = thin_svd(c.left());
        const Eigen::VectorXd& s = svd.singularValues();
        const auto [r, tail] = choose_rank(s, delta2, r_max);
        discarded2 += tail;
        update_margin(margin, s, r, delta2);
        TTCore nc(c.r0, c.k, r);
        nc.left() = svd.matrixU().leftCols(r);
        TTCore nn(r, nx.k, nx.r1);
        nn.right() = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose() * nx.right();
        c = std::move(nc);
        nx = std::move(nn);
    }
    fill_report(report, w, discarded2, nrm, margin);
    return w;
}

TTOperator tt_round(const TTOperator& A, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    return TTOperator::from_vector(A.row_shape(), A.col_shape(), tt_round(A.as_vector(), eps, r_max, report));
}

TTVector full_to_tt(const FullTensor& v, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    if (eps < 0.0) throw RangeError("full_to_tt: negative tolerance");
    const ModeShape& shape = v.shape();
    const std::size_t d = shape.order();
    const double nrm = norm(v);
    if (nrm == 0.0) {
        TTVector z = TTVector::zeros(shape);
        fill_report(report, z, 0.0, 0.0, kInf);
        return z;
    }
    std::vector<TTCore> cores;
    const double delta2 = bond_delta2(eps, nrm, d);
    double discarded2 = 0.0;
    double margin = kInf;
    Eigen::MatrixXd C = Eigen::Map<const Eigen::MatrixXd>(v.data().data(), 1, Eigen::Index(v.size()));
    std::size_t r = 1;
    for (std::size_t mu = 0; mu + 1 < d; ++mu) {
        const Eigen::Index rows = Eigen::Index(r * shape[mu]);
        const Eigen::Index cols = C.size() / rows;
        const Eigen::Map<const Eigen::MatrixXd> M(C.data(), rows, cols);
        const auto svd = thin_svd(M);
        const Eigen::VectorXd& s = svd.singularValues();
        const auto [rk, tail] = choose_rank(s, delta2, r_max);
        discarded2 += tail;
        update_margin(margin, s, rk, delta2);
        TTCore c(r, shape[mu], rk);
        c.left() = svd.matrixU().leftCols(rk);
        cores.push_back(std::move(c));
        C = s.head(rk).asDiagonal() * svd.matrixV().leftCols(rk).transpose();
        r = rk;
    }
    TTCore last(r, shape[d - 1], 1);
    std::copy(C.data(), C.data() + C.size(), last.data.begin());
    cores.push_back(std::move(last));
    TTVector out(shape, std::move(cores));
    fill_report(report, out, discarded2, nrm, margin);
    return out;
}

TTOperator full_to_tt(const FullOperator& A, double eps, std::optional<std::size_t> r_max, RoundReport* report) {
    const std::size_t d = A.row_shape().order();
    std::vector<std::size_t> comb(d);
    for (std::size_t mu = 0; mu < d; ++mu) comb[mu] = A.row_shape()[mu] * A.col_shape()[mu];
    const ModeShape cshape(comb);
    FullTensor flat(cshape);
    std::vector<std::size_t> ri(d), ci(d), c(d);
    const std::size_t R = A.row_shape().total();
    for (std::size_t j = 0; j < A.col_shape().total(); ++j) {
        unravel0(j, A.col_shape(), ci.data());
        for (std::size_t i = 0; i < R; ++i) {
            unravel0(i, A.row_shape(), ri.data());
            for (std::size_t mu = 0; mu < d; ++mu) c[mu] = ri[mu] + A.row_shape()[mu] * ci[mu];
            flat[linear0(c.data(), cshape)] = A.at0(i, j);
        }
    }
    return TTOperator::from_vector(A.row_shape(), A.col_shape(), full_to_tt(flat, eps, r_max, report));
}

}  // namespace xfer
