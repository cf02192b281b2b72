#include "xfer/formats/cp.hpp"

#include "xfer/error.hpp"

namespace xfer {

namespace {

void check_factors(const ModeShape& shape, const std::vector<Eigen::VectorXd>& f) {
    if (f.size() != shape.order()) throw DimensionError("CP term has wrong number of factors");
    for (std::size_t mu = 0; mu < f.size(); ++mu)
        if (static_cast<std::size_t>(f[mu].size()) != shape[mu])
            throw DimensionError("CP factor " + std::to_string(mu + 1) + " has wrong length");
}

}  // namespace

void check_guard(std::size_t entries, std::size_t guard, const char* what) {
    if (entries > guard)
        throw CapacityError(std::string(what) + ": " + std::to_string(entries) + " entries exceed the densify guard of " +
                            std::to_string(guard));
}

void CPTensor::add_term(std::vector<Eigen::VectorXd> factors) {
    check_factors(shape, factors);
    terms.push_back(std::move(factors));
}

void CPOperator::add_term(std::vector<Eigen::MatrixXd> factors) {
    if (factors.size() != rows.order()) throw DimensionError("CP operator term has wrong number of factors");
    for (std::size_t mu = 0; mu < factors.size(); ++mu)
        if (static_cast<std::size_t>(factors[mu].rows()) != rows[mu] ||
            static_cast<std::size_t>(factors[mu].cols()) != cols[mu])
            throw DimensionError("CP operator factor " + std::to_string(mu + 1) + " has wrong size");
    terms.push_back(std::move(factors));
}

CPOperator CPOperator::identity(const ModeShape& shape) {
    CPOperator I(shape, shape);
    std::vector<Eigen::MatrixXd> f;
    for (std::size_t mu = 0; mu < shape.order(); ++mu) f.push_back(Eigen::MatrixXd::Identity(shape[mu], shape[mu]));
    I.add_term(std::move(f));
    return I;
}

void OuterProductSum::add_term(double w, std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b) {
    check_factors(rows, a);
    check_factors(cols, b);
    weights.push_back(w);
    left.push_back(std::move(a));
    right.push_back(std::move(b));
}

CPOperator OuterProductSum::to_cp() const {
    CPOperator out(rows, cols);
    for (std::size_t l = 0; l < rank(); ++l) {
        std::vector<Eigen::MatrixXd> f;
        for (std::size_t mu = 0; mu < rows.order(); ++mu) {
            Eigen::MatrixXd m = left[l][mu] * right[l][mu].transpose();
            if (mu == 0) m *= weights[l];
            f.push_back(std::move(m));
        }
        out.terms.push_back(std::move(f));
    }
    return out;
}

CPTensor cp_add(const CPTensor& v, const CPTensor& w) {
    if (v.shape != w.shape) throw DimensionError("cp_add: shape mismatch");
    CPTensor out(v);
    out.terms.insert(out.terms.end(), w.terms.begin(), w.terms.end());
    return out;
}

CPOperator cp_add(const CPOperator& A, const CPOperator& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw DimensionError("cp_add: operator shape mismatch");
    CPOperator out(A);
    out.terms.insert(out.terms.end(), B.terms.begin(), B.terms.end());
    return out;
}

CPTensor cp_apply(const CPOperator& A, const CPTensor& v) {
    if (A.cols != v.shape) throw DimensionError("cp_apply: operator columns do not match tensor shape");
    CPTensor out(A.rows);
    out.terms.reserve(A.rank() * v.rank());
    for (const auto& a : A.terms)
        for (const auto& t : v.terms) {
            std::vector<Eigen::VectorXd> f(a.size());
            for (std::size_t mu = 0; mu < a.size(); ++mu) f[mu] = a[mu] * t[mu];
            out.terms.push_back(std::move(f));
        }
    return out;
}

FullTensor densify_rank1(const ModeShape& shape, const std::vector<Eigen::VectorXd>& factors) {
    FullTensor out(shape);
    const std::size_t d = shape.order();
    std::vector<std::size_t> idx(d);
    for (std::size_t k = 0; k < out.size(); ++k) {
        unravel0(k, shape, idx.data());
        double p = 1.0;
        for (std::size_t mu = 0; mu < d; ++mu) p *= factors[mu][idx[mu]];
        out[k] = p;
    }
    return out;
}

FullTensor densify(const CPTensor& v, std::size_t guard) {
    check_guard(v.shape.total(), guard, "densify(CPTensor)");
    FullTensor out(v.shape);
    for (const auto& t : v.terms) {
        const FullTensor r1 = densify_rank1(v.shape, t);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += r1[k];
    }
    return out;
}

FullOperator densify(const CPOperator& A, std::size_t guard) {
    check_guard(A.rows.total() * A.cols.total(), guard, "densify(CPOperator)");
    FullOperator out(A.rows, A.cols);
    const std::size_t d = A.rows.order();
    const std::size_t R = A.rows.total(), C = A.cols.total();
    std::vector<std::size_t> ri(d), ci(d);
    for (const auto& t : A.terms) {
        for (std::size_t j = 0; j < C; ++j) {
            unravel0(j, A.cols, ci.data());
            for (std::size_t i = 0; i < R; ++i) {
                unravel0(i, A.rows, ri.data());
                double p = 1.0;
                for (std::size_t mu = 0; mu < d; ++mu) p *= t[mu](ri[mu], ci[mu]);
                out.at0(i, j) += p;
            }
        }
    }
    return out;
}

FullOperator densify(const OuterProductSum& A, std::size_t guard) {
    check_guard(A.rows.total() * A.cols.total(), guard, "densify(OuterProductSum)");
    FullOperator out(A.rows, A.cols);
    const std::size_t R = A.rows.total(), C = A.cols.total();
    for (std::size_t l = 0; l < A.rank(); ++l) {
        const FullTensor a = densify_rank1(A.rows, A.left[l]);
        const FullTensor b = densify_rank1(A.cols, A.right[l]);
        const double w = A.weights[l];
        for (std::size_t j = 0; j < C; ++j)
            for (std::size_t i = 0; i < R; ++i) out.data()[i + R * j] += w * (a[i] * b[j]);
    }
    return out;
}

}  // namespace xfer
