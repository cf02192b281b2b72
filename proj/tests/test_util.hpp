#pragma once

#include <random>

#include "xfer/formats/cp.hpp"
#include "xfer/formats/tt.hpp"

namespace xfer::testutil {

inline FullTensor random_full(const ModeShape& s, std::mt19937_64& g) {
    std::normal_distribution<double> n;
    FullTensor t(s);
    for (auto& x : t.data()) x = n(g);
    return t;
}

inline Eigen::VectorXd random_vec(std::size_t k, std::mt19937_64& g) {
    std::normal_distribution<double> n;
    Eigen::VectorXd v(k);
    for (auto& x : v) x = n(g);
    return v;
}

inline Eigen::MatrixXd random_mat(std::size_t r, std::size_t c, std::mt19937_64& g) {
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = n(g);
    return m;
}

inline CPTensor random_cp(const ModeShape& s, std::size_t r, std::mt19937_64& g) {
    CPTensor v(s);
    for (std::size_t l = 0; l < r; ++l) {
        std::vector<Eigen::VectorXd> f;
        for (std::size_t mu = 0; mu < s.order(); ++mu) f.push_back(random_vec(s[mu], g));
        v.add_term(std::move(f));
    }
    return v;
}

inline CPOperator random_cp_op(const ModeShape& s, std::size_t r, std::mt19937_64& g) {
    CPOperator A(s, s);
    for (std::size_t l = 0; l < r; ++l) {
        std::vector<Eigen::MatrixXd> f;
        for (std::size_t mu = 0; mu < s.order(); ++mu) f.push_back(random_mat(s[mu], s[mu], g));
        A.add_term(std::move(f));
    }
    return A;
}

/// Random TT with the given interior ranks; core entries scaled by `decay`^b along the right rank index so that
/// truncation actually has something to discard.
inline TTVector random_tt(const ModeShape& s, const std::vector<std::size_t>& interior, std::mt19937_64& g,
                          double decay = 1.0) {
    const std::size_t d = s.order();
    std::normal_distribution<double> n;
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < d; ++mu) {
        const std::size_t r0 = mu == 0 ? 1 : interior[mu - 1];
        const std::size_t r1 = mu + 1 == d ? 1 : interior[mu];
        TTCore c(r0, s[mu], r1);
        for (std::size_t b = 0; b < r1; ++b)
            for (std::size_t i = 0; i < s[mu]; ++i)
                for (std::size_t a = 0; a < r0; ++a) c(a, i, b) = n(g) * std::pow(decay, double(b));
        cores.push_back(std::move(c));
    }
    return TTVector(s, std::move(cores));
}

inline TTOperator random_tt_op(const ModeShape& s, std::size_t rank, std::mt19937_64& g) {
    std::vector<std::size_t> comb;
    for (auto k : s.sizes()) comb.push_back(k * k);
    std::vector<std::size_t> interior(s.order() > 1 ? s.order() - 1 : 0, rank);
    return TTOperator::from_vector(s, s, random_tt(ModeShape(comb), interior, g));
}

inline double rel_diff(const FullTensor& a, const FullTensor& b) {
    return (a.vec() - b.vec()).norm() / std::max(1e-300, b.vec().norm());
}

inline double rel_diff(const FullOperator& a, const FullOperator& b) {
    return (a.matrix() - b.matrix()).norm() / std::max(1e-300, b.matrix().norm());
}

}  // namespace xfer::testutil
