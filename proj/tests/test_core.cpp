#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "example_matrix.hpp"
#include "xfer/core/full_tensor.hpp"
#include "xfer/error.hpp"

using namespace xfer;

namespace {

FullTensor random_tensor(const ModeShape& s, std::mt19937_64& g) {
    std::normal_distribution<double> n;
    FullTensor t(s);
    for (auto& x : t.data()) x = n(g);
    return t;
}

FullOperator random_operator(const ModeShape& r, const ModeShape& c, std::mt19937_64& g) {
    std::normal_distribution<double> n;
    FullOperator A(r, c);
    for (auto& x : A.data()) x = n(g);
    return A;
}

}  // namespace

TEST(IndexMapping, GridExampleBoxNumbers) {
    const ModeShape s{3, 3};
    EXPECT_EQ(multiindex_to_linear({1, 1}, s), 1u);
    EXPECT_EQ(multiindex_to_linear({2, 3}, s), 8u);
    EXPECT_EQ(linear_to_multiindex(9, s), (MultiIndex{3, 3}));
    EXPECT_EQ(linear_to_multiindex(1, s), (MultiIndex{1, 1}));
}

TEST(IndexMapping, OneDimensionalIsIdentity) {
    const ModeShape s{7};
    for (std::size_t i = 1; i <= 7; ++i) EXPECT_EQ(multiindex_to_linear({i}, s), i);
}

TEST(IndexMapping, ExhaustiveRoundTrip) {
    const ModeShape s{2, 3, 2};
    std::size_t expect = 1;
    for (std::size_t i3 = 1; i3 <= 2; ++i3)
        for (std::size_t i2 = 1; i2 <= 3; ++i2)
            for (std::size_t i1 = 1; i1 <= 2; ++i1) {
                EXPECT_EQ(multiindex_to_linear({i1, i2, i3}, s), expect);
                EXPECT_EQ(linear_to_multiindex(expect, s), (MultiIndex{i1, i2, i3}));
                ++expect;
            }
}

TEST(IndexMapping, BijectionOverManyShapes) {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> sizes(1 + g() % 4);
        std::size_t total = 1;
        for (auto& k : sizes) {
            k = 1 + g() % 9;
            total *= k;
        }
        if (total > 10000) continue;
        const ModeShape s(sizes);
        for (std::size_t l = 1; l <= s.total(); ++l) ASSERT_EQ(multiindex_to_linear(linear_to_multiindex(l, s), s), l);
    }
}

TEST(IndexMapping, OutOfRangeNamesMode) {
    const ModeShape s{3, 4};
    try {
        multiindex_to_linear({2, 5}, s);
        FAIL();
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos);
    }
    EXPECT_THROW(multiindex_to_linear({0, 1}, s), RangeError);
    EXPECT_THROW(linear_to_multiindex(13, s), RangeError);
    EXPECT_THROW(linear_to_multiindex(0, s), RangeError);
}

TEST(FullTensorOps, VectorizeOrdering) {
    // (v111, v211, v121, v221, v131, v231, v112, ..., v232)
    const ModeShape s{2, 3, 2};
    FullTensor v(s);
    for (std::size_t i3 = 1; i3 <= 2; ++i3)
        for (std::size_t i2 = 1; i2 <= 3; ++i2)
            for (std::size_t i1 = 1; i1 <= 2; ++i1) v({i1, i2, i3}) = 100.0 * i1 + 10.0 * i2 + i3;
    const std::vector<double> expect{111, 211, 121, 221, 131, 231, 112, 212, 122, 222, 132, 232};
    EXPECT_EQ(vectorize(v), expect);
}

TEST(FullTensorOps, VectorizeMatchesColumnMajorMatrix) {
    std::mt19937_64 g(3);
    const FullTensor v = random_tensor(ModeShape{3, 2}, g);
    Eigen::MatrixXd m(3, 2);
    for (std::size_t i = 1; i <= 3; ++i)
        for (std::size_t j = 1; j <= 2; ++j) m(i - 1, j - 1) = v({i, j});
    const auto flat = vectorize(v);
    for (int k = 0; k < 6; ++k) EXPECT_EQ(flat[k], m.data()[k]);
    const FullTensor one(ModeShape{4}, {1, 2, 3, 4});
    EXPECT_EQ(vectorize(one), (std::vector<double>{1, 2, 3, 4}));
}

TEST(FullTensorOps, InnerProduct) {
    std::mt19937_64 g(5);
    const ModeShape s{2, 2, 2};
    const FullTensor v = random_tensor(s, g), w = random_tensor(s, g);
    double expect = 0;
    for (std::size_t k = 0; k < 8; ++k) expect += v.data()[k] * w.data()[k];
    EXPECT_DOUBLE_EQ(inner(v, w), expect);
    EXPECT_NEAR(inner(v, v), v.vec().squaredNorm(), 1e-14);
    EXPECT_EQ(inner(FullTensor::unit(s, {1, 2, 1}), FullTensor::unit(s, {1, 2, 1})), 1.0);
    EXPECT_EQ(inner(FullTensor::unit(s, {1, 2, 1}), FullTensor::unit(s, {2, 2, 1})), 0.0);
    EXPECT_THROW(inner(v, FullTensor(ModeShape{2, 4})), DimensionError);
}

TEST(FullTensorOps, OuterProduct) {
    std::mt19937_64 g(7);
    const FullTensor v = random_tensor(ModeShape{2}, g), w = random_tensor(ModeShape{3}, g);
    const FullOperator o = outer(v, w);
    for (std::size_t i = 1; i <= 2; ++i)
        for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(o({i}, {j}), v({i}) * w({j}));
    const ModeShape s{2, 2};
    const FullOperator e = outer(FullTensor::unit(s, {2, 1}), FullTensor::unit(s, {1, 2}));
    double total = 0;
    for (double x : e.data()) total += x;
    EXPECT_EQ(total, 1.0);
    EXPECT_EQ(e({2, 1}, {1, 2}), 1.0);
    const FullTensor u = random_tensor(s, g), a = random_tensor(s, g), b = random_tensor(s, g);
    const FullTensor lhs = apply(outer(a, b), u);
    const FullTensor rhs = scale(inner(b, u), a);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-14);
}

TEST(FullTensorOps, ApplyIdentityAndExampleMatrix) {
    std::mt19937_64 g(9);
    const ModeShape s{3, 3};
    const FullTensor v = random_tensor(s, g);
    const FullTensor Iv = apply(FullOperator::identity(s), v);
    EXPECT_EQ(Iv.data(), v.data());

    const Eigen::MatrixXd P = testdata::example_matrix();
    const FullOperator T = FullOperator::from_matrix(s, s, P);
    // Entry [i, j] of the operator is P(î, ĵ).
    EXPECT_EQ(T({1, 2}, {1, 1}), 0.31);
    EXPECT_EQ(T({2, 1}, {1, 2}), 0.03);
    const Eigen::VectorXd ref = P * v.vec();
    const FullTensor Tv = apply(T, v);
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(Tv[k], ref(k), 1e-15);
}

TEST(FullTensorOps, ApplyMatchesMatricizationRandom) {
    std::mt19937_64 g(13);
    for (int trial = 0; trial < 20; ++trial) {
        const ModeShape s{1 + g() % 4, 1 + g() % 4, 1 + g() % 4};
        const FullOperator A = random_operator(s, s, g);
        const FullTensor v = random_tensor(s, g);
        const FullTensor Av = apply(A, v);
        const std::size_t N = s.total();
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) ref(i) += A.data()[i + N * j] * v[j];
        EXPECT_LE((Av.vec() - ref).norm(), 1e-13 * ref.norm());
    }
    EXPECT_THROW(apply(FullOperator::identity(ModeShape{2}), FullTensor(ModeShape{3})), DimensionError);
}

TEST(FullTensorOps, AdjointIdentity) {
    std::mt19937_64 g(17);
    const ModeShape r{2, 3}, c{3, 2};
    const FullOperator A = random_operator(r, c, g);
    const FullTensor v = random_tensor(c, g), w = random_tensor(r, g);
    EXPECT_NEAR(inner(apply(A, v), w), inner(v, apply(transpose(A), w)), 1e-13);
}

TEST(FullTensorOps, Axpy) {
    std::mt19937_64 g(19);
    const ModeShape s{2, 3};
    const FullTensor v = random_tensor(s, g), w = random_tensor(s, g);
    EXPECT_EQ(axpy(0.0, v, w).data(), w.data());
    const FullTensor z = axpy(1.0, v, scale(-1.0, v));
    for (double x : z.data()) EXPECT_EQ(x, 0.0);
    const FullTensor r = axpy(2.5, v, w);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(r[k], 2.5 * v[k] + w[k]);
}

TEST(FullTensorOps, Bilinearity) {
    std::mt19937_64 g(23);
    const ModeShape s{3, 2};
    const FullTensor u = random_tensor(s, g), v = random_tensor(s, g), w = random_tensor(s, g);
    EXPECT_NEAR(inner(axpy(1.7, u, v), w), 1.7 * inner(u, w) + inner(v, w), 1e-13);
    const FullOperator lhs = outer(axpy(-0.3, u, v), w);
    const FullOperator rhs = axpy(-0.3, outer(u, w), outer(v, w));
    for (std::size_t k = 0; k < lhs.data().size(); ++k) EXPECT_NEAR(lhs.data()[k], rhs.data()[k], 1e-14);
}

TEST(FullTensorIo, CsvRoundTripAndLayout) {
    const ModeShape s{2, 2};
    const FullTensor v(s, {0.1, 1.0 / 3.0, -2.0, 1e-300});
    std::ostringstream os;
    write_csv(os, v);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "i1,i2,value");
    EXPECT_NE(text.find("2,1,0.33333333333333331"), std::string::npos);
    std::istringstream is(text);
    const FullTensor back = read_csv(is);
    EXPECT_EQ(back.shape(), s);
    EXPECT_EQ(back.data(), v.data());
}
