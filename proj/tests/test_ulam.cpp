#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "example_matrix.hpp"
#include "test_util.hpp"
#include "xfer/error.hpp"
#include "xfer/ulam/assembly.hpp"

using namespace xfer;
using testutil::rel_diff;

namespace {

BoxGrid grid3x3() { return BoxGrid({0.0, 0.0}, {3.0, 3.0}, ModeShape{3, 3}); }

// Images chosen so that box î sends round(100 p_îĵ) of its 100 points to the center of box ĵ.
BoxPoints example_images(const BoxGrid& grid, const BoxPoints& x, const Eigen::MatrixXd& P) {
    BoxPoints y = x;
    for (std::size_t r = 0; r < 9; ++r) {
        std::size_t l = 0;
        for (std::size_t c = 0; c < 9; ++c) {
            const auto cnt = static_cast<std::size_t>(std::lround(100.0 * P(r, c)));
            const Point ctr = grid.center(linear_to_multiindex(c + 1, grid.shape()));
            for (std::size_t q = 0; q < cnt; ++q, ++l) std::copy(ctr.begin(), ctr.end(), y.point(r, l).begin());
        }
        EXPECT_EQ(l, 100u) << "row " << r;
    }
    return y;
}

PointMap affine_map(const Eigen::Matrix2d& M, const Eigen::Vector2d& t) {
    return [M, t](std::span<const double> x, RandomStream&) {
        const Eigen::Vector2d y = M * Eigen::Vector2d(x[0], x[1]) + t;
        return Point{y[0], y[1]};
    };
}

}  // namespace

TEST(BoxGridTest, IndExamples) {
    const BoxGrid g = grid3x3();
    const std::vector<double> a{0.5, 0.5}, corner{3.0, 3.0}, out{-0.1, 1.0}, top{3.0000001, 1.0};
    EXPECT_EQ(*ind(g, a), (MultiIndex{1, 1}));
    EXPECT_EQ(*ind(g, corner), (MultiIndex{3, 3}));
    EXPECT_FALSE(ind(g, out).has_value());
    EXPECT_FALSE(ind(g, top).has_value());
    const std::vector<double> edge{1.0, 2.0};
    EXPECT_EQ(*ind(g, edge), (MultiIndex{2, 3}));
}

TEST(BoxGridTest, CentersMapToTheirBox) {
    const BoxGrid g({-2.0, -1.0, -2.0}, {2.0, 2.0, 2.0}, ModeShape{7, 5, 6});
    for (std::size_t k = 1; k <= g.shape().total(); ++k) {
        const MultiIndex i = linear_to_multiindex(k, g.shape());
        EXPECT_EQ(*ind(g, g.center(i)), i);
    }
}

TEST(BoxGridTest, IndicatorProductMatchesInd) {
    const BoxGrid g({-1.0, 0.0}, {1.0, 2.0}, ModeShape{4, 5});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.2, 2.2);
    std::size_t outside = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::vector<double> x{u(rng), u(rng)};
        const auto j = ind(g, x);
        if (!j) ++outside;
        for (std::size_t k = 1; k <= g.shape().total(); ++k) {
            const MultiIndex i = linear_to_multiindex(k, g.shape());
            ASSERT_EQ(indicator_product(g, i, x), (j && *j == i) ? 1 : 0);
        }
    }
    EXPECT_GT(outside, 0u);
    const MultiIndex i{2, 3};
    Point c = g.center(i);
    EXPECT_EQ(indicator_product(g, i, c), 1);
    c[1] += g.width(1);
    EXPECT_EQ(indicator_product(g, i, c), 0);
}

TEST(SampleTestPoints, PointsLieInTheirBoxes) {
    const BoxGrid g({-2.0, -1.0}, {2.0, 2.0}, ModeShape{6, 5});
    const BoxPoints x = sample_test_points(g, 40, 11);
    EXPECT_EQ(x.coords.size(), 30u * 40u * 2u);
    for (std::size_t b = 0; b < x.boxes; ++b)
        for (std::size_t l = 0; l < 40; ++l) EXPECT_EQ(*ind(g, x.point(b, l)), linear_to_multiindex(b + 1, g.shape()));
    const BoxPoints again = sample_test_points(g, 40, 11);
    EXPECT_EQ(x.coords, again.coords);
    EXPECT_NE(x.coords, sample_test_points(g, 40, 12).coords);
}

TEST(SampleTestPoints, BoxMeansApproachCenters) {
    const BoxGrid g({0.0, 0.0}, {1.0, 1.0}, ModeShape{3, 3});
    const std::size_t n = 4000;
    const BoxPoints x = sample_test_points(g, n, 5);
    for (std::size_t b = 0; b < x.boxes; ++b) {
        const Point c = g.center(linear_to_multiindex(b + 1, g.shape()));
        for (std::size_t mu = 0; mu < 2; ++mu) {
            double m = 0.0;
            for (std::size_t l = 0; l < n; ++l) m += x.point(b, l)[mu];
            m /= static_cast<double>(n);
            const double sd = g.width(mu) / std::sqrt(12.0);
            EXPECT_LT(std::abs(m - c[mu]), 3.0 * sd / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST(Assembly, IdentityDynamicsGiveIdentity) {
    const BoxGrid g({0.0, 0.0}, {2.0, 1.0}, ModeShape{4, 3});
    const BoxPoints x = sample_test_points(g, 8, 1);
    const PointMap id = [](std::span<const double> p, RandomStream&) { return Point(p.begin(), p.end()); };
    const BoxPoints y = map_points(x, id, 1);
    const TransitionDense D = assemble_dense(g, x, y);
    EXPECT_EQ(D.P, Eigen::MatrixXd::Identity(12, 12));
    const TransitionCP T = assemble_tensor(g, x, y);
    EXPECT_EQ(T.rank(), 12u);
    const FullTensor s = subtensor_row_sums(T);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s[k], 1.0);
}

TEST(Assembly, ConstantMapGivesRepeatedRow) {
    const BoxGrid g({0.0, 0.0}, {3.0, 3.0}, ModeShape{3, 3});
    const BoxPoints x = sample_test_points(g, 5, 2);
    const PointMap c = [](std::span<const double>, RandomStream&) { return Point{2.5, 0.2}; };
    const TransitionDense D = assemble_dense(g, x, map_points(x, c, 2));
    const std::size_t j0 = multiindex_to_linear({3, 1}, g.shape()) - 1;
    for (Eigen::Index r = 0; r < 9; ++r)
        for (Eigen::Index col = 0; col < 9; ++col) EXPECT_EQ(D.P(r, col), col == static_cast<Eigen::Index>(j0) ? 1.0 : 0.0);
}

TEST(Assembly, SinglePointIsOneElementaryTensor) {
    const BoxGrid g({0.0, 0.0}, {3.0, 3.0}, ModeShape{3, 3});
    BoxPoints x = sample_test_points(g, 1, 2);
    const PointMap to13 = [](std::span<const double>, RandomStream&) { return Point{0.5, 2.5}; };
    const TransitionCP T = assemble_tensor(g, x, map_points(x, to13, 2));
    ASSERT_EQ(T.rank(), 9u);
    for (const auto& e : T.entries) {
        EXPECT_EQ(e.to, (std::vector<std::uint32_t>{0, 2}));
        EXPECT_EQ(e.weight, 1.0);
    }
}

TEST(Assembly, ExampleMatrixTensorSlicesAreColumns) {
    const Eigen::MatrixXd P = testdata::example_matrix();
    const BoxGrid g = grid3x3();
    const BoxPoints x = sample_test_points(g, 100, 9);
    const BoxPoints y = example_images(g, x, P);
    const TransitionDense D = assemble_dense(g, x, y);
    EXPECT_EQ(D.P, P);
    const FullOperator T = densify(assemble_tensor(g, x, y));
    for (std::size_t j1 = 1; j1 <= 3; ++j1)
        for (std::size_t j2 = 1; j2 <= 3; ++j2) {
            const std::size_t col = multiindex_to_linear({j1, j2}, g.shape()) - 1;
            for (std::size_t i1 = 1; i1 <= 3; ++i1)
                for (std::size_t i2 = 1; i2 <= 3; ++i2)
                    EXPECT_EQ(T({i1, i2}, {j1, j2}), P(static_cast<Eigen::Index>(multiindex_to_linear({i1, i2}, g.shape()) - 1),
                                                     static_cast<Eigen::Index>(col)));
        }
    const FullTensor s = subtensor_row_sums(T);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(s[k], 1.0, 1e-14);
}

TEST(Assembly, AffineMapCrossOracleIsExact) {
    const BoxGrid g({-1.0, -1.0}, {1.0, 1.0}, ModeShape{4, 4});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Matrix2d M;
        M << u(rng), u(rng), u(rng), u(rng);
        const Eigen::Vector2d t(0.1 * u(rng), 0.1 * u(rng));
        const BoxPoints x = sample_test_points(g, 10, 100 + trial);
        const BoxPoints y = map_points(x, affine_map(M, t), 100 + trial);
        const TransitionDense D = assemble_dense(g, x, y, {.allow_empty_rows = true});
        const TransitionCP T = assemble_tensor(g, x, y, {.allow_empty_rows = true});
        const FullOperator F = densify(T);
        for (Eigen::Index r = 0; r < 16; ++r)
            for (Eigen::Index c = 0; c < 16; ++c)
                ASSERT_EQ(F.at0(static_cast<std::size_t>(r), static_cast<std::size_t>(c)), D.P(r, c));
        EXPECT_EQ(D.mass.kept, T.mass.kept);
    }
}

TEST(Assembly, EscapedPointsAreDroppedAndRowsRenormalized) {
    const BoxGrid g({0.0}, {1.0}, ModeShape{4});
    const BoxPoints x = sample_test_points(g, 50, 4);
    const PointMap shift = [](std::span<const double> p, RandomStream&) { return Point{p[0] + 0.1}; };
    const TransitionDense D = assemble_dense(g, x, map_points(x, shift, 4));
    for (Eigen::Index r = 0; r < 4; ++r) EXPECT_NEAR(D.P.row(r).sum(), 1.0, 1e-14);
    EXPECT_EQ(D.mass.kept[0], 50u);
    EXPECT_LT(D.mass.kept[3], 50u);
    EXPECT_LT(D.mass.total_fraction(), 1.0);
}

TEST(Assembly, EmptyRowNamesTheBox) {
    const BoxGrid g({0.0, 0.0}, {1.0, 1.0}, ModeShape{2, 2});
    const BoxPoints x = sample_test_points(g, 5, 4);
    const PointMap away = [](std::span<const double> p, RandomStream&) {
        return p[0] > 0.5 && p[1] < 0.5 ? Point{5.0, 5.0} : Point{p.begin(), p.end()};
    };
    const BoxPoints y = map_points(x, away, 4);
    try {
        assemble_tensor(g, x, y);
        FAIL() << "expected EmptyRowError";
    } catch (const EmptyRowError& e) {
        EXPECT_EQ(e.box(), 2u);
        EXPECT_NE(std::string(e.what()).find("(2,1)"), std::string::npos);
    }
    EXPECT_THROW(assemble_dense(g, x, y), EmptyRowError);
    const TransitionDense D = assemble_dense(g, x, y, {.allow_empty_rows = true});
    EXPECT_EQ(D.mass.empty_rows, (std::vector<std::size_t>{1}));
    EXPECT_EQ(D.P.row(1).sum(), 0.0);
}

TEST(Assembly, DoubleWellRowsAreStochastic) {
    SdeSystem sys{rotated_double_well(0.0), 0.7, 1e-3, 50};
    const BoxGrid g({-2.0, -2.0}, {2.0, 2.0}, ModeShape{50, 50});
    const TransitionDense D = assemble_dense(g, sys, 100, 1, {.allow_empty_rows = true});
    EXPECT_TRUE((D.P.array() >= 0.0).all());
    for (Eigen::Index r = 0; r < D.P.rows(); ++r)
        if (D.mass.kept[static_cast<std::size_t>(r)] > 0) {
            EXPECT_NEAR(D.P.row(r).sum(), 1.0, 1e-12);
        }
    RecordProperty("retained_fraction", std::to_string(D.mass.total_fraction()));
    EXPECT_GT(D.mass.total_fraction(), 0.9);
}

TEST(Assembly, SdeAssemblyIsReproducible) {
    SdeSystem sys{rotated_double_well(0.3), 0.7, 1e-3, 30};
    const BoxGrid g({-2.0, -2.0}, {2.0, 2.0}, ModeShape{5, 5});
    const TransitionDense a = assemble_dense(g, sys, 20, 8);
    const TransitionDense b = assemble_dense(g, sys, 20, 8);
    EXPECT_EQ(a.P, b.P);
    const FullOperator T = densify(assemble_tensor(g, sys, 20, 8));
    EXPECT_EQ(T.matrix(), a.P);
}

TEST(TransitionToTT, DenseAndChunkedPathsAgree) {
    SdeSystem sys{rotated_double_well(0.0), 0.7, 1e-3, 200};
    const BoxGrid g({-2.0, -2.0}, {2.0, 2.0}, ModeShape{8, 8});
    const TransitionCP T = assemble_tensor(g, sys, 30, 3);
    const FullOperator F = densify(T);
    RoundReport r1, r2;
    const TTOperator a = transition_to_tt(T, 1e-10, std::nullopt, kDefaultDensifyGuard, &r1);
    const TTOperator b = transition_to_tt(T, 1e-10, std::nullopt, 100, &r2);
    EXPECT_LE(rel_diff(densify(a), F), 1e-9);
    EXPECT_LE(rel_diff(densify(b), F), 1e-9);
    EXPECT_LE(r2.rel_error, 1e-10);
    EXPECT_NEAR(r2.input_norm, r1.input_norm, 1e-12 * r1.input_norm);
}
