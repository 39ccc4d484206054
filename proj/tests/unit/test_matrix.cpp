#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jamdet/errors.hpp"
#include "jamdet/matrix.hpp"
#include "oracle/brute_force.hpp"

using namespace jamdet;

TEST(SymmetricMatrix, FromRowsRejectsAsymmetricInput) {
    EXPECT_THROW(SymmetricMatrix::from_rows({{1, 2}, {3, 4}}), InvalidArgumentError);
    const auto m = SymmetricMatrix::from_rows({{1, 2}, {2, 4}});
    EXPECT_EQ(m(0, 1), 2.0);
    EXPECT_EQ(m(1, 0), 2.0);
    EXPECT_EQ(m.packed().size(), 3u);
}

TEST(SymmetricMatrix, DimensionOutOfRangeIsRejected) {
    EXPECT_THROW(SymmetricMatrix(0), InvalidArgumentError);
    EXPECT_THROW(SymmetricMatrix(4), InvalidArgumentError);
    EXPECT_THROW(Vec(4), InvalidArgumentError);
}

TEST(SymmetricMatrix, OuterProductAndArithmetic) {
    const Vec v{1.0, -2.0};
    const auto o = SymmetricMatrix::outer(v);
    EXPECT_EQ(o(0, 0), 1.0);
    EXPECT_EQ(o(0, 1), -2.0);
    EXPECT_EQ(o(1, 1), 4.0);
    const auto s = o + SymmetricMatrix::identity(2) * 2.0;
    EXPECT_EQ(s(0, 0), 3.0);
    EXPECT_EQ(s.trace(), 9.0);
    EXPECT_EQ(s.max_abs(), 6.0);
}

TEST(LogdetPd, IdentityIsZero) { EXPECT_EQ(logdet_pd(SymmetricMatrix::identity(2)), 0.0); }

TEST(LogdetPd, DiagonalIsExact) {
    const double d[] = {2.0, 3.0};
    EXPECT_NEAR(logdet_pd(SymmetricMatrix::diagonal(d)), std::log(6.0), 1e-15);
    EXPECT_NEAR(logdet_pd(SymmetricMatrix::diagonal(d)), 1.791759, 1e-6);
}

TEST(LogdetPd, TwoByTwoMatchesDirectDeterminant) {
    EXPECT_NEAR(logdet_pd(SymmetricMatrix::from_rows({{2, 1}, {1, 2}})), std::log(3.0), 1e-14);
    EXPECT_NEAR(logdet_pd(SymmetricMatrix::from_rows({{2, 1}, {1, 2}})), 1.098612, 1e-6);
}

TEST(LogdetPd, SingularMatrixReportsPivot) {
    try {
        logdet_pd(SymmetricMatrix::from_rows({{1, 1}, {1, 1}}));
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot_index(), 1u);
    }
    try {
        logdet_pd(SymmetricMatrix::from_rows({{-1, 0}, {0, 1}}));
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.pivot_index(), 0u);
    }
    EXPECT_FALSE(try_logdet_pd(SymmetricMatrix(2)).has_value());
}

TEST(LogdetPd, ToleranceIsScaleRelative) {
    // Same shape at two very different scales: both positive definite or both singular.
    for (double scale : {1e-12, 1.0, 1e12}) {
        const auto near_singular = SymmetricMatrix::from_rows({{1, 1 - 1e-13}, {1 - 1e-13, 1}}) * scale;
        EXPECT_FALSE(try_logdet_pd(near_singular).has_value()) << scale;
        const auto fine = SymmetricMatrix::from_rows({{1, 0.5}, {0.5, 1}}) * scale;
        EXPECT_TRUE(try_logdet_pd(fine).has_value()) << scale;
    }
}

TEST(LogdetPd, MatchesCofactorDeterminantOnRandomMatrices) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        // B B^T + I is positive definite.
        oracle::Matrix b(n * n), a(n * n, 0.0);
        for (double& v : b) v = normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) a[i * n + j] += b[i * n + k] * b[j * n + k];
            }
            a[i * n + i] += 1.0;
        }
        const auto m = SymmetricMatrix::from_dense(a, n);
        EXPECT_NEAR(logdet_pd(m), std::log(oracle::det(a, n)), 1e-12);
    }
}

TEST(LogdetPd, ScalingProperty) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> log_c(-10.0, 10.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 3;
        SymmetricMatrix a = SymmetricMatrix::identity(n);
        for (int r = 0; r < 4; ++r) {
            Vec v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = normal(rng);
            a += SymmetricMatrix::outer(v);
        }
        const double c = std::exp(log_c(rng));
        EXPECT_NEAR(logdet_pd(a * c), static_cast<double>(n) * std::log(c) + logdet_pd(a), 1e-10);
    }
}

TEST(LdlFactor, SolveInvertsTheMatrix) {
    const auto m = SymmetricMatrix::from_rows({{4, 1, 0.5}, {1, 3, 0.2}, {0.5, 0.2, 2}});
    const auto f = ldl_factor(m);
    ASSERT_TRUE(f.factor.has_value());
    const Vec b{1.0, 2.0, 3.0};
    const Vec x = f.factor->solve(b);
    for (std::size_t i = 0; i < 3; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 3; ++j) row += m(i, j) * x[j];
        EXPECT_NEAR(row, b[i], 1e-13);
    }
    EXPECT_EQ(f.factor->lower(0, 0), 1.0);
}
