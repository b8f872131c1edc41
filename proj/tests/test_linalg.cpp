#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mdlatlrr/error.hpp"
#include "mdlatlrr/linalg.hpp"
#include "test_support.hpp"

using namespace mdlatlrr;
using mdlatlrr::testing::random_matrix;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double reconstruction_error(const Matrix& m) {
    const SvdResult f = svd(m);
    return (f.U * f.s.asDiagonal() * f.V.transpose() - m).norm();
}

}  // namespace

TEST(Svd, IdentityHasUnitSpectrum) {
    const SvdResult f = svd(Matrix::Identity(3, 3));
    EXPECT_NEAR(f.s[0], 1.0, 1e-14);
    EXPECT_NEAR(f.s[1], 1.0, 1e-14);
    EXPECT_NEAR(f.s[2], 1.0, 1e-14);
}

TEST(Svd, ZeroMatrix) {
    const SvdResult f = svd(Matrix::Zero(2, 2));
    EXPECT_EQ(f.s[0], 0.0);
    EXPECT_EQ(f.s[1], 0.0);
}

TEST(Svd, RankOneMatchesEigenOracle) {
    // m^T m = [[5,10],[10,20]] has eigenvalues 25 and 0, so s = [5, 0].
    const Vector s = svd(m2(1, 2, 2, 4)).s;
    EXPECT_NEAR(s[0], 5.0, 1e-12);
    EXPECT_NEAR(s[1], 0.0, 1e-12);
}

TEST(Svd, RoundTripAndOrthonormalFactorsOnRandomMatrices) {
    std::mt19937 sizes(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto rows = static_cast<Eigen::Index>(1 + sizes() % 64);
        const auto cols = static_cast<Eigen::Index>(1 + sizes() % 64);
        const Matrix m = random_matrix(rows, cols, 100 + static_cast<std::uint64_t>(trial), -3.0, 3.0);
        const SvdResult f = svd(m);
        EXPECT_LE(reconstruction_error(m), 1e-10 * std::max(1.0, m.norm()));
        const auto k = f.s.size();
        EXPECT_LE((f.U.transpose() * f.U - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((f.V.transpose() * f.V - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10);
        for (Eigen::Index i = 1; i < k; ++i) EXPECT_GE(f.s[i - 1], f.s[i]);
        EXPECT_GE(f.s.minCoeff(), 0.0);
    }
}

TEST(Svd, RejectsNonFiniteInput) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(svd(m), Error);
    m(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(nuclear_norm(m), Error);
}

TEST(NuclearNorm, Examples) {
    EXPECT_NEAR(nuclear_norm(Matrix::Identity(2, 2)), 2.0, 1e-14);
    EXPECT_EQ(nuclear_norm(Matrix::Zero(3, 2)), 0.0);
    EXPECT_NEAR(nuclear_norm(m2(3, 0, 0, 4)), 7.0, 1e-12);
}

TEST(NuclearNorm, AbsoluteHomogeneity) {
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = random_matrix(12, 9, 200 + static_cast<std::uint64_t>(trial));
        const double base = nuclear_norm(m);
        for (double c : {-3.5, -1.0, 0.25, 7.0}) {
            EXPECT_NEAR(nuclear_norm(c * m), std::abs(c) * base, 1e-9 * std::abs(c) * base);
        }
    }
}

TEST(NuclearNorm, TriangleInequality) {
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix a = random_matrix(10, 14, 300 + static_cast<std::uint64_t>(trial));
        const Matrix b = random_matrix(10, 14, 400 + static_cast<std::uint64_t>(trial));
        EXPECT_LE(nuclear_norm(a + b), nuclear_norm(a) + nuclear_norm(b) + 1e-9);
    }
}

TEST(NuclearNorm, AgreesWithSingularValueSumAcrossConditioning) {
    for (int trial = 0; trial < 10; ++trial) {
        const auto seed = 500 + static_cast<std::uint64_t>(trial);
        const SvdResult f = svd(random_matrix(16, 16, seed));
        for (double ratio : {1.0, 1e-2, 1e-4, 1e-9, 0.0}) {
            // Singular values spread from 1 down to `ratio`.
            Vector s(16);
            for (Eigen::Index i = 0; i < 16; ++i) s[i] = std::pow(std::max(ratio, 1e-300), static_cast<double>(i) / 15.0);
            if (ratio == 0.0) s.tail(8).setZero();
            const Matrix m = f.U * s.asDiagonal() * f.V.transpose();
            const double expected = singular_values(m).sum();
            EXPECT_NEAR(nuclear_norm(m), expected, 1e-12 * expected) << "ratio " << ratio;
            EXPECT_NEAR(nuclear_norm(Matrix(m.transpose())), expected, 1e-12 * expected);
        }
    }
    const Matrix wide = random_matrix(5, 40, 600);
    EXPECT_NEAR(nuclear_norm(wide), singular_values(wide).sum(), 1e-12 * singular_values(wide).sum());
}

TEST(SoftThreshold, Examples) {
    Matrix row(1, 2);
    row << 2, -2;
    const Matrix shrunk = soft_threshold(row, 1.0);
    EXPECT_EQ(shrunk(0, 0), 1.0);
    EXPECT_EQ(shrunk(0, 1), -1.0);

    const Matrix m = random_matrix(5, 7, 7);
    EXPECT_EQ(soft_threshold(m, 0.0), m);

    Matrix half(1, 1);
    half << 0.5;
    EXPECT_EQ(soft_threshold(half, 1.0)(0, 0), 0.0);
}

TEST(SoftThreshold, NegativeTauIsArgumentError) {
    EXPECT_THROW(soft_threshold(Matrix::Identity(2, 2), -0.1), ArgumentError);
}

TEST(Svt, Examples) {
    EXPECT_LE((svt(Matrix::Identity(2, 2), 0.5) - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-14);

    const Matrix m = random_matrix(6, 4, 9);
    EXPECT_LE((svt(m, 0.0) - m).cwiseAbs().maxCoeff(), 1e-10);

    const Matrix out = svt(m2(3, 0, 0, 4), 3.5);
    EXPECT_LE((out - m2(0, 0, 0, 0.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Svt, ReportsShrunkNuclearNormAndNeverIncreasesIt) {
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix m = random_matrix(8, 11, 500 + static_cast<std::uint64_t>(trial));
        double reported = -1.0;
        const Matrix out = svt(m, 0.3, reported);
        EXPECT_NEAR(reported, nuclear_norm(out), 1e-10);
        EXPECT_LE(nuclear_norm(out), nuclear_norm(m) + 1e-12);
    }
    EXPECT_THROW(svt(Matrix::Identity(2, 2), -1.0), ArgumentError);
}

TEST(Svt, IsTheProximalOperatorOfTheNuclearNorm) {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix m = random_matrix(7, 5, 600 + static_cast<std::uint64_t>(trial), -2.0, 2.0);
        const double tau = 0.4;
        auto objective = [&](const Matrix& y) {
            return tau * nuclear_norm(y) + 0.5 * (y - m).squaredNorm();
        };
        const Matrix best = svt(m, tau);
        const double best_value = objective(best);
        for (int k = 0; k < 100; ++k) {
            Matrix delta(7, 5);
            for (Eigen::Index i = 0; i < delta.size(); ++i) delta.data()[i] = noise(gen);
            const double scale = std::pow(10.0, -1.0 - (k % 4));
            EXPECT_LE(best_value, objective(best + scale * delta) + 1e-12);
        }
    }
}
