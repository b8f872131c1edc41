#include "mdlatlrr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

template <int Options>
Eigen::BDCSVD<Matrix> factorize(const Matrix& m) {
    require_finite(m, "svd input");
    Eigen::BDCSVD<Matrix> solver(m, Options);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("svd: factorization of " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " matrix did not converge");
    }
    return solver;
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ArgumentError(std::string(what) + ": matrix contains NaN or Inf");
    }
}

SvdResult svd(const Matrix& m) {
    if (m.size() == 0) {
        throw ArgumentError("svd: empty matrix");
    }
    auto solver = factorize<Eigen::ComputeThinU | Eigen::ComputeThinV>(m);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector singular_values(const Matrix& m) {
    if (m.size() == 0) {
        throw ArgumentError("singular_values: empty matrix");
    }
    return factorize<0>(m).singularValues();
}

double nuclear_norm(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) {
        throw ArgumentError("nuclear_norm: empty matrix");
    }
    if (!m.allFinite()) {
        throw ArgumentError("nuclear_norm: matrix contains NaN or Inf");
    }
    // sigma_i = sqrt(lambda_i(M^T M)) loses about eps * sigma_max^2 / sigma_i,
    // so the shortcut is only taken when every lambda_i is well above that.
    constexpr Eigen::Index kGramLimit = 32;
    constexpr double kMinEigenRatio = 1e-6;
    if (std::min(m.rows(), m.cols()) <= kGramLimit) {
        const Matrix gram = m.cols() > m.rows() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        if (eig.info() == Eigen::Success) {
            const Vector& ev = eig.eigenvalues();
            const double top = ev.maxCoeff();
            if (top == 0.0) return 0.0;
            if (ev.minCoeff() >= kMinEigenRatio * top) return ev.cwiseSqrt().sum();
        }
    }
    return singular_values(m).sum();
}

Matrix soft_threshold(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) {
        throw ArgumentError("soft_threshold: tau must be non-negative");
    }
    return m.unaryExpr([tau](double x) {
        const double shrunk = std::abs(x) - tau;
        return shrunk > 0.0 ? std::copysign(shrunk, x) : 0.0;
    });
}

Matrix svt(const Matrix& m, double tau, double& result_nuclear_norm) {
    if (!(tau >= 0.0)) {
        throw ArgumentError("svt: tau must be non-negative");
    }
    const SvdResult f = svd(m);
    Eigen::Index kept = 0;
    while (kept < f.s.size() && f.s[kept] > tau) {
        ++kept;
    }
    result_nuclear_norm = 0.0;
    if (kept == 0) {
        return Matrix::Zero(m.rows(), m.cols());
    }
    const Vector shrunk = f.s.head(kept).array() - tau;
    result_nuclear_norm = shrunk.sum();
    return f.U.leftCols(kept) * shrunk.asDiagonal() * f.V.leftCols(kept).transpose();
}

Matrix svt(const Matrix& m, double tau) {
    double unused = 0.0;
    return svt(m, tau, unused);
}

}  // namespace mdlatlrr
