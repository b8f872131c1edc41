#pragma once

#include <Eigen/Dense>

namespace mdlatlrr {

/// Dense real matrix used throughout the library (64-bit).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD, m = U * diag(s) * V^T with s sorted in descending order.
struct SvdResult {
    Matrix U;
    Vector s;
    Matrix V;
};

/// Throws ArgumentError if any entry of m is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Thin singular value decomposition. Throws NumericalError if the
/// factorization fails or the input is not finite.
SvdResult svd(const Matrix& m);

/// Singular values only, descending.
Vector singular_values(const Matrix& m);

/// Sum of singular values. Small well-conditioned inputs take the square
/// roots of the Gram matrix eigenvalues; the rest go through the SVD.
double nuclear_norm(const Eigen::Ref<const Matrix>& m);

/// Entrywise shrinkage sign(x) * max(|x| - tau, 0).
Matrix soft_threshold(const Matrix& m, double tau);

/// Singular value thresholding: U * diag(max(s - tau, 0)) * V^T, the proximal
/// operator of tau * ||.||_*.
Matrix svt(const Matrix& m, double tau);

/// svt() that also reports the nuclear norm of the result, which the solver
/// gets for free from the shrunk spectrum.
Matrix svt(const Matrix& m, double tau, double& result_nuclear_norm);

}  // namespace mdlatlrr
