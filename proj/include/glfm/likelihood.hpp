#pragma once

// Weighted joint log-likelihood
//
//   l(M) = sum over observed (i, j) of  y_ij * m_ij - b_j(m_ij)
//
// and its partial derivatives. The base-measure terms c_j(y) do not depend on
// M and are left out; test_loglik in evaluate.hpp adds them back.
//
// The OpenMP kernels reduce per-row partial sums in row order, so results do
// not depend on the thread count. Serial references live in glfm::serial.

#include "glfm/observed.hpp"

namespace glfm {

// Throws std::invalid_argument on shape mismatch.
double weighted_loglik(const ObservedMatrix& data, const Matrix& m);

// Same value computed from factors without forming theta * a^T.
double weighted_loglik(const ObservedMatrix& data, const Matrix& theta, const Matrix& a);

// Dense n x p gradient of l at m: omega_ij * (y_ij - b'_j(m_ij)).
Matrix loglik_gradient(const ObservedMatrix& data, const Matrix& m);

// Partial log-likelihood of row i as a function of theta_i with loadings a.
double row_objective(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& theta_i);
double col_objective(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& a_j);

// sum_j omega_ij {y_ij - b'_j(a_j^T theta_i)} a_j
Vector score_row(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& theta_i);

// sum_i omega_ij {y_ij - b'_j(a_j^T theta_i)} theta_i
Vector score_col(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& a_j);

namespace serial {

double weighted_loglik(const ObservedMatrix& data, const Matrix& m);
Matrix loglik_gradient(const ObservedMatrix& data, const Matrix& m);

}  // namespace serial

}  // namespace glfm
