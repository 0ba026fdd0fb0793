#pragma once

#include "glfm/observed.hpp"

namespace glfm {

// M = theta * a^T with theta n x r and a p x r.
struct FactorPair {
    Matrix theta;
    Matrix a;

    Index rank() const { return theta.cols(); }
    Matrix product() const { return theta * a.transpose(); }
};

// Thin top-r SVD: m ~ u * diag(d) * v^T.
struct SvdTriple {
    Matrix u;
    Vector d;  // descending, non-negative
    Matrix v;

    Matrix reconstruct() const { return u * d.asDiagonal() * v.transpose(); }
};

// ||est - truth||_F / sqrt(n p)
double scaled_frobenius_error(const Matrix& est, const Matrix& truth);

// max |est_ij - truth_ij|
double max_norm_error(const Matrix& est, const Matrix& truth);

// Largest Euclidean row norm.
double two_to_inf_norm(const Matrix& x);

double nuclear_norm(const Matrix& x);

// Best rank-r approximation factors. Each singular pair is sign-normalized so
// that the entry of largest magnitude in the right vector is positive (lowest
// index wins ties). Throws std::invalid_argument unless 1 <= r <= min(n, p).
SvdTriple top_r_svd(const Matrix& m, Index r);

// Rescales every row whose norm exceeds c onto the sphere of radius c. Rows
// within 32 ulps of c are left as they are.
Matrix project_two_to_inf(const Matrix& x, double c);

}  // namespace glfm
