#include "glfm/matrix_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace glfm {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix shape mismatch: " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                    "x" + std::to_string(b.cols()));
}

}  // namespace

double scaled_frobenius_error(const Matrix& est, const Matrix& truth) {
    require_same_shape(est, truth);
    if (est.size() == 0) return 0.0;
    return (est - truth).norm() / std::sqrt(static_cast<double>(est.rows()) * est.cols());
}

double max_norm_error(const Matrix& est, const Matrix& truth) {
    require_same_shape(est, truth);
    if (est.size() == 0) return 0.0;
    return (est - truth).cwiseAbs().maxCoeff();
}

double two_to_inf_norm(const Matrix& x) {
    if (x.rows() == 0) return 0.0;
    return x.rowwise().norm().maxCoeff();
}

double nuclear_norm(const Matrix& x) {
    if (x.size() == 0) return 0.0;
    Eigen::BDCSVD<Matrix> svd(x);
    return svd.singularValues().sum();
}

SvdTriple top_r_svd(const Matrix& m, Index r) {
    if (r < 1 || r > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("rank " + std::to_string(r) + " out of range for " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!m.allFinite()) throw std::domain_error("SVD input has non-finite entries");

    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdTriple out{svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};

    for (Index k = 0; k < r; ++k) {
        Index arg = 0;
        double best = -1.0;
        for (Index j = 0; j < out.v.rows(); ++j) {
            const double a = std::abs(out.v(j, k));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (out.v(arg, k) < 0.0) {
            out.v.col(k) *= -1.0;
            out.u.col(k) *= -1.0;
        }
    }
    return out;
}

Matrix project_two_to_inf(const Matrix& x, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("two-to-infinity radius must be positive");
    // A rescaled row can come out a few ulps above c. Rows within that band
    // count as inside, so a second projection is the identity.
    const double inside = c * (1.0 + 32.0 * std::numeric_limits<double>::epsilon());
    Matrix out = x;
    for (Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm > inside) out.row(i) *= c / norm;
    }
    return out;
}

}  // namespace glfm
