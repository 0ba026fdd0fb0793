#include <algorithm>
#include <cmath>
#include <functional>

#include "glfm/initial.hpp"

namespace glfm {

Matrix project_max_norm(const Matrix& m, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("max-norm bound must be positive");
    return m.cwiseMax(-rho).cwiseMin(rho);
}

Vector project_l1_ball_nonneg(const Vector& s, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("l1 radius must be positive");
    Vector clipped = s.cwiseMax(0.0);
    if (clipped.sum() <= radius) return clipped;

    // Soft threshold at the tau that makes the kept mass equal the radius.
    std::vector<double> sorted(clipped.data(), clipped.data() + clipped.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumsum += sorted[k];
        const double t = (cumsum - radius) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0.0) tau = t;
    }
    return (clipped.array() - tau).cwiseMax(0.0).matrix();
}

namespace {

Matrix nuclear_project_from_svd(const Eigen::BDCSVD<Matrix>& svd, double radius) {
    const Vector s = project_l1_ball_nonneg(svd.singularValues(), radius);
    Index keep = 0;
    while (keep < s.size() && s(keep) > 0.0) ++keep;
    return svd.matrixU().leftCols(keep) * s.head(keep).asDiagonal() *
           svd.matrixV().leftCols(keep).transpose();
}

}  // namespace

Matrix project_nuclear_ball(const Matrix& m, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("nuclear radius must be positive");
    if (m.size() == 0) return m;
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().sum() <= radius) return m;
    return nuclear_project_from_svd(svd, radius);
}

Matrix project_box_nuclear(const Matrix& m, double rho, double radius, int max_iters, double tol) {
    if (m.size() == 0) return m;
    const Matrix boxed = project_max_norm(m, rho);
    Eigen::BDCSVD<Matrix> svd(boxed, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().sum() <= radius) return boxed;

    Matrix out;
    const Matrix shrunk = project_nuclear_ball(m, radius);
    if (shrunk.cwiseAbs().maxCoeff() <= rho) {
        out = shrunk;
    } else {
        // Dykstra: alternate box and ball with correction terms.
        Matrix y = m;
        Matrix p = Matrix::Zero(m.rows(), m.cols());
        Matrix q = Matrix::Zero(m.rows(), m.cols());
        for (int k = 0; k < max_iters; ++k) {
            const Matrix a = project_max_norm(y + p, rho);
            p += y - a;
            const Matrix b = project_nuclear_ball(a + q, radius);
            q += a - b;
            const double gap = (a - b).norm();
            const double move = (b - y).norm();
            y = b;
            if (gap <= tol * std::max(1.0, b.norm()) && move <= tol * std::max(1.0, b.norm())) break;
        }
        out = y;
    }

    out = project_max_norm(out, rho);
    const double nuc = nuclear_norm(out);
    if (nuc > radius) out *= radius / nuc * (1.0 - 1e-15);
    return out;
}

}  // namespace glfm
