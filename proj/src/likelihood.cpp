#include "glfm/likelihood.hpp"

#include <stdexcept>
#include <vector>

namespace glfm {

namespace {

void require_shape(const ObservedMatrix& data, Index rows, Index cols) {
    if (rows != data.rows() || cols != data.cols())
        throw std::invalid_argument("signal matrix is " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + ", data is " +
                                    std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
}

double term(const Family& f, double y, double m) { return y * m - cumulant(f, m); }

}  // namespace

double weighted_loglik(const ObservedMatrix& data, const Matrix& m) {
    require_shape(data, m.rows(), m.cols());
    const Index n = data.rows();
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& e : data.row(i)) s += term(data.family(e.j), e.y, m(e.i, e.j));
        partial[static_cast<std::size_t>(i)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

double weighted_loglik(const ObservedMatrix& data, const Matrix& theta, const Matrix& a) {
    require_shape(data, theta.rows(), a.rows());
    if (theta.cols() != a.cols()) throw std::invalid_argument("factor ranks differ");
    const Index n = data.rows();
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& e : data.row(i))
            s += term(data.family(e.j), e.y, theta.row(i).dot(a.row(e.j)));
        partial[static_cast<std::size_t>(i)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

Matrix loglik_gradient(const ObservedMatrix& data, const Matrix& m) {
    require_shape(data, m.rows(), m.cols());
    Matrix g = Matrix::Zero(m.rows(), m.cols());
    const Index n = data.rows();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        for (const auto& e : data.row(i)) g(e.i, e.j) = e.y - mean(data.family(e.j), m(e.i, e.j));
    }
    return g;
}

double row_objective(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& theta_i) {
    double s = 0.0;
    for (const auto& e : data.row(i)) s += term(data.family(e.j), e.y, a.row(e.j).dot(theta_i));
    return s;
}

double col_objective(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& a_j) {
    double s = 0.0;
    const Family& f = data.family(j);
    for (const auto& e : data.col(j)) s += term(f, e.y, theta.row(e.i).dot(a_j));
    return s;
}

Vector score_row(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& theta_i) {
    Vector g = Vector::Zero(theta_i.size());
    for (const auto& e : data.row(i)) {
        const double resid = e.y - mean(data.family(e.j), a.row(e.j).dot(theta_i));
        g += resid * a.row(e.j).transpose();
    }
    return g;
}

Vector score_col(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& a_j) {
    Vector g = Vector::Zero(a_j.size());
    const Family& f = data.family(j);
    for (const auto& e : data.col(j)) {
        const double resid = e.y - mean(f, theta.row(e.i).dot(a_j));
        g += resid * theta.row(e.i).transpose();
    }
    return g;
}

namespace serial {

double weighted_loglik(const ObservedMatrix& data, const Matrix& m) {
    require_shape(data, m.rows(), m.cols());
    double total = 0.0;
    for (const auto& e : data.entries()) total += term(data.family(e.j), e.y, m(e.i, e.j));
    return total;
}

Matrix loglik_gradient(const ObservedMatrix& data, const Matrix& m) {
    require_shape(data, m.rows(), m.cols());
    Matrix g = Matrix::Zero(m.rows(), m.cols());
    for (const auto& e : data.entries()) g(e.i, e.j) = e.y - mean(data.family(e.j), m(e.i, e.j));
    return g;
}

}  // namespace serial

}  // namespace glfm
