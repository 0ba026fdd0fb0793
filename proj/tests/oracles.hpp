#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "glfm/observed.hpp"

namespace oracle {

using glfm::Index;
using glfm::Matrix;
using glfm::Vector;

inline double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

// Direct pmf: C(k, y) p^y (1-p)^(k-y) by repeated multiplication.
inline double binomial_pmf(int k, int y, double prob) {
    double c = 1.0;
    for (int t = 1; t <= y; ++t) c = c * (k - y + t) / t;
    return c * std::pow(prob, y) * std::pow(1.0 - prob, k - y);
}

inline double frobenius_scaled(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    return std::sqrt(s / static_cast<double>(a.rows() * a.cols()));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j) - b(i, j)));
    return s;
}

inline double max_row_norm(const Matrix& x) {
    double best = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (Index j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

// Per-row clip to radius c.
inline Matrix row_clip(const Matrix& x, double c) {
    Matrix out = x;
    for (Index i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (Index j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
        s = std::sqrt(s);
        if (s > c)
            for (Index j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * (c / s);
    }
    return out;
}

// Singular values from the eigenvalues of M^T M, descending.
inline Vector singular_values_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::vector<double> v(ev.data(), ev.data() + ev.size());
    std::sort(v.begin(), v.end(), std::greater<>());
    return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

// Projection of a non-negative spectrum onto {s >= 0, sum s <= radius}
// by bisection on the soft threshold.
inline Vector l1_project_bisect(const Vector& s, double radius) {
    if (s.cwiseMax(0.0).sum() <= radius) return s.cwiseMax(0.0);
    double lo = 0.0, hi = s.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((s.array() - mid).cwiseMax(0.0).sum() > radius) lo = mid;
        else hi = mid;
    }
    return (s.array() - 0.5 * (lo + hi)).cwiseMax(0.0).matrix();
}

// Nuclear-ball projection with singular vectors from the symmetric
// eigen-decomposition of M^T M (requires distinct, non-zero spectrum).
inline Matrix nuclear_project_eig(const Matrix& m, double radius) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    const Index k = m.cols();
    Vector sig(k);
    Matrix v(m.cols(), k), u(m.rows(), k);
    for (Index t = 0; t < k; ++t) {
        const Index src = k - 1 - t;  // ascending -> descending
        sig(t) = std::sqrt(std::max(es.eigenvalues()(src), 0.0));
        v.col(t) = es.eigenvectors().col(src);
        u.col(t) = m * v.col(t) / sig(t);
    }
    const Vector proj = l1_project_bisect(sig, radius);
    return u * proj.asDiagonal() * v.transpose();
}

// Central differences of a scalar function of a vector.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                               double h = 1e-5) {
    Vector g(x.size());
    for (Index k = 0; k < x.size(); ++k) {
        Vector xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        g(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// sum over entries of log-likelihood terms, recomputed from scratch.
inline double loglik_loop(const glfm::ObservedMatrix& data, const Matrix& m) {
    double s = 0.0;
    for (const auto& e : data.entries()) {
        const auto& f = data.family(e.j);
        const double x = m(e.i, e.j);
        double b = 0.0;
        switch (f.kind) {
            case glfm::Family::Kind::Normal: b = x * x / 2; break;
            case glfm::Family::Kind::Binomial: b = f.trials * std::log(1.0 + std::exp(x)); break;
            case glfm::Family::Kind::Poisson: b = std::exp(x); break;
        }
        s += e.y * x - b;
    }
    return s;
}

// Maximizer of a 2-D concave function over [-3, 3]^2: dense grid, then
// alternating coordinate bisection on the sign of the partial derivative.
inline Vector grid_maximize_2d(const std::function<double(const Vector&)>& f) {
    Vector best(2);
    double fbest = -INFINITY;
    const int steps = 241;
    for (int a = 0; a < steps; ++a) {
        for (int b = 0; b < steps; ++b) {
            Vector x(2);
            x << -3.0 + 6.0 * a / (steps - 1), -3.0 + 6.0 * b / (steps - 1);
            const double v = f(x);
            if (v > fbest) {
                fbest = v;
                best = x;
            }
        }
    }
    for (int sweep = 0; sweep < 60; ++sweep) {
        for (int k = 0; k < 2; ++k) {
            double lo = best(k) - 0.5, hi = best(k) + 0.5;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                Vector xp = best, xm = best;
                xp(k) = mid + 1e-7;
                xm(k) = mid - 1e-7;
                if (f(xp) > f(xm)) lo = mid;
                else hi = mid;
            }
            best(k) = 0.5 * (lo + hi);
        }
    }
    return best;
}

// Random observed matrix with the given families; each cell kept with prob pi,
// y drawn from the family at m(i, j).
inline glfm::ObservedMatrix random_data(const Matrix& m, const std::vector<glfm::Family>& fams, double pi,
                                        unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<glfm::Entry> entries;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (u(gen) >= pi) continue;
            const auto& f = fams[static_cast<std::size_t>(j)];
            double y = 0.0;
            switch (f.kind) {
                case glfm::Family::Kind::Normal: y = m(i, j) + std::normal_distribution<double>(0.0, 1.0)(gen); break;
                case glfm::Family::Kind::Binomial:
                    y = std::binomial_distribution<int>(f.trials, sigmoid(m(i, j)))(gen);
                    break;
                case glfm::Family::Kind::Poisson: y = std::poisson_distribution<int>(std::exp(m(i, j)))(gen); break;
            }
            entries.push_back({i, j, y});
        }
    }
    return glfm::ObservedMatrix(m.rows(), m.cols(), fams, std::move(entries));
}

inline Matrix random_matrix(Index n, Index p, unsigned seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) m(i, j) = u(gen);
    return m;
}

// Families cycling normal, binomial(k=3), poisson over the columns.
inline std::vector<glfm::Family> mixed_families(Index p) {
    std::vector<glfm::Family> f;
    for (Index j = 0; j < p; ++j) {
        switch (j % 3) {
            case 0: f.push_back(glfm::Family::normal()); break;
            case 1: f.push_back(glfm::Family::binomial(3)); break;
            default: f.push_back(glfm::Family::poisson()); break;
        }
    }
    return f;
}

}  // namespace oracle
