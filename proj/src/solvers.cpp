#include "glfm/solvers.hpp"

#include <cmath>
#include <limits>

namespace glfm {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::EmptyRow: return "empty";
        case SolveStatus::SingularHessian: return "singular-hessian";
        case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

SolverError::SolverError(SolveStatus status, char axis, Index index)
    : std::runtime_error(std::string(axis == 'r' ? "row " : "column ") + std::to_string(index) +
                         ": solve failed (" + to_string(status) + ")"),
      status_(status),
      axis_(axis),
      index_(index) {}

bool BatchSolve::all_converged() const { return first_failure() < 0; }

Index BatchSolve::first_failure() const {
    for (std::size_t k = 0; k < reports.size(); ++k)
        if (!reports[k].converged()) return static_cast<Index>(k);
    return -1;
}

namespace {

// A GLM without intercept: maximize sum_k y_k * x_k^T b - f_k(x_k^T b).
struct Design {
    Matrix x;
    Vector y;
    std::vector<Family> fam;
};

double objective(const Design& d, const Vector& beta) {
    const Vector eta = d.x * beta;
    double s = 0.0;
    for (Index k = 0; k < eta.size(); ++k) s += d.y(k) * eta(k) - cumulant(d.fam[static_cast<std::size_t>(k)], eta(k));
    return s;
}

SolveReport newton_maximize(const Design& d, const Vector& init, const NewtonConfig& cfg) {
    SolveReport rep;
    rep.solution = init;
    if (d.x.rows() == 0) {
        rep.status = SolveStatus::EmptyRow;
        return rep;
    }
    const Index r = init.size();
    // Measured against the design so that small loadings do not make
    // ordinary finite solutions look divergent.
    const double design_scale = d.x.rowwise().norm().maxCoeff();
    const double radius = cfg.trust_radius.value_or(10.0 * std::max(init.norm(), 1.0) *
                                                    std::max(1.0, design_scale > 0.0 ? 1.0 / design_scale : 1.0));
    constexpr double armijo = 1e-4;

    Vector beta = init;
    double f = objective(d, beta);
    rep.objective_trace.push_back(f);

    Vector w(d.x.rows());
    Vector resid(d.x.rows());
    for (int iter = 0;; ++iter) {
        const Vector eta = d.x * beta;
        for (Index k = 0; k < eta.size(); ++k) {
            const Family& fam = d.fam[static_cast<std::size_t>(k)];
            resid(k) = d.y(k) - mean(fam, eta(k));
            w(k) = variance(fam, eta(k));
        }
        const Vector g = d.x.transpose() * resid;
        rep.final_grad_norm = g.norm();
        rep.iterations = iter;
        rep.solution = beta;
        if (rep.final_grad_norm <= cfg.grad_tol) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        if (iter >= cfg.max_iter) {
            rep.status = SolveStatus::Diverged;
            return rep;
        }

        Matrix h = d.x.transpose() * w.asDiagonal() * d.x;
        if (cfg.hessian_ridge > 0.0) h.diagonal().array() += cfg.hessian_ridge;
        Eigen::LDLT<Matrix> ldlt(h);
        const Vector piv = ldlt.vectorD();
        const double dmax = piv.maxCoeff();
        if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || piv.minCoeff() <= 1e-12 * dmax) {
            rep.status = SolveStatus::SingularHessian;
            return rep;
        }
        const Vector step = ldlt.solve(g);
        const double predicted = g.dot(step);

        // Below the resolution of f the Armijo test is meaningless; we are
        // then deep in the quadratic regime and take the full step.
        const bool roundoff = predicted <= 1e-13 * (1.0 + std::abs(f));
        double t = 1.0;
        bool accepted = false;
        Vector cand(r);
        double fc = f;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            cand = beta + t * step;
            if (cand.allFinite()) {
                fc = objective(d, cand);
                if (roundoff || fc >= f + armijo * t * predicted) {
                    accepted = true;
                    break;
                }
            }
            t *= cfg.step_shrink;
        }
        if (!accepted) {
            rep.status = SolveStatus::Diverged;
            return rep;
        }
        const double cand_norm = cand.norm();
        if (cand_norm > radius) {
            rep.solution = cand * (radius / cand_norm);
            rep.iterations = iter + 1;
            rep.status = SolveStatus::Diverged;
            return rep;
        }
        beta = cand;
        f = fc;
        rep.objective_trace.push_back(f);
    }
}

Design row_design(const ObservedMatrix& data, Index i, const Matrix& a) {
    const auto row = data.row(i);
    Design d{Matrix(static_cast<Index>(row.size()), a.cols()), Vector(static_cast<Index>(row.size())), {}};
    d.fam.reserve(row.size());
    Index k = 0;
    for (const auto& e : row) {
        d.x.row(k) = a.row(e.j);
        d.y(k) = e.y;
        d.fam.push_back(data.family(e.j));
        ++k;
    }
    return d;
}

Design col_design(const ObservedMatrix& data, Index j, const Matrix& theta) {
    const auto col = data.col(j);
    Design d{Matrix(static_cast<Index>(col.size()), theta.cols()), Vector(static_cast<Index>(col.size())),
             std::vector<Family>(col.size(), data.family(j))};
    Index k = 0;
    for (const auto& e : col) {
        d.x.row(k) = theta.row(e.i);
        d.y(k) = e.y;
        ++k;
    }
    return d;
}

void check_rows(const ObservedMatrix& data, const Matrix& a, Index r) {
    if (a.rows() != data.cols()) throw std::invalid_argument("loading matrix must have one row per column");
    if (a.cols() != r) throw std::invalid_argument("initial vector rank does not match loadings");
}

void check_cols(const ObservedMatrix& data, const Matrix& theta, Index r) {
    if (theta.rows() != data.rows()) throw std::invalid_argument("score matrix must have one row per data row");
    if (theta.cols() != r) throw std::invalid_argument("initial vector rank does not match scores");
}

BatchSolve make_batch(Index count, Index r) {
    BatchSolve out;
    out.solutions = Matrix::Zero(count, r);
    out.reports.resize(static_cast<std::size_t>(count));
    return out;
}

}  // namespace

SolveReport solve_row(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& init,
                      const NewtonConfig& cfg) {
    if (i < 0 || i >= data.rows()) throw std::out_of_range("row index out of range");
    check_rows(data, a, init.size());
    return newton_maximize(row_design(data, i, a), init, cfg);
}

SolveReport solve_col(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& init,
                      const NewtonConfig& cfg) {
    if (j < 0 || j >= data.cols()) throw std::out_of_range("column index out of range");
    check_cols(data, theta, init.size());
    return newton_maximize(col_design(data, j, theta), init, cfg);
}

BatchSolve solve_all_rows(const ObservedMatrix& data, const Matrix& a, const Matrix& inits,
                          const NewtonConfig& cfg) {
    if (inits.rows() != data.rows()) throw std::invalid_argument("need one initial vector per row");
    check_rows(data, a, inits.cols());
    BatchSolve out = make_batch(data.rows(), inits.cols());
    const Index n = data.rows();
#pragma omp parallel for schedule(dynamic, 8)
    for (Index i = 0; i < n; ++i) {
        auto rep = newton_maximize(row_design(data, i, a), inits.row(i).transpose(), cfg);
        out.solutions.row(i) = rep.solution.transpose();
        out.reports[static_cast<std::size_t>(i)] = std::move(rep);
    }
    return out;
}

BatchSolve solve_all_cols(const ObservedMatrix& data, const Matrix& theta, const Matrix& inits,
                          const NewtonConfig& cfg) {
    if (inits.rows() != data.cols()) throw std::invalid_argument("need one initial vector per column");
    check_cols(data, theta, inits.cols());
    BatchSolve out = make_batch(data.cols(), inits.cols());
    const Index p = data.cols();
#pragma omp parallel for schedule(dynamic, 8)
    for (Index j = 0; j < p; ++j) {
        auto rep = newton_maximize(col_design(data, j, theta), inits.row(j).transpose(), cfg);
        out.solutions.row(j) = rep.solution.transpose();
        out.reports[static_cast<std::size_t>(j)] = std::move(rep);
    }
    return out;
}

namespace serial {

BatchSolve solve_all_rows(const ObservedMatrix& data, const Matrix& a, const Matrix& inits,
                          const NewtonConfig& cfg) {
    if (inits.rows() != data.rows()) throw std::invalid_argument("need one initial vector per row");
    BatchSolve out = make_batch(data.rows(), inits.cols());
    for (Index i = 0; i < data.rows(); ++i) {
        auto rep = solve_row(data, i, a, inits.row(i).transpose(), cfg);
        out.solutions.row(i) = rep.solution.transpose();
        out.reports[static_cast<std::size_t>(i)] = std::move(rep);
    }
    return out;
}

BatchSolve solve_all_cols(const ObservedMatrix& data, const Matrix& theta, const Matrix& inits,
                          const NewtonConfig& cfg) {
    if (inits.rows() != data.cols()) throw std::invalid_argument("need one initial vector per column");
    BatchSolve out = make_batch(data.cols(), inits.cols());
    for (Index j = 0; j < data.cols(); ++j) {
        auto rep = solve_col(data, j, theta, inits.row(j).transpose(), cfg);
        out.solutions.row(j) = rep.solution.transpose();
        out.reports[static_cast<std::size_t>(j)] = std::move(rep);
    }
    return out;
}

}  // namespace serial

}  // namespace glfm
