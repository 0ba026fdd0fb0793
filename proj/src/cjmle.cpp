#include <cmath>

#include "glfm/initial.hpp"
#include "glfm/likelihood.hpp"

namespace glfm {

double default_cjmle_c(Index rank) { return std::sqrt(static_cast<double>(rank)); }
double default_nbe_rho(Index rank) { return static_cast<double>(rank); }

Matrix link_space_matrix(const ObservedMatrix& data) {
    Matrix z = Matrix::Zero(data.rows(), data.cols());
    for (const auto& e : data.entries()) {
        const Family& f = data.family(e.j);
        double v = e.y;
        switch (f.kind) {
            case Family::Kind::Normal: break;
            case Family::Kind::Binomial: {
                const double prob = (e.y + 0.5) / (f.trials + 1.0);
                v = std::log(prob / (1.0 - prob));
                break;
            }
            case Family::Kind::Poisson: v = std::log(e.y + 0.5); break;
        }
        z(e.i, e.j) = v;
    }
    return z;
}

FactorPair init_from_data(const ObservedMatrix& data, Index r) {
    const SvdTriple svd = top_r_svd(link_space_matrix(data), r);
    const Vector root = svd.d.cwiseSqrt();
    return {svd.u * root.asDiagonal(), svd.v * root.asDiagonal()};
}

namespace {

constexpr double kRidge = 1e-6;
constexpr int kSafeguardSteps = 40;

// One projected block update of a single factor row. `objective` evaluates
// the partial log-likelihood; the returned row never scores below `old`.
template <class Solve, class Objective>
Vector block_update(const Vector& old, double c, const NewtonConfig& newton, Solve&& solve,
                    Objective&& objective, char axis, Index index) {
    SolveReport rep = solve(old, newton);
    if (rep.status == SolveStatus::EmptyRow) throw SolverError(rep.status, axis, index);
    if (rep.status == SolveStatus::SingularHessian) {
        NewtonConfig ridged = newton;
        ridged.hessian_ridge = kRidge;
        rep = solve(old, ridged);
        if (rep.status == SolveStatus::SingularHessian) return old;
    }
    // A diverged solve still carries the boundary point of its trust region.
    Vector cand = rep.solution;
    const double norm = cand.norm();
    if (norm > c) {
        cand *= c / norm;
        while (cand.norm() > c) cand *= 1.0 - 0x1p-52;
    }

    const double f_old = objective(old);
    if (objective(cand) >= f_old) return cand;
    // The ball is convex, so the segment back to the old row stays feasible.
    double t = 0.5;
    for (int k = 0; k < kSafeguardSteps; ++k, t *= 0.5) {
        Vector mid = old + t * (cand - old);
        if (objective(mid) >= f_old) return mid;
    }
    return old;
}

void update_rows(const ObservedMatrix& data, Matrix& theta, const Matrix& a, const CjmleConfig& cfg) {
    const Index n = data.rows();
#pragma omp parallel for schedule(dynamic, 8)
    for (Index i = 0; i < n; ++i) {
        const Vector old = theta.row(i).transpose();
        const Vector next = block_update(
            old, cfg.c, cfg.newton,
            [&](const Vector& init, const NewtonConfig& nc) { return solve_row(data, i, a, init, nc); },
            [&](const Vector& v) { return row_objective(data, i, a, v); }, 'r', i);
        theta.row(i) = next.transpose();
    }
}

void update_cols(const ObservedMatrix& data, const Matrix& theta, Matrix& a, const CjmleConfig& cfg) {
    const Index p = data.cols();
#pragma omp parallel for schedule(dynamic, 8)
    for (Index j = 0; j < p; ++j) {
        const Vector old = a.row(j).transpose();
        const Vector next = block_update(
            old, cfg.c, cfg.newton,
            [&](const Vector& init, const NewtonConfig& nc) { return solve_col(data, j, theta, init, nc); },
            [&](const Vector& v) { return col_objective(data, j, theta, v); }, 'c', j);
        a.row(j) = next.transpose();
    }
}

}  // namespace

CjmleResult cjmle_fit(const ObservedMatrix& data, const CjmleConfig& cfg, const FactorPair& init) {
    if (!(cfg.c > 0.0)) throw std::invalid_argument("CJMLE bound C must be positive");
    if (init.theta.rows() != data.rows() || init.a.rows() != data.cols() ||
        init.theta.cols() != cfg.rank || init.a.cols() != cfg.rank)
        throw std::invalid_argument("initial factors do not match data shape and rank");
    for (Index i = 0; i < data.rows(); ++i)
        if (data.row_count(i) == 0) throw SolverError(SolveStatus::EmptyRow, 'r', i);
    for (Index j = 0; j < data.cols(); ++j)
        if (data.col_count(j) == 0) throw SolverError(SolveStatus::EmptyRow, 'c', j);

    CjmleResult out;
    Matrix theta = project_two_to_inf(init.theta, cfg.c);
    Matrix a = project_two_to_inf(init.a, cfg.c);

    double f = weighted_loglik(data, theta, a);
    out.objective_trace.push_back(f);
    int decreasing = 0;
    for (int it = 0; it < cfg.max_outer; ++it) {
        update_rows(data, theta, a, cfg);
        update_cols(data, theta, a, cfg);
        const double next = weighted_loglik(data, theta, a);
        out.objective_trace.push_back(next);
        out.outer_iterations = it + 1;

        if (next < f - 1e-9) {
            if (++decreasing >= 3)
                throw NoProgressError("CJMLE objective decreased in 3 consecutive outer iterations");
        } else {
            decreasing = 0;
        }
        const double rel = std::abs(next - f) / std::max(1.0, std::abs(f));
        f = next;
        if (rel < cfg.outer_tol) {
            out.converged = true;
            break;
        }
    }
    out.m_hat = theta * a.transpose();
    out.factors = {std::move(theta), std::move(a)};
    return out;
}

CjmleResult cjmle_fit(const ObservedMatrix& data, const CjmleConfig& cfg) {
    return cjmle_fit(data, cfg, init_from_data(data, cfg.rank));
}

}  // namespace glfm
