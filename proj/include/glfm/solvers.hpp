#pragma once

// Damped Newton for the per-row and per-column estimating equations
//
//   sum_j omega_ij {y_ij - b'_j(a_j^T theta_i)} a_j = 0      (rows)
//   sum_i omega_ij {y_ij - b'_j(a_j^T theta_i)} theta_i = 0  (columns)
//
// Each is the stationarity condition of a strictly concave partial
// log-likelihood, so Newton with an Armijo backtracking line search is
// globally convergent whenever the maximizer is finite.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glfm/observed.hpp"

namespace glfm {

struct NewtonConfig {
    double grad_tol = 1e-9;
    int max_iter = 100;
    double step_shrink = 0.5;
    int max_backtracks = 50;
    // Iterates are confined to ||x|| <= trust_radius. Unset means
    // 10 * max(||init||, 1) * max(1, 1 / s) where s is the largest row norm
    // of the design (the loadings of the observed entries).
    std::optional<double> trust_radius;
    // Added to the diagonal of the negative Hessian. Zero solves the
    // estimating equation exactly; callers may set it to recover from
    // rank-deficient designs.
    double hessian_ridge = 0.0;
};

enum class SolveStatus { Converged, EmptyRow, SingularHessian, Diverged };

std::string to_string(SolveStatus s);

struct SolveReport {
    Vector solution;
    int iterations = 0;
    double final_grad_norm = 0.0;
    SolveStatus status = SolveStatus::Converged;
    // Objective at the start and after every accepted step.
    std::vector<double> objective_trace;

    bool converged() const { return status == SolveStatus::Converged; }
};

struct BatchSolve {
    Matrix solutions;  // one solution per row (rows) or per column (columns)
    std::vector<SolveReport> reports;

    bool all_converged() const;
    // Index of the first failed solve, or -1.
    Index first_failure() const;
};

class SolverError : public std::runtime_error {
public:
    SolverError(SolveStatus status, char axis, Index index);

    SolveStatus status() const { return status_; }
    char axis() const { return axis_; }  // 'r' or 'c'
    Index index() const { return index_; }

private:
    SolveStatus status_;
    char axis_;
    Index index_;
};

SolveReport solve_row(const ObservedMatrix& data, Index i, const Matrix& a, const Vector& init,
                      const NewtonConfig& cfg = {});
SolveReport solve_col(const ObservedMatrix& data, Index j, const Matrix& theta, const Vector& init,
                      const NewtonConfig& cfg = {});

// Independent solves, run concurrently. Failures are recorded per row.
BatchSolve solve_all_rows(const ObservedMatrix& data, const Matrix& a, const Matrix& inits,
                          const NewtonConfig& cfg = {});
BatchSolve solve_all_cols(const ObservedMatrix& data, const Matrix& theta, const Matrix& inits,
                          const NewtonConfig& cfg = {});

namespace serial {

BatchSolve solve_all_rows(const ObservedMatrix& data, const Matrix& a, const Matrix& inits,
                          const NewtonConfig& cfg = {});
BatchSolve solve_all_cols(const ObservedMatrix& data, const Matrix& theta, const Matrix& inits,
                          const NewtonConfig& cfg = {});

}  // namespace serial

}  // namespace glfm
