#pragma once

// F-consistent initial estimators.
//
// CJMLE:  max l(theta a^T)  s.t. ||theta||_{2->inf} <= C, ||a||_{2->inf} <= C
// NBE:    max l(M)          s.t. ||M||_max <= rho, ||M||_* <= rho sqrt(r n p)

#include <stdexcept>
#include <vector>

#include "glfm/matrix_ops.hpp"
#include "glfm/solvers.hpp"

namespace glfm {

struct CjmleConfig {
    double c = 1.0;
    Index rank = 1;
    double outer_tol = 1e-6;  // on relative objective change
    int max_outer = 500;
    NewtonConfig newton;
};

struct CjmleResult {
    FactorPair factors;
    Matrix m_hat;
    // Objective at the initial point and after every outer iteration.
    std::vector<double> objective_trace;
    int outer_iterations = 0;
    bool converged = false;
};

struct NbeConfig {
    double rho = 1.0;
    Index rank = 1;
    double step_init = 1.0;
    int max_iter = 2000;
    double obj_tol = 1e-7;
    int dykstra_iters = 50;
    double dykstra_tol = 1e-8;
};

struct NbeResult {
    Matrix m_hat;
    // Objective at the initial point and after every accepted step.
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

// Raised when an outer CJMLE iteration keeps lowering the objective.
class NoProgressError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// C = sqrt(r), rho = r
double default_cjmle_c(Index rank);
double default_nbe_rho(Index rank);

// Alternating projected block maximization started from `init`.
// Throws SolverError on empty rows/columns, NoProgressError if the objective
// decreases by more than 1e-9 in three consecutive outer iterations.
CjmleResult cjmle_fit(const ObservedMatrix& data, const CjmleConfig& cfg, const FactorPair& init);

// Starts from init_from_data projected onto the constraint set.
CjmleResult cjmle_fit(const ObservedMatrix& data, const CjmleConfig& cfg);

// Projected gradient ascent from the zero matrix.
NbeResult nbe_fit(const ObservedMatrix& data, const NbeConfig& cfg);

// Entrywise clamp to [-rho, rho].
Matrix project_max_norm(const Matrix& m, double rho);

// Euclidean projection of a non-negative vector onto {s >= 0, sum s <= radius}.
Vector project_l1_ball_nonneg(const Vector& s, double radius);

// Frobenius projection onto {||X||_* <= radius}.
Matrix project_nuclear_ball(const Matrix& m, double radius);

// Frobenius projection onto the intersection of the max-norm box and the
// nuclear ball by Dykstra's alternating projections. The result always lies
// in both sets: after the alternation stops it is clamped to the box and, if
// needed, shrunk toward zero into the ball (both sets contain the origin).
Matrix project_box_nuclear(const Matrix& m, double rho, double radius, int max_iters, double tol);

// Warm start: observed cells mapped through the inverse mean link with
// additive smoothing, unobserved cells zero, then theta = U sqrt(D),
// a = V sqrt(D) from the top-r SVD.
FactorPair init_from_data(const ObservedMatrix& data, Index r);

// The link-space matrix init_from_data factorizes.
Matrix link_space_matrix(const ObservedMatrix& data);

}  // namespace glfm
