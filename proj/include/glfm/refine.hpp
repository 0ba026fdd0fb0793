#pragma once

// Refinement of an F-consistent estimate into an entrywise-consistent one.
//
//   refine_no_split     top-r right singular vectors of M_hat, clipped to
//                       ||.||_{2->inf} <= C2, then one row sweep and one
//                       column sweep of the estimating equations.
//   refine_split        the same with rows split in two halves; loadings
//                       learned on one half are used to refit the other.
//   refine_multi_split  average of `tot` independent split refinements.

#include <functional>
#include <vector>

#include "glfm/matrix_ops.hpp"
#include "glfm/random.hpp"
#include "glfm/solvers.hpp"

namespace glfm {

struct RowSplit {
    std::vector<Index> n1;  // ascending
    std::vector<Index> n2;  // ascending
};

struct RefineConfig {
    double c2 = 1.0;
    Index rank = 1;
    NewtonConfig newton;
    int tot = 5;
    // Strict mode throws SolverError on any failed solve. Lenient mode keeps
    // the trust-region boundary point of diverged solves and retries
    // singular ones with a small Hessian ridge; empty rows stay fatal.
    bool lenient = false;
};

// Row-block data -> initial estimate of that block's signal rows.
using InitialFitter = std::function<Matrix(const ObservedMatrix&)>;

// 2 sqrt(r / p)
double default_c2(Index rank, Index p);

Matrix refine_no_split(const ObservedMatrix& data, const Matrix& m_hat, const RefineConfig& cfg);

// Each row lands in n1 with probability 1/2; redrawn while a side is empty.
RowSplit split_rows(Index n, RandomStream& rng);

// m_hat_n1 / m_hat_n2 hold the initial estimates for the rows of n1 / n2 and
// must have been computed from those rows' data only.
Matrix refine_split(const ObservedMatrix& data, const Matrix& m_hat_n1, const Matrix& m_hat_n2,
                    const RowSplit& split, const RefineConfig& cfg);

// One split refinement with block fits done by `fitter`; the split is drawn
// from rng.derive(0), the same stream refine_multi_split uses first.
Matrix refine_split_with(const ObservedMatrix& data, const InitialFitter& fitter,
                         const RefineConfig& cfg, const RandomStream& rng);

// Replicate k draws its split from rng.derive(k).
Matrix refine_multi_split(const ObservedMatrix& data, const InitialFitter& fitter,
                          const RefineConfig& cfg, const RandomStream& rng);

// The factors produced by the row and column sweeps of the procedures above.
struct SweepResult {
    Matrix theta;
    Matrix a;
    Matrix a_hat;  // loadings after the two-to-infinity projection
};

// Steps shared by all three procedures: loadings from the SVD of `basis`,
// row solves on `data` initialized at m_init * V, then column solves.
SweepResult refine_sweep(const ObservedMatrix& data, const Matrix& basis, const Matrix& m_init,
                         const RefineConfig& cfg);

}  // namespace glfm
