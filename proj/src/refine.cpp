#include "glfm/refine.hpp"

#include <cmath>
#include <stdexcept>

namespace glfm {

double default_c2(Index rank, Index p) {
    return 2.0 * std::sqrt(static_cast<double>(rank) / static_cast<double>(p));
}

namespace {

constexpr double kLenientRidge = 1e-6;

// Applies the failure policy to a batch in place.
template <class Retry>
void settle(BatchSolve& batch, char axis, const RefineConfig& cfg, Retry&& retry) {
    for (std::size_t k = 0; k < batch.reports.size(); ++k) {
        auto& rep = batch.reports[k];
        if (rep.converged()) continue;
        const Index idx = static_cast<Index>(k);
        if (!cfg.lenient || rep.status == SolveStatus::EmptyRow) throw SolverError(rep.status, axis, idx);
        if (rep.status == SolveStatus::SingularHessian) {
            NewtonConfig ridged = cfg.newton;
            ridged.hessian_ridge = kLenientRidge;
            rep = retry(idx, ridged);
            if (rep.status == SolveStatus::SingularHessian || rep.status == SolveStatus::EmptyRow)
                throw SolverError(rep.status, axis, idx);
        }
        batch.solutions.row(idx) = rep.solution.transpose();
    }
}

}  // namespace

SweepResult refine_sweep(const ObservedMatrix& data, const Matrix& basis, const Matrix& m_init,
                         const RefineConfig& cfg) {
    if (!(cfg.c2 > 0.0)) throw std::invalid_argument("C2 must be positive");
    if (basis.cols() != data.cols() || m_init.cols() != data.cols() || m_init.rows() != data.rows())
        throw std::invalid_argument("initial estimate shape does not match data");

    const SvdTriple svd = top_r_svd(basis, cfg.rank);
    SweepResult out;
    out.a_hat = project_two_to_inf(svd.v, cfg.c2);

    const Matrix theta_init = m_init * svd.v;
    BatchSolve rows = solve_all_rows(data, out.a_hat, theta_init, cfg.newton);
    settle(rows, 'r', cfg, [&](Index i, const NewtonConfig& nc) {
        return solve_row(data, i, out.a_hat, theta_init.row(i).transpose(), nc);
    });
    out.theta = std::move(rows.solutions);

    BatchSolve cols = solve_all_cols(data, out.theta, out.a_hat, cfg.newton);
    settle(cols, 'c', cfg, [&](Index j, const NewtonConfig& nc) {
        return solve_col(data, j, out.theta, out.a_hat.row(j).transpose(), nc);
    });
    out.a = std::move(cols.solutions);
    return out;
}

Matrix refine_no_split(const ObservedMatrix& data, const Matrix& m_hat, const RefineConfig& cfg) {
    if (m_hat.rows() != data.rows() || m_hat.cols() != data.cols())
        throw std::invalid_argument("initial estimate shape does not match data");
    const SweepResult s = refine_sweep(data, m_hat, m_hat, cfg);
    return s.theta * s.a.transpose();
}

RowSplit split_rows(Index n, RandomStream& rng) {
    if (n < 2) throw std::invalid_argument("row splitting needs at least two rows");
    for (;;) {
        RowSplit s;
        for (Index i = 0; i < n; ++i) (rng.bernoulli(0.5) ? s.n1 : s.n2).push_back(i);
        if (!s.n1.empty() && !s.n2.empty()) return s;
    }
}

Matrix refine_split(const ObservedMatrix& data, const Matrix& m_hat_n1, const Matrix& m_hat_n2,
                    const RowSplit& split, const RefineConfig& cfg) {
    const auto n1 = static_cast<Index>(split.n1.size());
    const auto n2 = static_cast<Index>(split.n2.size());
    if (n1 + n2 != data.rows()) throw std::invalid_argument("split does not cover the data rows");
    if (m_hat_n1.rows() != n1 || m_hat_n2.rows() != n2 || m_hat_n1.cols() != data.cols() ||
        m_hat_n2.cols() != data.cols())
        throw std::invalid_argument("block estimates do not match the split");

    Matrix out(data.rows(), data.cols());
    auto refit = [&](const Matrix& basis, const std::vector<Index>& target, const Matrix& m_target) {
        const ObservedMatrix block = data.row_block(target);
        const SweepResult s = refine_sweep(block, basis, m_target, cfg);
        const Matrix fitted = s.theta * s.a.transpose();
        for (std::size_t k = 0; k < target.size(); ++k)
            out.row(target[k]) = fitted.row(static_cast<Index>(k));
    };
    // Loadings from one half refit the other half.
    refit(m_hat_n1, split.n2, m_hat_n2);
    refit(m_hat_n2, split.n1, m_hat_n1);
    return out;
}

namespace {

Matrix split_replicate(const ObservedMatrix& data, const InitialFitter& fitter, const RefineConfig& cfg,
                       RandomStream stream) {
    const RowSplit split = split_rows(data.rows(), stream);
    const Matrix m1 = fitter(data.row_block(split.n1));
    const Matrix m2 = fitter(data.row_block(split.n2));
    return refine_split(data, m1, m2, split, cfg);
}

}  // namespace

Matrix refine_split_with(const ObservedMatrix& data, const InitialFitter& fitter,
                         const RefineConfig& cfg, const RandomStream& rng) {
    return split_replicate(data, fitter, cfg, rng.derive(0));
}

Matrix refine_multi_split(const ObservedMatrix& data, const InitialFitter& fitter,
                          const RefineConfig& cfg, const RandomStream& rng) {
    if (cfg.tot < 1) throw std::invalid_argument("tot must be at least 1");
    Matrix sum = split_replicate(data, fitter, cfg, rng.derive(0));
    for (int k = 1; k < cfg.tot; ++k)
        sum += split_replicate(data, fitter, cfg, rng.derive(static_cast<std::uint64_t>(k)));
    return sum / static_cast<double>(cfg.tot);
}

}  // namespace glfm
