#include <cmath>

#include "glfm/initial.hpp"
#include "glfm/likelihood.hpp"

namespace glfm {

NbeResult nbe_fit(const ObservedMatrix& data, const NbeConfig& cfg) {
    if (!(cfg.rho > 0.0)) throw std::invalid_argument("NBE bound rho must be positive");
    if (cfg.rank < 1) throw std::invalid_argument("NBE rank must be positive");
    if (data.rows() < 1 || data.cols() < 1) throw std::invalid_argument("NBE needs a non-empty matrix");

    const double radius = cfg.rho * std::sqrt(static_cast<double>(cfg.rank) * data.rows() * data.cols());
    constexpr int kMaxBacktracks = 60;

    NbeResult out;
    Matrix m = Matrix::Zero(data.rows(), data.cols());
    double f = weighted_loglik(data, m);
    out.objective_trace.push_back(f);
    double step = cfg.step_init;

    for (int it = 0; it < cfg.max_iter; ++it) {
        const Matrix grad = loglik_gradient(data, m);
        if (grad.squaredNorm() == 0.0) {
            out.converged = true;
            break;
        }

        bool accepted = false;
        Matrix cand;
        double fc = f;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            cand = project_box_nuclear(m + step * grad, cfg.rho, radius, cfg.dykstra_iters, cfg.dykstra_tol);
            const Matrix delta = cand - m;
            fc = weighted_loglik(data, cand);
            const double model = f + (grad.array() * delta.array()).sum() - delta.squaredNorm() / (2.0 * step);
            if (fc >= f && fc >= model) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) {
            // No ascent left at any representable step.
            out.converged = true;
            break;
        }
        const double rel = (fc - f) / std::max(1.0, std::abs(f));
        m = std::move(cand);
        f = fc;
        out.objective_trace.push_back(f);
        if (rel < cfg.obj_tol) {
            out.converged = true;
            break;
        }
    }
    out.m_hat = std::move(m);
    return out;
}

}  // namespace glfm
