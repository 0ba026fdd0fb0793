// Serial reference kernels against their OpenMP counterparts on a
// Setting-1-sized instance (400 x 200, r = 3, pi = 0.6, Binomial(5)).

#include <benchmark/benchmark.h>

#include "glfm/likelihood.hpp"
#include "glfm/simbench.hpp"
#include "glfm/solvers.hpp"

namespace {

struct Fixture {
    glfm::ObservedMatrix data;
    glfm::FactorPair truth;
    glfm::Matrix m_star;

    Fixture() {
        const glfm::SimSetting s = glfm::setting_by_id(1);
        const glfm::RandomStream root(2024);
        glfm::RandomStream truth_rng = root.derive(glfm::stream_role::truth);
        auto [f, m] = glfm::generate_truth(s, truth_rng);
        truth = std::move(f);
        m_star = std::move(m);
        data = glfm::generate_observation(m_star, s, root);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_LoglikSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(glfm::serial::weighted_loglik(f.data, f.m_star));
}

void BM_LoglikParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(glfm::weighted_loglik(f.data, f.m_star));
}

void BM_GradientSerial(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(glfm::serial::loglik_gradient(f.data, f.m_star));
}

void BM_GradientParallel(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(glfm::loglik_gradient(f.data, f.m_star));
}

void BM_RowSolvesSerial(benchmark::State& state) {
    const auto& f = fixture();
    const glfm::Matrix init = glfm::Matrix::Zero(f.data.rows(), f.truth.a.cols());
    for (auto _ : state) benchmark::DoNotOptimize(glfm::serial::solve_all_rows(f.data, f.truth.a, init));
}

void BM_RowSolvesParallel(benchmark::State& state) {
    const auto& f = fixture();
    const glfm::Matrix init = glfm::Matrix::Zero(f.data.rows(), f.truth.a.cols());
    for (auto _ : state) benchmark::DoNotOptimize(glfm::solve_all_rows(f.data, f.truth.a, init));
}

}  // namespace

BENCHMARK(BM_LoglikSerial);
BENCHMARK(BM_LoglikParallel);
BENCHMARK(BM_GradientSerial);
BENCHMARK(BM_GradientParallel);
BENCHMARK(BM_RowSolvesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowSolvesParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
