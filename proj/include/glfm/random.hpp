#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace glfm {

// Mixes a parent seed with a tag into a child seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags);

// A seeded random stream. Child streams are derived from the seed, never
// from the engine state, so derivation is independent of how much of the
// parent has been consumed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    RandomStream derive(std::uint64_t tag) const { return RandomStream(derive_seed(seed_, tag)); }

    std::mt19937_64& engine() { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal(double mu = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mu, sd)(engine_); }
    bool bernoulli(double prob) { return std::bernoulli_distribution(prob)(engine_); }
    int binomial(int trials, double prob) { return std::binomial_distribution<int>(trials, prob)(engine_); }
    long poisson(double rate) { return std::poisson_distribution<long>(rate)(engine_); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Stream roles used by the simulation and evaluation drivers.
namespace stream_role {
inline constexpr std::uint64_t truth = 1;
inline constexpr std::uint64_t mask = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t split = 4;
inline constexpr std::uint64_t holdout = 5;
}  // namespace stream_role

}  // namespace glfm
