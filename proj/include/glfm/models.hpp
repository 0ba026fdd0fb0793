#pragma once

// Exponential-family observation models for generalized latent factor
// models. Every family is written in natural-parameter form with unit
// dispersion:
//
//   log f(y | m) = y * m - b(m) + c(y)
//
// so b'(m) is the mean function and b''(m) the variance function.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glfm {

class RandomStream;

struct Family {
    enum class Kind { Normal, Binomial, Poisson };

    Kind kind = Kind::Normal;
    int trials = 1;  // Binomial only; ordinal when > 1

    static Family normal() { return {Kind::Normal, 1}; }
    static Family binomial(int k);
    static Family poisson() { return {Kind::Poisson, 1}; }

    // Serialized as `normal`, `binomial:<k>` or `poisson`.
    std::string to_string() const;
    static Family parse(std::string_view text);

    friend bool operator==(const Family&, const Family&) = default;
};

namespace detail {

inline void require_finite(double m) {
    if (!std::isfinite(m)) throw std::domain_error("natural parameter is not finite");
}

// log(1 + exp(m)) without overflow.
inline double softplus(double m) {
    return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

inline double logistic(double m) {
    if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
    const double e = std::exp(m);
    return e / (1.0 + e);
}

}  // namespace detail

// b(m)
inline double cumulant(const Family& f, double m) {
    detail::require_finite(m);
    switch (f.kind) {
        case Family::Kind::Normal: return 0.5 * m * m;
        case Family::Kind::Binomial: return f.trials * detail::softplus(m);
        case Family::Kind::Poisson: return std::exp(m);
    }
    return 0.0;
}

// b'(m)
inline double mean(const Family& f, double m) {
    detail::require_finite(m);
    switch (f.kind) {
        case Family::Kind::Normal: return m;
        case Family::Kind::Binomial: return f.trials * detail::logistic(m);
        case Family::Kind::Poisson: return std::exp(m);
    }
    return 0.0;
}

// b''(m)
inline double variance(const Family& f, double m) {
    detail::require_finite(m);
    switch (f.kind) {
        case Family::Kind::Normal: return 1.0;
        case Family::Kind::Binomial: {
            const double s = detail::logistic(m);
            return f.trials * s * (1.0 - s);
        }
        case Family::Kind::Poisson: return std::exp(m);
    }
    return 0.0;
}

bool in_support(const Family& f, double y);

// Throws std::domain_error when y is outside the family's support.
void check_support(const Family& f, double y);

// c(y): the part of the log-density that does not depend on m.
double base_measure(const Family& f, double y);

// Full log-density including c(y). Throws std::domain_error on bad y.
double log_density(const Family& f, double y, double m);

// One draw with mean b'(m). Consumes only `rng`.
double sample(const Family& f, double m, RandomStream& rng);

}  // namespace glfm
