#include "glfm/models.hpp"

#include <charconv>
#include <numbers>

#include "glfm/random.hpp"

namespace glfm {

Family Family::binomial(int k) {
    if (k < 1) throw std::invalid_argument("binomial family requires k >= 1");
    return {Kind::Binomial, k};
}

std::string Family::to_string() const {
    switch (kind) {
        case Kind::Normal: return "normal";
        case Kind::Binomial: return "binomial:" + std::to_string(trials);
        case Kind::Poisson: return "poisson";
    }
    return {};
}

Family Family::parse(std::string_view text) {
    if (text == "normal") return normal();
    if (text == "poisson") return poisson();
    constexpr std::string_view prefix = "binomial:";
    if (text.starts_with(prefix)) {
        auto digits = text.substr(prefix.size());
        int k = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty())
            return binomial(k);
    }
    throw std::invalid_argument("unknown family '" + std::string(text) + "'");
}

namespace {

bool is_integer(double y) { return std::isfinite(y) && std::floor(y) == y; }

}  // namespace

bool in_support(const Family& f, double y) {
    switch (f.kind) {
        case Family::Kind::Normal: return std::isfinite(y);
        case Family::Kind::Binomial: return is_integer(y) && y >= 0.0 && y <= f.trials;
        case Family::Kind::Poisson: return is_integer(y) && y >= 0.0;
    }
    return false;
}

void check_support(const Family& f, double y) {
    if (!in_support(f, y))
        throw std::domain_error("observation " + std::to_string(y) + " outside support of " +
                                f.to_string());
}

double base_measure(const Family& f, double y) {
    check_support(f, y);
    switch (f.kind) {
        case Family::Kind::Normal:
            return -0.5 * y * y - 0.5 * std::log(2.0 * std::numbers::pi);
        case Family::Kind::Binomial: {
            const double k = f.trials;
            return std::lgamma(k + 1.0) - std::lgamma(y + 1.0) - std::lgamma(k - y + 1.0);
        }
        case Family::Kind::Poisson: return -std::lgamma(y + 1.0);
    }
    return 0.0;
}

double log_density(const Family& f, double y, double m) {
    const double c = base_measure(f, y);
    return y * m - cumulant(f, m) + c;
}

double sample(const Family& f, double m, RandomStream& rng) {
    detail::require_finite(m);
    switch (f.kind) {
        case Family::Kind::Normal: return rng.normal(m, 1.0);
        case Family::Kind::Binomial: return rng.binomial(f.trials, detail::logistic(m));
        case Family::Kind::Poisson: return static_cast<double>(rng.poisson(std::exp(m)));
    }
    return 0.0;
}

}  // namespace glfm
