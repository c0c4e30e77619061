#pragma once

// Tail probabilities for the reference null distributions, plus the
// one-sample Kolmogorov-Smirnov test used to check null normality.

#include <paneldep/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace paneldep {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// P(Z > z) for Z ~ N(0,1), accurate far into the tail.
inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// P(|Z| > |z|).
inline double normal_two_sided(double z) { return std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2)); }

namespace detail {

constexpr int kGammaMaxIterations = 1'000'000;
constexpr double kGammaEps = 1e-16;

// log of x^a e^{-x} / Gamma(a)
inline double gamma_prefactor_log(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// Lower regularized P(a,x) by its power series; converges for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kGammaMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps) break;
    }
    return sum * std::exp(gamma_prefactor_log(a, x));
}

// Upper regularized Q(a,x) by Legendre's continued fraction (modified Lentz),
// converges for x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps) break;
    }
    return std::exp(gamma_prefactor_log(a, x)) * h;
}

} // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw std::domain_error("regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return std::clamp(1.0 - detail::gamma_p_series(a, x), 0.0, 1.0);
    return std::clamp(detail::gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw std::domain_error("regularized_gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return std::clamp(detail::gamma_p_series(a, x), 0.0, 1.0);
    return std::clamp(1.0 - detail::gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

/// P(X > x) for X ~ chi-square(df). Nonpositive x gives 1.
inline double chi_square_upper_tail(double x, double df) {
    if (!(df > 0.0)) throw std::domain_error("chi_square_upper_tail: df must be positive");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

/// Kolmogorov limiting survival function Q(lambda) = P(K > lambda).
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Jacobi-transformed series, fast for small lambda.
        constexpr double pi2 = std::numbers::pi * std::numbers::pi;
        const double y = std::exp(-pi2 / (8.0 * lambda * lambda));
        double sum = 0.0;
        for (int j = 1; j < 50; j += 2) sum += std::pow(y, j * j);
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0; ///< sup |F_n - F|
    double p_value = 1.0;
};

/// One-sample KS test against a continuous CDF. The Kolmogorov argument uses
/// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D for small samples.
template <class Cdf>
KsResult ks_test(std::span<const double> sample, Cdf&& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_test_standard_normal(std::span<const double> sample) {
    return ks_test(sample, [](double z) { return normal_cdf(z); });
}

} // namespace paneldep
