#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radialdpp {

/// log Gamma(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive, got " + std::to_string(x));
    return std::lgamma(x);
}

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/// Euler beta function B(a, b), a, b > 0.
inline double beta_fn(double a, double b) {
    return std::exp(log_beta(a, b));
}

inline double erf(double x) { return std::erf(x); }
inline double erfc(double x) { return std::erfc(x); }

namespace detail {

inline constexpr int kMaxSeriesIter = 10'000'000;
inline constexpr double kSfEps = 1e-16;
inline constexpr double kLentzTiny = 1e-300;

// Lower regularized incomplete gamma by power series; good for x < s + 1.
inline double inc_gamma_series(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int i = 0; i < kMaxSeriesIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kSfEps)
            return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
    }
    throw std::runtime_error("reg_inc_gamma_lower: series did not converge");
}

// Upper regularized incomplete gamma by continued fraction (modified Lentz);
// good for x >= s + 1.
inline double inc_gamma_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kLentzTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = b + an / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kSfEps)
            return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
    }
    throw std::runtime_error("reg_inc_gamma_lower: continued fraction did not converge");
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double inc_beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxSeriesIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kLentzTiny) d = kLentzTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kLentzTiny) c = kLentzTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kSfEps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

} // namespace detail

/// Lower regularized incomplete gamma P(s, x) = gamma(s, x) / Gamma(s),
/// s > 0, x >= 0.
inline double reg_inc_gamma_lower(double s, double x) {
    if (!(s > 0.0))
        throw std::domain_error("reg_inc_gamma_lower: s must be positive");
    if (x < 0.0)
        throw std::domain_error("reg_inc_gamma_lower: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::inc_gamma_series(s, x);
    double q = detail::inc_gamma_cf(s, x);
    return 1.0 - q;
}

/// Upper regularized incomplete gamma Q(s, x) = 1 - P(s, x).
inline double reg_inc_gamma_upper(double s, double x) {
    if (!(s > 0.0))
        throw std::domain_error("reg_inc_gamma_upper: s must be positive");
    if (x < 0.0)
        throw std::domain_error("reg_inc_gamma_upper: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::inc_gamma_series(s, x);
    return detail::inc_gamma_cf(s, x);
}

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("reg_inc_beta: a and b must be positive");
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("reg_inc_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::inc_beta_cf(a, b, x) / a;
    return 1.0 - front * detail::inc_beta_cf(b, a, 1.0 - x) / b;
}

/// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal upper tail.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

} // namespace radialdpp
