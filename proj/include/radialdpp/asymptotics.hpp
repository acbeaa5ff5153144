#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ensemble.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
#include "test_function.hpp"
#include "util.hpp"

namespace radialdpp {

/// Normalization constant of the hyperbolic fixed-scale Gaussian limit.
inline double c_r_alpha(double alpha, double R) {
    if (!(alpha > 0.0)) throw std::invalid_argument("c_r_alpha: alpha must be positive");
    return alpha * std::exp(R) / 8.0;
}

namespace detail {

// Antiderivative building block for the Gaussian difference weight:
// E(t) = t erf(t) + exp(-t^2)/sqrt(pi), with E''(t) = (2/sqrt(pi)) exp(-t^2).
inline double gauss_pair_antideriv(double t) {
    return t * radialdpp::erf(t) + std::exp(-t * t) / kSqrtPi;
}

// Exact ∫_a^b ∫_c^d exp(-(x-y)^2) dy dx.
inline double gauss_box_integral(double a, double b, double c, double d) {
    return 0.5 * kSqrtPi *
           (gauss_pair_antideriv(b - c) + gauss_pair_antideriv(a - d) -
            gauss_pair_antideriv(b - d) - gauss_pair_antideriv(a - c));
}

// Pair weight of the hyperbolic covariance functional, in log-safe form.
inline double hyperbolic_pair_kernel(double alpha, double x, double y) {
    return std::exp((alpha + 1.0) * (x + y) - (2.0 * alpha + 1.0) * log_add_exp(x, y));
}

} // namespace detail

/// Limit variance of the Ginibre fixed-scale Gaussian fluctuations:
/// (1/sqrt(pi)) ∫∫ [f(x)-f(y)]^2 exp(-(x-y)^2) dx dy, evaluated in closed form
/// per piece pair (machine accurate, so any tolerance in `spec` is met).
inline double v_f_ginibre(const TestFunction& f, const QuadratureSpec& spec = {}) {
    (void)spec;
    const TestFunction ft = f.trimmed();
    if (ft.is_zero()) return 0.0;
    const auto& bp = ft.breakpoints();
    const auto& v = ft.values();
    double phi = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] == 0.0) continue;
            phi += v[i] * v[j] *
                   detail::gauss_box_integral(bp[i], bp[i + 1], bp[j], bp[j + 1]);
        }
    }
    const double out = 2.0 * ft.integrals().square - (2.0 / kSqrtPi) * phi;
    return out < 0.0 ? 0.0 : out;
}

/// Limit variance of the hyperbolic fixed-scale Gaussian fluctuations:
/// (1/B(alpha, alpha+1)) ∫∫ [f(x)-f(y)]^2 e^{(alpha+1)(x+y)}/(e^x+e^y)^{2alpha+1}.
/// The squared difference is expanded through the marginal identity
/// ∫ e^{(alpha+1)(x+y)}/(e^x+e^y)^{2alpha+1} dy = B(alpha, alpha+1) e^x, leaving
/// only cross terms over the (finite) support boxes for the quadrature.
inline double v_f_hyperbolic(double alpha, const TestFunction& f,
                             const QuadratureSpec& spec = {}) {
    if (!(alpha > 0.0)) throw std::invalid_argument("v_f_hyperbolic: alpha must be positive");
    const TestFunction ft = f.trimmed();
    if (ft.is_zero()) return 0.0;
    const auto& bp = ft.breakpoints();
    const auto& v = ft.values();
    double cross = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] == 0.0) continue;
            const double box = quad_2d_strict(
                [&](double x, double y) { return detail::hyperbolic_pair_kernel(alpha, x, y); },
                bp[i], bp[i + 1], bp[j], bp[j + 1], spec);
            cross += v[i] * v[j] * box;
        }
    }
    // diagonal terms of the expanded square need f^2 against the e^x marginal
    const double out = 2.0 * (ft * ft).integrals().exp_weighted -
                       (2.0 / beta_fn(alpha, alpha + 1.0)) * cross;
    return out < 0.0 ? 0.0 : out;
}

/// (1/B(alpha, alpha+1)) ∫_R e^{(alpha+1)(x+y)}/(e^x+e^y)^{2alpha+1} dy,
/// by quadrature. Equals e^x identically; callers compare against that.
inline double beta_kernel_marginal(double alpha, double x, const QuadratureSpec& spec = {}) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("beta_kernel_marginal: alpha must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const QuadResult r = quad_1d(
        [&](double y) { return detail::hyperbolic_pair_kernel(alpha, x, y); }, -inf, inf,
        spec);
    if (!r.converged)
        throw QuadratureError("beta_kernel_marginal: quadrature did not converge", r);
    return r.value / beta_fn(alpha, alpha + 1.0);
}

/// Numerical value of (4^alpha/Gamma(alpha)) ∫_0^∞ t^alpha e^{-4t} dt.
inline double gamma_moment_quadrature(double alpha, const QuadratureSpec& spec = {}) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("gamma_moment_quadrature: alpha must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const double scale = alpha * std::log(4.0) - log_gamma(alpha);
    const QuadResult r = quad_1d(
        [&](double t) {
            return t <= 0.0 ? 0.0 : std::exp(scale + alpha * std::log(t) - 4.0 * t);
        },
        0.0, inf, spec);
    if (!r.converged)
        throw QuadratureError("gamma_moment_quadrature: quadrature did not converge", r);
    return r.value;
}

/// The edge intensity constant alpha/4, cross-checked against its defining
/// integral to 1e-10 on every call.
inline double gamma_moment_constant(double alpha) {
    const double closed = alpha / 4.0;
    const double numeric = gamma_moment_quadrature(alpha);
    if (std::fabs(numeric - closed) > 1e-10)
        throw std::runtime_error(
            "gamma_moment_constant: quadrature disagrees with the closed form");
    return closed;
}

/// |(1 - 2/(y+1))^{2 floor(t y)} - e^{-4t}|: discrete-vs-continuous decay gap.
inline double lemma21_error(double y, double t) {
    if (!(y > 0.0)) throw std::invalid_argument("lemma21_error: y must be positive");
    if (t < 0.0) throw std::invalid_argument("lemma21_error: t must be nonnegative");
    const double k = std::floor(t * y);
    const double powed = std::exp(2.0 * k * std::log1p(-2.0 / (y + 1.0)));
    return std::fabs(powed - std::exp(-4.0 * t));
}

/// |k_floor(y) - y^alpha/Gamma(alpha)|: Stirling-type coefficient gap.
inline double lemma22_error(double alpha, double y) {
    if (!(alpha > 0.0)) throw std::invalid_argument("lemma22_error: alpha must be positive");
    if (y < 0.0) throw std::invalid_argument("lemma22_error: y must be nonnegative");
    const double kn = k_coeff(alpha, static_cast<std::int64_t>(std::floor(y)));
    const double approx = y == 0.0 ? 0.0 : std::exp(alpha * std::log(y) - log_gamma(alpha));
    return std::fabs(kn - approx);
}

/// Scaling pair (R, a_R) with the a_R family declared symbolically: asymptotic
/// comparisons cannot be inferred from one numeric value.
struct ScalingRegime {
    enum class Family { Fixed, PowerOfR, ExpOfR };

    Family family = Family::Fixed;
    double exponent = 0.0;
    double R = 0.0;

    static ScalingRegime fixed(double R) { return {Family::Fixed, 0.0, R}; }
    static ScalingRegime power(double R, double p) { return {Family::PowerOfR, p, R}; }
    static ScalingRegime exponential(double R, double c) { return {Family::ExpOfR, c, R}; }

    double a_R() const {
        switch (family) {
            case Family::Fixed: return 1.0;
            case Family::PowerOfR: return std::pow(R, exponent);
            case Family::ExpOfR: return std::exp(exponent * R);
        }
        return 1.0;
    }
};

enum class RegimeClass { Fixed, SmallScale, Intermediate, Extreme, DegenerateLarge };

inline RegimeClass classify_regime(const Ensemble& e, const ScalingRegime& s) {
    switch (s.family) {
        case ScalingRegime::Family::Fixed:
            return RegimeClass::Fixed;
        case ScalingRegime::Family::PowerOfR: {
            const double p = s.exponent;
            if (p == 0.0) return RegimeClass::Fixed;
            if (p < 0.0) return RegimeClass::SmallScale;
            if (e.is_hyperbolic()) return RegimeClass::Intermediate;
            if (p < 1.0) return RegimeClass::Intermediate;
            if (p == 1.0) return RegimeClass::Extreme;
            return RegimeClass::DegenerateLarge;
        }
        case ScalingRegime::Family::ExpOfR: {
            const double c = s.exponent;
            if (c == 0.0) return RegimeClass::Fixed;
            if (c < 0.0) return RegimeClass::SmallScale;
            if (e.is_ginibre()) return RegimeClass::DegenerateLarge;
            if (c < 1.0) return RegimeClass::Intermediate;
            if (c == 1.0) return RegimeClass::Extreme;
            return RegimeClass::DegenerateLarge;
        }
    }
    throw std::invalid_argument("classify_regime: unknown scaling family");
}

inline std::string regime_name(RegimeClass c) {
    switch (c) {
        case RegimeClass::Fixed: return "fixed";
        case RegimeClass::SmallScale: return "small-scale";
        case RegimeClass::Intermediate: return "intermediate";
        case RegimeClass::Extreme: return "extreme";
        case RegimeClass::DegenerateLarge: return "degenerate-large";
    }
    return "unknown";
}

/// Predicted limit law of a scaled linear statistic.
struct LimitLaw {
    enum class Kind { Gaussian, WhiteNoiseGaussian, Poisson, Degenerate };

    Kind kind = Kind::Degenerate;
    double mean_shift = 0.0;
    double variance = 0.0;
    double intensity = 0.0;
    std::string provenance;
};

namespace detail {

// In the small-scale regime, does the window's top coordinate R + M_f/a_R
// stay bounded away from +infinity (so the statistic dies), or escape upward
// (so the jump-driven Gaussian applies)? Decided symbolically from the family.
inline bool small_scale_statistic_vanishes(const ScalingRegime& s, double m_f) {
    if (m_f >= 0.0) return false;
    if (s.family == ScalingRegime::Family::ExpOfR) return true;  // 1/a_R >> R
    const double decay = -s.exponent;  // a_R = R^{-decay}, decay > 0
    if (decay > 1.0) return true;
    if (decay < 1.0) return false;
    return m_f <= -1.0;
}

} // namespace detail

inline LimitLaw predicted_limit(const Ensemble& e, const ScalingRegime& regime,
                                const TestFunction& f) {
    const RegimeClass cls = classify_regime(e, regime);
    const TestFunctionIntegrals ints = f.integrals();
    LimitLaw law;
    switch (cls) {
        case RegimeClass::Fixed: {
            law.kind = LimitLaw::Kind::Gaussian;
            if (e.is_hyperbolic()) {
                law.mean_shift = 2.0 * c_r_alpha(e.alpha, regime.R) * ints.exp_weighted;
                law.variance = v_f_hyperbolic(e.alpha, f);
                law.provenance = "fixed scale: Gaussian fluctuations, hyperbolic covariance functional";
            } else {
                law.mean_shift = 2.0 * regime.R * ints.integral;
                law.variance = v_f_ginibre(f);
                law.provenance = "fixed scale: Gaussian fluctuations, Ginibre covariance functional";
            }
            return law;
        }
        case RegimeClass::Intermediate:
            law.kind = LimitLaw::Kind::WhiteNoiseGaussian;
            law.variance = 2.0 * ints.square;
            law.provenance = "intermediate scale: white-noise Gaussian, variance 2*int f^2";
            return law;
        case RegimeClass::Extreme:
            law.kind = LimitLaw::Kind::Poisson;
            law.intensity = e.is_hyperbolic() ? e.alpha / 4.0 : 2.0;
            law.provenance = e.is_hyperbolic()
                                 ? "edge scale: homogeneous Poisson limit, intensity alpha/4"
                                 : "edge scale: homogeneous Poisson limit, intensity 2";
            return law;
        case RegimeClass::DegenerateLarge:
            law.kind = LimitLaw::Kind::Degenerate;
            law.provenance = "scale beyond the edge rate: variance collapses to zero";
            return law;
        case RegimeClass::SmallScale: {
            const auto jump = f.value_at_rightmost();
            if (!jump)
                throw std::invalid_argument(
                    "predicted_limit: small-scale regime needs a statistic with a "
                    "nonzero jump at its right support edge");
            const double m_f = *f.rightmost_support();
            if (detail::small_scale_statistic_vanishes(regime, m_f)) {
                law.kind = LimitLaw::Kind::Degenerate;
                law.provenance =
                    "small scale: window falls below the bulk, statistic is almost "
                    "surely zero";
                return law;
            }
            law.kind = LimitLaw::Kind::Gaussian;
            law.mean_shift = 0.0;
            law.variance = 1.0;
            law.provenance =
                "small scale: jump-driven Gaussian, standardized by exact moments";
            return law;
        }
    }
    throw std::invalid_argument("predicted_limit: unclassifiable regime");
}

/// ∫∫_{x<0<y} e^{(alpha+1)(x+y)}/(e^x+e^y)^{2alpha+1} dy dx, the split-pair
/// mass entering the small-scale jump variance. Computed on the unit square
/// through a = e^x, b^alpha = s, which removes the b^{alpha-1} edge factor.
inline double hyperbolic_jump_kernel_mass(double alpha, const QuadratureSpec& spec = {}) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("hyperbolic_jump_kernel_mass: alpha must be positive");
    return quad_2d_strict(
               [&](double a, double s) {
                   if (a <= 0.0 || s <= 0.0) return 0.0;
                   const double b = std::pow(s, 1.0 / alpha);
                   return std::exp(alpha * std::log(a) -
                                   (2.0 * alpha + 1.0) * std::log1p(a * b));
               },
               0.0, 1.0, 0.0, 1.0, spec) /
           alpha;
}

/// Leading mean and variance of the small-scale jump statistic.
struct JumpAsymptotics {
    double mean = 0.0;
    double variance = 0.0;
};

inline JumpAsymptotics jump_asymptotics(const Ensemble& e, const ScalingRegime& s,
                                        const TestFunction& f,
                                        const QuadratureSpec& spec = {}) {
    const auto jump = f.value_at_rightmost();
    if (!jump)
        throw std::invalid_argument("jump_asymptotics: statistic has no nonzero jump");
    const double v = *jump;
    const double m_f = *f.rightmost_support();
    const double a = s.a_R();
    JumpAsymptotics out;
    if (detail::small_scale_statistic_vanishes(s, m_f)) return out;
    if (e.is_hyperbolic()) {
        const double growth = std::exp(s.R + m_f / a);
        out.mean = e.alpha * std::fabs(v) / 4.0 * growth;
        out.variance = e.alpha * v * v / (4.0 * beta_fn(e.alpha, e.alpha + 1.0)) *
                       hyperbolic_jump_kernel_mass(e.alpha, spec) * growth;
    } else {
        const double edge = s.R + m_f / a;
        // Mean from the exact radial counting identity sum_n P = r^2, summed
        // over pieces with edges clamped at zero.
        const auto& bp = f.breakpoints();
        const auto& vals = f.values();
        double mean = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double lo = std::max(0.0, s.R + bp[i] / a);
            const double hi = std::max(0.0, s.R + bp[i + 1] / a);
            mean += vals[i] * (hi * hi - lo * lo);
        }
        out.mean = mean;
        out.variance = edge > 0.0 ? v * v * edge / kSqrtPi : 0.0;
    }
    return out;
}

/// Regime-aware asymptotic mean and variance of the raw statistic, used as the
/// comparison columns of a moment report.
struct AsymptoticMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline AsymptoticMoments asymptotic_moments(const Ensemble& e, const ScalingRegime& s,
                                            const TestFunction& f,
                                            const QuadratureSpec& spec = {}) {
    const RegimeClass cls = classify_regime(e, s);
    const TestFunctionIntegrals ints = f.integrals();
    const double a = s.a_R();
    AsymptoticMoments out;
    if (e.is_hyperbolic()) {
        const double cr = c_r_alpha(e.alpha, s.R);
        // 2 C_R sum_i v_i (e^{hi/a} - e^{lo/a}) = (2C_R/a) ∫ f(x) e^{x/a} dx.
        double w = 0.0;
        const auto& bp = f.breakpoints();
        const auto& vals = f.values();
        for (std::size_t i = 0; i < vals.size(); ++i)
            w += vals[i] * std::exp(bp[i] / a) * std::expm1((bp[i + 1] - bp[i]) / a);
        out.mean = 2.0 * cr * w;
        switch (cls) {
            case RegimeClass::Fixed:
                out.variance = cr * v_f_hyperbolic(e.alpha, f, spec);
                break;
            case RegimeClass::SmallScale:
                out.variance = jump_asymptotics(e, s, f, spec).variance;
                break;
            default:
                out.variance = 2.0 * cr / a * ints.square;
                break;
        }
    } else {
        // (2R/a) ∫f + (2/a^2) ∫ x f(x) dx, the two-term expansion of the exact
        // mean; the second term matters once a_R shrinks.
        const auto& bp = f.breakpoints();
        const auto& vals = f.values();
        double xf = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            xf += vals[i] * 0.5 * (bp[i + 1] * bp[i + 1] - bp[i] * bp[i]);
        out.mean = 2.0 * s.R / a * ints.integral + 2.0 / (a * a) * xf;
        switch (cls) {
            case RegimeClass::Fixed:
                out.variance = s.R * v_f_ginibre(f, spec);
                break;
            case RegimeClass::SmallScale:
                out.variance = jump_asymptotics(e, s, f, spec).variance;
                break;
            default:
                out.variance = 2.0 * s.R / a * ints.square;
                break;
        }
    }
    return out;
}

} // namespace radialdpp
