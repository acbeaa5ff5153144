#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "special_functions.hpp"
#include "util.hpp"

namespace radialdpp {

/// Two planar ensembles, identified by the laws of their radial factors:
/// the nth squared modulus is Gamma(n+1, 1) for Ginibre and Beta(n+1, alpha)
/// for the hyperbolic family.
struct Ensemble {
    enum class Kind { Ginibre, Hyperbolic };

    Kind kind = Kind::Ginibre;
    double alpha = 0.0; // hyperbolic weight parameter, > 0

    static Ensemble ginibre() { return Ensemble{Kind::Ginibre, 0.0}; }

    static Ensemble hyperbolic(double alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("Ensemble: hyperbolic alpha must be positive");
        return Ensemble{Kind::Hyperbolic, alpha};
    }

    bool is_ginibre() const { return kind == Kind::Ginibre; }
    bool is_hyperbolic() const { return kind == Kind::Hyperbolic; }
};

/// Hyperbolic distance from the origin of a point at disc radius r in [0, 1).
inline double hyperbolic_modulus(double r) {
    if (!(r >= 0.0) || r >= 1.0)
        throw std::domain_error("hyperbolic_modulus: radius must lie in [0, 1)");
    return std::log1p(r) - std::log1p(-r);
}

/// Inverse of hyperbolic_modulus: disc radius at hyperbolic distance s >= 0.
inline double hyperbolic_modulus_inverse(double s) {
    if (!(s >= 0.0))
        throw std::domain_error("hyperbolic_modulus_inverse: distance must be nonnegative");
    return std::tanh(0.5 * s);
}

/// Coefficient Gamma(alpha+n+1) / (Gamma(alpha) Gamma(n+1)).
inline double k_coeff(double alpha, std::int64_t n) {
    if (!(alpha > 0.0)) throw std::domain_error("k_coeff: alpha must be positive");
    if (n < 0) throw std::domain_error("k_coeff: index must be nonnegative");
    return std::exp(log_gamma(alpha + n + 1.0) - log_gamma(alpha) - log_gamma(n + 1.0));
}

inline double log_k_coeff(double alpha, std::int64_t n) {
    return log_gamma(alpha + n + 1.0) - log_gamma(alpha) - log_gamma(n + 1.0);
}

/// CDF of the nth radial factor at radius r (r in the law's support:
/// [0, inf) for Ginibre, [0, 1] for hyperbolic).
inline double radial_cdf(const Ensemble& e, std::int64_t n, double r) {
    if (n < 0) throw std::domain_error("radial_cdf: index must be nonnegative");
    if (!(r >= 0.0)) throw std::domain_error("radial_cdf: radius must be nonnegative");
    if (e.is_ginibre()) return reg_inc_gamma_lower(n + 1.0, r * r);
    if (r > 1.0)
        throw std::domain_error("radial_cdf: hyperbolic radius must lie in [0, 1]");
    return reg_inc_beta(n + 1.0, e.alpha, r * r);
}

/// Same CDF in the squared-radius variable (Gamma / Beta coordinate).
inline double radial_cdf_sq(const Ensemble& e, std::int64_t n, double u) {
    if (n < 0) throw std::domain_error("radial_cdf_sq: index must be nonnegative");
    if (!(u >= 0.0)) throw std::domain_error("radial_cdf_sq: argument must be nonnegative");
    if (e.is_ginibre()) return reg_inc_gamma_lower(n + 1.0, u);
    if (u > 1.0) throw std::domain_error("radial_cdf_sq: argument above 1");
    return reg_inc_beta(n + 1.0, e.alpha, u);
}

/// Correlation kernel. Ginibre: exp(z wbar - |z|^2/2 - |w|^2/2) / pi.
/// Hyperbolic: (alpha/pi) (1-|z|^2)^(alpha-1) (1-|w|^2)^(alpha-1)
///             / (1 - z wbar)^(alpha+1), principal branch, |z|, |w| < 1.
inline std::complex<double> kernel_eval(const Ensemble& e, std::complex<double> z,
                                        std::complex<double> w) {
    if (e.is_ginibre()) {
        const std::complex<double> expo =
            z * std::conj(w) - 0.5 * std::norm(z) - 0.5 * std::norm(w);
        return std::exp(expo) / kPi;
    }
    const double nz = std::norm(z);
    const double nw = std::norm(w);
    if (nz >= 1.0 || nw >= 1.0)
        throw std::domain_error("kernel_eval: hyperbolic arguments must lie in the open disc");
    const double a = e.alpha;
    const std::complex<double> denom_log =
        (a + 1.0) * std::log(1.0 - z * std::conj(w));
    const double weight_log =
        (a - 1.0) * (std::log1p(-nz) + std::log1p(-nw));
    return (a / kPi) * std::exp(weight_log - denom_log.real()) *
           std::exp(std::complex<double>(0.0, -denom_log.imag()));
}

/// Interval of radial positions expressed in one of three coordinates:
/// the raw disc radius, the hyperbolic distance, or the affine rescaling
/// a_R * (position - R) of whichever distance is native to the ensemble
/// (disc radius for Ginibre, hyperbolic distance for the hyperbolic family).
struct Window {
    enum class Coordinate { Raw, Hyperbolic, Scaled };

    double lo = 0.0;
    double hi = 1.0;
    Coordinate coordinate = Coordinate::Raw;
    double R = 0.0;
    double a_R = 1.0;

    static Window raw(double lo, double hi) {
        return Window{lo, hi, Coordinate::Raw, 0.0, 1.0};
    }
    static Window hyperbolic_distance(double lo, double hi) {
        return Window{lo, hi, Coordinate::Hyperbolic, 0.0, 1.0};
    }
    static Window scaled(double lo, double hi, double R, double a_R) {
        return Window{lo, hi, Coordinate::Scaled, R, a_R};
    }
};

namespace detail {

inline constexpr double kMaxHypRadius = 1.0 - 1e-15;

// Raw-radius image of a window endpoint; clamps below the support only.
inline double window_radius(const Ensemble& e, const Window& w, double coord_value) {
    switch (w.coordinate) {
        case Window::Coordinate::Raw:
            return coord_value < 0.0 ? 0.0 : coord_value;
        case Window::Coordinate::Hyperbolic: {
            if (e.is_ginibre())
                throw std::invalid_argument(
                    "Window: hyperbolic-distance coordinate requires a hyperbolic ensemble");
            const double s = coord_value < 0.0 ? 0.0 : coord_value;
            return hyperbolic_modulus_inverse(s);
        }
        case Window::Coordinate::Scaled: {
            if (!(w.a_R > 0.0))
                throw std::invalid_argument("Window: scale a_R must be positive");
            const double native = w.R + coord_value / w.a_R;
            if (e.is_ginibre()) return native < 0.0 ? 0.0 : native;
            const double s = native < 0.0 ? 0.0 : native;
            return hyperbolic_modulus_inverse(s);
        }
    }
    throw std::logic_error("Window: unknown coordinate");
}

struct RawWindow {
    double r_lo = 0.0;
    double r_hi = 0.0;
    bool empty = true;
};

inline RawWindow to_raw(const Ensemble& e, const Window& w) {
    if (!(w.lo < w.hi))
        throw std::invalid_argument("Window: lo must be strictly below hi");
    RawWindow out;
    out.r_lo = window_radius(e, w, w.lo);
    out.r_hi = window_radius(e, w, w.hi);
    if (e.is_hyperbolic()) {
        // A raw window lying wholly at or beyond the unit circle holds no
        // points; a window reaching the circle from inside holds infinitely
        // many in expectation and is rejected.
        if (w.coordinate == Window::Coordinate::Raw && out.r_lo >= 1.0) {
            out.empty = true;
            return out;
        }
        if (out.r_hi >= kMaxHypRadius)
            throw std::invalid_argument(
                "Window: hyperbolic window reaches the unit circle (expected point count "
                "diverges); keep r_hi below 1 - 1e-15");
    }
    out.empty = !(out.r_hi > out.r_lo) || out.r_hi <= 0.0;
    return out;
}

// Window coordinate value of a point at disc radius r.
inline double to_window_coordinate(const Ensemble& e, const Window& w, double r) {
    switch (w.coordinate) {
        case Window::Coordinate::Raw:
            return r;
        case Window::Coordinate::Hyperbolic:
            return hyperbolic_modulus(r);
        case Window::Coordinate::Scaled: {
            const double native = e.is_ginibre() ? r : hyperbolic_modulus(r);
            return w.a_R * (native - w.R);
        }
    }
    throw std::logic_error("Window: unknown coordinate");
}

} // namespace detail

} // namespace radialdpp
