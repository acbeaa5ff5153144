#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "asymptotics.hpp"
#include "ensemble.hpp"
#include "piece_table.hpp"
#include "quadrature.hpp"
#include "test_function.hpp"
#include "truncation.hpp"
#include "util.hpp"

namespace radialdpp {

/// Exact first and second moment of the linear statistic sum_n f(X_n) under
/// the window scaling x -> R + x/a_R, computed from certified radial masses.
struct ExactMoments {
    double mean = 0.0;
    double variance = 0.0;
    TruncationRange range;
};

namespace detail {

inline std::vector<double> piece_values_of(const WindowPartition& part,
                                           const TestFunction& f) {
    std::vector<double> out(part.piece_count());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = f(0.5 * (part.coords[j] + part.coords[j + 1]));
    return out;
}

} // namespace detail

inline ExactMoments exact_moments(const Ensemble& e, const TestFunction& f, double R,
                                  double a_R = 1.0, double eps = 1e-12) {
    if (!(a_R > 0.0)) throw std::invalid_argument("exact_moments: a_R must be positive");
    const TestFunction ft = f.trimmed();
    ExactMoments out;
    if (ft.is_zero()) return out;
    const Window w = Window::scaled(ft.support_lo(), ft.support_hi(), R, a_R);
    out.range = truncation_range(e, w, eps);
    if (out.range.empty()) return out;
    const WindowPartition part = make_partition(e, w, ft);
    KahanSum mean;
    KahanSum var;
    scan_index_masses(e, part, out.range,
                      [&](std::int64_t, const double* mass, std::size_t m, double) {
                          double ef = 0.0;
                          double ef2 = 0.0;
                          for (std::size_t j = 0; j < m; ++j) {
                              const double v = part.values[j];
                              ef += v * mass[j];
                              ef2 += v * v * mass[j];
                          }
                          mean.add(ef);
                          var.add(ef2 - ef * ef);
                      });
    out.mean = mean.value();
    out.variance = std::max(0.0, var.value());
    return out;
}

inline double exact_mean(const Ensemble& e, const TestFunction& f, double R,
                         double a_R = 1.0, double eps = 1e-12) {
    return exact_moments(e, f, R, a_R, eps).mean;
}

inline double exact_variance(const Ensemble& e, const TestFunction& f, double R,
                             double a_R = 1.0, double eps = 1e-12) {
    return exact_moments(e, f, R, a_R, eps).variance;
}

/// Joint exact moments of two statistics over one shared scan; the covariance
/// sums the per-index terms E[fg] - E[f]E[g] (indices are independent).
struct ExactCrossMoments {
    double mean_f = 0.0;
    double mean_g = 0.0;
    double var_f = 0.0;
    double var_g = 0.0;
    double covariance = 0.0;
    TruncationRange range;
};

inline ExactCrossMoments exact_cross_moments(const Ensemble& e, const TestFunction& f,
                                             const TestFunction& g, double R,
                                             double a_R = 1.0, double eps = 1e-12) {
    if (!(a_R > 0.0))
        throw std::invalid_argument("exact_cross_moments: a_R must be positive");
    const TestFunction ft = f.trimmed();
    const TestFunction gt = g.trimmed();
    ExactCrossMoments out;
    if (ft.is_zero() && gt.is_zero()) return out;
    double lo = 0.0;
    double hi = 0.0;
    if (ft.is_zero()) {
        lo = gt.support_lo();
        hi = gt.support_hi();
    } else if (gt.is_zero()) {
        lo = ft.support_lo();
        hi = ft.support_hi();
    } else {
        lo = std::min(ft.support_lo(), gt.support_lo());
        hi = std::max(ft.support_hi(), gt.support_hi());
    }
    const Window w = Window::scaled(lo, hi, R, a_R);
    out.range = truncation_range(e, w, eps);
    if (out.range.empty()) return out;
    const WindowPartition part = make_partition(e, w, f + g);
    const std::vector<double> fv = detail::piece_values_of(part, f);
    const std::vector<double> gv = detail::piece_values_of(part, g);
    KahanSum mf, mg, vf, vg, cv;
    scan_index_masses(e, part, out.range,
                      [&](std::int64_t, const double* mass, std::size_t m, double) {
                          double ef = 0.0, eg = 0.0, ef2 = 0.0, eg2 = 0.0, efg = 0.0;
                          for (std::size_t j = 0; j < m; ++j) {
                              ef += fv[j] * mass[j];
                              eg += gv[j] * mass[j];
                              ef2 += fv[j] * fv[j] * mass[j];
                              eg2 += gv[j] * gv[j] * mass[j];
                              efg += fv[j] * gv[j] * mass[j];
                          }
                          mf.add(ef);
                          mg.add(eg);
                          vf.add(ef2 - ef * ef);
                          vg.add(eg2 - eg * eg);
                          cv.add(efg - ef * eg);
                      });
    out.mean_f = mf.value();
    out.mean_g = mg.value();
    out.var_f = std::max(0.0, vf.value());
    out.var_g = std::max(0.0, vg.value());
    out.covariance = cv.value();
    return out;
}

inline double exact_covariance(const Ensemble& e, const TestFunction& f,
                               const TestFunction& g, double R, double a_R = 1.0,
                               double eps = 1e-12) {
    return exact_cross_moments(e, f, g, R, a_R, eps).covariance;
}

/// Exact versus asymptotic moments of one scaled statistic, for reporting.
struct MomentReport {
    double R = 0.0;
    double a_R = 1.0;
    double mean_exact = 0.0;
    double var_exact = 0.0;
    double mean_asymptotic = 0.0;
    double var_asymptotic = 0.0;
    std::int64_t n_min = 0;
    std::int64_t n_max = -1;
    double truncation_mass = 0.0;
    double quadrature_error = 0.0;
};

inline MomentReport moment_report(const Ensemble& e, const TestFunction& f,
                                  const ScalingRegime& s, double eps = 1e-12,
                                  const QuadratureSpec& spec = {}) {
    MomentReport rep;
    rep.R = s.R;
    rep.a_R = s.a_R();
    const ExactMoments ex = exact_moments(e, f, s.R, rep.a_R, eps);
    rep.mean_exact = ex.mean;
    rep.var_exact = ex.variance;
    rep.n_min = ex.range.n_min;
    rep.n_max = ex.range.n_max;
    rep.truncation_mass = ex.range.mass_bound;
    const AsymptoticMoments asym = asymptotic_moments(e, s, f, spec);
    rep.mean_asymptotic = asym.mean;
    rep.var_asymptotic = asym.variance;
    // The asymptotic variance needs quadrature only on the hyperbolic side
    // (covariance functional or split-pair mass); those routines enforce the
    // spec tolerances, so the certified bound below is what they guarantee.
    const RegimeClass cls = classify_regime(e, s);
    if (e.is_hyperbolic() &&
        (cls == RegimeClass::Fixed || cls == RegimeClass::SmallScale))
        rep.quadrature_error = spec.abs_tol + spec.rel_tol * std::fabs(asym.variance);
    return rep;
}

/// Var sum f(X_n) for the planar Ginibre ensemble at fixed scale around R,
/// evaluated from the rotation-reduced difference form: integrating the
/// angular part of the two-point kernel leaves
///   (2/pi) ∫∫ [f(x)-f(y)]^2 sqrt(ab) e^{-(x-y)^2} T(sqrt(ab)) dx dy,
/// a = R+x, b = R+y, T(s) = ∫_0^{pi s} exp(-4 s^2 sin^2(t/(2s))) dt.
/// Independent of the radial-mass oracle; agreement is a strong cross-check.
inline double ginibre_variance_integral(const TestFunction& f, double R,
                                        const QuadratureSpec& spec = {}) {
    const TestFunction ft = f.trimmed();
    if (ft.is_zero()) return 0.0;
    if (!(R > 0.0))
        throw std::invalid_argument("ginibre_variance_integral: R must be positive");

    // Boxes: the support pieces plus flanking strips wide enough that the
    // Gaussian difference weight beyond them is below 1e-35.
    std::vector<double> grid;
    std::vector<double> val;
    grid.push_back(ft.support_lo() - 9.0);
    for (double b : ft.breakpoints()) grid.push_back(b);
    grid.push_back(ft.support_hi() + 9.0);
    val.push_back(0.0);
    for (double v : ft.values()) val.push_back(v);
    val.push_back(0.0);

    QuadratureSpec inner_spec;
    inner_spec.abs_tol = 1e-13;
    inner_spec.rel_tol = 1e-9;
    inner_spec.max_subdivisions = 200;
    auto angular = [&](double s) {
        // The exponent is bounded below by 0.405 t^2 (sin u >= 2u/pi), so the
        // integrand is negligible past t = 12.5 and the cut is certified.
        const double cut = std::min(12.5, kPi * s);
        const QuadResult r = quad_1d(
            [&](double t) {
                const double q = std::sin(t / (2.0 * s));
                return std::exp(-4.0 * s * s * q * q);
            },
            0.0, cut, inner_spec);
        return r.value;
    };
    auto integrand = [&](double x, double y) {
        const double a = R + x;
        const double b = R + y;
        if (a <= 0.0 || b <= 0.0) return 0.0;
        const double s = std::sqrt(a * b);
        const double d = x - y;
        const double w = std::exp(-d * d);
        if (w < 1e-40) return 0.0;
        return s * w * angular(s);
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (std::size_t j = i + 1; j + 1 < grid.size(); ++j) {
            const double c = val[i] - val[j];
            if (c == 0.0) continue;
            const double box = quad_2d_strict(integrand, grid[i], grid[i + 1], grid[j],
                                              grid[j + 1], spec);
            total += 2.0 * c * c * box;
        }
    }
    return 2.0 / kPi * total;
}

/// Growth diagnostics for the Gaussian fluctuation conditions: the variance
/// must diverge while sup|f| stays put.
struct SoshnikovDiagnostics {
    double variance = 0.0;
    double sup_f = 0.0;
    double mean_abs = 0.0;
    double fluctuation_ratio = 0.0;  // sup|f| / sqrt(Var), must vanish in R
};

inline SoshnikovDiagnostics soshnikov_diagnostics(const Ensemble& e,
                                                  const TestFunction& f, double R,
                                                  double a_R = 1.0, double eps = 1e-12) {
    SoshnikovDiagnostics out;
    const TestFunction ft = f.trimmed();
    if (ft.is_zero()) return out;
    for (double v : ft.values()) out.sup_f = std::max(out.sup_f, std::fabs(v));
    out.variance = exact_variance(e, ft, R, a_R, eps);
    out.mean_abs = exact_mean(e, ft.abs(), R, a_R, eps);
    if (out.variance > 0.0) out.fluctuation_ratio = out.sup_f / std::sqrt(out.variance);
    return out;
}

/// Diagnostics for the Poisson limit: total intensity, the largest single-index
/// hit probability (must vanish), and the gap between the true avoidance
/// probability prod(1 - E f_n) and its Poisson value exp(-sum_means).
struct PoissonDiagnostics {
    double sum_means = 0.0;
    double sup_single = 0.0;
    double avoidance_gap = 0.0;
};

inline PoissonDiagnostics poisson_limit_diagnostics(const Ensemble& e,
                                                    const TestFunction& f, double R,
                                                    double a_R = 1.0,
                                                    double eps = 1e-12) {
    for (double v : f.values())
        if (v < 0.0 || v >= 1.0)
            throw std::invalid_argument(
                "poisson_limit_diagnostics: values must lie in [0, 1)");
    PoissonDiagnostics out;
    const TestFunction ft = f.trimmed();
    if (ft.is_zero()) return out;
    const Window w = Window::scaled(ft.support_lo(), ft.support_hi(), R, a_R);
    const TruncationRange range = truncation_range(e, w, eps);
    if (range.empty()) return out;
    const WindowPartition part = make_partition(e, w, ft);
    KahanSum mean;
    KahanSum logprod;
    double sup_single = 0.0;
    scan_index_masses(e, part, range,
                      [&](std::int64_t, const double* mass, std::size_t m, double) {
                          double ef = 0.0;
                          double hit = 0.0;
                          for (std::size_t j = 0; j < m; ++j) {
                              ef += part.values[j] * mass[j];
                              if (part.values[j] != 0.0) hit += mass[j];
                          }
                          mean.add(ef);
                          sup_single = std::max(sup_single, hit);
                          logprod.add(std::log1p(-std::min(ef, 1.0 - 1e-16)));
                      });
    out.sum_means = mean.value();
    out.sup_single = sup_single;
    out.avoidance_gap = std::fabs(std::exp(logprod.value()) - std::exp(-out.sum_means));
    return out;
}

} // namespace radialdpp
