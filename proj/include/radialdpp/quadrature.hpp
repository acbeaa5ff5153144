#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace radialdpp {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int subdivisions = 0;
};

/// Thrown by the *_strict entry points when the error target is not met.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadResult best)
        : std::runtime_error(what), best_estimate(best) {}
    QuadResult best_estimate;
};

namespace detail {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEval {
    double k15;
    double err;
};

template <class F>
PanelEval gk15(F&& g, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = g(c);
    double resk = fc * kKronrodWeights[7];
    double resg = fc * kGaussWeights[3];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodNodes[j];
        const double f1 = g(c - dx);
        const double f2 = g(c + dx);
        resk += kKronrodWeights[j] * (f1 + f2);
        resabs += kKronrodWeights[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * (f1 + f2);
    }
    PanelEval out;
    out.k15 = resk * h;
    double diff = std::fabs((resk - resg) * h);
    // QUADPACK-style sharpened estimate, floored near roundoff level.
    double est = diff;
    if (diff > 0.0) {
        double scaled = std::pow(200.0 * diff, 1.5);
        if (scaled < diff) est = scaled;
    }
    double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(resabs * h);
    out.err = std::max(est, roundoff);
    return out;
}

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

// Adaptive GK15 on a finite interval.
template <class F>
QuadResult adaptive_finite(F&& g, double a, double b, const QuadratureSpec& spec) {
    QuadResult res;
    if (a == b) return res;
    std::priority_queue<Interval> heap;
    PanelEval p = gk15(g, a, b);
    heap.push({a, b, p.k15, p.err});
    double total_val = p.k15;
    double total_err = p.err;
    int splits = 0;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total_val))) {
        if (splits >= spec.max_subdivisions) {
            res.converged = false;
            break;
        }
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval got below representable width; cannot refine further.
            heap.push(worst);
            res.converged = false;
            break;
        }
        PanelEval left = gk15(g, worst.a, mid);
        PanelEval right = gk15(g, mid, worst.b);
        total_val += left.k15 + right.k15 - worst.value;
        total_err += left.err + right.err - worst.error;
        heap.push({worst.a, mid, left.k15, left.err});
        heap.push({mid, worst.b, right.k15, right.err});
        ++splits;
    }
    res.value = total_val;
    res.error = total_err;
    res.subdivisions = splits;
    return res;
}

} // namespace detail

/// Adaptive 1-D quadrature of g over [lo, hi]; either bound may be infinite.
/// Semi-infinite tails use the substitution t = u / (1 - u); a doubly infinite
/// range is split at zero. Non-convergence is reported via the flag, with the
/// best estimate retained.
template <class F>
QuadResult quad_1d(F&& g, double lo, double hi, const QuadratureSpec& spec = {}) {
    if (std::isnan(lo) || std::isnan(hi))
        throw std::domain_error("quad_1d: NaN integration bound");
    if (lo > hi)
        throw std::domain_error("quad_1d: lower bound exceeds upper bound");
    const bool lo_inf = std::isinf(lo);
    const bool hi_inf = std::isinf(hi);
    if (lo_inf && hi_inf) {
        QuadratureSpec half = spec;
        half.abs_tol = 0.5 * spec.abs_tol;
        QuadResult left = quad_1d(g, lo, 0.0, half);
        QuadResult right = quad_1d(g, 0.0, hi, half);
        QuadResult out;
        out.value = left.value + right.value;
        out.error = left.error + right.error;
        out.converged = left.converged && right.converged;
        out.subdivisions = left.subdivisions + right.subdivisions;
        return out;
    }
    if (hi_inf) {
        auto h = [&g, lo](double u) {
            const double w = 1.0 - u;
            const double t = lo + u / w;
            if (!std::isfinite(t)) return 0.0;
            const double v = g(t) / (w * w);
            return std::isfinite(v) ? v : 0.0;
        };
        return detail::adaptive_finite(h, 0.0, 1.0, spec);
    }
    if (lo_inf) {
        auto h = [&g, hi](double u) {
            const double w = 1.0 - u;
            const double t = hi - u / w;
            if (!std::isfinite(t)) return 0.0;
            const double v = g(t) / (w * w);
            return std::isfinite(v) ? v : 0.0;
        };
        return detail::adaptive_finite(h, 0.0, 1.0, spec);
    }
    return detail::adaptive_finite(g, lo, hi, spec);
}

template <class F>
double quad_1d_strict(F&& g, double lo, double hi, const QuadratureSpec& spec = {}) {
    QuadResult r = quad_1d(std::forward<F>(g), lo, hi, spec);
    if (!r.converged)
        throw QuadratureError("quad_1d: error target not reached after max subdivisions", r);
    return r.value;
}

/// Iterated 2-D quadrature of g(x, y) over [xlo, xhi] x [ylo, yhi] (bounds may
/// be infinite). The inner integral runs at a tightened tolerance; its budget
/// is folded into the reported error.
template <class F2>
QuadResult quad_2d(F2&& g, double xlo, double xhi, double ylo, double yhi,
                   const QuadratureSpec& spec = {}) {
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol / 16.0;
    inner.rel_tol = spec.rel_tol / 16.0;
    bool inner_ok = true;
    double inner_err_max = 0.0;
    auto outer_fn = [&](double x) {
        QuadResult r = quad_1d([&g, x](double y) { return g(x, y); }, ylo, yhi, inner);
        if (!r.converged) inner_ok = false;
        inner_err_max = std::max(inner_err_max, r.error);
        return r.value;
    };
    QuadResult out = quad_1d(outer_fn, xlo, xhi, spec);
    double width = std::isfinite(xhi - xlo) ? std::fabs(xhi - xlo) : 1.0;
    out.error += inner_err_max * width;
    out.converged = out.converged && inner_ok;
    return out;
}

template <class F2>
double quad_2d_strict(F2&& g, double xlo, double xhi, double ylo, double yhi,
                      const QuadratureSpec& spec = {}) {
    QuadResult r = quad_2d(std::forward<F2>(g), xlo, xhi, ylo, yhi, spec);
    if (!r.converged)
        throw QuadratureError("quad_2d: error target not reached after max subdivisions", r);
    return r.value;
}

} // namespace radialdpp
