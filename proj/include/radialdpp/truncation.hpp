#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "ensemble.hpp"

namespace radialdpp {

/// Certified index interval for a radial window: the total window mass of all
/// indices outside [n_min, n_max] is at most mass_bound (<= the requested eps).
/// An empty range is encoded as n_min = 0, n_max = -1.
struct TruncationRange {
    std::int64_t n_min = 0;
    std::int64_t n_max = -1;
    double mass_bound = 0.0;

    bool empty() const { return n_max < n_min; }
    std::int64_t width() const { return empty() ? 0 : n_max - n_min + 1; }
};

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::int64_t kMaxTruncIndex = 1'000'000'000;

// Upper bound on sum_{n > N} P(rho_n <= r_hi), i.e. the mass the indices above
// N can put below the window's top. Monotone decreasing in N past the bulk.
//
// Ginibre (x = r_hi^2): sum_{n>N} P(Pois(x) >= n+1) = sum_{k>=N+2} T_k with
// T_k <= p_k (k+1)/(k+1-x) for k+1 > x, p_k the Poisson pmf; summing the
// geometric-ratio bound twice gives p_K ((K+1)/(K+1-x))^2 at K = N+2.
//
// Hyperbolic (u = r_hi^2): I_u(n+1, alpha) <= c_u k_n u^{n+1}/(n+1) with
// c_u = max(1, (1-u)^{alpha-1}); the term ratio is at most
// q = u * max(1, (N+2+alpha)/(N+3)) so the tail is dominated by a geometric
// series once q < 1.
inline double upper_tail_bound(const Ensemble& e, double r_hi, std::int64_t N) {
    if (e.is_ginibre()) {
        const double x = r_hi * r_hi;
        const double K = static_cast<double>(N) + 2.0;
        if (!(K + 1.0 > x)) return std::numeric_limits<double>::infinity();
        const double log_p = K * std::log(x) - x - log_gamma(K + 1.0);
        const double factor = (K + 1.0) / (K + 1.0 - x);
        return std::exp(log_p) * factor * factor;
    }
    const double u = r_hi * r_hi;
    if (u <= 0.0) return 0.0;
    const double a = e.alpha;
    const double c_u = std::max(1.0, std::pow(1.0 - u, a - 1.0));
    const double n1 = static_cast<double>(N) + 1.0;
    const double q = u * std::max(1.0, (n1 + 1.0 + a) / (n1 + 2.0));
    if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
    const double log_term =
        log_k_coeff(a, N + 1) + (n1 + 1.0) * std::log(u) - std::log(n1 + 1.0);
    return c_u * std::exp(log_term) / (1.0 - q);
}

// Upper bound on sum_{n < M} P(rho_n >= r_lo): the mass the indices below M
// can put above the window's bottom. Monotone increasing in M.
inline double lower_tail_bound(const Ensemble& e, double r_lo, std::int64_t M) {
    if (M <= 0) return 0.0;
    if (e.is_ginibre()) {
        const double x = r_lo * r_lo;
        if (x <= 0.0) return std::numeric_limits<double>::infinity();
        const double Md = static_cast<double>(M);
        if (!(Md - 1.0 < x)) return std::numeric_limits<double>::infinity();
        const double log_p = (Md - 1.0) * std::log(x) - x - log_gamma(Md);
        const double factor = x / (x - (Md - 1.0));
        return std::exp(log_p) * factor * factor;
    }
    const double v = 1.0 - r_lo * r_lo;
    if (v >= 1.0) return std::numeric_limits<double>::infinity();
    const double a = e.alpha;
    // I_v(alpha, n+1) <= (v^alpha / alpha) k_n; hockey-stick closed form for
    // the partial sum of k_n.
    const double log_sum =
        log_gamma(static_cast<double>(M) + a + 1.0) - log_gamma(a + 2.0) -
        log_gamma(static_cast<double>(M));
    return std::exp(a * std::log(v) - std::log(a) + log_sum);
}

// Smallest N >= start with bound(N) <= target (bound monotone decreasing).
template <class BoundFn>
std::int64_t search_min_index(BoundFn&& bound, std::int64_t start, double target) {
    std::int64_t lo = start;
    std::int64_t hi = std::max<std::int64_t>(start, 4);
    while (bound(hi) > target) {
        if (hi >= kMaxTruncIndex)
            throw TruncationError(
                "truncation_range: certificate unreachable below index 1e9 (ill-posed window)");
        lo = hi;
        hi = std::min<std::int64_t>(kMaxTruncIndex, hi * 2);
    }
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (bound(mid) <= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

// Rough center of the window's index bulk.
inline std::int64_t bulk_index(const Ensemble& e, double r_hi) {
    if (e.is_ginibre())
        return static_cast<std::int64_t>(r_hi * r_hi) + 2;
    const double u = r_hi * r_hi;
    const double d = 1.0 - u;
    if (d <= 0.0) return kMaxTruncIndex;
    return static_cast<std::int64_t>(e.alpha * u / d) + 2;
}

} // namespace detail

/// Minimal certified index interval whose complement puts at most eps expected
/// points into the window. Construction: analytic geometric tail bounds pick a
/// safe interval (lower side against eps/2, upper side against whatever budget
/// remains), then both ends walk inward on exact per-index window masses while
/// the total certificate still fits. mass_bound is the certified remainder.
inline TruncationRange truncation_range(const Ensemble& e, const Window& w, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("truncation_range: eps must be positive");
    const detail::RawWindow raw = detail::to_raw(e, w);
    if (eps >= 1.0 || raw.empty) return TruncationRange{0, -1, 0.0};

    auto mass_of = [&](std::int64_t n) {
        const double hi = radial_cdf(e, n, raw.r_hi);
        const double lo = raw.r_lo > 0.0 ? radial_cdf(e, n, raw.r_lo) : 0.0;
        return std::max(0.0, hi - lo);
    };

    std::int64_t n_min = 0;
    double used_lo = 0.0;
    if (raw.r_lo > 0.0) {
        // Largest M with below-range bound <= eps/2; bound increasing in M.
        auto low = [&](std::int64_t M) { return detail::lower_tail_bound(e, raw.r_lo, M); };
        if (low(1) <= 0.5 * eps) {
            std::int64_t lo = 1;
            std::int64_t hi = 2;
            while (hi < detail::kMaxTruncIndex && low(hi) <= 0.5 * eps) {
                lo = hi;
                hi *= 2;
            }
            while (lo + 1 < hi) {
                const std::int64_t mid = lo + (hi - lo) / 2;
                if (low(mid) <= 0.5 * eps)
                    lo = mid;
                else
                    hi = mid;
            }
            n_min = lo;
            used_lo = low(lo);
        }
    }

    auto up = [&](std::int64_t N) { return detail::upper_tail_bound(e, raw.r_hi, N); };
    const std::int64_t start = std::max(n_min, detail::bulk_index(e, raw.r_hi));
    std::int64_t n_max = detail::search_min_index(up, start, eps - used_lo);
    double used_up = up(n_max);

    // The analytic bounds carry slack; retire whole indices from either end
    // while their exact window mass still fits in the budget.
    int guard = 4096;
    while (n_max >= n_min && guard-- > 0) {
        const double m = mass_of(n_max);
        if (used_lo + used_up + m > eps) break;
        used_up += m;
        --n_max;
    }
    guard = 4096;
    while (n_min <= n_max && guard-- > 0) {
        const double m = mass_of(n_min);
        if (used_lo + used_up + m > eps) break;
        used_lo += m;
        ++n_min;
    }

    TruncationRange out;
    if (n_max < n_min) {
        out.n_min = 0;
        out.n_max = -1;
    } else {
        out.n_min = n_min;
        out.n_max = n_max;
    }
    out.mass_bound = used_lo + used_up;
    return out;
}

} // namespace radialdpp
