#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "special_functions.hpp"
#include "util.hpp"

namespace radialdpp {

/// One hypothesis-test outcome. `pass` means the statistic did not exceed the
/// critical value at the stated level (equivalently p_value >= level).
struct GofReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    double p_value = 0.0;
    double level = 0.01;
    bool pass = false;
    std::size_t sample_size = 0;
    std::string notes;
};

namespace detail {

// P(A^2_inf < z) for the Anderson-Darling statistic, Marsaglia's rational fit
// (absolute error below 2e-6, ample for pass/fail at the 1% level).
inline double ad_cdf_asymptotic(double z) {
    if (z <= 0.0) return 0.0;
    if (z < 2.0)
        return std::exp(-1.2337141 / z) / std::sqrt(z) *
               (2.00012 +
                (0.247105 -
                 (0.0649821 - (0.0347962 - (0.0116720 - 0.00168691 * z) * z) * z) * z) *
                    z);
    return std::exp(
        -std::exp(1.0776 -
                  (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) *
                                 z) *
                      z));
}

// P(K > t) for the Kolmogorov distribution.
inline double kolmogorov_sf(double t) {
    if (t <= 0.1) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1000; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * k * t * t);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Smallest x in [lo, hi] with fn(x) <= target, for strictly decreasing fn.
template <typename Fn>
double invert_decreasing(Fn fn, double target, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (fn(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double clamp_prob(double p) {
    return std::min(1.0 - 1e-16, std::max(1e-300, p));
}

} // namespace detail

/// Anderson-Darling test of a sample against the standard normal (fully
/// specified null), using the asymptotic distribution of A^2.
inline GofReport anderson_darling_normal(const std::vector<double>& sample,
                                         double level = 0.01) {
    if (sample.size() < 8)
        throw std::invalid_argument("anderson_darling_normal: need at least 8 points");
    std::vector<double> x(sample);
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p_lo = detail::clamp_prob(normal_cdf(x[i]));
        const double p_hi = detail::clamp_prob(normal_sf(x[n - 1 - i]));
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(p_lo) + std::log(p_hi));
    }
    GofReport rep;
    rep.name = "anderson-darling-normal";
    rep.statistic = -nd - acc / nd;
    rep.p_value = 1.0 - detail::ad_cdf_asymptotic(rep.statistic);
    rep.level = level;
    rep.threshold = detail::invert_decreasing(
        [](double z) { return 1.0 - detail::ad_cdf_asymptotic(z); }, level, 1e-3, 64.0);
    rep.pass = rep.statistic <= rep.threshold;
    rep.sample_size = n;
    rep.notes = "fully specified standard normal null, asymptotic critical value";
    return rep;
}

/// Kolmogorov-Smirnov test of a sample against U(0,1), with the Stephens
/// finite-sample rescaling D (sqrt(n) + 0.12 + 0.11/sqrt(n)).
inline GofReport ks_uniform(const std::vector<double>& sample, double level = 0.01) {
    if (sample.empty()) throw std::invalid_argument("ks_uniform: empty sample");
    std::vector<double> u(sample);
    std::sort(u.begin(), u.end());
    const std::size_t n = u.size();
    const double nd = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::min(1.0, std::max(0.0, u[i]));
        const double hi = (static_cast<double>(i) + 1.0) / nd - v;
        const double lo = v - static_cast<double>(i) / nd;
        d = std::max(d, std::max(hi, lo));
    }
    GofReport rep;
    rep.name = "kolmogorov-smirnov-uniform";
    const double stephens = std::sqrt(nd) + 0.12 + 0.11 / std::sqrt(nd);
    rep.statistic = d * stephens;
    rep.p_value = detail::kolmogorov_sf(rep.statistic);
    rep.level = level;
    rep.threshold = detail::invert_decreasing(detail::kolmogorov_sf, level, 0.2, 8.0);
    rep.pass = rep.statistic <= rep.threshold;
    rep.sample_size = n;
    rep.notes = "finite-sample rescaled distance against the Kolmogorov law";
    return rep;
}

/// Kolmogorov-Smirnov test against the standard normal, via the probability
/// integral transform.
inline GofReport ks_normal(const std::vector<double>& sample, double level = 0.01) {
    std::vector<double> u(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) u[i] = normal_cdf(sample[i]);
    GofReport rep = ks_uniform(u, level);
    rep.name = "kolmogorov-smirnov-normal";
    return rep;
}

/// Pearson chi-square test of integer counts against Poisson(lambda). Bins
/// with expected mass under 5 are merged with their neighbors.
inline GofReport chi_square_poisson(const std::vector<std::int64_t>& counts,
                                    double lambda, double level = 0.01) {
    if (counts.empty()) throw std::invalid_argument("chi_square_poisson: empty sample");
    if (!(lambda > 0.0))
        throw std::invalid_argument("chi_square_poisson: lambda must be positive");
    std::int64_t kmax = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("chi_square_poisson: negative count");
        kmax = std::max(kmax, c);
    }
    const double nd = static_cast<double>(counts.size());
    std::vector<double> observed(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (std::int64_t c : counts) observed[static_cast<std::size_t>(c)] += 1.0;

    std::vector<double> expected(observed.size());
    double p = std::exp(-lambda);
    double mass_used = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        expected[k] = nd * p;
        mass_used += p;
        p *= lambda / static_cast<double>(k + 1);
    }
    const double tail = nd * std::max(0.0, 1.0 - mass_used);

    std::vector<double> obin, ebin;
    double oa = 0.0, ea = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        oa += observed[k];
        ea += expected[k];
        if (ea >= 5.0) {
            obin.push_back(oa);
            ebin.push_back(ea);
            oa = ea = 0.0;
        }
    }
    ea += tail;  // everything above kmax was observed zero times
    if (ea > 0.0 || oa > 0.0) {
        if (ea >= 5.0 || ebin.empty()) {
            obin.push_back(oa);
            ebin.push_back(ea);
        } else {
            obin.back() += oa;
            ebin.back() += ea;
        }
    }
    if (obin.size() < 2)
        throw std::invalid_argument(
            "chi_square_poisson: sample too concentrated to form two bins");

    double chi2 = 0.0;
    for (std::size_t b = 0; b < obin.size(); ++b) {
        const double diff = obin[b] - ebin[b];
        chi2 += diff * diff / ebin[b];
    }
    const double dof = static_cast<double>(obin.size() - 1);
    GofReport rep;
    rep.name = "chi-square-poisson";
    rep.statistic = chi2;
    rep.p_value = reg_inc_gamma_upper(0.5 * dof, 0.5 * chi2);
    rep.level = level;
    rep.threshold = detail::invert_decreasing(
        [&](double x) { return reg_inc_gamma_upper(0.5 * dof, 0.5 * x); }, level, 0.0,
        1e4);
    rep.pass = rep.statistic <= rep.threshold;
    rep.sample_size = counts.size();
    rep.notes = "bins with expected mass below 5 merged; degrees of freedom " +
                std::to_string(obin.size() - 1);
    return rep;
}

/// KS test of probability-integral-transformed spacings against U(0,1).
inline GofReport exponential_spacings(const std::vector<double>& pit,
                                      double level = 0.01) {
    GofReport rep = ks_uniform(pit, level);
    rep.name = "spacings-exponential-ks";
    rep.notes = "per-gap transform of truncated exponentials, pooled across replicates";
    return rep;
}

inline double sample_mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("sample_mean: empty sample");
    KahanSum s;
    for (double v : x) s.add(v);
    return s.value() / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("sample_variance: need two points");
    const double m = sample_mean(x);
    KahanSum s;
    for (double v : x) s.add((v - m) * (v - m));
    return s.value() / static_cast<double>(x.size() - 1);
}

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_correlation: need two equal-length samples");
    const double mx = sample_mean(x);
    const double my = sample_mean(y);
    KahanSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy.add((x[i] - mx) * (y[i] - my));
        sxx.add((x[i] - mx) * (x[i] - mx));
        syy.add((y[i] - my) * (y[i] - my));
    }
    const double denom = std::sqrt(sxx.value() * syy.value());
    return denom > 0.0 ? sxy.value() / denom : 0.0;
}

} // namespace radialdpp
