#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "oracle.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "util.hpp"

namespace radialdpp {

/// A Monte Carlo study: one ensemble, one statistic, one symbolic scaling
/// family applied across a ladder of window centers R.
struct ExperimentPlan {
    Ensemble ensemble = Ensemble::ginibre();
    TestFunction f = TestFunction::indicator(0.0, 1.0);
    ScalingRegime::Family scaling_family = ScalingRegime::Family::Fixed;
    double scaling_exponent = 0.0;
    std::vector<double> R_ladder;
    std::int64_t replicates = 10000;
    std::uint64_t seed = 0xD99;
    double eps_trunc = 1e-12;

    ScalingRegime regime_at(double R) const {
        ScalingRegime s;
        s.family = scaling_family;
        s.exponent = scaling_exponent;
        s.R = R;
        return s;
    }
};

namespace detail {

inline void validate_plan(const ExperimentPlan& plan, bool needs_gof) {
    if (plan.R_ladder.empty())
        throw std::invalid_argument("experiment plan: R ladder is empty");
    double prev = 0.0;
    for (double r : plan.R_ladder) {
        if (!(r > prev))
            throw std::invalid_argument(
                "experiment plan: R ladder must be positive and strictly increasing");
        prev = r;
    }
    if (plan.replicates < 1)
        throw std::invalid_argument("experiment plan: needs at least one replicate");
    if (needs_gof && plan.replicates < 100)
        throw std::invalid_argument(
            "experiment plan: goodness-of-fit tests need at least 100 replicates");
    if (!(plan.eps_trunc > 0.0) || plan.eps_trunc >= 1.0)
        throw std::invalid_argument("experiment plan: eps_trunc must lie in (0, 1)");
}

inline SamplerConfig sampler_config(const ExperimentPlan& plan) {
    SamplerConfig cfg;
    cfg.seed = plan.seed;
    cfg.truncation_eps = plan.eps_trunc;
    return cfg;
}

inline GofReport vacuous_report(const std::string& name, const std::string& why) {
    GofReport rep;
    rep.name = name;
    rep.pass = true;
    rep.notes = "not testable on this data: " + why;
    return rep;
}

} // namespace detail

/// Per-replicate results in replicate order; the CSV layout is part of the
/// external contract.
struct ReplicateTable {
    std::vector<double> raw;
    std::vector<double> standardized;
    std::vector<std::int64_t> count;

    std::string to_csv() const {
        std::string out = "replicate_id,raw_stat,standardized_stat,count\n";
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out += std::to_string(i);
            out += ',';
            out += format_g17(raw[i]);
            out += ',';
            out += format_g17(standardized[i]);
            out += ',';
            out += std::to_string(count[i]);
            out += '\n';
        }
        return out;
    }
};

/// Fixed-scale Gaussian fluctuation study: sample the statistic, standardize
/// by the exact mean and the predicted limit variance, test normality.
struct CltRunResult {
    double R = 0.0;
    double a_R = 1.0;
    double mean_exact = 0.0;
    double predicted_variance = 0.0;
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;
    double variance_ratio = 0.0;
    double truncation_mass = 0.0;
    GofReport ad;
    GofReport ks;
    ReplicateTable table;
};

inline std::vector<CltRunResult> run_clt_experiment(const ExperimentPlan& plan) {
    detail::validate_plan(plan, true);
    const Ensemble& e = plan.ensemble;
    const TestFunction ft = plan.f.trimmed();
    if (ft.is_zero())
        throw std::invalid_argument("clt experiment: statistic is identically zero");
    std::vector<CltRunResult> out;
    for (double R : plan.R_ladder) {
        const ScalingRegime regime = plan.regime_at(R);
        if (classify_regime(e, regime) != RegimeClass::Fixed)
            throw std::invalid_argument(
                "clt experiment: scaling must stay in the fixed regime");
        CltRunResult run;
        run.R = R;
        run.a_R = regime.a_R();
        run.predicted_variance = e.is_hyperbolic()
                                     ? c_r_alpha(e.alpha, R) * v_f_hyperbolic(e.alpha, ft)
                                     : R * v_f_ginibre(ft);
        if (!(run.predicted_variance > 0.0))
            throw std::invalid_argument("clt experiment: limit variance is zero");
        const ExactMoments ex = exact_moments(e, ft, R, run.a_R, plan.eps_trunc);
        run.mean_exact = ex.mean;

        const Window w = Window::scaled(ft.support_lo(), ft.support_hi(), R, run.a_R);
        const WindowSampler sampler(e, w, {ft}, detail::sampler_config(plan));
        run.truncation_mass = sampler.truncation_mass();

        const std::size_t reps = static_cast<std::size_t>(plan.replicates);
        run.table.raw.resize(reps);
        run.table.standardized.resize(reps);
        run.table.count.resize(reps);
        parallel_for(reps, [&](std::size_t i) {
            sampler.draw_statistics(static_cast<std::int64_t>(i), &run.table.raw[i],
                                    &run.table.count[i]);
        });
        const double sd = std::sqrt(run.predicted_variance);
        for (std::size_t i = 0; i < reps; ++i)
            run.table.standardized[i] = (run.table.raw[i] - run.mean_exact) / sd;
        run.empirical_mean = sample_mean(run.table.raw);
        run.empirical_variance = sample_variance(run.table.raw);
        run.variance_ratio = run.empirical_variance / run.predicted_variance;
        run.ad = anderson_darling_normal(run.table.standardized);
        run.ks = ks_normal(run.table.standardized);
        out.push_back(std::move(run));
    }
    return out;
}

/// Intermediate-scale study: two statistics on disjoint windows must decouple
/// (white noise), with variance 2 int f^2 after normalization.
struct WhiteNoiseRunResult {
    double R = 0.0;
    double a_R = 0.0;
    double mean_exact_f = 0.0;
    double mean_exact_g = 0.0;
    double predicted_variance = 0.0;  // of the raw statistic for f
    double normalized_variance = 0.0;
    double target_variance = 0.0;  // 2 int f^2
    double variance_ratio = 0.0;
    double cross_correlation = 0.0;
    GofReport ad;
    GofReport ks;
    ReplicateTable table;
};

inline std::vector<WhiteNoiseRunResult> run_whitenoise_experiment(
    const ExperimentPlan& plan, const TestFunction& g) {
    detail::validate_plan(plan, true);
    const Ensemble& e = plan.ensemble;
    const TestFunction ft = plan.f.trimmed();
    const TestFunction gt = g.trimmed();
    if (ft.is_zero() || gt.is_zero())
        throw std::invalid_argument("whitenoise experiment: both statistics must be nonzero");
    if (!TestFunction::disjoint_support(ft, gt))
        throw std::invalid_argument(
            "whitenoise experiment: the two windows must have disjoint supports");
    std::vector<WhiteNoiseRunResult> out;
    for (double R : plan.R_ladder) {
        const ScalingRegime regime = plan.regime_at(R);
        if (classify_regime(e, regime) != RegimeClass::Intermediate)
            throw std::invalid_argument(
                "whitenoise experiment: scaling must be in the intermediate regime");
        WhiteNoiseRunResult run;
        run.R = R;
        run.a_R = regime.a_R();
        const double rate = e.is_hyperbolic() ? c_r_alpha(e.alpha, R) : R;
        run.target_variance = 2.0 * ft.integrals().square;
        run.predicted_variance = rate / run.a_R * run.target_variance;

        const ExactCrossMoments ex =
            exact_cross_moments(e, ft, gt, R, run.a_R, plan.eps_trunc);
        run.mean_exact_f = ex.mean_f;
        run.mean_exact_g = ex.mean_g;

        const double lo = std::min(ft.support_lo(), gt.support_lo());
        const double hi = std::max(ft.support_hi(), gt.support_hi());
        const Window w = Window::scaled(lo, hi, R, run.a_R);
        const WindowSampler sampler(e, w, {ft, gt}, detail::sampler_config(plan));

        const std::size_t reps = static_cast<std::size_t>(plan.replicates);
        run.table.raw.resize(reps);
        run.table.standardized.resize(reps);
        run.table.count.resize(reps);
        std::vector<double> raw_g(reps);
        parallel_for(reps, [&](std::size_t i) {
            double stats[2];
            std::int64_t cnt = 0;
            sampler.draw_statistics(static_cast<std::int64_t>(i), stats, &cnt);
            run.table.raw[i] = stats[0];
            raw_g[i] = stats[1];
            run.table.count[i] = cnt;
        });
        const double sd = std::sqrt(run.predicted_variance);
        for (std::size_t i = 0; i < reps; ++i)
            run.table.standardized[i] = (run.table.raw[i] - run.mean_exact_f) / sd;
        run.normalized_variance = sample_variance(run.table.raw) * run.a_R / rate;
        run.variance_ratio = run.normalized_variance / run.target_variance;
        run.cross_correlation = pearson_correlation(run.table.raw, raw_g);
        run.ad = anderson_darling_normal(run.table.standardized);
        run.ks = ks_normal(run.table.standardized);
        out.push_back(std::move(run));
    }
    return out;
}

/// Extreme-scale study: point counts in [0, T] against Poisson(nu T), plus an
/// exponential-spacings check on the positions themselves.
struct PoissonRunResult {
    double R = 0.0;
    double a_R = 0.0;
    double nu = 0.0;
    double T = 0.0;
    double expected_mean = 0.0;
    double mean_count = 0.0;
    double var_count = 0.0;
    double dispersion = 0.0;
    double mean_se = 0.0;
    bool mean_ok = false;
    GofReport chi2;
    GofReport spacings;
    ReplicateTable table;
};

inline std::vector<PoissonRunResult> run_poisson_experiment(const ExperimentPlan& plan,
                                                            double T) {
    detail::validate_plan(plan, true);
    if (!(T > 0.0))
        throw std::invalid_argument("poisson experiment: T must be positive");
    const Ensemble& e = plan.ensemble;
    std::vector<PoissonRunResult> out;
    for (double R : plan.R_ladder) {
        const ScalingRegime regime = plan.regime_at(R);
        if (classify_regime(e, regime) != RegimeClass::Extreme)
            throw std::invalid_argument(
                "poisson experiment: scaling must be at the extreme (edge) rate");
        PoissonRunResult run;
        run.R = R;
        run.a_R = regime.a_R();
        run.nu = e.is_hyperbolic() ? e.alpha / 4.0 : 2.0;
        run.T = T;
        run.expected_mean = run.nu * T;

        const Window w = Window::scaled(0.0, T, R, run.a_R);
        const WindowSampler sampler(e, w, {TestFunction::indicator(0.0, T)},
                                    detail::sampler_config(plan));

        const std::size_t reps = static_cast<std::size_t>(plan.replicates);
        std::vector<std::vector<double>> positions(reps);
        run.table.raw.resize(reps);
        run.table.standardized.resize(reps);
        run.table.count.resize(reps);
        parallel_for(reps, [&](std::size_t i) {
            RadialSample s = sampler.draw_points(static_cast<std::int64_t>(i));
            std::sort(s.values.begin(), s.values.end());
            positions[i] = std::move(s.values);
        });
        const double sd0 = std::sqrt(run.expected_mean);
        for (std::size_t i = 0; i < reps; ++i) {
            const std::int64_t c = static_cast<std::int64_t>(positions[i].size());
            run.table.count[i] = c;
            run.table.raw[i] = static_cast<double>(c);
            run.table.standardized[i] =
                (static_cast<double>(c) - run.expected_mean) / sd0;
        }
        run.mean_count = sample_mean(run.table.raw);
        run.var_count = sample_variance(run.table.raw);
        run.dispersion = run.mean_count > 0.0 ? run.var_count / run.mean_count : 0.0;
        run.mean_se = std::sqrt(run.expected_mean / static_cast<double>(reps));
        run.mean_ok = std::fabs(run.mean_count - run.expected_mean) <= 3.0 * run.mean_se;

        try {
            run.chi2 = chi_square_poisson(run.table.count, run.expected_mean);
        } catch (const std::invalid_argument& err) {
            run.chi2 = detail::vacuous_report("chi-square-poisson", err.what());
        }
        // Each gap, measured from the window start, is a truncated exponential
        // under the Poisson null; its probability integral transform is U(0,1).
        std::vector<double> pit;
        const std::size_t pit_cap = 2000;
        for (std::size_t i = 0; i < reps && pit.size() < pit_cap; ++i) {
            double prev = 0.0;
            for (double x : positions[i]) {
                if (pit.size() >= pit_cap) break;
                const double denom = std::expm1(-run.nu * (T - prev));
                if (denom == 0.0) break;
                pit.push_back(std::expm1(-run.nu * (x - prev)) / denom);
                prev = x;
            }
        }
        if (pit.empty())
            run.spacings =
                detail::vacuous_report("spacings-exponential-ks", "no points observed");
        else
            run.spacings = exponential_spacings(pit);
        out.push_back(std::move(run));
    }
    return out;
}

/// Small-scale study: either the jump-driven Gaussian (standardized by exact
/// moments) or, when the window escapes the support, an exact zero.
struct SuperexpRunResult {
    double R = 0.0;
    double a_R = 0.0;
    double mean_exact = 0.0;
    double var_exact = 0.0;
    double jump_mean_asym = 0.0;
    double jump_var_asym = 0.0;
    double variance_ratio = 0.0;
    bool degenerate = false;
    bool all_zero = false;
    GofReport ad;
    GofReport ks;
    ReplicateTable table;
};

inline std::vector<SuperexpRunResult> run_superexp_experiment(const ExperimentPlan& plan) {
    detail::validate_plan(plan, true);
    const Ensemble& e = plan.ensemble;
    const TestFunction ft = plan.f.trimmed();
    std::vector<SuperexpRunResult> out;
    for (double R : plan.R_ladder) {
        const ScalingRegime regime = plan.regime_at(R);
        if (classify_regime(e, regime) != RegimeClass::SmallScale)
            throw std::invalid_argument(
                "superexp experiment: scaling must shrink the window (small scale)");
        const LimitLaw law = predicted_limit(e, regime, ft);
        SuperexpRunResult run;
        run.R = R;
        run.a_R = regime.a_R();
        const JumpAsymptotics jump = jump_asymptotics(e, regime, ft);
        run.jump_mean_asym = jump.mean;
        run.jump_var_asym = jump.variance;

        const ExactMoments ex = exact_moments(e, ft, R, run.a_R, plan.eps_trunc);
        run.mean_exact = ex.mean;
        run.var_exact = ex.variance;
        if (run.jump_var_asym > 0.0)
            run.variance_ratio = run.var_exact / run.jump_var_asym;

        const Window w = Window::scaled(ft.support_lo(), ft.support_hi(), R, run.a_R);
        const std::size_t reps = static_cast<std::size_t>(plan.replicates);
        run.table.raw.resize(reps);
        run.table.standardized.resize(reps);
        run.table.count.resize(reps);

        if (law.kind == LimitLaw::Kind::Degenerate) {
            run.degenerate = true;
            const WindowSampler sampler(e, w, {ft}, detail::sampler_config(plan));
            parallel_for(reps, [&](std::size_t i) {
                sampler.draw_statistics(static_cast<std::int64_t>(i), &run.table.raw[i],
                                        &run.table.count[i]);
            });
            bool all_zero = true;
            for (std::size_t i = 0; i < reps; ++i) {
                run.table.standardized[i] = run.table.raw[i];
                if (run.table.raw[i] != 0.0) all_zero = false;
            }
            run.all_zero = all_zero;
            run.ad = detail::vacuous_report("anderson-darling-normal",
                                            "limit is a point mass at zero");
            run.ks = detail::vacuous_report("kolmogorov-smirnov-normal",
                                            "limit is a point mass at zero");
        } else {
            if (!(run.var_exact > 0.0))
                throw std::invalid_argument(
                    "superexp experiment: exact variance is zero, nothing to standardize");
            const WindowSampler sampler(e, w, {ft}, detail::sampler_config(plan));
            parallel_for(reps, [&](std::size_t i) {
                sampler.draw_statistics(static_cast<std::int64_t>(i), &run.table.raw[i],
                                        &run.table.count[i]);
            });
            const double sd = std::sqrt(run.var_exact);
            for (std::size_t i = 0; i < reps; ++i)
                run.table.standardized[i] = (run.table.raw[i] - run.mean_exact) / sd;
            run.ad = anderson_darling_normal(run.table.standardized);
            run.ks = ks_normal(run.table.standardized);
        }
        out.push_back(std::move(run));
    }
    return out;
}

/// Past-the-edge scaling: the exact variance must sit below its collapsing
/// envelope and shrink along the ladder. Purely an oracle computation.
struct DegenerateRunResult {
    double R = 0.0;
    double a_R = 0.0;
    double var_exact = 0.0;
    double envelope = 0.0;
    double ratio = 0.0;
};

struct DegenerateCheck {
    std::vector<DegenerateRunResult> rows;
    bool variance_below_envelope = true;
    bool variance_decreasing = true;
};

inline DegenerateCheck degenerate_check(const ExperimentPlan& plan) {
    detail::validate_plan(plan, false);
    const Ensemble& e = plan.ensemble;
    const TestFunction ft = plan.f.trimmed();
    DegenerateCheck out;
    double prev_var = std::numeric_limits<double>::infinity();
    for (double R : plan.R_ladder) {
        const ScalingRegime regime = plan.regime_at(R);
        if (classify_regime(e, regime) != RegimeClass::DegenerateLarge)
            throw std::invalid_argument(
                "degenerate check: scaling must be beyond the edge rate");
        DegenerateRunResult row;
        row.R = R;
        row.a_R = regime.a_R();
        const double sq = ft.is_zero() ? 0.0 : ft.integrals().square;
        row.envelope = (e.is_hyperbolic() ? e.alpha * std::exp(R) / 4.0 : 2.0 * R) /
                       row.a_R * sq;
        row.var_exact =
            ft.is_zero() ? 0.0 : exact_variance(e, ft, R, row.a_R, plan.eps_trunc);
        row.ratio = row.envelope > 0.0 ? row.var_exact / row.envelope : 0.0;
        // the envelope is a leading-order cap, allow 20% slack before flagging
        if (row.var_exact > row.envelope * 1.2)
            out.variance_below_envelope = false;
        if (row.var_exact > prev_var * (1.0 + 1e-12)) out.variance_decreasing = false;
        prev_var = row.var_exact;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace radialdpp
