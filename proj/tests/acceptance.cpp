// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; the exit code is the number of failures. Seeds are fixed so reruns
// are deterministic on a given platform.

#include <radialdpp/radialdpp.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

using namespace radialdpp;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %02d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class Fn>
void guard(int id, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, false, std::string("unexpected exception: ") + e.what());
    }
}

// Replicate-level payloads captured by criteria 6..10, replayed by 12 under
// explicit worker counts.
struct ReplayJob {
    std::string name;
    std::string original;
    std::function<std::string()> rerun;
};
std::vector<ReplayJob> g_jobs;

std::string degenerate_csv(const DegenerateCheck& chk) {
    std::string csv = "R,a_R,var_exact,envelope,ratio\n";
    for (const auto& row : chk.rows)
        csv += format_g17(row.R) + "," + format_g17(row.a_R) + "," +
               format_g17(row.var_exact) + "," + format_g17(row.envelope) + "," +
               format_g17(row.ratio) + "\n";
    return csv;
}

void criterion_1() {
    const auto t0 = Clock::now();
    double max_err = 0.0;
    for (double alpha : {0.5, 1.0, 2.0, 3.7})
        for (int i = 0; i <= 40; ++i) {
            const double x = -5.0 + 0.25 * i;
            max_err = std::max(max_err,
                               std::fabs(beta_kernel_marginal(alpha, x) - std::exp(x)));
        }
    const double el = seconds_since(t0);
    report(1, max_err <= 1e-8 && el < 5.0,
           fmt("kernel marginal vs e^x, max err %.3e (tol 1e-8), %.2fs", max_err, el));
}

void criterion_2() {
    const auto t0 = Clock::now();
    double max_err = 0.0;
    for (double r : {0.3, 0.6, 0.9}) {
        KahanSum gin;
        for (std::int64_t n = 0; n <= 2000; ++n)
            gin.add(radial_cdf(Ensemble::ginibre(), n, r));
        max_err = std::max(max_err, std::fabs(gin.value() - r * r));

        KahanSum hyp;
        const Ensemble h1 = Ensemble::hyperbolic(1.0);
        for (std::int64_t n = 0; n <= 4000; ++n)
            hyp.add(radial_cdf(h1, n, r));
        const double u = r * r;
        max_err = std::max(max_err, std::fabs(hyp.value() - u / (1.0 - u)));
    }
    const double el = seconds_since(t0);
    report(2, max_err <= 1e-8 && el < 5.0,
           fmt("counting sums, max err %.3e (tol 1e-8), %.2fs", max_err, el));
}

void criterion_3() {
    const auto t0 = Clock::now();
    const TestFunction f = TestFunction::indicator(0.0, 1.0);
    const double vf = v_f_ginibre(f);
    const double r100 = exact_variance(Ensemble::ginibre(), f, 100.0) / (100.0 * vf);
    const double r200 = exact_variance(Ensemble::ginibre(), f, 200.0) / (200.0 * vf);
    const double gap100 = std::fabs(r100 - 1.0);
    const double gap200 = std::fabs(r200 - 1.0);
    const double el = seconds_since(t0);
    const bool ok = r100 >= 0.98 && r100 <= 1.02 && gap200 < gap100 && el < 30.0;
    report(3, ok,
           fmt("var/(R V_f) = %.5f at R=100, gap %.2e -> %.2e at R=200, %.2fs", r100,
               gap100, gap200, el));
}

void criterion_4() {
    const auto t0 = Clock::now();
    const TestFunction f = TestFunction::indicator(0.0, 1.0);
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    std::string gaps;
    for (double R : {50.0, 100.0, 200.0}) {
        const double gap = std::fabs(exact_mean(Ensemble::ginibre(), f, R) - 2.0 * R);
        ok = ok && gap <= 2.0 && gap <= prev + 1e-9;
        prev = gap;
        gaps += fmt(" %.6f", gap);
    }
    const double el = seconds_since(t0);
    report(4, ok && el < 30.0,
           fmt("|mean - 2R| at R=50,100,200:%s (cap 2, non-growing), %.2fs", gaps.c_str(),
               el));
}

void criterion_5() {
    const auto t0 = Clock::now();
    const TestFunction f = TestFunction::indicator(-1.0, 0.0);
    const double w = 1.0 - std::exp(-1.0);  // integral of e^x over [-1,0]
    bool ok = true;
    double worst = 0.0;
    for (double alpha : {1.0, 2.0}) {
        const Ensemble e = Ensemble::hyperbolic(alpha);
        double prev = std::numeric_limits<double>::infinity();
        for (double R : {8.0, 10.0, 12.0}) {
            const double gap =
                std::fabs(exact_mean(e, f, R) - 2.0 * c_r_alpha(alpha, R) * w);
            ok = ok && gap <= 5.0 && gap <= prev + 1e-9;
            prev = gap;
            worst = std::max(worst, gap);
        }
    }
    const double el = seconds_since(t0);
    report(5, ok && el <= 120.0,
           fmt("|mean - 2 C_R int f e^x| <= %.3e (cap 5, non-growing), %.2fs", worst, el));
}

void criterion_6() {
    const auto t0 = Clock::now();
    ExperimentPlan plan;
    plan.ensemble = Ensemble::hyperbolic(1.0);
    plan.f = TestFunction::indicator(0.0, 1.0);
    plan.R_ladder = {10.0};
    plan.replicates = 10000;
    const auto runs = run_clt_experiment(plan);
    const CltRunResult& run = runs.front();
    const double el = seconds_since(t0);
    const bool ok = run.ad.pass && run.variance_ratio >= 0.93 &&
                    run.variance_ratio <= 1.07 && el <= 120.0;
    report(6, ok,
           fmt("hyperbolic CLT R=10: AD %.3f (p %.3f), var ratio %.4f, %.1fs",
               run.ad.statistic, run.ad.p_value, run.variance_ratio, el));
    g_jobs.push_back({"clt-hyperbolic", run.table.to_csv(), [plan]() {
                          return run_clt_experiment(plan).front().table.to_csv();
                      }});
}

void criterion_7() {
    const auto t0 = Clock::now();
    ExperimentPlan plan;
    plan.ensemble = Ensemble::ginibre();
    plan.f = TestFunction::indicator(0.0, 1.0);
    plan.R_ladder = {100.0};
    plan.replicates = 10000;
    const auto runs = run_clt_experiment(plan);
    const CltRunResult& run = runs.front();
    const double el = seconds_since(t0);
    const bool ok = run.ad.pass && run.variance_ratio >= 0.95 &&
                    run.variance_ratio <= 1.05 && el <= 120.0;
    std::string detail =
        fmt("ginibre CLT R=100: AD %.3f (p %.3f), var ratio %.4f, %.1fs",
            run.ad.statistic, run.ad.p_value, run.variance_ratio, el);
    if (!run.ad.pass) {
        // the raw statistic is an integer count, so the standardized
        // replicates sit on a lattice of spacing 1/sd and the AD statistic
        // carries a deterministic discreteness term n*delta^2/12 times
        // int phi^3/(Phi(1-Phi)) ~ 0.475. Exactly normal variates rounded to
        // the same lattice score the same; scale agreement is what the
        // variance ratio reports.
        const double delta = 1.0 / std::sqrt(run.predicted_variance);
        const double inflation =
            static_cast<double>(plan.replicates) * delta * delta * 0.475 / 12.0;
        detail += fmt("; count lattice spacing %.3f adds ~%.1f to AD", delta,
                      inflation);
    }
    report(7, ok, detail);
    g_jobs.push_back({"clt-ginibre", run.table.to_csv(), [plan]() {
                          return run_clt_experiment(plan).front().table.to_csv();
                      }});
}

void criterion_8() {
    const auto t0 = Clock::now();
    ExperimentPlan plan;
    plan.ensemble = Ensemble::ginibre();
    plan.f = TestFunction::indicator(0.0, 1.0);
    plan.scaling_family = ScalingRegime::Family::PowerOfR;
    plan.scaling_exponent = 0.5;
    plan.R_ladder = {400.0};
    plan.replicates = 10000;
    const TestFunction g = TestFunction::indicator(2.0, 3.0);
    const auto runs = run_whitenoise_experiment(plan, g);
    const WhiteNoiseRunResult& run = runs.front();
    const double el = seconds_since(t0);
    const bool ok = std::fabs(run.variance_ratio - 1.0) <= 0.07 &&
                    std::fabs(run.cross_correlation) <= 0.05 && el <= 180.0;
    report(8, ok,
           fmt("white noise R=400 a=sqrt(R): var/(2 int f^2) %.4f, corr %.4f, %.1fs",
               run.variance_ratio, run.cross_correlation, el));
    g_jobs.push_back({"whitenoise", run.table.to_csv(), [plan, g]() {
                          return run_whitenoise_experiment(plan, g).front().table.to_csv();
                      }});
}

void criterion_9() {
    const auto t0 = Clock::now();
    ExperimentPlan gin;
    gin.ensemble = Ensemble::ginibre();
    gin.scaling_family = ScalingRegime::Family::PowerOfR;
    gin.scaling_exponent = 1.0;
    gin.R_ladder = {200.0};
    gin.replicates = 10000;
    const auto gruns = run_poisson_experiment(gin, 5.0);
    const PoissonRunResult& g = gruns.front();

    ExperimentPlan hyp;
    hyp.ensemble = Ensemble::hyperbolic(2.0);
    hyp.scaling_family = ScalingRegime::Family::ExpOfR;
    hyp.scaling_exponent = 1.0;
    hyp.R_ladder = {10.0};
    hyp.replicates = 10000;
    const auto hruns = run_poisson_experiment(hyp, 4.0);
    const PoissonRunResult& h = hruns.front();

    const double el = seconds_since(t0);
    const bool gin_ok = std::fabs(g.mean_count - 10.0) <= 0.095 && g.dispersion >= 0.9 &&
                        g.dispersion <= 1.1 && g.chi2.pass && g.spacings.pass;
    const bool hyp_ok = std::fabs(h.mean_count - 2.0) <= 3.0 * h.mean_se;
    report(9, gin_ok && hyp_ok && el <= 180.0,
           fmt("poisson counts: ginibre mean %.4f disp %.4f chi2 p %.3f ks p %.3f; "
               "hyperbolic mean %.4f (target 2), %.1fs",
               g.mean_count, g.dispersion, g.chi2.p_value, g.spacings.p_value,
               h.mean_count, el));
    g_jobs.push_back({"poisson-ginibre", g.table.to_csv(), [gin]() {
                          return run_poisson_experiment(gin, 5.0).front().table.to_csv();
                      }});
    g_jobs.push_back({"poisson-hyperbolic", h.table.to_csv(), [hyp]() {
                          return run_poisson_experiment(hyp, 4.0).front().table.to_csv();
                      }});
}

void criterion_10() {
    const auto t0 = Clock::now();

    ExperimentPlan degen;
    degen.ensemble = Ensemble::ginibre();
    degen.f = TestFunction::indicator(0.0, 1.0);
    degen.scaling_family = ScalingRegime::Family::PowerOfR;
    degen.scaling_exponent = 2.0;
    degen.R_ladder = {50.0, 100.0};
    degen.replicates = 1;
    const DegenerateCheck chk = degenerate_check(degen);
    const double drop = chk.rows[0].var_exact / chk.rows[1].var_exact;
    const bool degen_ok = chk.variance_below_envelope && chk.variance_decreasing &&
                          drop >= 1.6 && drop <= 2.4;

    ExperimentPlan sx;
    sx.ensemble = Ensemble::hyperbolic(1.0);
    sx.f = TestFunction::indicator(-1.0, 0.0);
    sx.scaling_family = ScalingRegime::Family::PowerOfR;
    sx.scaling_exponent = -0.5;
    sx.R_ladder = {12.0};
    sx.replicates = 10000;
    const auto sruns = run_superexp_experiment(sx);
    const SuperexpRunResult& s = sruns.front();
    const bool sx_ok = !s.degenerate && s.ad.pass;

    ExperimentPlan z1;
    z1.ensemble = Ensemble::ginibre();
    z1.f = TestFunction::indicator(-3.0, -2.0);
    z1.scaling_family = ScalingRegime::Family::PowerOfR;
    z1.scaling_exponent = -1.0;
    z1.R_ladder = {12.0};
    z1.replicates = 1000;
    const auto z1runs = run_superexp_experiment(z1);

    ExperimentPlan z2;
    z2.ensemble = Ensemble::hyperbolic(1.0);
    z2.f = TestFunction::indicator(-2.0, -1.0);
    z2.scaling_family = ScalingRegime::Family::ExpOfR;
    z2.scaling_exponent = -1.0;
    z2.R_ladder = {6.0};
    z2.replicates = 1000;
    const auto z2runs = run_superexp_experiment(z2);

    const bool zero_ok = z1runs.front().degenerate && z1runs.front().all_zero &&
                         z2runs.front().degenerate && z2runs.front().all_zero;

    const double el = seconds_since(t0);
    report(10, degen_ok && sx_ok && zero_ok && el <= 180.0,
           fmt("envelope drop %.3f (target 2 +-20%%), jump AD %.3f (p %.3f), "
               "zero cases all-zero %s, %.1fs",
               drop, s.ad.statistic, s.ad.p_value, zero_ok ? "yes" : "no", el));
    g_jobs.push_back({"superexp", s.table.to_csv(), [sx]() {
                          return run_superexp_experiment(sx).front().table.to_csv();
                      }});
    g_jobs.push_back({"superexp-zero-ginibre", z1runs.front().table.to_csv(), [z1]() {
                          return run_superexp_experiment(z1).front().table.to_csv();
                      }});
    g_jobs.push_back({"superexp-zero-hyperbolic", z2runs.front().table.to_csv(), [z2]() {
                          return run_superexp_experiment(z2).front().table.to_csv();
                      }});
    g_jobs.push_back({"degenerate-check", degenerate_csv(chk), [degen]() {
                          return degenerate_csv(degenerate_check(degen));
                      }});
}

void criterion_11() {
    const auto t0 = Clock::now();
    const double c0 = 0.5;
    double max21 = 0.0;
    for (double y : {1e2, 1e3, 1e4, 1e5, 1e6})
        for (int i = 0; i <= 80; ++i) {
            const double t = 0.25 * i;
            max21 = std::max(max21, lemma21_error(y, t) * y * std::exp(t / c0));
        }
    double max22 = 0.0;
    for (double alpha : {0.5, 1.0, 2.0})
        for (double y : {1.0, 2.0, 3.7, 10.0, 100.0, 1e3, 1e4, 1e6})
            max22 = std::max(max22, lemma22_error(alpha, y) / std::pow(y, alpha - 1.0));
    const double el = seconds_since(t0);
    const bool ok = max21 <= 30.0 && max22 <= 8.0 && el < 10.0;
    report(11, ok,
           fmt("lemma probes: sup err*y*e^(t/0.5) = %.3f (cap 30), "
               "sup err/y^(a-1) = %.3f (cap 8), %.2fs",
               max21, max22, el));
}

void criterion_12() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const ReplayJob& job : g_jobs) {
        setenv("RADIALDPP_THREADS", "1", 1);
        const std::string one = job.rerun();
        setenv("RADIALDPP_THREADS", "3", 1);
        const std::string three = job.rerun();
        if (one != job.original || three != job.original) {
            ok = false;
            if (bad.empty()) bad = job.name;
        }
    }
    unsetenv("RADIALDPP_THREADS");
    const double el = seconds_since(t0);
    if (ok)
        report(12, !g_jobs.empty(),
               fmt("%zu payloads byte-identical across reruns at 1 and 3 workers, %.1fs",
                   g_jobs.size(), el));
    else
        report(12, false, fmt("payload mismatch in %s, %.1fs", bad.c_str(), el));
}

} // namespace

int main() {
    guard(1, criterion_1);
    guard(2, criterion_2);
    guard(3, criterion_3);
    guard(4, criterion_4);
    guard(5, criterion_5);
    guard(6, criterion_6);
    guard(7, criterion_7);
    guard(8, criterion_8);
    guard(9, criterion_9);
    guard(10, criterion_10);
    guard(11, criterion_11);
    guard(12, criterion_12);
    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures;
}
