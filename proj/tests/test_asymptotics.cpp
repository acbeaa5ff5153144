#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include <radialdpp/asymptotics.hpp>
#include <radialdpp/oracle.hpp>
#include <radialdpp/quadrature.hpp>
#include <radialdpp/special_functions.hpp>
#include <radialdpp/test_function.hpp>
#include <radialdpp/util.hpp>

using namespace radialdpp;

TEST_CASE("edge rate constant") {
    REQUIRE(c_r_alpha(1.0, 0.0) == Catch::Approx(0.125).epsilon(1e-15));
    REQUIRE(c_r_alpha(8.0, 0.0) == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(c_r_alpha(1.0, std::log(8.0)) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE_THROWS_AS(c_r_alpha(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian box integral matches adaptive quadrature") {
    struct Box {
        double a, b, c, d;
    };
    const Box boxes[] = {{0, 1, 0, 1}, {0, 1, 2.5, 3.7}, {-1.2, 0.4, -0.3, 2.0}};
    for (const Box& bx : boxes) {
        const QuadResult q = quad_2d(
            [](double x, double y) { return std::exp(-(x - y) * (x - y)); }, bx.a, bx.b,
            bx.c, bx.d);
        REQUIRE(q.converged);
        REQUIRE(detail::gauss_box_integral(bx.a, bx.b, bx.c, bx.d) ==
                Catch::Approx(q.value).epsilon(1e-10));
    }
}

TEST_CASE("Ginibre covariance functional") {
    const TestFunction ind = TestFunction::indicator(0.0, 1.0);
    const double closed =
        2.0 * radialdpp::erfc(1.0) + 2.0 * (1.0 - std::exp(-1.0)) / kSqrtPi;
    REQUIRE(v_f_ginibre(ind) == Catch::Approx(closed).epsilon(1e-12));

    const TestFunction f({-1.0, 0.3, 1.0}, {2.0, -1.0});
    const double base = v_f_ginibre(f);
    REQUIRE(base > 0.0);
    REQUIRE(v_f_ginibre(f.scaled(2.0)) == Catch::Approx(4.0 * base).epsilon(1e-12));

    // the pair weight depends on x - y only, so translation leaves it fixed
    const TestFunction shifted({2.0, 3.3, 4.0}, {2.0, -1.0});
    REQUIRE(v_f_ginibre(shifted) == Catch::Approx(base).epsilon(1e-12));

    REQUIRE(v_f_ginibre(TestFunction({0.0, 1.0}, {0.0})) == 0.0);
}

namespace {

// Direct covariance functional evaluation: (1/B) sum over box pairs of
// (v_i - v_j)^2 times the pair-weight integral, with zero flanking strips
// wide enough that the omitted tail is negligible.
double v_f_hyperbolic_direct(double alpha, const TestFunction& f) {
    const TestFunction ft = f.trimmed();
    const double pad = 28.0;
    std::vector<double> grid;
    std::vector<double> vals;
    grid.push_back(ft.support_lo() - pad);
    vals.push_back(0.0);
    for (std::size_t i = 0; i < ft.values().size(); ++i) {
        grid.push_back(ft.breakpoints()[i]);
        vals.push_back(ft.values()[i]);
    }
    grid.push_back(ft.support_hi());
    vals.push_back(0.0);
    grid.push_back(ft.support_hi() + pad);

    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
            const double dv = vals[i] - vals[j];
            if (dv == 0.0) continue;
            const double box = quad_2d_strict(
                [&](double x, double y) {
                    return detail::hyperbolic_pair_kernel(alpha, x, y);
                },
                grid[i], grid[i + 1], grid[j], grid[j + 1], spec);
            total += dv * dv * box;
        }
    }
    return total / beta_fn(alpha, alpha + 1.0);
}

} // namespace

TEST_CASE("hyperbolic covariance functional against the direct double integral") {
    const TestFunction ind = TestFunction::indicator(0.0, 1.0);
    const TestFunction two({-1.0, 0.0, 1.0}, {2.0, -1.0});
    for (double alpha : {1.0, 2.0}) {
        REQUIRE(v_f_hyperbolic(alpha, ind) ==
                Catch::Approx(v_f_hyperbolic_direct(alpha, ind)).epsilon(1e-7));
        REQUIRE(v_f_hyperbolic(alpha, two) ==
                Catch::Approx(v_f_hyperbolic_direct(alpha, two)).epsilon(1e-7));
    }
    REQUIRE(v_f_hyperbolic(1.0, ind.scaled(3.0)) ==
            Catch::Approx(9.0 * v_f_hyperbolic(1.0, ind)).epsilon(1e-9));
    REQUIRE(v_f_hyperbolic(2.0, TestFunction({0.0, 1.0}, {0.0})) == 0.0);
}

TEST_CASE("pair weight marginal integrates to the exponential") {
    for (double alpha : {1.0, 2.0})
        for (double x : {-2.0, 0.0, 3.0})
            REQUIRE(beta_kernel_marginal(alpha, x) ==
                    Catch::Approx(std::exp(x)).margin(1e-9).epsilon(1e-9));
}

TEST_CASE("edge intensity constant") {
    REQUIRE(gamma_moment_constant(1.0) == Catch::Approx(0.25).epsilon(1e-14));
    REQUIRE(gamma_moment_constant(2.0) == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(gamma_moment_constant(0.5) == Catch::Approx(0.125).epsilon(1e-14));
    REQUIRE(gamma_moment_quadrature(3.7) == Catch::Approx(3.7 / 4.0).epsilon(1e-10));
}

TEST_CASE("split-pair kernel mass") {
    REQUIRE(hyperbolic_jump_kernel_mass(1.0) == Catch::Approx(0.25).epsilon(1e-8));
    for (double alpha : {1.0, 2.0}) {
        const QuadResult direct = quad_2d(
            [&](double x, double y) { return detail::hyperbolic_pair_kernel(alpha, x, y); },
            -60.0, 0.0, 0.0, 60.0);
        REQUIRE(direct.converged);
        REQUIRE(hyperbolic_jump_kernel_mass(alpha) ==
                Catch::Approx(direct.value).epsilon(1e-6));
    }
}

TEST_CASE("discrete decay gap vanishes with y") {
    REQUIRE(lemma21_error(1e6, 0.0) == Catch::Approx(0.0).margin(1e-12));

    // agrees with the definition evaluated from scratch; pow on the rounded
    // base 1-2/(y+1) wobbles near 1e-13 once the exponent reaches the tens of
    // thousands, so the comparison is absolute at 1e-12
    for (double y : {1e2, 1e3, 1e4})
        for (double t : {0.123456, 1.0, 2.0}) {
            const double direct = std::fabs(
                std::pow(1.0 - 2.0 / (y + 1.0), 2.0 * std::floor(t * y)) -
                std::exp(-4.0 * t));
            REQUIRE(lemma21_error(y, t) == Catch::Approx(direct).margin(1e-12));
        }

    const double e2 = lemma21_error(1e2, 1.0);
    const double e4 = lemma21_error(1e4, 1.0);
    REQUIRE(e2 < 1e-3);
    REQUIRE(e4 < 1e-5);
    REQUIRE(e4 < e2);
    // when t*y falls between integers the floor contributes a term of order
    // 1/y, so the decay along decades is at least linear in 1/y
    const double f2 = lemma21_error(1e2, 0.123456);
    const double f4 = lemma21_error(1e4, 0.123456);
    REQUIRE(f2 / f4 > 10.0);
    REQUIRE_THROWS_AS(lemma21_error(-1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lemma21_error(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("coefficient gap grows no faster than y^(alpha-1)") {
    for (double alpha : {0.5, 1.0, 2.0})
        for (double y : {1.0, 3.7, 10.0, 1e3, 1e6}) {
            const double ratio = lemma22_error(alpha, y) / std::pow(y, alpha - 1.0);
            REQUIRE(ratio <= 8.0);
        }
    // alpha = 1: k_n = n+1, so the gap is the fractional part offset, <= 1
    REQUIRE(lemma22_error(1.0, 7.3) == Catch::Approx(std::abs(8.0 - 7.3)).epsilon(1e-12));
}

TEST_CASE("regime classification") {
    const Ensemble gin = Ensemble::ginibre();
    const Ensemble hyp = Ensemble::hyperbolic(2.0);

    REQUIRE(classify_regime(gin, ScalingRegime::fixed(10)) == RegimeClass::Fixed);
    REQUIRE(classify_regime(gin, ScalingRegime::power(10, 0.0)) == RegimeClass::Fixed);
    REQUIRE(classify_regime(gin, ScalingRegime::exponential(10, 0.0)) == RegimeClass::Fixed);

    REQUIRE(classify_regime(gin, ScalingRegime::power(10, 0.5)) == RegimeClass::Intermediate);
    REQUIRE(classify_regime(gin, ScalingRegime::power(10, 1.0)) == RegimeClass::Extreme);
    REQUIRE(classify_regime(gin, ScalingRegime::power(10, 2.0)) ==
            RegimeClass::DegenerateLarge);
    REQUIRE(classify_regime(gin, ScalingRegime::exponential(10, 0.3)) ==
            RegimeClass::DegenerateLarge);

    REQUIRE(classify_regime(hyp, ScalingRegime::power(10, 0.5)) == RegimeClass::Intermediate);
    REQUIRE(classify_regime(hyp, ScalingRegime::power(10, 3.0)) == RegimeClass::Intermediate);
    REQUIRE(classify_regime(hyp, ScalingRegime::exponential(10, 0.5)) ==
            RegimeClass::Intermediate);
    REQUIRE(classify_regime(hyp, ScalingRegime::exponential(10, 1.0)) == RegimeClass::Extreme);
    REQUIRE(classify_regime(hyp, ScalingRegime::exponential(10, 1.5)) ==
            RegimeClass::DegenerateLarge);

    REQUIRE(classify_regime(gin, ScalingRegime::power(10, -0.5)) == RegimeClass::SmallScale);
    REQUIRE(classify_regime(hyp, ScalingRegime::exponential(10, -1.0)) ==
            RegimeClass::SmallScale);

    REQUIRE(regime_name(RegimeClass::Extreme) == "extreme");
}

TEST_CASE("predicted limit laws by regime") {
    const Ensemble gin = Ensemble::ginibre();
    const Ensemble hyp = Ensemble::hyperbolic(2.0);
    const TestFunction f = TestFunction::indicator(0.0, 1.0);

    SECTION("fixed scale is Gaussian with the covariance functional") {
        const LimitLaw g = predicted_limit(gin, ScalingRegime::fixed(50), f);
        REQUIRE(g.kind == LimitLaw::Kind::Gaussian);
        REQUIRE(g.mean_shift == Catch::Approx(100.0).epsilon(1e-12));
        REQUIRE(g.variance == Catch::Approx(v_f_ginibre(f)).epsilon(1e-12));

        const LimitLaw h = predicted_limit(hyp, ScalingRegime::fixed(8), f);
        REQUIRE(h.kind == LimitLaw::Kind::Gaussian);
        REQUIRE(h.mean_shift ==
                Catch::Approx(2.0 * c_r_alpha(2.0, 8.0) * (std::exp(1.0) - 1.0))
                    .epsilon(1e-10));
        REQUIRE(h.variance == Catch::Approx(v_f_hyperbolic(2.0, f)).epsilon(1e-10));
    }
    SECTION("intermediate scale is white noise with variance 2 int f^2") {
        const LimitLaw w = predicted_limit(gin, ScalingRegime::power(100, 0.5), f);
        REQUIRE(w.kind == LimitLaw::Kind::WhiteNoiseGaussian);
        REQUIRE(w.variance == Catch::Approx(2.0).epsilon(1e-12));
    }
    SECTION("extreme scale is Poisson") {
        const LimitLaw p = predicted_limit(gin, ScalingRegime::power(100, 1.0), f);
        REQUIRE(p.kind == LimitLaw::Kind::Poisson);
        REQUIRE(p.intensity == Catch::Approx(2.0));
        const LimitLaw q = predicted_limit(hyp, ScalingRegime::exponential(10, 1.0), f);
        REQUIRE(q.kind == LimitLaw::Kind::Poisson);
        REQUIRE(q.intensity == Catch::Approx(0.5));
    }
    SECTION("beyond the edge rate the limit degenerates") {
        REQUIRE(predicted_limit(gin, ScalingRegime::power(50, 2.0), f).kind ==
                LimitLaw::Kind::Degenerate);
    }
    SECTION("small scale splits on the symbolic vanishing test") {
        const TestFunction at_zero = TestFunction::indicator(-1.0, 0.0);
        REQUIRE(predicted_limit(gin, ScalingRegime::power(12, -0.5), at_zero).kind ==
                LimitLaw::Kind::Gaussian);

        const TestFunction shallow = TestFunction::indicator(-1.0, -0.5);
        REQUIRE(predicted_limit(gin, ScalingRegime::power(12, -1.0), shallow).kind ==
                LimitLaw::Kind::Gaussian);
        const TestFunction deep = TestFunction::indicator(-3.0, -2.0);
        REQUIRE(predicted_limit(gin, ScalingRegime::power(12, -1.0), deep).kind ==
                LimitLaw::Kind::Degenerate);
        REQUIRE(predicted_limit(gin, ScalingRegime::power(12, -2.0), shallow).kind ==
                LimitLaw::Kind::Degenerate);
        REQUIRE(predicted_limit(hyp, ScalingRegime::exponential(12, -1.0), shallow).kind ==
                LimitLaw::Kind::Degenerate);

        const TestFunction zero({0.0, 1.0}, {0.0});
        REQUIRE_THROWS_AS(predicted_limit(gin, ScalingRegime::power(12, -0.5), zero),
                          std::invalid_argument);
    }
}

TEST_CASE("jump asymptotics") {
    SECTION("Ginibre mean reproduces the exact counting identity") {
        const Ensemble gin = Ensemble::ginibre();
        const ScalingRegime s = ScalingRegime::power(12.0, -1.0); // a_R = 1/12
        const TestFunction f = TestFunction::indicator(-0.5, -0.2);
        const JumpAsymptotics j = jump_asymptotics(gin, s, f);
        REQUIRE(j.mean == Catch::Approx(9.6 * 9.6 - 6.0 * 6.0).epsilon(1e-12));
        REQUIRE(j.mean == Catch::Approx(exact_mean(gin, f, 12.0, 1.0 / 12.0)).epsilon(1e-8));
        REQUIRE(j.variance > 0.0);
    }
    SECTION("vanishing cases report zero") {
        const Ensemble gin = Ensemble::ginibre();
        const JumpAsymptotics z = jump_asymptotics(
            gin, ScalingRegime::power(12.0, -1.0), TestFunction::indicator(-3.0, -2.0));
        REQUIRE(z.mean == 0.0);
        REQUIRE(z.variance == 0.0);
    }
    SECTION("hyperbolic jump mean approaches the exact mean from above") {
        const Ensemble hyp = Ensemble::hyperbolic(1.0);
        const TestFunction f = TestFunction::indicator(-1.0, 0.0);
        double prev_gap = 1.0;
        for (double R : {10.0, 14.0}) {
            const ScalingRegime s = ScalingRegime::power(R, -0.5);
            const JumpAsymptotics j = jump_asymptotics(hyp, s, f);
            const double exact = exact_mean(hyp, f, R, s.a_R());
            const double rel_gap = std::abs(exact - j.mean) / j.mean;
            // exact/asymptotic ratio is 1 - e^{-sqrt(R)} + o(1)
            REQUIRE(rel_gap < 1.2 * std::exp(-std::sqrt(R)));
            REQUIRE(rel_gap < prev_gap);
            prev_gap = rel_gap;
        }
    }
    SECTION("statistics without a jump are rejected") {
        REQUIRE_THROWS_AS(jump_asymptotics(Ensemble::ginibre(),
                                           ScalingRegime::power(12.0, -1.0),
                                           TestFunction({0.0, 1.0}, {0.0})),
                          std::invalid_argument);
    }
}

TEST_CASE("asymptotic moments assemble the regime pieces") {
    const TestFunction f = TestFunction::indicator(0.0, 1.0);
    SECTION("hyperbolic fixed scale") {
        const Ensemble hyp = Ensemble::hyperbolic(2.0);
        const ScalingRegime s = ScalingRegime::fixed(8.0);
        const AsymptoticMoments m = asymptotic_moments(hyp, s, f);
        REQUIRE(m.mean ==
                Catch::Approx(2.0 * c_r_alpha(2.0, 8.0) * (std::exp(1.0) - 1.0))
                    .epsilon(1e-12));
        REQUIRE(m.variance ==
                Catch::Approx(c_r_alpha(2.0, 8.0) * v_f_hyperbolic(2.0, f)).epsilon(1e-10));
    }
    SECTION("Ginibre fixed scale includes the centering correction") {
        const Ensemble gin = Ensemble::ginibre();
        const AsymptoticMoments m = asymptotic_moments(gin, ScalingRegime::fixed(50.0), f);
        REQUIRE(m.mean == Catch::Approx(2.0 * 50.0 + 1.0).epsilon(1e-12));
        REQUIRE(m.variance == Catch::Approx(50.0 * v_f_ginibre(f)).epsilon(1e-12));
    }
    SECTION("intermediate scale uses the white-noise variance") {
        const Ensemble gin = Ensemble::ginibre();
        const ScalingRegime s = ScalingRegime::power(100.0, 0.5);
        const AsymptoticMoments m = asymptotic_moments(gin, s, f);
        REQUIRE(m.variance == Catch::Approx(2.0 * 100.0 / 10.0 * 1.0).epsilon(1e-12));
    }
}
