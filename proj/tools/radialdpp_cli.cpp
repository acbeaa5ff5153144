#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <radialdpp/radialdpp.hpp>

namespace {

using namespace radialdpp;

constexpr std::uint64_t kDefaultSeed = 0xD99;

struct Options {
    std::string ensemble;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    std::string f_path;
    std::string g_path;
    std::string plan_path;
    std::vector<double> R;
    double a = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    std::string coord = "scaled";
    std::int64_t replicate = 0;
    std::int64_t reps = 10000;
    std::uint64_t seed = kDefaultSeed;
    double eps = 1e-12;
    double T = 0.0;
    double tol = 1e-8;
    std::string xgrid = "-5:5:41";
    std::string scaling;
    double exponent = std::numeric_limits<double>::quiet_NaN();
    std::string kind = "soshnikov";
    std::string out_path;
    std::string format = "json";
    bool strict = false;
    int verbosity = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TestFunction load_test_function(const std::string& path, const TestFunction& fallback) {
    if (path.empty()) return fallback;
    try {
        return parse_test_function(slurp(path));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("bad test function JSON: ") + e.what());
    }
}

Ensemble build_ensemble(const Options& opt) {
    if (opt.ensemble == "ginibre") {
        if (!std::isnan(opt.alpha))
            throw std::invalid_argument("--alpha applies to the hyperbolic ensemble only");
        return Ensemble::ginibre();
    }
    if (opt.ensemble == "hyperbolic") {
        if (std::isnan(opt.alpha))
            throw std::invalid_argument("hyperbolic ensemble needs --alpha");
        return Ensemble::hyperbolic(opt.alpha);
    }
    throw std::invalid_argument("--ensemble must be ginibre or hyperbolic");
}

void write_payload(const Options& opt, const std::string& payload) {
    if (opt.out_path.empty()) {
        std::cout << payload;
        if (payload.empty() || payload.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + opt.out_path);
    out << payload;
}

std::vector<double> parse_grid(const std::string& s) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2 ||
        !(lo < hi))
        throw std::invalid_argument("--xgrid must look like lo:hi:count with count >= 2");
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
    return grid;
}

// Command-specific scaling defaults; explicit --scaling/--exponent always win.
void resolve_scaling(const std::string& cmd, const Ensemble& e, Options& opt,
                     ExperimentPlan& plan) {
    if (!opt.scaling.empty()) {
        plan.scaling_family = parse_scaling_family(opt.scaling);
        if (plan.scaling_family != ScalingRegime::Family::Fixed && std::isnan(opt.exponent))
            throw std::invalid_argument("--scaling " + opt.scaling + " needs --exponent");
        plan.scaling_exponent = std::isnan(opt.exponent) ? 0.0 : opt.exponent;
        return;
    }
    if (cmd == "whitenoise") {
        plan.scaling_family = e.is_ginibre() ? ScalingRegime::Family::PowerOfR
                                             : ScalingRegime::Family::ExpOfR;
        plan.scaling_exponent = std::isnan(opt.exponent) ? 0.5 : opt.exponent;
    } else if (cmd == "poisson") {
        plan.scaling_family = e.is_ginibre() ? ScalingRegime::Family::PowerOfR
                                             : ScalingRegime::Family::ExpOfR;
        plan.scaling_exponent = std::isnan(opt.exponent) ? 1.0 : opt.exponent;
    } else if (cmd == "superexp") {
        plan.scaling_family = ScalingRegime::Family::PowerOfR;
        plan.scaling_exponent = std::isnan(opt.exponent) ? -0.5 : opt.exponent;
    } else if (cmd == "degenerate") {
        plan.scaling_family = e.is_ginibre() ? ScalingRegime::Family::PowerOfR
                                             : ScalingRegime::Family::ExpOfR;
        plan.scaling_exponent = std::isnan(opt.exponent) ? 2.0 : opt.exponent;
    } else {
        plan.scaling_family = ScalingRegime::Family::Fixed;
        plan.scaling_exponent = 0.0;
    }
}

ExperimentPlan make_plan(const std::string& cmd, Options& opt,
                         const TestFunction& default_f) {
    if (!opt.plan_path.empty()) {
        try {
            return parse_experiment_plan(slurp(opt.plan_path));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("bad plan JSON: ") + e.what());
        }
    }
    ExperimentPlan plan;
    plan.ensemble = build_ensemble(opt);
    plan.f = load_test_function(opt.f_path, default_f);
    resolve_scaling(cmd, plan.ensemble, opt, plan);
    plan.R_ladder = opt.R;
    plan.replicates = opt.reps;
    plan.seed = opt.seed;
    plan.eps_trunc = opt.eps;
    return plan;
}

template <typename Run>
std::string tables_to_csv(const std::vector<Run>& runs) {
    std::string out = "replicate_id,raw_stat,standardized_stat,count\n";
    for (const Run& r : runs) {
        const std::string block = r.table.to_csv();
        out += block.substr(block.find('\n') + 1);
    }
    return out;
}

int finish_experiment(const Options& opt, const std::string& json_payload,
                      const std::string& csv_payload, bool gof_ok) {
    write_payload(opt, opt.format == "csv" ? csv_payload : json_payload);
    if (opt.strict && !gof_ok) return 4;
    return 0;
}

int run_command(const std::string& cmd, Options& opt) {
    if (cmd == "sample") {
        const Ensemble e = build_ensemble(opt);
        Window w = Window::raw(opt.lo, opt.hi);
        if (opt.coord == "raw") {
            w = Window::raw(opt.lo, opt.hi);
        } else if (opt.coord == "hyperbolic") {
            w = Window::hyperbolic_distance(opt.lo, opt.hi);
        } else if (opt.coord == "scaled") {
            if (opt.R.empty())
                throw std::invalid_argument("sample with scaled coordinates needs --R");
            w = Window::scaled(opt.lo, opt.hi, opt.R.front(), opt.a);
        } else {
            throw std::invalid_argument("--coord must be raw, hyperbolic or scaled");
        }
        const RadialSample s = sample_window(e, w, opt.seed, opt.replicate, opt.eps);
        write_payload(opt, opt.format == "csv" ? to_csv(s) : to_json(s));
        return 0;
    }

    if (cmd == "moments") {
        const Ensemble e = build_ensemble(opt);
        const TestFunction f =
            load_test_function(opt.f_path, TestFunction::indicator(0.0, 1.0));
        ExperimentPlan shell;
        shell.ensemble = e;
        resolve_scaling(cmd, e, opt, shell);
        std::vector<MomentReport> reports;
        for (double R : opt.R) {
            ScalingRegime s;
            s.family = shell.scaling_family;
            s.exponent = shell.scaling_exponent;
            s.R = R;
            reports.push_back(moment_report(e, f, s, opt.eps));
        }
        if (opt.format == "csv") {
            write_payload(opt, to_csv(reports));
        } else {
            std::string out = "{\"reports\":[";
            for (std::size_t i = 0; i < reports.size(); ++i) {
                if (i) out += ',';
                out += to_json(reports[i]);
            }
            out += "]}";
            write_payload(opt, out);
        }
        return 0;
    }

    if (cmd == "vf") {
        const Ensemble e = build_ensemble(opt);
        const TestFunction f =
            load_test_function(opt.f_path, TestFunction::indicator(0.0, 1.0));
        const double v = e.is_hyperbolic() ? v_f_hyperbolic(e.alpha, f) : v_f_ginibre(f);
        write_payload(opt, "{\"V_f\":" + format_g17(v) + "}");
        return 0;
    }

    if (cmd == "kernel-check") {
        if (std::isnan(opt.alpha))
            throw std::invalid_argument("kernel-check needs --alpha");
        const std::vector<double> grid = parse_grid(opt.xgrid);
        double max_err = 0.0;
        for (double x : grid)
            max_err = std::max(max_err,
                               std::fabs(beta_kernel_marginal(opt.alpha, x) - std::exp(x)));
        const bool pass = max_err <= opt.tol;
        write_payload(opt, "{\"alpha\":" + format_g17(opt.alpha) +
                               ",\"max_error\":" + format_g17(max_err) +
                               ",\"tol\":" + format_g17(opt.tol) +
                               ",\"pass\":" + (pass ? "true" : "false") + "}");
        return pass ? 0 : 1;
    }

    if (cmd == "clt") {
        const ExperimentPlan plan =
            make_plan(cmd, opt, TestFunction::indicator(0.0, 1.0));
        const auto runs = run_clt_experiment(plan);
        bool ok = true;
        for (const auto& r : runs) ok = ok && r.ad.pass;
        return finish_experiment(opt, runs_to_json(runs), tables_to_csv(runs), ok);
    }

    if (cmd == "whitenoise") {
        const ExperimentPlan plan =
            make_plan(cmd, opt, TestFunction::indicator(0.0, 1.0));
        const TestFunction g =
            load_test_function(opt.g_path, TestFunction::indicator(2.0, 3.0));
        const auto runs = run_whitenoise_experiment(plan, g);
        bool ok = true;
        for (const auto& r : runs) ok = ok && r.ad.pass;
        return finish_experiment(opt, runs_to_json(runs), tables_to_csv(runs), ok);
    }

    if (cmd == "poisson") {
        const ExperimentPlan plan =
            make_plan(cmd, opt, TestFunction::indicator(0.0, 1.0));
        if (!(opt.T > 0.0)) throw std::invalid_argument("poisson needs --T > 0");
        const auto runs = run_poisson_experiment(plan, opt.T);
        bool ok = true;
        for (const auto& r : runs)
            ok = ok && r.chi2.pass && r.spacings.pass && r.mean_ok;
        return finish_experiment(opt, runs_to_json(runs), tables_to_csv(runs), ok);
    }

    if (cmd == "superexp") {
        const ExperimentPlan plan =
            make_plan(cmd, opt, TestFunction::indicator(-1.0, 0.0));
        const auto runs = run_superexp_experiment(plan);
        bool ok = true;
        for (const auto& r : runs) ok = ok && (r.degenerate ? r.all_zero : r.ad.pass);
        return finish_experiment(opt, runs_to_json(runs), tables_to_csv(runs), ok);
    }

    if (cmd == "degenerate") {
        const ExperimentPlan plan =
            make_plan(cmd, opt, TestFunction::indicator(0.0, 1.0));
        const DegenerateCheck check = degenerate_check(plan);
        std::string csv = "R,a_R,var_exact,envelope,ratio\n";
        for (const auto& row : check.rows)
            csv += format_g17(row.R) + "," + format_g17(row.a_R) + "," +
                   format_g17(row.var_exact) + "," + format_g17(row.envelope) + "," +
                   format_g17(row.ratio) + "\n";
        write_payload(opt, opt.format == "csv" ? csv : to_json(check));
        if (opt.strict && !(check.variance_below_envelope && check.variance_decreasing))
            return 4;
        return 0;
    }

    if (cmd == "diagnose") {
        const Ensemble e = build_ensemble(opt);
        const TestFunction f =
            load_test_function(opt.f_path, TestFunction::indicator(0.0, 1.0));
        if (opt.R.empty()) throw std::invalid_argument("diagnose needs --R");
        const double R = opt.R.front();
        if (opt.kind == "soshnikov") {
            write_payload(opt, to_json(soshnikov_diagnostics(e, f, R, opt.a, opt.eps)));
        } else if (opt.kind == "poisson") {
            write_payload(opt,
                          to_json(poisson_limit_diagnostics(e, f, R, opt.a, opt.eps)));
        } else {
            throw std::invalid_argument("--kind must be soshnikov or poisson");
        }
        return 0;
    }

    throw std::invalid_argument("unknown command: " + cmd);
}

void add_output_options(CLI::App* sub, Options& opt) {
    sub->add_option("-o,--out", opt.out_path, "Write the payload to this file");
    sub->add_option("--format", opt.format, "Payload format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("-v,--verbose", opt.verbosity, "Log progress to stderr");
}

void add_ensemble_options(CLI::App* sub, Options& opt) {
    sub->add_option("--ensemble", opt.ensemble, "Point process family")
        ->check(CLI::IsMember({"ginibre", "hyperbolic"}))
        ->required();
    sub->add_option("--alpha", opt.alpha, "Hyperbolic weight parameter (> 0)");
}

void add_statistic_options(CLI::App* sub, Options& opt) {
    sub->add_option("--f", opt.f_path,
                    "Test function JSON file {\"breakpoints\":[...],\"values\":[...]}");
    sub->add_option("--seed", opt.seed, "Master seed (default 0xD99)");
    sub->add_option("--eps", opt.eps, "Truncation tail budget");
}

void add_experiment_options(CLI::App* sub, Options& opt) {
    sub->add_option("--R", opt.R, "Window center ladder (repeatable)")->required();
    sub->add_option("--reps", opt.reps, "Monte Carlo replicates");
    sub->add_option("--scaling", opt.scaling, "Scaling family of a_R")
        ->check(CLI::IsMember({"fixed", "power", "exp"}));
    sub->add_option("--exponent", opt.exponent,
                    "Exponent p: a_R = R^p (power) or e^{pR} (exp)");
    sub->add_option("--plan", opt.plan_path, "Experiment plan JSON file (overrides flags)");
    sub->add_flag("--strict", opt.strict, "Exit 4 when a goodness-of-fit check fails");
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Simulation and verification toolkit for radial determinantal ensembles"};
    app.require_subcommand(1);

    CLI::App* sample = app.add_subcommand("sample", "Draw one window sample");
    add_ensemble_options(sample, opt);
    add_statistic_options(sample, opt);
    sample->add_option("--lo", opt.lo, "Window lower endpoint")->required();
    sample->add_option("--hi", opt.hi, "Window upper endpoint")->required();
    sample->add_option("--coord", opt.coord, "Window coordinate system")
        ->check(CLI::IsMember({"raw", "hyperbolic", "scaled"}));
    sample->add_option("--R", opt.R, "Window center (scaled coordinates)");
    sample->add_option("--a", opt.a, "Scale factor a_R (scaled coordinates)");
    sample->add_option("--replicate", opt.replicate, "Replicate id to draw");
    add_output_options(sample, opt);

    CLI::App* moments = app.add_subcommand("moments", "Exact vs asymptotic moments");
    add_ensemble_options(moments, opt);
    add_statistic_options(moments, opt);
    moments->add_option("--R", opt.R, "Window center ladder")->required();
    moments->add_option("--scaling", opt.scaling, "Scaling family of a_R")
        ->check(CLI::IsMember({"fixed", "power", "exp"}));
    moments->add_option("--exponent", opt.exponent, "Scaling exponent");
    add_output_options(moments, opt);

    CLI::App* vf = app.add_subcommand("vf", "Limit variance functional of f");
    add_ensemble_options(vf, opt);
    add_statistic_options(vf, opt);
    add_output_options(vf, opt);

    CLI::App* kernel = app.add_subcommand("kernel-check", "Kernel marginal identity check");
    kernel->add_option("--alpha", opt.alpha, "Hyperbolic weight parameter")->required();
    kernel->add_option("--xgrid", opt.xgrid, "Grid lo:hi:count");
    kernel->add_option("--tol", opt.tol, "Max error tolerance");
    add_output_options(kernel, opt);

    CLI::App* clt = app.add_subcommand("clt", "Fixed-scale Gaussian fluctuation study");
    add_ensemble_options(clt, opt);
    add_statistic_options(clt, opt);
    add_experiment_options(clt, opt);
    add_output_options(clt, opt);

    CLI::App* wn = app.add_subcommand("whitenoise", "Intermediate-scale decoupling study");
    add_ensemble_options(wn, opt);
    add_statistic_options(wn, opt);
    add_experiment_options(wn, opt);
    wn->add_option("--g", opt.g_path, "Second (disjoint) test function JSON file");
    add_output_options(wn, opt);

    CLI::App* poisson = app.add_subcommand("poisson", "Edge-scale Poisson limit study");
    add_ensemble_options(poisson, opt);
    add_statistic_options(poisson, opt);
    add_experiment_options(poisson, opt);
    poisson->add_option("--T", opt.T, "Count window is [0, T]")->required();
    add_output_options(poisson, opt);

    CLI::App* sx = app.add_subcommand("superexp", "Small-scale jump statistic study");
    add_ensemble_options(sx, opt);
    add_statistic_options(sx, opt);
    add_experiment_options(sx, opt);
    add_output_options(sx, opt);

    CLI::App* degen = app.add_subcommand("degenerate", "Past-the-edge variance collapse");
    add_ensemble_options(degen, opt);
    add_statistic_options(degen, opt);
    add_experiment_options(degen, opt);
    add_output_options(degen, opt);

    CLI::App* diag = app.add_subcommand("diagnose", "Limit-regime diagnostics");
    add_ensemble_options(diag, opt);
    add_statistic_options(diag, opt);
    diag->add_option("--R", opt.R, "Window center")->required();
    diag->add_option("--a", opt.a, "Scale factor a_R");
    diag->add_option("--kind", opt.kind, "Diagnostic family")
        ->check(CLI::IsMember({"soshnikov", "poisson"}));
    add_output_options(diag, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        rc = run_command(cmd, opt);
    } catch (const std::invalid_argument& e) {
        std::cout << "{\"error\":\"" << radialdpp::detail::json_escape(e.what())
                  << "\",\"kind\":\"validation\"}" << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cout << "{\"error\":\"" << radialdpp::detail::json_escape(e.what())
                  << "\",\"kind\":\"numerical\"}" << std::endl;
        return 1;
    }
    if (opt.verbosity > 0) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        std::cerr << "command=" << cmd << " elapsed_ms=" << elapsed << "\n";
    }
    return rc;
}
