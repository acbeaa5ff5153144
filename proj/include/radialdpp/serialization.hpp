#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotics.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "oracle.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "test_function.hpp"
#include "util.hpp"

// Emission is hand-rolled so every floating-point field is printed with 17
// significant digits (full round-trip precision); the vendored JSON library
// is used only to parse inputs.

namespace radialdpp {

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::string json_number_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_g17(v[i]);
    }
    out += ']';
    return out;
}

inline std::string json_int_array(const std::vector<std::int64_t>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    out += ']';
    return out;
}

} // namespace detail

inline std::string to_json(const TestFunction& f) {
    return "{\"breakpoints\":" + detail::json_number_array(f.breakpoints()) +
           ",\"values\":" + detail::json_number_array(f.values()) + "}";
}

inline std::string to_json(const Ensemble& e) {
    if (e.is_ginibre()) return "{\"kind\":\"ginibre\"}";
    return "{\"kind\":\"hyperbolic\",\"alpha\":" + format_g17(e.alpha) + "}";
}

inline std::string to_json(const LimitLaw& law) {
    std::string out = "{\"kind\":\"";
    switch (law.kind) {
        case LimitLaw::Kind::Gaussian:
            out += "gaussian\",\"centering\":" + format_g17(law.mean_shift) +
                   ",\"variance\":" + format_g17(law.variance);
            break;
        case LimitLaw::Kind::WhiteNoiseGaussian:
            out += "white_noise_gaussian\",\"variance\":" + format_g17(law.variance);
            break;
        case LimitLaw::Kind::Poisson:
            out += "poisson\",\"intensity\":" + format_g17(law.intensity);
            break;
        case LimitLaw::Kind::Degenerate:
            out += "degenerate\"";
            break;
    }
    out += ",\"provenance\":\"" + detail::json_escape(law.provenance) + "\"}";
    return out;
}

inline std::string to_json(const GofReport& rep) {
    return "{\"name\":\"" + detail::json_escape(rep.name) +
           "\",\"statistic\":" + format_g17(rep.statistic) +
           ",\"threshold\":" + format_g17(rep.threshold) +
           ",\"p_value\":" + format_g17(rep.p_value) +
           ",\"level\":" + format_g17(rep.level) +
           ",\"pass\":" + (rep.pass ? "true" : "false") +
           ",\"sample_size\":" + std::to_string(rep.sample_size) +
           ",\"notes\":\"" + detail::json_escape(rep.notes) + "\"}";
}

inline std::string to_json(const MomentReport& rep) {
    return "{\"R\":" + format_g17(rep.R) + ",\"a_R\":" + format_g17(rep.a_R) +
           ",\"mean_exact\":" + format_g17(rep.mean_exact) +
           ",\"var_exact\":" + format_g17(rep.var_exact) +
           ",\"mean_asymptotic\":" + format_g17(rep.mean_asymptotic) +
           ",\"var_asymptotic\":" + format_g17(rep.var_asymptotic) +
           ",\"n_min\":" + std::to_string(rep.n_min) +
           ",\"n_max\":" + std::to_string(rep.n_max) +
           ",\"truncation_mass\":" + format_g17(rep.truncation_mass) +
           ",\"quadrature_error\":" + format_g17(rep.quadrature_error) + "}";
}

inline std::string moment_report_csv_header() {
    return "R,a_R,mean_exact,var_exact,mean_asym,var_asym,trunc_mass\n";
}

inline std::string to_csv_row(const MomentReport& rep) {
    return format_g17(rep.R) + "," + format_g17(rep.a_R) + "," +
           format_g17(rep.mean_exact) + "," + format_g17(rep.var_exact) + "," +
           format_g17(rep.mean_asymptotic) + "," + format_g17(rep.var_asymptotic) + "," +
           format_g17(rep.truncation_mass) + "\n";
}

inline std::string to_csv(const std::vector<MomentReport>& reps) {
    std::string out = moment_report_csv_header();
    for (const MomentReport& r : reps) out += to_csv_row(r);
    return out;
}

inline std::string to_json(const RadialSample& s) {
    return "{\"seed\":" + std::to_string(s.seed) +
           ",\"replicate_id\":" + std::to_string(s.replicate_id) +
           ",\"n_min\":" + std::to_string(s.n_min) +
           ",\"n_max\":" + std::to_string(s.n_max) +
           ",\"truncation_mass\":" + format_g17(s.truncation_mass) +
           ",\"indices\":" + detail::json_int_array(s.point_indices) +
           ",\"values\":" + detail::json_number_array(s.values) + "}";
}

inline std::string to_csv(const RadialSample& s) {
    std::string out = "replicate_id,n,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out += std::to_string(s.replicate_id);
        out += ',';
        out += std::to_string(s.point_indices[i]);
        out += ',';
        out += format_g17(s.values[i]);
        out += '\n';
    }
    return out;
}

inline std::string to_json(const CltRunResult& r) {
    return "{\"R\":" + format_g17(r.R) + ",\"a_R\":" + format_g17(r.a_R) +
           ",\"mean_exact\":" + format_g17(r.mean_exact) +
           ",\"predicted_variance\":" + format_g17(r.predicted_variance) +
           ",\"empirical_mean\":" + format_g17(r.empirical_mean) +
           ",\"empirical_variance\":" + format_g17(r.empirical_variance) +
           ",\"variance_ratio\":" + format_g17(r.variance_ratio) +
           ",\"truncation_mass\":" + format_g17(r.truncation_mass) +
           ",\"ad\":" + to_json(r.ad) + ",\"ks\":" + to_json(r.ks) + "}";
}

inline std::string to_json(const WhiteNoiseRunResult& r) {
    return "{\"R\":" + format_g17(r.R) + ",\"a_R\":" + format_g17(r.a_R) +
           ",\"mean_exact_f\":" + format_g17(r.mean_exact_f) +
           ",\"mean_exact_g\":" + format_g17(r.mean_exact_g) +
           ",\"predicted_variance\":" + format_g17(r.predicted_variance) +
           ",\"normalized_variance\":" + format_g17(r.normalized_variance) +
           ",\"target_variance\":" + format_g17(r.target_variance) +
           ",\"variance_ratio\":" + format_g17(r.variance_ratio) +
           ",\"cross_correlation\":" + format_g17(r.cross_correlation) +
           ",\"ad\":" + to_json(r.ad) + ",\"ks\":" + to_json(r.ks) + "}";
}

inline std::string to_json(const PoissonRunResult& r) {
    return "{\"R\":" + format_g17(r.R) + ",\"a_R\":" + format_g17(r.a_R) +
           ",\"nu\":" + format_g17(r.nu) + ",\"T\":" + format_g17(r.T) +
           ",\"expected_mean\":" + format_g17(r.expected_mean) +
           ",\"mean_count\":" + format_g17(r.mean_count) +
           ",\"var_count\":" + format_g17(r.var_count) +
           ",\"dispersion\":" + format_g17(r.dispersion) +
           ",\"mean_se\":" + format_g17(r.mean_se) +
           ",\"mean_ok\":" + (r.mean_ok ? std::string("true") : std::string("false")) +
           ",\"chi2\":" + to_json(r.chi2) + ",\"spacings\":" + to_json(r.spacings) + "}";
}

inline std::string to_json(const SuperexpRunResult& r) {
    return "{\"R\":" + format_g17(r.R) + ",\"a_R\":" + format_g17(r.a_R) +
           ",\"mean_exact\":" + format_g17(r.mean_exact) +
           ",\"var_exact\":" + format_g17(r.var_exact) +
           ",\"jump_mean_asym\":" + format_g17(r.jump_mean_asym) +
           ",\"jump_var_asym\":" + format_g17(r.jump_var_asym) +
           ",\"variance_ratio\":" + format_g17(r.variance_ratio) +
           ",\"degenerate\":" + (r.degenerate ? std::string("true") : std::string("false")) +
           ",\"all_zero\":" + (r.all_zero ? std::string("true") : std::string("false")) +
           ",\"ad\":" + to_json(r.ad) + ",\"ks\":" + to_json(r.ks) + "}";
}

inline std::string to_json(const DegenerateCheck& c) {
    std::string out = "{\"rows\":[";
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const DegenerateRunResult& r = c.rows[i];
        if (i) out += ',';
        out += "{\"R\":" + format_g17(r.R) + ",\"a_R\":" + format_g17(r.a_R) +
               ",\"var_exact\":" + format_g17(r.var_exact) +
               ",\"envelope\":" + format_g17(r.envelope) +
               ",\"ratio\":" + format_g17(r.ratio) + "}";
    }
    out += "],\"variance_below_envelope\":";
    out += c.variance_below_envelope ? "true" : "false";
    out += ",\"variance_decreasing\":";
    out += c.variance_decreasing ? "true" : "false";
    out += "}";
    return out;
}

template <typename Run>
inline std::string runs_to_json(const std::vector<Run>& runs) {
    std::string out = "{\"runs\":[";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i) out += ',';
        out += to_json(runs[i]);
    }
    out += "]}";
    return out;
}

inline std::string to_json(const SoshnikovDiagnostics& d) {
    return "{\"variance\":" + format_g17(d.variance) + ",\"sup_f\":" + format_g17(d.sup_f) +
           ",\"mean_abs\":" + format_g17(d.mean_abs) +
           ",\"fluctuation_ratio\":" + format_g17(d.fluctuation_ratio) + "}";
}

inline std::string to_json(const PoissonDiagnostics& d) {
    return "{\"sum_means\":" + format_g17(d.sum_means) +
           ",\"sup_single\":" + format_g17(d.sup_single) +
           ",\"avoidance_gap\":" + format_g17(d.avoidance_gap) + "}";
}

inline TestFunction parse_test_function(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
        throw std::invalid_argument(
            "test function JSON needs \"breakpoints\" and \"values\" arrays");
    std::vector<double> bp = j.at("breakpoints").get<std::vector<double>>();
    std::vector<double> v = j.at("values").get<std::vector<double>>();
    return TestFunction(std::move(bp), std::move(v));
}

inline TestFunction parse_test_function(const std::string& text) {
    return parse_test_function(nlohmann::json::parse(text));
}

inline Ensemble parse_ensemble(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("ensemble JSON needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ginibre") return Ensemble::ginibre();
    if (kind == "hyperbolic") {
        if (!j.contains("alpha"))
            throw std::invalid_argument("hyperbolic ensemble JSON needs \"alpha\"");
        return Ensemble::hyperbolic(j.at("alpha").get<double>());
    }
    throw std::invalid_argument("ensemble kind must be \"ginibre\" or \"hyperbolic\"");
}

inline Ensemble parse_ensemble(const std::string& text) {
    return parse_ensemble(nlohmann::json::parse(text));
}

inline ScalingRegime::Family parse_scaling_family(const std::string& name) {
    if (name == "fixed") return ScalingRegime::Family::Fixed;
    if (name == "power") return ScalingRegime::Family::PowerOfR;
    if (name == "exp") return ScalingRegime::Family::ExpOfR;
    throw std::invalid_argument("scaling family must be \"fixed\", \"power\" or \"exp\"");
}

inline ExperimentPlan parse_experiment_plan(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment plan must be a JSON object");
    ExperimentPlan plan;
    plan.ensemble = parse_ensemble(j.at("ensemble"));
    plan.f = parse_test_function(j.at("f"));
    if (j.contains("scaling")) {
        const nlohmann::json& s = j.at("scaling");
        plan.scaling_family = parse_scaling_family(s.at("family").get<std::string>());
        if (s.contains("exponent")) plan.scaling_exponent = s.at("exponent").get<double>();
    }
    plan.R_ladder = j.at("R_ladder").get<std::vector<double>>();
    if (j.contains("replicates")) plan.replicates = j.at("replicates").get<std::int64_t>();
    if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("eps_trunc")) plan.eps_trunc = j.at("eps_trunc").get<double>();
    return plan;
}

inline ExperimentPlan parse_experiment_plan(const std::string& text) {
    return parse_experiment_plan(nlohmann::json::parse(text));
}

} // namespace radialdpp
