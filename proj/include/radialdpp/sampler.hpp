#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ensemble.hpp"
#include "piece_table.hpp"
#include "rng.hpp"
#include "test_function.hpp"
#include "truncation.hpp"

namespace radialdpp {

struct SamplerConfig {
    std::uint64_t seed = 0xD99;
    double truncation_eps = 1e-12;
    double active_threshold = 1e-3;
    double segment_mass_cap = 0.02;
    std::int64_t segment_span_cap = 65536;
    int rejection_cap = 256;
};

/// One draw of the window-restricted moduli process. Points are listed in
/// increasing index order; values are window coordinates.
struct RadialSample {
    std::int64_t n_min = 0;
    std::int64_t n_max = -1;
    std::vector<std::int64_t> point_indices;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::int64_t replicate_id = 0;
    double truncation_mass = 0.0;
};

/// Direct draw of the n-th modulus (unrestricted).
inline double sample_radius(const Ensemble& e, std::int64_t n, CounterRng& rng) {
    if (n < 0) throw std::invalid_argument("sample_radius: index must be nonnegative");
    const double shape = static_cast<double>(n) + 1.0;
    if (e.is_ginibre()) return std::sqrt(rng.gamma(shape));
    return std::sqrt(rng.beta(shape, e.alpha).value);
}

namespace detail {

// Draw the squared radius of index n conditioned to [u_lo, u_hi], then return
// the radius. Rejection against a flat proposal with an exact log-density
// envelope; after rejection_cap misses, falls back to inverse-CDF bisection.
// Both stages target the exact conditional law.
inline double sample_radius_in(const Ensemble& e, std::int64_t n, double u_lo, double u_hi,
                               CounterRng& rng, int rejection_cap) {
    const double nd = static_cast<double>(n);
    auto log_dens = [&](double u) {
        if (u <= 0.0) return nd == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
        double v = nd * std::log(u);
        if (e.is_ginibre())
            v -= u;
        else
            v += (e.alpha - 1.0) * std::log1p(-u);
        return v;
    };
    double envelope = std::max(log_dens(u_lo), log_dens(u_hi));
    if (e.is_ginibre()) {
        if (nd > u_lo && nd < u_hi) envelope = std::max(envelope, log_dens(nd));
    } else if (e.alpha > 1.0) {
        const double mode = nd / (nd + e.alpha - 1.0);
        if (mode > u_lo && mode < u_hi) envelope = std::max(envelope, log_dens(mode));
    }
    const double width = u_hi - u_lo;
    if (!(width > 0.0)) return std::sqrt(u_lo);
    for (int t = 0; t < rejection_cap; ++t) {
        const double u = u_lo + width * rng.uniform();
        const double a = rng.uniform_pos();
        if (std::log(a) <= log_dens(u) - envelope) return std::sqrt(u);
    }
    const double f_lo = radial_cdf_sq(e, n, u_lo);
    const double f_hi = radial_cdf_sq(e, n, u_hi);
    if (!(f_hi > f_lo)) return std::sqrt(u_lo + 0.5 * width);
    const double target = f_lo + (f_hi - f_lo) * rng.uniform();
    double lo = u_lo, hi = u_hi;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (radial_cdf_sq(e, n, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo + 0.5 * (hi - lo));
}

} // namespace detail

/// Samples the moduli process restricted to one window, with any number of
/// piecewise-constant statistics evaluated on the same realization.
///
/// Randomness layout: every index owns the stream (seed, replicate, kRadius, n)
/// whose first uniform settles occupancy and piece; position refinement reads
/// further uniforms from the same stream. Runs of low-mass indices are
/// compressed to one Bernoulli draw from (seed, replicate, kSegment, run_id)
/// and replayed exactly only when that draw fires. Results are therefore a
/// pure function of (parameters, seed, replicate), whatever the thread count,
/// and occupancy agrees between statistic and point draws.
class WindowSampler {
public:
    WindowSampler(const Ensemble& e, const Window& w,
                  const std::vector<TestFunction>& statistics, SamplerConfig cfg = {})
        : cfg_(cfg) {
        TestFunction merged = TestFunction::indicator(w.lo, w.hi, 0.0);
        for (const TestFunction& f : statistics)
            merged = merged + f;
        const WindowPartition part = make_partition(e, w, merged);
        const TruncationRange range = truncation_range(e, w, cfg.truncation_eps);
        table_ = build_index_mass_table(e, part, range, cfg.active_threshold,
                                        cfg.segment_mass_cap, cfg.segment_span_cap);
        values_.resize(statistics.size());
        for (std::size_t s = 0; s < statistics.size(); ++s) {
            values_[s].reserve(part.piece_count());
            for (std::size_t j = 0; j < part.piece_count(); ++j) {
                const double mid = 0.5 * (part.coords[j] + part.coords[j + 1]);
                values_[s].push_back(statistics[s](mid));
            }
        }
    }

    struct Draw {
        std::vector<double> stats;
        std::int64_t count = 0;
    };

    std::size_t statistic_count() const { return values_.size(); }
    const IndexMassTable& table() const { return table_; }
    double expected_count() const { return table_.expected_count; }
    double truncation_mass() const { return table_.range.mass_bound; }

    /// Statistic totals and the point count of one replicate. `stats` must
    /// hold statistic_count() slots.
    void draw_statistics(std::int64_t replicate, double* stats, std::int64_t* count) const {
        for (std::size_t s = 0; s < values_.size(); ++s) stats[s] = 0.0;
        std::int64_t c = 0;
        visit(replicate, [&](std::int64_t, std::size_t piece, CounterRng&) {
            ++c;
            for (std::size_t s = 0; s < values_.size(); ++s) stats[s] += values_[s][piece];
        });
        *count = c;
    }

    Draw draw_statistics(std::int64_t replicate) const {
        Draw d;
        d.stats.resize(values_.size());
        draw_statistics(replicate, d.stats.data(), &d.count);
        return d;
    }

    /// Full positions of one replicate, refined inside their pieces.
    RadialSample draw_points(std::int64_t replicate) const {
        RadialSample out;
        out.n_min = table_.range.n_min;
        out.n_max = table_.range.n_max;
        out.seed = cfg_.seed;
        out.replicate_id = replicate;
        out.truncation_mass = table_.range.mass_bound;
        const Ensemble& e = table_.ensemble;
        const WindowPartition& part = table_.part;
        visit(replicate, [&](std::int64_t n, std::size_t piece, CounterRng& rng) {
            const double r_lo = part.radii[piece];
            const double r_hi = part.radii[piece + 1];
            const double r = detail::sample_radius_in(e, n, r_lo * r_lo, r_hi * r_hi, rng,
                                                      cfg_.rejection_cap);
            double c = detail::to_window_coordinate(e, part.window, r);
            c = std::min(std::max(c, part.coords[piece]), part.coords[piece + 1]);
            out.point_indices.push_back(n);
            out.values.push_back(c);
        });
        std::vector<std::size_t> order(out.point_indices.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out.point_indices[a] < out.point_indices[b];
        });
        RadialSample sorted = out;
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.point_indices[i] = out.point_indices[order[i]];
            sorted.values[i] = out.values[order[i]];
        }
        return sorted;
    }

    /// Core realization walk: calls vis(n, piece, rng) once per occupied index,
    /// where rng is that index's stream positioned after the decision draws.
    template <class Visitor>
    void visit(std::int64_t replicate, Visitor&& vis) const {
        const std::size_t m = table_.piece_count();
        if (m == 0 || table_.range.empty()) return;
        const std::uint64_t rep = static_cast<std::uint64_t>(replicate);
        for (const ActiveIndexEntry& a : table_.active) {
            CounterRng rng(cfg_.seed, rep, CounterRng::kRadius,
                           static_cast<std::uint64_t>(a.n));
            const double u = rng.uniform();
            const double* cum = table_.cum_of(a);
            if (u >= cum[m - 1]) continue;
            std::size_t j = 0;
            while (u >= cum[j]) ++j;
            vis(a.n, j, rng);
        }
        std::vector<double> scratch;
        for (std::size_t s = 0; s < table_.segments.size(); ++s) {
            const SegmentEntry& seg = table_.segments[s];
            CounterRng srng(cfg_.seed, rep, CounterRng::kSegment, s);
            const double u = srng.uniform();
            if (u >= seg.fire_prob) continue;
            SegmentReplay replay(table_.ensemble, table_.part, seg);
            double log_surv = 0.0;
            std::int64_t fire = -1;
            std::int64_t last_positive = -1;
            while (!replay.done()) {
                const double p = replay.mass();
                if (p > 0.0) last_positive = replay.index();
                if (p >= 1.0) {
                    fire = replay.index();
                    break;
                }
                log_surv += std::log1p(-p);
                if (-std::expm1(log_surv) > u) {
                    fire = replay.index();
                    break;
                }
                replay.advance();
            }
            if (fire < 0) fire = last_positive;
            if (fire < 0) continue;
            occupy_by_fresh_uniform(fire, rep, vis, scratch);
            // Indices past the first fire keep their unconditioned law.
            if (!replay.done()) replay.advance();
            while (!replay.done()) {
                const double p = replay.mass();
                if (p > 0.0) {
                    CounterRng rng(cfg_.seed, rep, CounterRng::kRadius,
                                   static_cast<std::uint64_t>(replay.index()));
                    if (rng.uniform() < p) {
                        if (m == 1) {
                            vis(replay.index(), 0, rng);
                        } else {
                            pick_piece_and_visit(replay.index(), rng, vis, scratch);
                        }
                    }
                }
                replay.advance();
            }
        }
    }

private:
    // Occupied index whose stream has not been touched yet: the stream's first
    // uniform picks the piece.
    template <class Visitor>
    void occupy_by_fresh_uniform(std::int64_t n, std::uint64_t rep, Visitor&& vis,
                                 std::vector<double>& scratch) const {
        CounterRng rng(cfg_.seed, rep, CounterRng::kRadius, static_cast<std::uint64_t>(n));
        if (table_.piece_count() == 1) {
            rng.uniform();
            vis(n, 0, rng);
            return;
        }
        pick_piece_and_visit(n, rng, vis, scratch);
    }

    template <class Visitor>
    void pick_piece_and_visit(std::int64_t n, CounterRng& rng, Visitor&& vis,
                              std::vector<double>& scratch) const {
        const double total = index_piece_masses(table_.ensemble, table_.part, n, scratch);
        std::size_t j = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double c = scratch[0];
            while (j + 1 < scratch.size() && u >= c) c += scratch[++j];
        } else {
            rng.uniform();
        }
        vis(n, j, rng);
    }

    SamplerConfig cfg_;
    IndexMassTable table_;
    std::vector<std::vector<double>> values_;
};

/// One window-restricted draw of the process (positions in window
/// coordinates). Deterministic in (parameters, seed, replicate_id).
inline RadialSample sample_window(const Ensemble& e, const Window& w, std::uint64_t seed,
                                  std::int64_t replicate_id, double eps = 1e-12) {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.truncation_eps = eps;
    WindowSampler sampler(e, w, {}, cfg);
    return sampler.draw_points(replicate_id);
}

} // namespace radialdpp
