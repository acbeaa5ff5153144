#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ensemble.hpp"
#include "test_function.hpp"
#include "truncation.hpp"
#include "util.hpp"

namespace radialdpp {

/// Walks P(rho_n <= r) across consecutive indices in O(1) per step for a
/// fixed radius. The step term is carried in log space so it survives the far
/// tails, and the walker resynchronizes against the direct CDF evaluation
/// every few thousand steps so rounding drift cannot accumulate.
class CdfWalker {
public:
    struct State {
        std::int64_t n = 0;
        double cdf = 0.0;
        double log_term = -std::numeric_limits<double>::infinity();
    };

    CdfWalker(const Ensemble& e, double r, std::int64_t n0)
        : kind_(e.kind), alpha_(e.alpha), x_(r * r) {
        if (!e.is_ginibre() && x_ >= 1.0) {
            saturated_ = true;
            st_.n = n0;
            st_.cdf = 1.0;
            return;
        }
        st_.n = n0;
        resync();
    }

    CdfWalker(const Ensemble& e, double r, const State& s)
        : kind_(e.kind), alpha_(e.alpha), x_(r * r), st_(s) {
        if (!e.is_ginibre() && x_ >= 1.0) {
            saturated_ = true;
            st_.cdf = 1.0;
        }
    }

    std::int64_t index() const { return st_.n; }
    double value() const { return st_.cdf; }
    State state() const { return st_; }

    void advance() {
        if (saturated_) {
            ++st_.n;
            return;
        }
        st_.cdf -= std::exp(st_.log_term);
        if (st_.cdf < 0.0) st_.cdf = 0.0;
        const double n2 = static_cast<double>(st_.n) + 2.0;
        if (kind_ == Ensemble::Kind::Ginibre)
            st_.log_term += std::log(x_ / n2);
        else
            st_.log_term += std::log(x_ * (static_cast<double>(st_.n) + 1.0 + alpha_) / n2);
        ++st_.n;
        if (++steps_ >= kSyncPeriod) resync();
    }

private:
    static constexpr int kSyncPeriod = 4096;

    // log of G_n - G_{n+1} for the squared-radius law at x.
    static double log_step(Ensemble::Kind kind, double alpha, double x, std::int64_t n) {
        if (x <= 0.0) return -std::numeric_limits<double>::infinity();
        const double n1 = static_cast<double>(n) + 1.0;
        if (kind == Ensemble::Kind::Ginibre) return n1 * std::log(x) - x - log_gamma(n1 + 1.0);
        return log_gamma(n1 + alpha) - log_gamma(alpha) - log_gamma(n1 + 1.0) +
               n1 * std::log(x) + alpha * std::log1p(-x);
    }

    void resync() {
        steps_ = 0;
        const Ensemble e = kind_ == Ensemble::Kind::Ginibre ? Ensemble::ginibre()
                                                            : Ensemble::hyperbolic(alpha_);
        st_.cdf = radial_cdf_sq(e, st_.n, x_);
        st_.log_term = log_step(kind_, alpha_, x_, st_.n);
    }

    Ensemble::Kind kind_;
    double alpha_;
    double x_;
    State st_;
    int steps_ = 0;
    bool saturated_ = false;
};

/// A window cut into pieces along the breakpoints of a piecewise-constant
/// statistic weight. Boundaries are kept both in the window coordinate and as
/// disc radii; pieces outside the radial support collapse to zero width.
struct WindowPartition {
    Window window = Window::raw(0.0, 1.0);
    std::vector<double> coords;
    std::vector<double> values;
    std::vector<double> radii;

    std::size_t piece_count() const { return values.size(); }
};

inline WindowPartition make_partition(const Ensemble& e, const Window& w,
                                      const TestFunction& f) {
    WindowPartition part;
    part.window = w;
    part.coords.push_back(w.lo);
    for (double b : f.breakpoints())
        if (b > w.lo && b < w.hi) part.coords.push_back(b);
    part.coords.push_back(w.hi);
    part.values.reserve(part.coords.size() - 1);
    for (std::size_t j = 0; j + 1 < part.coords.size(); ++j)
        part.values.push_back(f(0.5 * (part.coords[j] + part.coords[j + 1])));
    part.radii.reserve(part.coords.size());
    for (double c : part.coords) part.radii.push_back(detail::window_radius(e, w, c));
    return part;
}

inline WindowPartition make_uniform_partition(const Ensemble& e, const Window& w,
                                              std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("make_uniform_partition: bins must be positive");
    WindowPartition part;
    part.window = w;
    part.coords.reserve(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(bins);
        part.coords.push_back(w.lo + t * (w.hi - w.lo));
    }
    part.values.assign(bins, 1.0);
    part.radii.reserve(bins + 1);
    for (double c : part.coords) part.radii.push_back(detail::window_radius(e, w, c));
    return part;
}

/// Visits every index of a certified range once, in increasing order, with the
/// index's per-piece window masses: fn(n, masses, piece_count, total).
template <class Fn>
void scan_index_masses(const Ensemble& e, const WindowPartition& part,
                       const TruncationRange& range, Fn&& fn) {
    if (range.empty()) return;
    const std::size_t m = part.piece_count();
    std::vector<CdfWalker> walk;
    walk.reserve(part.radii.size());
    for (double r : part.radii) walk.emplace_back(e, r, range.n_min);
    std::vector<double> mass(m, 0.0);
    for (std::int64_t n = range.n_min; n <= range.n_max; ++n) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            mass[j] = std::max(0.0, walk[j + 1].value() - walk[j].value());
            total += mass[j];
        }
        fn(n, mass.data(), m, total);
        if (n < range.n_max)
            for (auto& wk : walk) wk.advance();
    }
}

/// Exact per-piece window masses of one index, via direct CDF evaluations.
inline double index_piece_masses(const Ensemble& e, const WindowPartition& part,
                                 std::int64_t n, std::vector<double>& mass) {
    const std::size_t m = part.piece_count();
    mass.resize(m);
    double prev = radial_cdf(e, n, part.radii.front());
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double cur = radial_cdf(e, n, part.radii[j + 1]);
        mass[j] = std::max(0.0, cur - prev);
        total += mass[j];
        prev = cur;
    }
    return total;
}

struct ActiveIndexEntry {
    std::int64_t n = 0;
    std::size_t offset = 0;  // into IndexMassTable::cum, piece_count slots
};

/// A run of consecutive low-mass indices compressed to one Bernoulli event.
/// The stored walker states replay the run's per-index masses on demand.
struct SegmentEntry {
    std::int64_t n_begin = 0;
    std::int64_t n_end = -1;  // inclusive
    double fire_prob = 0.0;   // 1 - prod_n (1 - p_n)
    double mass = 0.0;        // sum_n p_n
    CdfWalker::State lo_state;
    CdfWalker::State hi_state;
};

/// Window masses of a certified index range, split into individually sampled
/// active indices (cumulative piece masses in `cum`) and compressed segments
/// of indices whose masses are too small to visit per replicate.
struct IndexMassTable {
    Ensemble ensemble = Ensemble::ginibre();
    WindowPartition part;
    TruncationRange range;
    std::vector<ActiveIndexEntry> active;
    std::vector<double> cum;
    std::vector<SegmentEntry> segments;
    double active_threshold = 1e-3;
    double expected_count = 0.0;  // sum of p_n over the whole range

    std::size_t piece_count() const { return part.piece_count(); }
    const double* cum_of(const ActiveIndexEntry& a) const { return cum.data() + a.offset; }
    double total_of(const ActiveIndexEntry& a) const {
        return cum[a.offset + piece_count() - 1];
    }
};

inline IndexMassTable build_index_mass_table(const Ensemble& e, const WindowPartition& part,
                                             const TruncationRange& range,
                                             double active_threshold = 1e-3,
                                             double segment_mass_cap = 0.02,
                                             std::int64_t segment_span_cap = 65536) {
    IndexMassTable t;
    t.ensemble = e;
    t.part = part;
    t.range = range;
    t.active_threshold = active_threshold;
    if (range.empty()) return t;

    const std::size_t m = part.piece_count();
    std::vector<CdfWalker> walk;
    walk.reserve(part.radii.size());
    for (double r : part.radii) walk.emplace_back(e, r, range.n_min);

    KahanSum expected;
    bool seg_open = false;
    SegmentEntry seg;
    double seg_log_surv = 0.0;
    auto close_segment = [&]() {
        if (!seg_open) return;
        seg.fire_prob = -std::expm1(seg_log_surv);
        t.segments.push_back(seg);
        seg_open = false;
    };

    std::vector<double> mass(m, 0.0);
    for (std::int64_t n = range.n_min; n <= range.n_max; ++n) {
        const CdfWalker::State lo_state = walk.front().state();
        const CdfWalker::State hi_state = walk.back().state();
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            mass[j] = std::max(0.0, walk[j + 1].value() - walk[j].value());
            total += mass[j];
        }
        if (total >= active_threshold) {
            close_segment();
            t.active.push_back({n, t.cum.size()});
            double c = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                c += mass[j];
                t.cum.push_back(c);
            }
        } else if (total > 0.0) {
            if (seg_open && (seg.mass + total > segment_mass_cap ||
                             n - seg.n_begin >= segment_span_cap))
                close_segment();
            if (!seg_open) {
                seg = SegmentEntry{};
                seg.n_begin = n;
                seg.lo_state = lo_state;
                seg.hi_state = hi_state;
                seg_log_surv = 0.0;
                seg_open = true;
            }
            seg.n_end = n;
            seg.mass += total;
            seg_log_surv += std::log1p(-total);
        }
        expected.add(total);
        if (n < range.n_max)
            for (auto& wk : walk) wk.advance();
    }
    close_segment();
    t.expected_count = expected.value();
    return t;
}

/// Replays a segment's per-index window masses from the stored walker states.
class SegmentReplay {
public:
    SegmentReplay(const Ensemble& e, const WindowPartition& part, const SegmentEntry& seg)
        : lo_(e, part.radii.front(), seg.lo_state),
          hi_(e, part.radii.back(), seg.hi_state),
          n_end_(seg.n_end) {}

    std::int64_t index() const { return lo_.index(); }
    double mass() const { return std::max(0.0, hi_.value() - lo_.value()); }
    bool done() const { return lo_.index() > n_end_; }

    void advance() {
        lo_.advance();
        hi_.advance();
    }

private:
    CdfWalker lo_;
    CdfWalker hi_;
    std::int64_t n_end_;
};

} // namespace radialdpp
