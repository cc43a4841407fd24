#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "counting.hpp"
#include "errors.hpp"
#include "systems.hpp"

namespace mdimlab {

inline constexpr int kDefaultTailWindow = 3;

struct GrowthSample {
    long long horizon = 0;
    double log_count = 0.0;
    ResultMode mode = ResultMode::Exact;
};

// (n, log count) samples for one epsilon.
struct GrowthSeries {
    double epsilon = 0.0;
    std::vector<GrowthSample> samples;
};

struct FitDiagnostics {
    double max_residual = 0.0;
    double last_two_slope = 0.0; // drift detector
    long long samples_used = 0;
    bool nonmonotone_counts = false; // greedy runs may dip; flagged, not fatal
};

struct RateFit {
    double rate = 0.0;
    FitDiagnostics diag;
};

// Least-squares slope of log_count against n over samples with n > burn_in.
inline RateFit growth_rate(const GrowthSeries& series, long long burn_in) {
    for (std::size_t i = 1; i < series.samples.size(); ++i)
        if (series.samples[i].horizon <= series.samples[i - 1].horizon)
            fail(errc::invalid_argument, "growth_rate: horizons must be strictly increasing");
    std::vector<const GrowthSample*> used;
    for (const auto& s : series.samples)
        if (s.horizon > burn_in) used.push_back(&s);
    if (used.size() < 3)
        fail(errc::insufficient_samples,
             "growth_rate: need at least 3 samples beyond the burn-in, have " +
                 std::to_string(used.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* s : used) {
        sx += double(s->horizon);
        sy += s->log_count;
        sxx += double(s->horizon) * double(s->horizon);
        sxy += double(s->horizon) * s->log_count;
    }
    const double m = double(used.size());
    const double denom = m * sxx - sx * sx;
    RateFit out;
    out.rate = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - out.rate * sx) / m;
    for (const auto* s : used)
        out.diag.max_residual = std::max(
            out.diag.max_residual, std::fabs(s->log_count - (intercept + out.rate * double(s->horizon))));
    const auto* a = used[used.size() - 2];
    const auto* b = used[used.size() - 1];
    out.diag.last_two_slope = (b->log_count - a->log_count) / double(b->horizon - a->horizon);
    out.diag.samples_used = (long long)used.size();
    for (std::size_t i = 1; i < used.size(); ++i)
        if (used[i]->log_count < used[i - 1]->log_count - 1e-12) out.diag.nonmonotone_counts = true;
    return out;
}

struct RatePoint {
    double epsilon = 0.0;
    double rate = 0.0;
    bool lower_bound_only = false; // greedy-mode rates bound from below
};

struct PerEpsilonRate {
    double epsilon = 0.0;
    double rate = 0.0;
    double normalized = 0.0; // rate / |log epsilon|
    bool lower_bound_only = false;
};

struct DimensionReport {
    std::vector<PerEpsilonRate> per_epsilon;
    double lower_estimate = 0.0;
    double upper_estimate = 0.0;
    std::string schedule;
    std::vector<std::string> caveats;
};

// Normalizes rates by |log epsilon| and reads off tail-window extrema as
// stand-ins for the liminf/limsup over shrinking epsilon.
inline DimensionReport mdim_estimate(const std::vector<RatePoint>& rates,
                                     int window = kDefaultTailWindow) {
    if (rates.size() < 3)
        fail(errc::invalid_schedule, "mdim_estimate: need at least 3 epsilon values");
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i].epsilon > 0.0 && rates[i].epsilon < 1.0))
            fail(errc::invalid_schedule, "mdim_estimate: epsilon values must lie in (0,1)");
        if (i > 0 && !(rates[i].epsilon < rates[i - 1].epsilon))
            fail(errc::invalid_schedule, "mdim_estimate: epsilon schedule must strictly decrease");
    }
    if (window < 1) fail(errc::invalid_argument, "mdim_estimate: window must be positive");
    DimensionReport rep;
    for (const auto& r : rates)
        rep.per_epsilon.push_back(
            {r.epsilon, r.rate, r.rate / std::fabs(std::log(r.epsilon)), r.lower_bound_only});
    const std::size_t w = std::min<std::size_t>(std::size_t(window), rep.per_epsilon.size());
    const std::size_t from = rep.per_epsilon.size() - w;
    double lo = rep.per_epsilon[from].normalized, hi = lo;
    bool any_lower_only = false;
    for (std::size_t i = from; i < rep.per_epsilon.size(); ++i) {
        lo = std::min(lo, rep.per_epsilon[i].normalized);
        hi = std::max(hi, rep.per_epsilon[i].normalized);
        any_lower_only |= rep.per_epsilon[i].lower_bound_only;
    }
    rep.lower_estimate = lo;
    rep.upper_estimate = hi;
    rep.schedule = "epsilon " + std::to_string(rates.front().epsilon) + " .. " +
                   std::to_string(rates.back().epsilon) + " (" + std::to_string(rates.size()) +
                   " values)";
    rep.caveats.push_back("liminf/limsup approximated by min/max over the final " +
                          std::to_string(w) + " epsilon values");
    if (any_lower_only)
        rep.caveats.push_back(
            "some rates are greedy lower bounds; the upper estimate is not certified");
    return rep;
}

inline DimensionReport mdim_estimate(const std::vector<std::pair<double, double>>& eps_rates,
                                     int window = kDefaultTailWindow) {
    std::vector<RatePoint> rates;
    rates.reserve(eps_rates.size());
    for (const auto& [e, r] : eps_rates) rates.push_back({e, r, false});
    return mdim_estimate(rates, window);
}

struct BoxCountRow {
    double epsilon = 0.0;
    long long count = 0;
    double normalized = 0.0; // log count / |log epsilon|
    ResultMode mode = ResultMode::Exact;
};

struct BoxDimensionReport {
    std::vector<BoxCountRow> rows;
    double lower = 0.0;
    double upper = 0.0;
};

// Minimal eps-cover counts of a static net (identity dynamics, horizon 1)
// across the schedule; tail-window extrema of log N(eps)/|log eps|.
inline BoxDimensionReport box_dimension_detailed(
    SpacePtr space, const std::function<std::vector<Point>(double)>& net_fn,
    const std::vector<double>& schedule, int window = kDefaultTailWindow,
    std::size_t exact_cap = kDefaultExactCap) {
    if (schedule.size() < 4)
        fail(errc::invalid_schedule, "box_dimension: schedule needs at least 4 epsilon values");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0 && schedule[i] < 1.0))
            fail(errc::invalid_schedule, "box_dimension: epsilon values must lie in (0,1)");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            fail(errc::invalid_schedule, "box_dimension: schedule must strictly decrease");
    }
    MapSystemPtr ident = make_identity(space);
    BoxDimensionReport rep;
    for (double eps : schedule) {
        std::vector<Point> net = net_fn(eps / 4.0);
        OrbitContext ctx(ident, 1, std::move(net));
        const bool exact_ok = ctx.line_like() || ctx.net().size() <= exact_cap;
        CountResult r =
            min_cover(ctx, eps, exact_ok ? CountMode::Exact : CountMode::Greedy, exact_cap);
        rep.rows.push_back(
            {eps, r.count, std::log(double(r.count)) / std::fabs(std::log(eps)), r.mode});
    }
    const std::size_t w = std::min<std::size_t>(std::size_t(window), rep.rows.size());
    const std::size_t from = rep.rows.size() - w;
    double lo = rep.rows[from].normalized, hi = lo;
    for (std::size_t i = from; i < rep.rows.size(); ++i) {
        lo = std::min(lo, rep.rows[i].normalized);
        hi = std::max(hi, rep.rows[i].normalized);
    }
    rep.lower = lo;
    rep.upper = hi;
    return rep;
}

inline std::pair<double, double> box_dimension(SpacePtr space,
                                               const std::function<std::vector<Point>(double)>& net_fn,
                                               const std::vector<double>& schedule,
                                               int window = kDefaultTailWindow,
                                               std::size_t exact_cap = kDefaultExactCap) {
    auto rep = box_dimension_detailed(std::move(space), net_fn, schedule, window, exact_cap);
    return {rep.lower, rep.upper};
}

// Convenience: nets drawn from the space's own sampler at mesh eps/4.
inline std::pair<double, double> box_dimension(SpacePtr space, const std::vector<double>& schedule,
                                               int window = kDefaultTailWindow,
                                               std::size_t exact_cap = kDefaultExactCap) {
    SpacePtr s = space;
    return box_dimension(
        s, [s](double mesh) { return sample_net(*s, mesh); }, schedule, window, exact_cap);
}

struct DampingRow {
    long long window_length = 0;
    double sup_value = 0.0;
};

// Sup over probes of the length-k window composition started at index 1,
// certifying orbit collapse toward the fixed point 0.  Once every tracked
// orbit hits exactly 0 the remaining rows are filled without further work.
inline std::vector<DampingRow> damping_witness(const NonAutonomousSystem& nas,
                                               const std::vector<Point>& probes, long long k_max) {
    if (probes.empty()) fail(errc::invalid_argument, "damping_witness: no probes");
    if (k_max < 1) fail(errc::invalid_argument, "damping_witness: k_max must be >= 1");
    if (!std::holds_alternative<IntervalSpace>(nas.space->kind))
        fail(errc::invalid_argument, "damping_witness: system must act on the interval");
    {
        MapSystemPtr f1 = nas.generator(1);
        if (!f1 || evaluate(*f1, Point::real(0.0)).as_real() != 0.0)
            fail(errc::invalid_argument, "damping_witness: the maps must fix 0");
    }
    std::vector<double> current;
    current.reserve(probes.size());
    for (const auto& p : probes) current.push_back(p.as_real());
    std::vector<DampingRow> rows;
    rows.reserve(std::size_t(k_max));
    for (long long k = 1; k <= k_max; ++k) {
        MapSystemPtr f = nas.generator(k);
        if (!f) fail(errc::invalid_argument, "damping_witness: generator returned null");
        double sup = 0.0;
        bool all_zero = true;
        for (auto& v : current) {
            v = evaluate(*f, Point::real(v)).as_real();
            sup = std::max(sup, v);
            all_zero &= (v == 0.0);
        }
        rows.push_back({k, sup});
        if (all_zero) {
            for (long long k2 = k + 1; k2 <= k_max; ++k2) rows.push_back({k2, 0.0});
            break;
        }
    }
    return rows;
}

} // namespace mdimlab
