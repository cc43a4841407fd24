#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "constructions.hpp"
#include "counting.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "serialize.hpp"
#include "space.hpp"
#include "systems.hpp"

namespace mdimlab {

inline constexpr long long kDefaultBudget = 10'000'000;
inline constexpr const char* kCsvHeader =
    "system_id,quantity,n,epsilon,mode,count,log_count,wall_ms";
// A cascade block only contributes countable oscillations once its squeezed
// width clears this multiple of epsilon.
inline constexpr double kSpliceResolveFactor = 6.0;

struct EpsilonSchedule {
    double base = 3.0;
    int k_min = 2;
    int k_max = 8;

    std::vector<double> values() const {
        if (!(base > 1.0)) fail(errc::invalid_schedule, "schedule base must exceed 1");
        if (k_min < 1 || k_max < k_min)
            fail(errc::invalid_schedule, "schedule needs 1 <= k_min <= k_max");
        std::vector<double> out;
        for (int k = k_min; k <= k_max; ++k) out.push_back(std::pow(base, -double(k)));
        return out;
    }
};

struct ExperimentConfig {
    std::string construction;
    json params = json::object();
    std::string quantity = "entropy"; // entropy | mdim | boxdim | damping | sweep
    EpsilonSchedule schedule;
    long long n_min = 1;
    long long n_max = 6;
    double mesh = 0.0;            // 0 = automatic (targets 3 usable horizons, <= eps/4)
    std::string mode = "auto";    // exact | greedy | auto
    std::string estimator = "net"; // net | lap_oracle
    long long burn_in = 0;
    int window = kDefaultTailWindow;
    std::size_t exact_cap = kDefaultExactCap;
    long long budget = kDefaultBudget;
    std::uint64_t rng_seed = 0;
    std::string csv_path;
    std::string summary_path;
    std::vector<double> sweep_deltas = {0.2, 0.1, 0.05};
    std::string sweep_base = "identity_interval";
    std::string sweep_splice = "horseshoe_cascade";
};

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        if (!j.contains("quantity")) fail(errc::invalid_config, "config: missing 'quantity'");
        cfg.quantity = j.at("quantity").get<std::string>();
        if (cfg.quantity == "perturbation-sweep") cfg.quantity = "sweep";
        if (cfg.quantity != "entropy" && cfg.quantity != "mdim" && cfg.quantity != "boxdim" &&
            cfg.quantity != "damping" && cfg.quantity != "sweep")
            fail(errc::invalid_config, "config: unknown quantity '" + cfg.quantity + "'");
        if (cfg.quantity != "sweep") {
            if (!j.contains("construction"))
                fail(errc::invalid_config, "config: missing 'construction'");
            cfg.construction = j.at("construction").get<std::string>();
        }
        if (j.contains("params")) cfg.params = j.at("params");
        if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            if (s.contains("base")) cfg.schedule.base = s.at("base").get<double>();
            if (s.contains("k_min")) cfg.schedule.k_min = s.at("k_min").get<int>();
            if (s.contains("k_max")) cfg.schedule.k_max = s.at("k_max").get<int>();
        }
        cfg.schedule.values(); // validates
        if (j.contains("horizons")) {
            const auto& h = j.at("horizons");
            if (h.contains("min")) cfg.n_min = h.at("min").get<long long>();
            if (h.contains("max")) cfg.n_max = h.at("max").get<long long>();
        }
        if (cfg.n_min < 1 || cfg.n_max < cfg.n_min)
            fail(errc::invalid_config, "config: need 1 <= horizons.min <= horizons.max");
        if (j.contains("mesh")) cfg.mesh = j.at("mesh").get<double>();
        if (cfg.mesh < 0.0) fail(errc::invalid_config, "config: mesh must be >= 0");
        if (cfg.mesh > 0.0) {
            const double eps_min = std::pow(cfg.schedule.base, -double(cfg.schedule.k_max));
            if (cfg.mesh > eps_min / 4.0)
                fail(errc::invalid_config,
                     "config: mesh must be <= eps/4 for the smallest scheduled epsilon");
        }
        if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
        if (cfg.mode != "exact" && cfg.mode != "greedy" && cfg.mode != "auto")
            fail(errc::invalid_config, "config: mode must be exact, greedy, or auto");
        if (j.contains("estimator")) cfg.estimator = j.at("estimator").get<std::string>();
        if (cfg.estimator != "net" && cfg.estimator != "lap_oracle")
            fail(errc::invalid_config, "config: estimator must be net or lap_oracle");
        if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<long long>();
        if (cfg.burn_in < 0) fail(errc::invalid_config, "config: burn_in must be >= 0");
        if (j.contains("window")) cfg.window = j.at("window").get<int>();
        if (cfg.window < 1) fail(errc::invalid_config, "config: window must be >= 1");
        if (j.contains("exact_cap")) cfg.exact_cap = j.at("exact_cap").get<std::size_t>();
        if (j.contains("budget")) cfg.budget = j.at("budget").get<long long>();
        if (cfg.budget < 1) fail(errc::invalid_config, "config: budget must be >= 1");
        if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        if (j.contains("csv")) cfg.csv_path = j.at("csv").get<std::string>();
        if (j.contains("summary")) cfg.summary_path = j.at("summary").get<std::string>();
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            if (s.contains("deltas")) cfg.sweep_deltas = s.at("deltas").get<std::vector<double>>();
            if (s.contains("base")) cfg.sweep_base = s.at("base").get<std::string>();
            if (s.contains("splice")) cfg.sweep_splice = s.at("splice").get<std::string>();
        }
        for (double d : cfg.sweep_deltas)
            if (!(d > 0.0 && d < 1.0))
                fail(errc::invalid_config, "config: sweep deltas must lie in (0,1)");
    } catch (const json::exception& e) {
        fail(errc::invalid_config, std::string("config: malformed JSON value: ") + e.what());
    }
    return cfg;
}

inline long long effective_budget(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("MDIMLAB_BUDGET")) {
        try {
            return std::max(1LL, std::stoll(env));
        } catch (...) {
            fail(errc::invalid_config, "MDIMLAB_BUDGET must be an integer");
        }
    }
    return cfg.budget;
}

// A built construction: a map, a map sequence, or a bare metric space.
struct BuiltConstruction {
    MapSystemPtr system;
    std::optional<NonAutonomousSystem> sequence;
    SpacePtr space;
    std::string id;
};

namespace detail {

inline CascadeSpec cascade_spec_from_params(const json& params) {
    CascadeSpec spec;
    if (params.contains("blocks")) spec.block_count = params.at("blocks").get<long long>();
    if (params.contains("m")) {
        const std::string m = params.at("m").get<std::string>();
        if (m == "linear") {
            // default
        } else if (m == "quadratic") {
            spec = quadratic_cascade_spec(spec.block_count);
        } else {
            fail(errc::invalid_config, "cascade: m must be linear or quadratic");
        }
    }
    return spec;
}

inline MapSystemPtr tent_base_from_params(const json& params) {
    const std::string base =
        params.contains("base") ? params.at("base").get<std::string>() : "tent2";
    if (base == "tent2") return tent2();
    if (base == "tent3") return tent3();
    fail(errc::invalid_config, "base must be tent2 or tent3");
}

} // namespace detail

inline BuiltConstruction build_construction(const std::string& id, const json& params) {
    BuiltConstruction out;
    out.id = id;
    try {
        if (id == "tent3") {
            out.system = tent3();
        } else if (id == "tent2") {
            out.system = tent2();
        } else if (id == "identity_interval") {
            out.system = make_identity(Space::interval());
        } else if (id == "doubling_circle") {
            out.system = make_affine(
                PiecewiseAffineMap({rational(0), rational(1)}, {rational(0), rational(2)}), true,
                "doubling");
        } else if (id == "horseshoe_cascade") {
            out.system = horseshoe_cascade(detail::cascade_spec_from_params(params));
        } else if (id == "truncated_cascade") {
            if (!params.contains("n"))
                fail(errc::invalid_config, "truncated_cascade: missing parameter n");
            out.system = truncated_cascade(detail::cascade_spec_from_params(params),
                                           params.at("n").get<long long>());
        } else if (id == "cantor_cylinder_system") {
            if (!params.contains("k"))
                fail(errc::invalid_config, "cantor_cylinder_system: missing parameter k");
            const int depth = params.contains("depth") ? params.at("depth").get<int>() : 32;
            out.system = cantor_cylinder_system(params.at("k").get<int>(), depth);
        } else if (id == "shift") {
            const int block = params.contains("block") ? params.at("block").get<int>() : 1;
            const int preserve = params.contains("preserve") ? params.at("preserve").get<int>() : 0;
            const int depth = params.contains("depth") ? params.at("depth").get<int>() : 10;
            out.system = make_shift(Space::cantor_words(depth), block, preserve,
                                    "shift(block=" + std::to_string(block) + ")");
        } else if (id == "cantor_words") {
            const int depth = params.contains("depth") ? params.at("depth").get<int>() : 10;
            out.space = Space::cantor_words(depth);
        } else if (id == "ks_alternating") {
            out.sequence = ks_alternating();
        } else if (id == "power_growth") {
            out.sequence = power_growth_sequence(detail::tent_base_from_params(params));
        } else if (id == "damped_power_growth") {
            out.sequence = damped_sequence(
                power_growth_sequence(detail::tent_base_from_params(params)), default_damping);
        } else if (id == "koch_points") {
            const int depth = params.contains("depth") ? params.at("depth").get<int>() : 6;
            out.space = koch_points(depth);
        } else if (id == "convergent_sequence_space") {
            const long long N = params.contains("N") ? params.at("N").get<long long>() : 10000;
            out.space = convergent_sequence_space(N);
        } else if (id == "custom") {
            if (!params.contains("system"))
                fail(errc::invalid_config, "custom: missing 'system' descriptor");
            out.system = system_from_json(params.at("system"));
        } else {
            fail(errc::unknown_construction, "unknown construction id '" + id + "'");
        }
    } catch (const json::exception& e) {
        fail(errc::invalid_config, "construction '" + id + "': bad parameters: " + e.what());
    }
    if (out.system) out.space = out.system->domain;
    if (out.sequence) out.space = out.sequence->space;
    return out;
}

inline std::string construction_label(const BuiltConstruction& b) {
    if (b.system) return b.system->label;
    if (b.sequence) return b.sequence->description;
    return b.id;
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_row(const std::string& system_id, const std::string& quantity, long long n,
                           double eps, const std::string& mode, long long count, double log_count,
                           double wall_ms) {
    std::string row = system_id;
    row += ',';
    row += quantity;
    row += ',';
    row += std::to_string(n);
    row += ',';
    row += csv_num(eps);
    row += ',';
    row += mode;
    row += ',';
    row += std::to_string(count);
    row += ',';
    row += csv_num(log_count);
    row += ',';
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", wall_ms);
    row += wall;
    return row;
}

// Cumulative per-step stretch bounds: lam[j] bounds how far the net's mesh
// error can have grown after j steps.
inline std::vector<double> cumulative_expansion(const BuiltConstruction& b, long long n_max) {
    std::vector<double> lam{1.0};
    double running = 1.0;
    for (long long i = 1; i < n_max; ++i) {
        const double step = b.system ? expansion_bound(*b.system)
                                     : expansion_bound(*b.sequence->generator(i));
        running *= step;
        lam.push_back(std::max(lam.back(), running));
    }
    return lam; // lam[j] = max over prefixes; nondecreasing
}

inline double auto_mesh(double eps, const std::vector<double>& lam, long long n_max) {
    const long long target = std::min<long long>(n_max, 3);
    const double stretch = lam[std::size_t(std::min<long long>(target - 1, (long long)lam.size() - 1))];
    double mesh = std::min(eps / 4.0, eps / (2.0 * stretch));
    return std::max(mesh, 2.5e-7); // keep interval nets below ~4M points
}

} // namespace detail

struct SweepRow {
    double delta = 0.0;
    double c0 = 0.0;
    double mdim_lower = 0.0;
    double mdim_upper = 0.0;
    bool horseshoe_ok = false;
    std::string label;
    std::vector<RatePoint> rates;
};

// Scale-aware oscillation-rate model for a cascade squeezed into a width
// delta/2 splice: at scale eps only blocks whose squeezed width clears
// kSpliceResolveFactor * eps contribute, and the deepest such block n yields
// rate m_n * log 3.  These are lower-bound style rates (each counts one
// resolvable horseshoe, ignoring the rest).
inline std::vector<RatePoint> splice_lap_rates(const CascadeSpec& spec, double delta,
                                               const EpsilonSchedule& sched) {
    const auto ends = cascade_block_ends(spec);
    std::vector<RatePoint> rates;
    for (double eps : sched.values()) {
        long long best_m = 0;
        for (long long n = 1; n <= spec.block_count; ++n) {
            const double width = (delta / 2.0) * (ends[std::size_t(n)] - ends[std::size_t(n - 1)]);
            if (width >= kSpliceResolveFactor * eps) best_m = spec.m_rule(n);
        }
        rates.push_back({eps, double(best_m) * std::log(3.0), true});
    }
    return rates;
}

inline std::vector<SweepRow> perturbation_sweep(const std::string& base_id, const json& base_params,
                                                const std::string& splice_id,
                                                const std::vector<double>& deltas,
                                                const EpsilonSchedule& sched,
                                                int window = kDefaultTailWindow) {
    BuiltConstruction base = build_construction(base_id, base_params);
    if (!base.system)
        fail(errc::invalid_config, "perturbation_sweep: base must be a single map construction");
    if (splice_id != "none" && splice_id != "horseshoe_cascade")
        fail(errc::invalid_config, "perturbation_sweep: splice must be 'none' or 'horseshoe_cascade'");
    if (deltas.empty()) fail(errc::invalid_config, "perturbation_sweep: no deltas");
    for (double d : deltas)
        if (!(d > 0.0 && d < 1.0))
            fail(errc::invalid_config, "perturbation_sweep: deltas must lie in (0,1)");

    const CascadeSpec spec; // sweep always splices the default linear cascade
    std::vector<SweepRow> rows;
    for (double delta : deltas) {
        SweepRow row;
        row.delta = delta;
        if (splice_id == "none") {
            row.c0 = 0.0;
            row.label = base.system->label;
            // rate of the unperturbed map from its own oscillation growth
            double rate = 0.0;
            if (auto flat = flatten_affine(*base.system)) {
                const auto it3 = iterate_exact(*flat, 3);
                rate = std::log(double(lap_count(it3))) / 3.0;
            }
            for (double eps : sched.values()) row.rates.push_back({eps, rate, false});
            row.horseshoe_ok = false;
        } else {
            MapSystemPtr spliced = splice_cascade(base.system, delta, spec);
            row.label = spliced->label;
            row.c0 = c0_distance(*spliced, *base.system, 1e-3);
            row.rates = splice_lap_rates(spec, delta, sched);
            auto flat = flatten_affine(*spliced);
            auto flat_base = flatten_affine(*base.system);
            // first-block horseshoe check on the squeezed block J1
            rational x0 = 0;
            if (flat_base) {
                auto fps = std::holds_alternative<CircleSpace>(base.system->domain->kind)
                               ? fixed_points_mod1(*flat_base)
                               : fixed_points(*flat_base);
                while (!fps.empty() && fps.front() >= 1) fps.erase(fps.begin());
                if (!fps.empty()) x0 = fps.front();
            }
            const rational half = rational_from_double(delta) / 2;
            const rational j1_hi = x0 + half * rational_from_double(cascade_block_ends(spec)[1]);
            row.horseshoe_ok = flat && verify_horseshoe(*flat, x0, j1_hi, 3).ok;
        }
        auto rep = mdim_estimate(row.rates, window);
        row.mdim_lower = rep.lower_estimate;
        row.mdim_upper = rep.upper_estimate;
        rows.push_back(std::move(row));
    }
    return rows;
}

struct RunArtifacts {
    std::vector<std::string> csv_rows;
    json summary;
    std::optional<DimensionReport> report;
    std::optional<BoxDimensionReport> box;
    std::vector<DampingRow> damping;
    std::vector<SweepRow> sweep;
    bool budget_exceeded = false;
    long long distance_evaluations = 0;
};

namespace detail {

struct CellOutcome {
    long long n = 0;
    CountResult result;
    long long evals = 0;
};

// One epsilon column of separated-orbit counts across the horizon range.
// Cells run in parallel; rows are collected in horizon order.
struct ColumnOutcome {
    std::vector<CellOutcome> cells;
    std::vector<long long> skipped;
    double mesh = 0.0;
};

template <typename MakeCtx>
inline ColumnOutcome run_column(const MakeCtx& make_ctx, const std::vector<Point>& net, double eps,
                                const ExperimentConfig& cfg, long long budget,
                                long long& projected, bool& exceeded) {
    ColumnOutcome col;
    std::vector<std::optional<std::future<CellOutcome>>> futs;
    for (long long n = cfg.n_min; n <= cfg.n_max; ++n) {
        const long long cost = (long long)net.size() * n;
        if (exceeded || projected + cost > budget) {
            exceeded = true;
            futs.emplace_back(std::nullopt);
            continue;
        }
        projected += cost;
        futs.emplace_back(std::async(std::launch::async, [&make_ctx, &net, eps, n, &cfg] {
            OrbitContext ctx = make_ctx(n, net);
            const bool exact = cfg.mode == "exact" ||
                               (cfg.mode == "auto" && (net.size() <= cfg.exact_cap ||
                                                       exact_separated_feasible(ctx, eps)));
            CountResult r = max_separated(ctx, eps, exact ? CountMode::Exact : CountMode::Greedy,
                                          cfg.exact_cap);
            return CellOutcome{n, std::move(r), ctx.distance_evaluations()};
        }));
    }
    for (std::size_t i = 0; i < futs.size(); ++i) {
        const long long n = cfg.n_min + (long long)i;
        if (!futs[i]) {
            col.skipped.push_back(n);
            continue;
        }
        col.cells.push_back(futs[i]->get());
    }
    return col;
}

} // namespace detail

// Entropy / metric-mean-dimension pipeline over nets: separated counts per
// (epsilon, horizon) cell, growth rates per epsilon restricted to horizons
// the net can resolve, then either tail-window rate extrema (entropy) or the
// normalized dimension estimate (mdim).
inline RunArtifacts run(const ExperimentConfig& cfg) {
    RunArtifacts art;
    const long long budget = effective_budget(cfg);

    if (cfg.quantity == "sweep") {
        art.sweep = perturbation_sweep(cfg.sweep_base, cfg.params, cfg.sweep_splice,
                                       cfg.sweep_deltas, cfg.schedule, cfg.window);
        json rows = json::array();
        for (const auto& r : art.sweep) {
            for (std::size_t i = 0; i < r.rates.size(); ++i) {
                art.csv_rows.push_back(detail::csv_row(
                    r.label, "sweep_rate", (long long)i + cfg.schedule.k_min, r.rates[i].epsilon,
                    "lap_rate", 0, r.rates[i].rate, 0.0));
            }
            art.csv_rows.push_back(detail::csv_row(r.label, "sweep", 0, r.delta, "lap_rate",
                                                   r.horseshoe_ok ? 1 : 0, r.mdim_upper, 0.0));
            rows.push_back({{"delta", r.delta},
                            {"c0_distance", r.c0},
                            {"mdim_lower", r.mdim_lower},
                            {"mdim_upper", r.mdim_upper},
                            {"horseshoe_ok", r.horseshoe_ok},
                            {"label", r.label}});
        }
        art.summary = {{"quantity", "sweep"},
                       {"rows", std::move(rows)},
                       {"splice", cfg.sweep_splice},
                       {"base", cfg.sweep_base},
                       {"caveats",
                        json::array({"rates are scale-aware oscillation lower bounds, not net "
                                     "counts; estimates are finite-scale evidence"})}};
        return art;
    }

    BuiltConstruction built = build_construction(cfg.construction, cfg.params);
    const std::string label = construction_label(built);

    if (cfg.quantity == "boxdim") {
        SpacePtr space = built.space;
        auto rep = box_dimension_detailed(
            space, [space](double mesh) { return sample_net(*space, mesh); },
            cfg.schedule.values(), cfg.window, cfg.exact_cap);
        for (const auto& r : rep.rows)
            art.csv_rows.push_back(detail::csv_row(label, "cov", 1, r.epsilon, to_string(r.mode),
                                                   r.count, std::log(double(r.count)), 0.0));
        art.summary = report_to_json(rep);
        art.summary["quantity"] = "boxdim";
        art.summary["system"] = label;
        art.box = std::move(rep);
        return art;
    }

    if (cfg.quantity == "damping") {
        if (!built.sequence)
            fail(errc::invalid_config, "damping: construction must be a map sequence");
        std::vector<Point> probes;
        const int count = cfg.params.contains("probes") ? cfg.params.at("probes").get<int>() : 64;
        if (count < 1) fail(errc::invalid_config, "damping: probes must be >= 1");
        for (int i = 1; i <= count; ++i) probes.push_back(Point::real(double(i) / double(count)));
        art.damping = damping_witness(*built.sequence, probes, cfg.n_max);
        json rows = json::array();
        for (const auto& r : art.damping) {
            art.csv_rows.push_back(
                detail::csv_row(label, "damping", r.window_length, 0.0, "exact", 0, r.sup_value, 0.0));
            rows.push_back({{"k", r.window_length}, {"sup", r.sup_value}});
        }
        art.summary = {{"quantity", "damping"}, {"system", label}, {"rows", std::move(rows)}};
        return art;
    }

    if (cfg.quantity != "entropy" && cfg.quantity != "mdim")
        fail(errc::invalid_config, "run: unhandled quantity '" + cfg.quantity + "'");

    const std::vector<double> schedule = cfg.schedule.values();

    if (cfg.estimator == "lap_oracle") {
        if (!built.system)
            fail(errc::invalid_config, "lap_oracle: construction must be a single map");
        auto flat = flatten_affine(*built.system);
        if (!flat)
            fail(errc::invalid_config, "lap_oracle: construction must be piecewise affine");
        GrowthSeries series;
        series.epsilon = schedule.back();
        for (long long n = cfg.n_min; n <= cfg.n_max; ++n) {
            detail::Timer timer;
            const auto itn = iterate_exact(*flat, n);
            const long long laps = lap_count(itn);
            series.samples.push_back({n, std::log(double(laps)), ResultMode::Exact});
            art.csv_rows.push_back(detail::csv_row(label, "lap", n, schedule.back(), "exact", laps,
                                                   std::log(double(laps)), timer.ms()));
        }
        const RateFit fit = growth_rate(series, cfg.burn_in);
        std::vector<RatePoint> rates;
        for (double eps : schedule) rates.push_back({eps, fit.rate, false});
        if (cfg.quantity == "entropy") {
            DimensionReport rep;
            for (const auto& r : rates)
                rep.per_epsilon.push_back({r.epsilon, r.rate, r.rate / std::fabs(std::log(r.epsilon)), false});
            rep.lower_estimate = rep.upper_estimate = fit.rate;
            rep.schedule = "lap oracle, horizons " + std::to_string(cfg.n_min) + ".." +
                           std::to_string(cfg.n_max);
            rep.caveats.push_back("rate from exact oscillation counts, independent of epsilon");
            art.report = rep;
        } else {
            art.report = mdim_estimate(rates, cfg.window);
        }
        art.summary = report_to_json(*art.report);
        art.summary["quantity"] = cfg.quantity;
        art.summary["system"] = label;
        art.summary["max_residual"] = fit.diag.max_residual;
        return art;
    }

    if (!built.system && !built.sequence)
        fail(errc::invalid_config, "entropy/mdim: construction must be a map or map sequence");

    const auto lam = detail::cumulative_expansion(built, cfg.n_max);
    auto make_ctx = [&built](long long n, const std::vector<Point>& net) {
        return built.system ? OrbitContext(built.system, n, net)
                            : OrbitContext(*built.sequence, n, net);
    };

    long long projected = 0;
    bool exceeded = false;
    std::vector<RatePoint> rates;
    std::vector<std::string> caveats;
    for (double eps : schedule) {
        const double mesh = cfg.mesh > 0.0 ? cfg.mesh : detail::auto_mesh(eps, lam, cfg.n_max);
        std::vector<Point> net;
        try {
            net = sample_net(*built.space, mesh);
        } catch (const error& e) {
            const auto* words = std::get_if<CantorWordsSpace>(&built.space->kind);
            if (e.code() != errc::depth_insufficient || !words) throw;
            // word spaces bottom out at their configured depth; use the
            // deepest available net and let the validity filter speak
            net = sample_net(*built.space, std::pow(3.0, -double(words->depth)));
        }
        auto col = detail::run_column(make_ctx, net, eps, cfg, budget, projected, exceeded);
        GrowthSeries series;
        series.epsilon = eps;
        bool any_greedy = false;
        for (const auto& cell : col.cells) {
            art.distance_evaluations += cell.evals;
            series.samples.push_back(
                {cell.n, std::log(double(cell.result.count)), cell.result.mode});
            art.csv_rows.push_back(detail::csv_row(label, "sep", cell.n, eps,
                                                   to_string(cell.result.mode), cell.result.count,
                                                   std::log(double(cell.result.count)),
                                                   cell.result.wall_ms));
            any_greedy |= cell.result.mode != ResultMode::Exact;
        }
        if (!col.skipped.empty()) {
            caveats.push_back("budget: skipped horizons at epsilon " + detail::csv_num(eps));
        }
        // horizons whose accumulated stretch keeps the net finer than eps/2
        GrowthSeries valid;
        valid.epsilon = eps;
        for (const auto& s : series.samples) {
            const double stretch = lam[std::size_t(std::min<long long>(s.horizon - 1,
                                                                       (long long)lam.size() - 1))];
            if (stretch * mesh <= eps / 2.0) valid.samples.push_back(s);
        }
        double rate = 0.0;
        if ((long long)valid.samples.size() >= cfg.burn_in + 3) {
            rate = growth_rate(valid, cfg.burn_in).rate;
        } else if (valid.samples.size() >= 2) {
            const auto& a = valid.samples[valid.samples.size() - 2];
            const auto& b = valid.samples.back();
            rate = (b.log_count - a.log_count) / double(b.horizon - a.horizon);
            caveats.push_back("epsilon " + detail::csv_num(eps) +
                              ": resolution-limited, rate from the 2 deepest reliable horizons");
        } else if (!valid.samples.empty()) {
            rate = 0.0;
            caveats.push_back("epsilon " + detail::csv_num(eps) +
                              ": net cannot resolve any orbit growth at this scale");
        } else if (!series.samples.empty()) {
            rate = 0.0;
            caveats.push_back("epsilon " + detail::csv_num(eps) + ": no reliable horizons");
        } else {
            continue; // column fully skipped
        }
        rates.push_back({eps, rate, any_greedy});
    }
    art.budget_exceeded = exceeded;

    if ((long long)rates.size() >= 3) {
        if (cfg.quantity == "entropy") {
            DimensionReport rep;
            for (const auto& r : rates)
                rep.per_epsilon.push_back(
                    {r.epsilon, r.rate, r.rate / std::fabs(std::log(r.epsilon)), r.lower_bound_only});
            const std::size_t w = std::min<std::size_t>(std::size_t(cfg.window), rates.size());
            double lo = rates[rates.size() - w].rate, hi = lo;
            for (std::size_t i = rates.size() - w; i < rates.size(); ++i) {
                lo = std::min(lo, rates[i].rate);
                hi = std::max(hi, rates[i].rate);
            }
            rep.lower_estimate = lo;
            rep.upper_estimate = hi;
            rep.schedule = "epsilon " + detail::csv_num(schedule.front()) + " .. " +
                           detail::csv_num(schedule.back());
            rep.caveats = caveats;
            rep.caveats.push_back("entropy estimates are rate extrema over the final " +
                                  std::to_string(w) + " epsilon values");
            art.report = std::move(rep);
        } else {
            auto rep = mdim_estimate(rates, cfg.window);
            rep.caveats.insert(rep.caveats.end(), caveats.begin(), caveats.end());
            art.report = std::move(rep);
        }
        art.summary = report_to_json(*art.report);
    } else {
        art.summary = {{"caveats", caveats}, {"partial", true}};
    }
    art.summary["quantity"] = cfg.quantity;
    art.summary["system"] = label;
    art.summary["budget_exceeded"] = art.budget_exceeded;
    art.summary["distance_evaluations"] = art.distance_evaluations;
    art.summary["rng_seed"] = cfg.rng_seed;
    return art;
}

} // namespace mdimlab
