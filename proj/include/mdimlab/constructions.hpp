#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "piecewise_affine.hpp"
#include "point.hpp"
#include "rational.hpp"
#include "space.hpp"
#include "systems.hpp"

namespace mdimlab {

inline PiecewiseAffineMap tent3_pam() {
    return PiecewiseAffineMap({rat(0), rat(1, 3), rat(2, 3), rat(1)},
                              {rat(0), rat(1), rat(0), rat(1)});
}

inline PiecewiseAffineMap tent2_pam() {
    return PiecewiseAffineMap({rat(0), rat(1, 2), rat(1)}, {rat(0), rat(1), rat(0)});
}

// Three-lap tent: 0,1/3,2/3,1 -> 0,1,0,1.
inline MapSystemPtr tent3() { return make_affine(tent3_pam(), false, "tent3"); }

// Two-lap tent: 0,1/2,1 -> 0,1,0.
inline MapSystemPtr tent2() { return make_affine(tent2_pam(), false, "tent2"); }

// Block layout for the horseshoe cascade: a_0 = 0, a_n = sum_{k<=n} 6/(pi^2 k^2),
// block n carrying a conjugated tent3^(m_n).  Breakpoints are the double
// roundings of the partial sums, taken exactly from there on.
struct CascadeSpec {
    long long block_count = 6;
    std::function<long long(long long)> m_rule = [](long long n) { return n; };
    std::string m_name = "linear";
};

inline CascadeSpec quadratic_cascade_spec(long long blocks = 4) {
    return CascadeSpec{blocks, [](long long n) { return n * n; }, "quadratic"};
}

inline std::vector<double> cascade_block_ends(const CascadeSpec& spec) {
    if (spec.block_count < 1)
        fail(errc::invalid_argument, "cascade: need at least one block");
    long long prev = 0;
    for (long long n = 1; n <= spec.block_count; ++n) {
        const long long m = spec.m_rule(n);
        if (m <= prev) fail(errc::invalid_argument, "cascade: m sequence must strictly increase");
        prev = m;
    }
    std::vector<double> ends{0.0};
    const double c = 6.0 / (std::acos(-1.0) * std::acos(-1.0));
    double acc = 0.0;
    for (long long n = 1; n <= spec.block_count; ++n) {
        acc += c / (double(n) * double(n));
        ends.push_back(acc);
    }
    return ends;
}

namespace detail {

inline PiecewiseAffineMap cascade_pam_blocks(const CascadeSpec& spec, long long blocks,
                                             std::size_t max_breakpoints = 2'000'000) {
    const auto ends = cascade_block_ends(spec);
    const PiecewiseAffineMap g = tent3_pam();
    std::vector<rational> xs{rational(0)}, ys{rational(0)};
    for (long long n = 1; n <= blocks; ++n) {
        const rational lo = rational_from_double(ends[std::size_t(n - 1)]);
        const rational hi = rational_from_double(ends[std::size_t(n)]);
        const rational len = hi - lo;
        const PiecewiseAffineMap gm = iterate_exact(g, spec.m_rule(n), max_breakpoints);
        for (std::size_t i = 1; i < gm.xs.size(); ++i) {
            xs.push_back(lo + len * gm.xs[i]);
            ys.push_back(lo + len * gm.ys[i]);
        }
        if (xs.size() > max_breakpoints)
            fail(errc::iteration_cap, "cascade: breakpoint budget exceeded");
    }
    if (xs.back() != 1) {
        xs.push_back(rational(1));
        ys.push_back(rational(1));
    }
    return PiecewiseAffineMap(std::move(xs), std::move(ys));
}

} // namespace detail

// Interval map carrying a 3^(m_n)-lap horseshoe on each block, identity past
// the last block.  Every block endpoint is a fixed point.
inline MapSystemPtr horseshoe_cascade(const CascadeSpec& spec = CascadeSpec{}) {
    auto pam = detail::cascade_pam_blocks(spec, spec.block_count);
    return make_affine(std::move(pam), false,
                       "horseshoe_cascade(blocks=" + std::to_string(spec.block_count) +
                           ",m=" + spec.m_name + ")");
}

// First n+1 blocks of the cascade, identity beyond them.
inline MapSystemPtr truncated_cascade(const CascadeSpec& spec, long long n) {
    if (n < 0 || n + 1 > spec.block_count)
        fail(errc::invalid_argument, "truncated_cascade: need n+1 <= block_count");
    auto pam = detail::cascade_pam_blocks(spec, n + 1);
    return make_affine(std::move(pam), false, "truncated_cascade(" + std::to_string(n) + ")");
}

// Word map keeping the first k symbols and shifting the remainder by k.
inline MapSystemPtr cantor_cylinder_system(int k, int space_depth = 32) {
    if (k < 1) fail(errc::invalid_argument, "cantor_cylinder_system: k must be >= 1");
    return make_shift(Space::cantor_words(space_depth), k, k,
                      "cantor_cylinder(k=" + std::to_string(k) + ")");
}

// x -> x / 2^j as an exact dyadic interval map.
inline MapSystemPtr halving_map(long long j) {
    if (j < 0 || j > 60) fail(errc::invalid_argument, "halving_map: exponent out of range");
    return make_affine(
        PiecewiseAffineMap({rational(0), rational(1)},
                           {rational(0), rational(1) / boost::multiprecision::pow(
                                                           boost::multiprecision::cpp_int(2), int(j))}),
        false, "halving(" + std::to_string(j) + ")");
}

// Alternating sequence: odd indices apply a growing tent2 power, even
// indices contract by a growing power of two.
inline NonAutonomousSystem ks_alternating() {
    MapSystemPtr base = tent2();
    NonAutonomousSystem nas;
    nas.space = base->domain;
    nas.description = "alternating tent2 powers and dyadic contractions";
    nas.generator = [base](long long i) -> MapSystemPtr {
        if (i < 1) fail(errc::invalid_argument, "generator index must be >= 1");
        if (i % 2 == 1) return make_iterate(base, (i + 1) / 2);
        return halving_map(i / 2);
    };
    return nas;
}

// Pointwise damping: index i applies lambda_rule(n_shift + i) * f_i.
inline NonAutonomousSystem damped_sequence(NonAutonomousSystem base,
                                           std::function<double(long long)> lambda_rule,
                                           long long n_shift = 0) {
    if (!std::holds_alternative<IntervalSpace>(base.space->kind))
        fail(errc::invalid_argument, "damped_sequence: base must act on the interval");
    {
        MapSystemPtr f1 = base.generator(1);
        if (!f1 || evaluate(*f1, Point::real(0.0)).as_real() != 0.0)
            fail(errc::invalid_argument, "damped_sequence: base maps must fix 0");
    }
    NonAutonomousSystem out;
    out.space = base.space;
    out.description = "damped(" + base.description + ")";
    auto gen = std::move(base.generator);
    out.generator = [gen, lambda_rule, n_shift](long long i) -> MapSystemPtr {
        const double lambda = lambda_rule(n_shift + i);
        if (!(lambda >= 0.0 && lambda <= 1.0))
            fail(errc::invalid_argument, "damped_sequence: lambda values must lie in [0,1]");
        return make_scaled(lambda, gen(i));
    };
    return out;
}

// lambda_i = i/(i+1): each factor tends to 1 while the running products
// telescope to (n+1)/(n+k+1) -> 0.
inline double default_damping(long long i) { return double(i) / double(i + 1); }

// f_i = base^(2^i); powers saturate at 2^62 (far beyond any orbit that has
// not already collapsed onto a fixed point).
inline NonAutonomousSystem power_growth_sequence(MapSystemPtr base) {
    if (!base) fail(errc::invalid_argument, "power_growth_sequence: null base");
    NonAutonomousSystem nas;
    nas.space = base->domain;
    nas.description = "powers(" + base->label + ")";
    nas.generator = [base](long long i) -> MapSystemPtr {
        if (i < 1) fail(errc::invalid_argument, "generator index must be >= 1");
        const long long power = i >= 62 ? (1LL << 62) : (1LL << i);
        return make_iterate(base, power);
    };
    return nas;
}

// Vertices of the depth-th stage of the triadic snowflake arc on [0,1],
// with planar Euclidean distances.
inline SpacePtr koch_points(int depth) {
    if (depth < 1 || depth > 8) fail(errc::invalid_argument, "koch_points: depth must be in 1..8");
    struct XY {
        double x, y;
    };
    std::vector<XY> pts{{0.0, 0.0}, {1.0, 0.0}};
    const double c60 = 0.5, s60 = std::sqrt(3.0) / 2.0;
    for (int d = 0; d < depth; ++d) {
        std::vector<XY> next;
        next.reserve((pts.size() - 1) * 4 + 1);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double dx = (pts[i + 1].x - pts[i].x) / 3.0;
            const double dy = (pts[i + 1].y - pts[i].y) / 3.0;
            const XY p1{pts[i].x + dx, pts[i].y + dy};
            const XY peak{p1.x + dx * c60 - dy * s60, p1.y + dx * s60 + dy * c60};
            const XY p2{pts[i].x + 2 * dx, pts[i].y + 2 * dy};
            next.push_back(pts[i]);
            next.push_back(p1);
            next.push_back(peak);
            next.push_back(p2);
        }
        next.push_back(pts.back());
        pts = std::move(next);
    }
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(Point::tuple({Point::real(p.x), Point::real(p.y)}));
    return Space::cloud(std::move(out));
}

// {0} with the reciprocals 1/1 .. 1/N, absolute-value distances.
inline SpacePtr convergent_sequence_space(long long N) {
    if (N < 10) fail(errc::invalid_argument, "convergent_sequence_space: need N >= 10");
    std::vector<Point> pts{Point::real(0.0)};
    pts.reserve(std::size_t(N) + 1);
    for (long long n = N; n >= 1; --n) pts.push_back(Point::real(1.0 / double(n)));
    return Space::cloud(std::move(pts));
}

// Splice an affinely squeezed cascade into [x0, x0+delta/2] at the smallest
// fixed point x0 of `base`, with a linear bridge back to `base` on
// [x0+delta/2, x0+delta].  Circle bases use the smallest point fixed mod 1
// (splicing at genuinely periodic points of period >= 2 is unsupported).
inline MapSystemPtr splice_cascade(MapSystemPtr base, double delta,
                                   const CascadeSpec& spec = CascadeSpec{}) {
    if (!base) fail(errc::invalid_argument, "splice_cascade: null base");
    if (!(delta > 0.0 && delta < 1.0))
        fail(errc::invalid_argument, "splice_cascade: delta must lie in (0,1)");
    const bool circle = std::holds_alternative<CircleSpace>(base->domain->kind);
    if (!circle && !std::holds_alternative<IntervalSpace>(base->domain->kind))
        fail(errc::invalid_argument, "splice_cascade: base must act on interval or circle");
    auto flat = flatten_affine(*base);
    if (!flat) fail(errc::invalid_argument, "splice_cascade: base is not piecewise affine");

    rational x0;
    rational winding = 0;
    if (!circle) {
        auto fps = fixed_points(*flat);
        while (!fps.empty() && fps.front() >= 1) fps.erase(fps.begin());
        if (fps.empty())
            fail(errc::no_periodic_point, "splice_cascade: base has no fixed point in [0,1)");
        x0 = fps.front();
    } else {
        auto fps = fixed_points_mod1(*flat);
        if (fps.empty()) {
            // hunt for a low-period point to report a precise error
            std::string note = "splice_cascade: base has no fixed point mod 1";
            try {
                PiecewiseAffineMap lift = *flat;
                const long long degree =
                    (long long)rational_floor(flat->ys.back() - flat->ys.front()).convert_to<long long>();
                for (int p = 2; p <= 4; ++p) {
                    auto [lo, hi] = exact_image(lift, lift.domain_lo(), lift.domain_hi());
                    const long long shift_lo = (long long)rational_floor(lo).convert_to<long long>();
                    const long long shift_hi =
                        (long long)rational_floor(hi).convert_to<long long>() + 1;
                    PiecewiseAffineMap ext =
                        extend_periodic(*flat, degree, std::min(shift_lo, 0LL),
                                        std::max(shift_hi, 1LL));
                    lift = compose(ext, lift);
                    if (!fixed_points_mod1(lift).empty()) {
                        note = "splice_cascade: smallest periodic point has period " +
                               std::to_string(p) +
                               "; splicing is only supported at points fixed mod 1";
                        break;
                    }
                }
            } catch (const error&) {
                // lift bookkeeping failed; keep the generic message
            }
            fail(errc::no_periodic_point, note);
        }
        x0 = fps.front();
        winding = flat->eval_exact(x0) - x0; // integer for a point fixed mod 1
    }

    const rational rdelta = rational_from_double(delta);
    if (x0 + rdelta > 1)
        fail(errc::invalid_argument, "splice_cascade: splice interval [x0, x0+delta] leaves [0,1]");

    const PiecewiseAffineMap casc = detail::cascade_pam_blocks(spec, spec.block_count);
    const rational half = rdelta / 2;
    std::vector<rational> xs, ys;
    for (std::size_t i = 0; i < flat->xs.size() && flat->xs[i] < x0; ++i) {
        xs.push_back(flat->xs[i]);
        ys.push_back(flat->ys[i]);
    }
    for (std::size_t i = 0; i < casc.xs.size(); ++i) {
        xs.push_back(x0 + half * casc.xs[i]);
        ys.push_back(x0 + winding + half * casc.ys[i]);
    }
    const rational bridge_end = x0 + rdelta;
    xs.push_back(bridge_end);
    ys.push_back(flat->eval_exact(bridge_end));
    for (std::size_t i = 0; i < flat->xs.size(); ++i) {
        if (flat->xs[i] <= bridge_end) continue;
        xs.push_back(flat->xs[i]);
        ys.push_back(flat->ys[i]);
    }
    PiecewiseAffineMap spliced(std::move(xs), std::move(ys));
    return make_affine(std::move(spliced), circle,
                       "splice(" + base->label + ",delta=" + std::to_string(delta) + ")");
}

struct ConstructionInfo {
    std::string id;
    std::string params;
    std::string note;
};

inline const std::vector<ConstructionInfo>& construction_registry() {
    static const std::vector<ConstructionInfo> rows = {
        {"tent3", "-", "full three-lap tent map on [0,1]"},
        {"tent2", "-", "full two-lap tent map on [0,1]"},
        {"horseshoe_cascade", "blocks (default 6), m (linear|quadratic)",
         "block map with a 3^(m_n)-lap horseshoe on each shrinking block"},
        {"truncated_cascade", "blocks, m, n", "cascade cut to blocks 1..n+1, identity beyond"},
        {"cantor_cylinder_system", "k, depth (default 32)",
         "word map preserving the first k symbols and shifting the rest by k"},
        {"shift", "block, preserve, depth", "block shift on two-symbol words"},
        {"doubling_circle", "-", "angle doubling on the circle"},
        {"cantor_words", "depth (default 10)", "bare two-symbol word space, no map"},
        {"ks_alternating", "-", "alternating tent2 powers and dyadic contractions"},
        {"power_growth", "base (tent2|tent3)", "sequence f_i = base^(2^i)"},
        {"damped_power_growth", "base (tent2|tent3)",
         "lambda_i * base^(2^i) with lambda_i = i/(i+1)"},
        {"koch_points", "depth (1..8)", "triadic snowflake arc vertices with planar metric"},
        {"convergent_sequence_space", "N (>= 10)", "{0} and the reciprocals down to 1/N"},
        {"identity_interval", "-", "identity map on [0,1]"},
        {"custom", "system (JSON descriptor)", "any serialized map system"},
    };
    return rows;
}

} // namespace mdimlab
