#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace mdimlab {

// Continuous piecewise-affine map given by exact rational breakpoints and
// values; affine interpolation between consecutive breakpoints.  Double
// mirrors of the exact data serve fast orbit evaluation; all structural
// queries (laps, images, composition, sup distances) run in exact
// arithmetic.  Domain is [xs.front(), xs.back()] — usually [0,1], wider for
// periodically extended circle lifts.
class PiecewiseAffineMap {
public:
    std::vector<rational> xs;
    std::vector<rational> ys;
    std::vector<double> fx;
    std::vector<double> fy;

    PiecewiseAffineMap(std::vector<rational> breakpoints, std::vector<rational> values)
        : xs(std::move(breakpoints)), ys(std::move(values)) {
        if (xs.size() < 2 || xs.size() != ys.size())
            fail(errc::invalid_argument, "piecewise-affine map needs matching breakpoint/value lists (>= 2)");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i - 1] < xs[i]))
                fail(errc::invalid_argument, "breakpoints must be strictly increasing");
        fx.reserve(xs.size());
        fy.reserve(ys.size());
        for (const auto& x : xs) fx.push_back(to_double(x));
        for (const auto& y : ys) fy.push_back(to_double(y));
    }

    static PiecewiseAffineMap from_doubles(const std::vector<double>& breakpoints,
                                           const std::vector<double>& values) {
        std::vector<rational> bx, by;
        bx.reserve(breakpoints.size());
        by.reserve(values.size());
        for (double b : breakpoints) bx.push_back(rational_from_double(b));
        for (double v : values) by.push_back(rational_from_double(v));
        return PiecewiseAffineMap(std::move(bx), std::move(by));
    }

    std::size_t segment_count() const { return xs.size() - 1; }

    const rational& domain_lo() const { return xs.front(); }
    const rational& domain_hi() const { return xs.back(); }

    bool values_in_unit_range() const {
        for (const auto& y : ys)
            if (y < 0 || y > 1) return false;
        return true;
    }

    // Fast double evaluation; exact at (double images of) breakpoints.
    double operator()(double x) const {
        auto it = std::upper_bound(fx.begin(), fx.end(), x);
        std::size_t i = std::size_t(it - fx.begin());
        if (i == 0) return fy.front();
        if (i == fx.size()) return fy.back();
        if (x == fx[i - 1]) return fy[i - 1];
        const double t = (x - fx[i - 1]) / (fx[i] - fx[i - 1]);
        return fy[i - 1] + t * (fy[i] - fy[i - 1]);
    }

    rational eval_exact(const rational& x) const {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = std::size_t(it - xs.begin()); // x < xs[i], x >= xs[i-1]
        if (x == xs[i - 1]) return ys[i - 1];
        return ys[i - 1] + (x - xs[i - 1]) * (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    }
};

inline int sign_of(const rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

// Number of maximal (weakly) monotone pieces.
inline long long lap_count(const PiecewiseAffineMap& m) {
    long long laps = 1;
    int dir = 0;
    for (std::size_t i = 0; i + 1 < m.ys.size(); ++i) {
        const int s = sign_of(m.ys[i + 1] - m.ys[i]);
        if (s == 0) continue;
        if (dir != 0 && s != dir) ++laps;
        dir = s;
    }
    return laps;
}

// Exact image [min, max] of [a, b] under m.
inline std::pair<rational, rational> exact_image(const PiecewiseAffineMap& m, const rational& a,
                                                 const rational& b) {
    if (!(a < b)) fail(errc::invalid_argument, "exact_image: empty interval");
    rational lo = m.eval_exact(a), hi = lo;
    const rational vb = m.eval_exact(b);
    lo = std::min(lo, vb);
    hi = std::max(hi, vb);
    for (std::size_t i = 0; i < m.xs.size(); ++i) {
        if (m.xs[i] <= a) continue;
        if (m.xs[i] >= b) break;
        lo = std::min(lo, m.ys[i]);
        hi = std::max(hi, m.ys[i]);
    }
    return {lo, hi};
}

// outer(inner(x)) with breakpoints pulled back exactly, so laps survive
// composition.  max_breakpoints guards against exponential lap growth.
inline PiecewiseAffineMap compose(const PiecewiseAffineMap& outer, const PiecewiseAffineMap& inner,
                                  std::size_t max_breakpoints = 2'000'000) {
    auto [ilo, ihi] = exact_image(inner, inner.domain_lo(), inner.domain_hi());
    if (ilo < outer.domain_lo() || ihi > outer.domain_hi())
        fail(errc::invalid_argument, "compose: inner range escapes outer domain");
    std::vector<rational> cand = inner.xs;
    for (std::size_t i = 0; i + 1 < inner.xs.size(); ++i) {
        const rational& y0 = inner.ys[i];
        const rational& y1 = inner.ys[i + 1];
        if (y0 == y1) continue;
        const rational lo = std::min(y0, y1), hi = std::max(y0, y1);
        for (const auto& beta : outer.xs) {
            if (beta <= lo || beta >= hi) continue;
            cand.push_back(inner.xs[i] +
                           (beta - y0) * (inner.xs[i + 1] - inner.xs[i]) / (y1 - y0));
        }
        if (cand.size() > 4 * max_breakpoints)
            fail(errc::iteration_cap, "compose: breakpoint budget exceeded");
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    if (cand.size() > max_breakpoints)
        fail(errc::iteration_cap, "compose: breakpoint budget exceeded (" +
                                      std::to_string(cand.size()) + " points)");
    std::vector<rational> vals;
    vals.reserve(cand.size());
    for (const auto& x : cand) vals.push_back(outer.eval_exact(inner.eval_exact(x)));
    return PiecewiseAffineMap(std::move(cand), std::move(vals));
}

// m composed with itself `power` times, by binary exponentiation.
inline PiecewiseAffineMap iterate_exact(const PiecewiseAffineMap& m, long long power,
                                        std::size_t max_breakpoints = 2'000'000) {
    if (power < 1) fail(errc::invalid_argument, "iterate_exact: power must be >= 1");
    PiecewiseAffineMap base = m;
    PiecewiseAffineMap result = m;
    bool have = false;
    long long p = power;
    while (p > 0) {
        if (p & 1) {
            result = have ? compose(base, result, max_breakpoints) : base;
            have = true;
        }
        p >>= 1;
        if (p > 0) base = compose(base, base, max_breakpoints);
    }
    return result;
}

struct HorseshoeCheck {
    bool ok = false;
    long long pieces_found = 0;        // maximal number of covering pieces (greedy)
    std::vector<rational> cuts;        // s+1 boundaries when ok
    rational refut_from, refut_to;     // final uncovered stretch when !ok
    std::string note;
};

// True iff [a,b] splits into `s` consecutive closed intervals whose exact
// images each contain [a,b].  Greedy shortest-prefix pieces maximize the
// piece count, so feasibility is exactly (greedy count >= s); the witness
// merges the greedy tail into the last piece.
inline HorseshoeCheck verify_horseshoe(const PiecewiseAffineMap& m, const rational& a,
                                       const rational& b, long long s) {
    if (s < 2) fail(errc::invalid_argument, "verify_horseshoe: need s >= 2");
    if (a < m.domain_lo() || b > m.domain_hi() || !(a < b))
        fail(errc::invalid_argument, "verify_horseshoe: bad interval");
    HorseshoeCheck out;
    std::vector<rational> bounds{a};
    rational t = a;
    while (t < b) {
        // Scan right from t for the least c with image([t,c]) containing [a,b].
        bool got_lo = false, got_hi = false;
        rational at_lo, at_hi;
        rational min_seen = m.eval_exact(t), max_seen = min_seen;
        if (min_seen <= a) { got_lo = true; at_lo = t; }
        if (max_seen >= b) { got_hi = true; at_hi = t; }
        rational u = t;
        rational yu = min_seen;
        std::size_t seg = 0;
        while (seg < m.xs.size() && m.xs[seg] <= t) ++seg;
        while (!(got_lo && got_hi)) {
            rational v = seg < m.xs.size() ? std::min(m.xs[seg], b) : b;
            if (!(v > u)) break; // reached b without covering
            const rational yv = m.eval_exact(v);
            if (!got_lo && std::min(yu, yv) <= a) {
                got_lo = true;
                at_lo = yu == yv ? u : u + (a - yu) * (v - u) / (yv - yu);
            }
            if (!got_hi && std::max(yu, yv) >= b) {
                got_hi = true;
                at_hi = yu == yv ? u : u + (b - yu) * (v - u) / (yv - yu);
            }
            min_seen = std::min(min_seen, yv);
            max_seen = std::max(max_seen, yv);
            u = v;
            yu = yv;
            if (v == b) break;
            ++seg;
        }
        if (!(got_lo && got_hi)) {
            out.refut_from = t;
            out.refut_to = b;
            out.note = "image [" + min_seen.str() + ", " + max_seen.str() + "] misses " +
                       (got_lo ? "" : "the low end ") + (got_hi ? "" : "the high end ") +
                       "of [" + a.str() + ", " + b.str() + "]";
            break;
        }
        const rational c = std::max(at_lo, at_hi);
        bounds.push_back(c);
        ++out.pieces_found;
        t = c;
    }
    out.ok = out.pieces_found >= s;
    if (out.ok) {
        out.cuts.assign(bounds.begin(), bounds.begin() + s);
        out.cuts.push_back(b);
    } else if (out.note.empty()) {
        out.refut_from = t;
        out.refut_to = b;
        out.note = "interval decomposes into at most " + std::to_string(out.pieces_found) +
                   " covering pieces, fewer than " + std::to_string(s);
    }
    return out;
}

// Solutions of m(x) = x (returns the left endpoint for intervals of fixed
// points), sorted ascending.
inline std::vector<rational> fixed_points(const PiecewiseAffineMap& m) {
    std::vector<rational> roots;
    for (std::size_t i = 0; i + 1 < m.xs.size(); ++i) {
        const rational g0 = m.ys[i] - m.xs[i];
        const rational g1 = m.ys[i + 1] - m.xs[i + 1];
        if (g0 == 0) roots.push_back(m.xs[i]);
        if (sign_of(g0) * sign_of(g1) < 0)
            roots.push_back(m.xs[i] - g0 * (m.xs[i + 1] - m.xs[i]) / (g1 - g0));
    }
    if (m.ys.back() == m.xs.back()) roots.push_back(m.xs.back());
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

inline boost::multiprecision::cpp_int rational_floor(const rational& r) {
    boost::multiprecision::cpp_int q = numerator(r) / denominator(r);
    if (q * denominator(r) > numerator(r)) --q; // fix toward -inf for negatives
    return q;
}

// Solutions of m(x) = x (mod 1) in [domain_lo, domain_hi), for circle lifts.
inline std::vector<rational> fixed_points_mod1(const PiecewiseAffineMap& m) {
    std::vector<rational> roots;
    for (std::size_t i = 0; i + 1 < m.xs.size(); ++i) {
        const rational g0 = m.ys[i] - m.xs[i];
        const rational g1 = m.ys[i + 1] - m.xs[i + 1];
        const rational lo = std::min(g0, g1), hi = std::max(g0, g1);
        for (boost::multiprecision::cpp_int k = rational_floor(lo); rational(k) <= hi; ++k) {
            const rational target(k);
            if (g0 == target) {
                roots.push_back(m.xs[i]);
            } else if ((g0 < target && g1 >= target) || (g0 > target && g1 <= target)) {
                roots.push_back(m.xs[i] + (target - g0) * (m.xs[i + 1] - m.xs[i]) / (g1 - g0));
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    while (!roots.empty() && roots.back() >= m.domain_hi()) roots.pop_back();
    return roots;
}

// Exact sup |f - g| over a common interval domain: both maps are affine
// between merged breakpoints, and |affine| peaks at segment endpoints.
inline rational c0_sup_interval(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g) {
    if (f.domain_lo() != g.domain_lo() || f.domain_hi() != g.domain_hi())
        fail(errc::invalid_argument, "c0_sup: domain mismatch");
    std::vector<rational> merged = f.xs;
    merged.insert(merged.end(), g.xs.begin(), g.xs.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    rational best = 0;
    for (const auto& x : merged) {
        rational d = f.eval_exact(x) - g.eval_exact(x);
        if (d < 0) d = -d;
        best = std::max(best, d);
    }
    return best;
}

inline rational arc_distance_exact(rational v) {
    v -= rational(rational_floor(v)); // frac(v) in [0,1)
    const rational w = 1 - v;
    return std::min(v, w);
}

// Exact sup of arc distance between two circle lifts on a common domain.
// On each merged segment the lift difference h is affine; arc(h) peaks at
// 1/2 whenever h sweeps past a half-integer, else at segment endpoints.
inline rational c0_sup_circle(const PiecewiseAffineMap& f, const PiecewiseAffineMap& g) {
    if (f.domain_lo() != g.domain_lo() || f.domain_hi() != g.domain_hi())
        fail(errc::invalid_argument, "c0_sup: domain mismatch");
    std::vector<rational> merged = f.xs;
    merged.insert(merged.end(), g.xs.begin(), g.xs.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    rational best = 0;
    const rational half(1, 2);
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const rational h = f.eval_exact(merged[i]) - g.eval_exact(merged[i]);
        best = std::max(best, arc_distance_exact(h));
        if (i + 1 < merged.size()) {
            const rational h2 = f.eval_exact(merged[i + 1]) - g.eval_exact(merged[i + 1]);
            const rational lo = std::min(h, h2), hi = std::max(h, h2);
            // does [lo, hi] contain k + 1/2 for some integer k?
            const rational k = rational(rational_floor(lo - half)) + 1 + half;
            if (k <= hi) best = std::max(best, half);
        }
        if (best == half) break;
    }
    return best;
}

// Periodic extension of a degree-`degree` circle lift from [0,1] to
// [shift_lo, shift_hi] (integers), for composing lifts whose inner range
// leaves the unit interval.
inline PiecewiseAffineMap extend_periodic(const PiecewiseAffineMap& lift, long long degree,
                                          long long shift_lo, long long shift_hi) {
    if (lift.domain_lo() != 0 || lift.domain_hi() != 1)
        fail(errc::invalid_argument, "extend_periodic: lift domain must be [0,1]");
    if (shift_lo >= shift_hi) fail(errc::invalid_argument, "extend_periodic: empty range");
    if (lift.ys.back() != lift.ys.front() + rational(degree))
        fail(errc::invalid_argument, "extend_periodic: map is not a degree-" +
                                         std::to_string(degree) + " lift");
    std::vector<rational> bx, by;
    for (long long k = shift_lo; k < shift_hi; ++k) {
        for (std::size_t i = 0; i + 1 < lift.xs.size(); ++i) {
            bx.push_back(lift.xs[i] + k);
            by.push_back(lift.ys[i] + rational(degree) * k);
        }
    }
    bx.push_back(rational(shift_hi));
    by.push_back(lift.ys.back() + rational(degree) * (shift_hi - 1));
    return PiecewiseAffineMap(std::move(bx), std::move(by));
}

} // namespace mdimlab
