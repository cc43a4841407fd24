#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "point.hpp"
#include "space.hpp"
#include "systems.hpp"

namespace mdimlab {

enum class CountMode { Exact, Greedy };
enum class ResultMode { Exact, GreedyLower, GreedyUpper };

inline const char* to_string(ResultMode m) {
    switch (m) {
        case ResultMode::Exact: return "exact";
        case ResultMode::GreedyLower: return "greedy_lower";
        default: return "greedy_upper";
    }
}

struct CountResult {
    long long count = 0;
    ResultMode mode = ResultMode::Exact;
    std::vector<Point> witness;
    double epsilon = 0.0;
    long long horizon = 0;
    double wall_ms = 0.0;
};

// One CSV row per count: system_id, n, epsilon, quantity, mode, count, wall_ms.
inline std::string to_csv_row(const CountResult& r, const std::string& system_id,
                              const std::string& quantity) {
    std::ostringstream os;
    os << system_id << ',' << r.horizon << ',' << r.epsilon << ',' << quantity << ','
       << to_string(r.mode) << ',' << r.count << ',' << r.wall_ms;
    return os.str();
}

namespace detail {

// Distances within a few ulps of eps resolve the way exact arithmetic
// would: a computed distance inside the guard band counts as exactly eps,
// so it is neither strictly above nor strictly below it.  This keeps counts
// stable on nets whose spacing divides eps (where float rounding would
// otherwise flip boundary pairs either way).
inline double sep_gate(double eps) {
    return eps * (1.0 + 4 * std::numeric_limits<double>::epsilon());
}
inline double within_gate(double eps) {
    return eps * (1.0 - 4 * std::numeric_limits<double>::epsilon());
}

} // namespace detail

// Precomputed orbit segments over a fixed net, exposing the horizon-n orbit
// metric.  Orbits use f_1^{(j)} for non-autonomous systems.  Storage picks
// the cheapest faithful representation: raw doubles for interval/circle
// nets, 64-bit symbol masks for two-symbol word nets, points otherwise.
class OrbitContext {
public:
    OrbitContext(MapSystemPtr system, long long horizon, std::vector<Point> net)
        : system_(std::move(system)), horizon_(horizon), net_(std::move(net)) {
        if (!system_) fail(errc::invalid_argument, "orbit context: null system");
        space_ = system_->domain;
        init();
    }

    OrbitContext(NonAutonomousSystem nas, long long horizon, std::vector<Point> net)
        : nas_(std::move(nas)), horizon_(horizon), net_(std::move(net)) {
        space_ = nas_->space;
        if (!space_) fail(errc::invalid_argument, "orbit context: sequence carries no space");
        init();
    }

    const std::vector<Point>& net() const { return net_; }
    long long horizon() const { return horizon_; }
    const SpacePtr& space() const { return space_; }
    long long distance_evaluations() const { return evals_.load(std::memory_order_relaxed); }

    // True when the horizon-1 metric is plain |x-y| on real coordinates, so
    // counting can run optimal sorted sweeps.
    bool line_like() const { return mode_ == Storage::RealLine && horizon_ == 1; }

    // Real coordinates at every step: the orbit metric then dominates plain
    // |x-y|, so conflicts only reach net neighbours within eps.
    bool on_real_line() const { return mode_ == Storage::RealLine; }

    double pair_distance(std::size_t i, std::size_t j) const {
        double worst = 0.0;
        visit_steps(i, j, [&](double d) {
            worst = std::max(worst, d);
            return false;
        });
        return worst;
    }

    // exists j with step distance > eps (early exit)
    bool pair_separated(std::size_t i, std::size_t j, double eps) const {
        const double gate = detail::sep_gate(eps);
        bool hit = false;
        visit_steps(i, j, [&](double d) {
            if (d > gate) {
                hit = true;
                return true;
            }
            return false;
        });
        return hit;
    }

    // all steps strictly below eps (early exit on the first violation)
    bool pair_within(std::size_t i, std::size_t j, double eps) const {
        const double gate = detail::within_gate(eps);
        bool ok = true;
        visit_steps(i, j, [&](double d) {
            if (!(d < gate)) {
                ok = false;
                return true;
            }
            return false;
        });
        return ok;
    }

    // Orbit metric for arbitrary points (computes fresh orbits; net points
    // should go through pair_distance).
    double orbit_distance(const Point& p, const Point& q) const {
        Point a = p, b = q;
        double worst = 0.0;
        for (long long j = 0; j < horizon_; ++j) {
            worst = std::max(worst, distance(*space_, a, b));
            evals_.fetch_add(1, std::memory_order_relaxed);
            if (j + 1 < horizon_) {
                a = step(a, j);
                b = step(b, j);
            }
        }
        return worst;
    }

private:
    enum class Storage { RealLine, CircleArc, WordMask, Generic };

    MapSystemPtr system_;
    std::optional<NonAutonomousSystem> nas_;
    long long horizon_ = 1;
    std::vector<Point> net_;
    SpacePtr space_;
    Storage mode_ = Storage::Generic;
    std::vector<double> reals_;          // net_size * horizon
    std::vector<std::uint64_t> masks_;   // net_size * horizon
    std::vector<Point> orbit_points_;    // net_size * horizon (generic)
    std::vector<double> pow3_;           // 3^-i weights for mask distances
    mutable std::atomic<long long> evals_{0};

    Point step(const Point& p, long long j) const {
        return system_ ? evaluate(*system_, p) : evaluate(*nas_->generator(j + 1), p);
    }

    static std::optional<std::uint64_t> word_mask(const Point& p,
                                                  const std::vector<std::uint8_t>& alphabet) {
        if (!p.is_word()) return std::nullopt;
        const auto& w = p.as_word();
        if (w.tail != alphabet[0] || w.symbols.size() > 62) return std::nullopt;
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < w.symbols.size(); ++i) {
            if (w.symbols[i] == alphabet[1])
                m |= std::uint64_t(1) << i;
            else if (w.symbols[i] != alphabet[0])
                return std::nullopt;
        }
        return m;
    }

    void init() {
        if (horizon_ < 1) fail(errc::invalid_argument, "orbit context: horizon must be >= 1");
        if (net_.empty()) fail(errc::invalid_argument, "orbit context: empty net");

        const bool interval_like =
            (std::holds_alternative<IntervalSpace>(space_->kind) ||
             (std::holds_alternative<FinitePointCloudSpace>(space_->kind) &&
              std::get<FinitePointCloudSpace>(space_->kind).table.empty())) &&
            std::all_of(net_.begin(), net_.end(), [](const Point& p) { return p.is_real(); });
        const bool circle_like = std::holds_alternative<CircleSpace>(space_->kind);
        const auto* words = std::get_if<CantorWordsSpace>(&space_->kind);
        const bool word_like = words && words->alphabet == std::vector<std::uint8_t>{0, 2};

        const std::size_t n = net_.size();
        const std::size_t h = std::size_t(horizon_);
        if (interval_like || circle_like) {
            mode_ = interval_like ? Storage::RealLine : Storage::CircleArc;
            reals_.resize(n * h);
            for (std::size_t i = 0; i < n; ++i) {
                Point p = net_[i];
                for (std::size_t j = 0; j < h; ++j) {
                    reals_[i * h + j] = circle_like ? p.as_angle() : p.as_real();
                    if (j + 1 < h) p = step(p, (long long)j);
                }
            }
            return;
        }
        if (word_like) {
            mode_ = Storage::WordMask;
            masks_.resize(n * h);
            pow3_.resize(64);
            pow3_[0] = 1.0;
            for (int i = 1; i < 64; ++i) pow3_[i] = pow3_[i - 1] / 3.0;
            for (std::size_t i = 0; i < n; ++i) {
                Point p = net_[i];
                for (std::size_t j = 0; j < h; ++j) {
                    auto m = word_mask(p, words->alphabet);
                    if (!m) {
                        mode_ = Storage::Generic;
                        break;
                    }
                    masks_[i * h + j] = *m;
                    if (j + 1 < h) p = step(p, (long long)j);
                }
                if (mode_ == Storage::Generic) break;
            }
            if (mode_ == Storage::WordMask) return;
            masks_.clear();
        }
        mode_ = Storage::Generic;
        orbit_points_.resize(n * h, Point::real(0.0));
        for (std::size_t i = 0; i < n; ++i) {
            Point p = net_[i];
            for (std::size_t j = 0; j < h; ++j) {
                orbit_points_[i * h + j] = p;
                if (j + 1 < h) p = step(p, (long long)j);
            }
        }
    }

    // Calls fn with the ambient distance of each orbit step; fn returning
    // true stops the scan.
    template <typename Fn>
    void visit_steps(std::size_t i, std::size_t j, Fn&& fn) const {
        const std::size_t h = std::size_t(horizon_);
        const std::size_t bi = i * h, bj = j * h;
        long long used = 0;
        switch (mode_) {
            case Storage::RealLine:
                for (std::size_t s = 0; s < h; ++s) {
                    ++used;
                    if (fn(std::fabs(reals_[bi + s] - reals_[bj + s]))) break;
                }
                break;
            case Storage::CircleArc:
                for (std::size_t s = 0; s < h; ++s) {
                    ++used;
                    const double gap = std::fabs(reals_[bi + s] - reals_[bj + s]);
                    if (fn(std::min(gap, 1.0 - gap))) break;
                }
                break;
            case Storage::WordMask:
                for (std::size_t s = 0; s < h; ++s) {
                    ++used;
                    std::uint64_t x = masks_[bi + s] ^ masks_[bj + s];
                    double d = 0.0;
                    while (x) {
                        d += pow3_[std::countr_zero(x) + 1];
                        x &= x - 1;
                    }
                    if (fn(2.0 * d)) break;
                }
                break;
            case Storage::Generic:
                for (std::size_t s = 0; s < h; ++s) {
                    ++used;
                    if (fn(distance(*space_, orbit_points_[bi + s], orbit_points_[bj + s]))) break;
                }
                break;
        }
        evals_.fetch_add(used, std::memory_order_relaxed);
    }
};

inline double orbit_distance(const OrbitContext& ctx, const Point& p, const Point& q) {
    const auto& net = ctx.net();
    std::size_t ip = net.size(), iq = net.size();
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (ip == net.size() && net[i] == p) ip = i;
        if (iq == net.size() && net[i] == q) iq = i;
    }
    if (ip < net.size() && iq < net.size()) return ctx.pair_distance(ip, iq);
    return ctx.orbit_distance(p, q);
}

// ---- bitset helpers ----

namespace detail {

struct BitRows {
    std::size_t n = 0, w = 0;
    std::vector<std::uint64_t> bits;

    explicit BitRows(std::size_t n_) : n(n_), w((n_ + 63) / 64), bits(n_ * w, 0) {}
    void set(std::size_t i, std::size_t j) { bits[i * w + j / 64] |= std::uint64_t(1) << (j % 64); }
    bool get(std::size_t i, std::size_t j) const {
        return (bits[i * w + j / 64] >> (j % 64)) & 1;
    }
    const std::uint64_t* row(std::size_t i) const { return &bits[i * w]; }
};

struct VSet {
    std::size_t w = 0;
    std::vector<std::uint64_t> m;

    VSet() = default;
    explicit VSet(std::size_t n) : w((n + 63) / 64), m(w, 0) {}
    void set(std::size_t j) { m[j / 64] |= std::uint64_t(1) << (j % 64); }
    void reset(std::size_t j) { m[j / 64] &= ~(std::uint64_t(1) << (j % 64)); }
    bool get(std::size_t j) const { return (m[j / 64] >> (j % 64)) & 1; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto v : m) c += std::size_t(std::popcount(v));
        return c;
    }
    bool empty() const {
        for (auto v : m)
            if (v) return false;
        return true;
    }
    bool intersects(const std::uint64_t* other) const {
        for (std::size_t k = 0; k < w; ++k)
            if (m[k] & other[k]) return true;
        return false;
    }
    std::size_t intersect_count(const std::uint64_t* other) const {
        std::size_t c = 0;
        for (std::size_t k = 0; k < w; ++k) c += std::size_t(std::popcount(m[k] & other[k]));
        return c;
    }
    void and_with(const std::uint64_t* other) {
        for (std::size_t k = 0; k < w; ++k) m[k] &= other[k];
    }
    void and_not(const std::uint64_t* other) {
        for (std::size_t k = 0; k < w; ++k) m[k] &= ~other[k];
    }
    void or_with(const std::uint64_t* other) {
        for (std::size_t k = 0; k < w; ++k) m[k] |= other[k];
    }
    // subset test: this ⊆ other
    bool subset_of(const std::uint64_t* other) const {
        for (std::size_t k = 0; k < w; ++k)
            if (m[k] & ~other[k]) return false;
        return true;
    }
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t k = 0; k < w; ++k) {
            std::uint64_t v = m[k];
            while (v) {
                fn(k * 64 + std::size_t(std::countr_zero(v)));
                v &= v - 1;
            }
        }
    }
    int first() const {
        for (std::size_t k = 0; k < w; ++k)
            if (m[k]) return int(k * 64 + std::size_t(std::countr_zero(m[k])));
        return -1;
    }
};

// Maximum independent set by branch and bound: per-component first-fit
// incumbent, degree-0/1 reductions, first-fit clique-cover upper bound.
class MisSolver {
public:
    explicit MisSolver(const BitRows& adj) : g_(adj), n_(adj.n) {}

    VSet solve() {
        VSet all(n_);
        for (std::size_t i = 0; i < n_; ++i) all.set(i);
        VSet total(n_);
        for (auto& comp : components(all)) {
            best_set_ = VSet(n_);
            best_ = 0;
            // first-fit incumbent inside the component
            VSet seed(n_);
            comp.for_each([&](std::size_t v) {
                if (!seed.intersects(g_.row(v))) seed.set(v);
            });
            best_ = seed.count();
            best_set_ = seed;
            recurse(comp, VSet(n_), 0);
            total.or_with(best_set_.m.data());
        }
        return total;
    }

private:
    const BitRows& g_; // conflict graph, no self loops
    std::size_t n_;
    std::size_t best_ = 0;
    VSet best_set_;

    std::vector<VSet> components(const VSet& alive) const {
        std::vector<VSet> out;
        VSet left = alive;
        while (!left.empty()) {
            int s = left.first();
            VSet comp(n_), frontier(n_);
            comp.set(std::size_t(s));
            frontier.set(std::size_t(s));
            while (!frontier.empty()) {
                VSet next(n_);
                frontier.for_each([&](std::size_t v) { next.or_with(g_.row(v)); });
                next.and_with(left.m.data());
                next.and_not(comp.m.data());
                comp.or_with(next.m.data());
                frontier = next;
            }
            out.push_back(comp);
            left.and_not(comp.m.data());
        }
        return out;
    }

    std::size_t clique_cover_bound(const VSet& alive) const {
        std::vector<VSet> cliques;
        std::size_t bound = 0;
        alive.for_each([&](std::size_t v) {
            for (auto& c : cliques) {
                if (c.subset_of(g_.row(v))) { // v adjacent to every member
                    c.set(v);
                    return;
                }
            }
            cliques.emplace_back(n_);
            cliques.back().set(v);
            ++bound;
        });
        return bound;
    }

    void recurse(VSet alive, VSet chosen, std::size_t chosen_count) {
        // reductions: isolated vertices always join; a degree-1 vertex beats
        // its neighbor by the exchange argument
        for (;;) {
            std::size_t pick = n_;
            alive.for_each([&](std::size_t v) {
                if (pick == n_ && alive.intersect_count(g_.row(v)) <= 1) pick = v;
            });
            if (pick == n_) break;
            chosen.set(pick);
            ++chosen_count;
            VSet dead(n_);
            dead.set(pick);
            dead.or_with(g_.row(pick));
            alive.and_not(dead.m.data());
        }
        if (alive.empty()) {
            if (chosen_count > best_) {
                best_ = chosen_count;
                best_set_ = chosen;
            }
            return;
        }
        if (chosen_count + clique_cover_bound(alive) <= best_) return;
        std::size_t pivot = n_, pivot_deg = 0;
        alive.for_each([&](std::size_t v) {
            const std::size_t d = alive.intersect_count(g_.row(v));
            if (pivot == n_ || d > pivot_deg) {
                pivot = v;
                pivot_deg = d;
            }
        });
        {
            VSet a2 = alive, c2 = chosen;
            VSet dead(n_);
            dead.set(pivot);
            dead.or_with(g_.row(pivot));
            a2.and_not(dead.m.data());
            c2.set(pivot);
            recurse(std::move(a2), std::move(c2), chosen_count + 1);
        }
        {
            VSet a2 = alive;
            a2.reset(pivot);
            recurse(std::move(a2), std::move(chosen), chosen_count);
        }
    }
};

// Minimum dominating set over closed neighborhoods (rows include the vertex
// itself), with a disjoint-neighborhood packing lower bound.
class DomSolver {
public:
    DomSolver(const BitRows& closed) : g_(closed), n_(closed.n) {}

    VSet solve(const VSet& seed) {
        best_ = seed.count();
        best_set_ = seed;
        recurse(VSet(n_), VSet(n_), 0);
        return best_set_;
    }

private:
    const BitRows& g_;
    std::size_t n_;
    std::size_t best_ = 0;
    VSet best_set_;

    std::size_t packing_bound(const VSet& uncovered) const {
        VSet blocked(n_);
        std::size_t packed = 0;
        uncovered.for_each([&](std::size_t v) {
            if (blocked.intersects(g_.row(v))) return;
            ++packed;
            blocked.or_with(g_.row(v));
        });
        return packed;
    }

    void recurse(VSet covered, VSet chosen, std::size_t chosen_count) {
        VSet uncovered(n_);
        for (std::size_t k = 0; k < uncovered.w; ++k) uncovered.m[k] = ~covered.m[k];
        if (n_ % 64) uncovered.m[uncovered.w - 1] &= (std::uint64_t(1) << (n_ % 64)) - 1;
        if (uncovered.empty()) {
            if (chosen_count < best_) {
                best_ = chosen_count;
                best_set_ = chosen;
            }
            return;
        }
        if (chosen_count + packing_bound(uncovered) >= best_) return;
        // branch on the least-coverable uncovered vertex
        std::size_t pick = n_, pick_opts = n_ + 1;
        uncovered.for_each([&](std::size_t v) {
            const std::size_t opts = row_count(v);
            if (opts < pick_opts) {
                pick = v;
                pick_opts = opts;
            }
        });
        VSet dominators(n_);
        dominators.or_with(g_.row(pick));
        dominators.for_each([&](std::size_t u) {
            VSet cov2 = covered, ch2 = chosen;
            cov2.or_with(g_.row(u));
            ch2.set(u);
            recurse(std::move(cov2), std::move(ch2), chosen_count + 1);
        });
    }

    std::size_t row_count(std::size_t v) const {
        std::size_t c = 0;
        for (std::size_t k = 0; k < g_.w; ++k) c += std::size_t(std::popcount(g_.row(v)[k]));
        return c;
    }
};

// All maximal cliques of the strictly-within-eps graph (Bron-Kerbosch with
// pivoting); throws past `cap` cliques.
inline void maximal_cliques(const BitRows& g, std::vector<VSet>& out, std::size_t cap) {
    const std::size_t n = g.n;
    struct Frame {
        VSet r, p, x;
    };
    std::vector<Frame> stack;
    VSet all(n);
    for (std::size_t i = 0; i < n; ++i) all.set(i);
    stack.push_back({VSet(n), all, VSet(n)});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.p.empty() && f.x.empty()) {
            out.push_back(f.r);
            if (out.size() > cap)
                fail(errc::cap_exceeded,
                     "maximal clique enumeration exceeded cap; use Greedy mode");
            continue;
        }
        // pivot: vertex of P ∪ X with most neighbors in P
        std::size_t pivot = n, pivot_deg = 0;
        auto consider = [&](std::size_t v) {
            const std::size_t d = f.p.intersect_count(g.row(v));
            if (pivot == n || d > pivot_deg) {
                pivot = v;
                pivot_deg = d;
            }
        };
        f.p.for_each(consider);
        f.x.for_each(consider);
        VSet cand = f.p;
        if (pivot != n) cand.and_not(g.row(pivot));
        std::vector<std::size_t> vs;
        cand.for_each([&](std::size_t v) { vs.push_back(v); });
        for (std::size_t v : vs) {
            Frame nf{f.r, f.p, f.x};
            nf.r.set(v);
            nf.p.and_with(g.row(v));
            nf.x.and_with(g.row(v));
            stack.push_back(std::move(nf));
            f.p.reset(v);
            f.x.set(v);
        }
    }
}

// Minimum set cover of all vertices by maximal cliques, branch and bound
// with a scattered-vertex packing bound.
class CoverSolver {
public:
    CoverSolver(const BitRows& g, const std::vector<VSet>& cliques)
        : g_(g), cliques_(cliques), n_(g.n) {}

    std::vector<std::size_t> solve(const std::vector<std::size_t>& seed) {
        best_ = seed.size();
        best_pick_ = seed;
        std::vector<std::size_t> pick;
        recurse(VSet(n_), pick);
        return best_pick_;
    }

private:
    const BitRows& g_; // strictly-within-eps adjacency, no self loops
    const std::vector<VSet>& cliques_;
    std::size_t n_;
    std::size_t best_ = 0;
    std::vector<std::size_t> best_pick_;

    std::size_t packing_bound(const VSet& uncovered) const {
        // pairwise non-adjacent uncovered vertices need pairwise distinct cells
        VSet blocked(n_);
        std::size_t packed = 0;
        uncovered.for_each([&](std::size_t v) {
            if (blocked.get(v)) return;
            ++packed;
            blocked.set(v);
            blocked.or_with(g_.row(v));
        });
        return packed;
    }

    void recurse(VSet covered, std::vector<std::size_t>& pick) {
        VSet uncovered(n_);
        for (std::size_t k = 0; k < uncovered.w; ++k) uncovered.m[k] = ~covered.m[k];
        if (n_ % 64) uncovered.m[uncovered.w - 1] &= (std::uint64_t(1) << (n_ % 64)) - 1;
        if (uncovered.empty()) {
            if (pick.size() < best_) {
                best_ = pick.size();
                best_pick_ = pick;
            }
            return;
        }
        if (pick.size() + packing_bound(uncovered) >= best_) return;
        // vertex with the fewest covering cliques
        std::size_t pick_v = n_, pick_opts = cliques_.size() + 1;
        uncovered.for_each([&](std::size_t v) {
            std::size_t opts = 0;
            for (const auto& c : cliques_)
                if (c.get(v)) ++opts;
            if (opts < pick_opts) {
                pick_v = v;
                pick_opts = opts;
            }
        });
        for (std::size_t ci = 0; ci < cliques_.size(); ++ci) {
            if (!cliques_[ci].get(pick_v)) continue;
            VSet cov2 = covered;
            cov2.or_with(cliques_[ci].m.data());
            pick.push_back(ci);
            recurse(std::move(cov2), pick);
            pick.pop_back();
        }
    }
};

} // namespace detail

// ---- public counting operations ----

inline constexpr std::size_t kDefaultExactCap = 2000;

namespace detail {

inline std::vector<std::size_t> sorted_by_value(const OrbitContext& ctx) {
    std::vector<std::size_t> idx(ctx.net().size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return ctx.net()[a].as_real() < ctx.net()[b].as_real();
    });
    return idx;
}

inline std::vector<Point> collect(const OrbitContext& ctx, const std::vector<std::size_t>& ids) {
    std::vector<Point> out;
    out.reserve(ids.size());
    for (auto i : ids) out.push_back(ctx.net()[i]);
    return out;
}

inline constexpr std::size_t kMaxMisBand = 24;

// Band width of the conflict graph in sorted net order: the orbit metric on
// real-line nets is at least |x-y|, so any non-separated pair sits within
// eps in the base coordinate.
inline std::size_t conflict_band(const OrbitContext& ctx, const std::vector<std::size_t>& order,
                                 double eps) {
    std::size_t band = 0;
    std::size_t lo = 0;
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double x = ctx.net()[order[i]].as_real();
        while (ctx.net()[order[lo]].as_real() < x - eps) ++lo;
        band = std::max(band, i - lo);
    }
    return band;
}

// Exact maximum separated set on real-line nets via a sliding-window DP:
// state = bitmask of chosen points among the last `band` sorted positions.
// Dominance pruning (superset mask with no better count is dropped) keeps
// layers small.  Returns nullopt when the band is too wide.
inline std::optional<std::vector<std::size_t>> banded_mis(const OrbitContext& ctx, double eps,
                                                          std::size_t max_band = kMaxMisBand) {
    if (!ctx.on_real_line()) return std::nullopt;
    const std::size_t n = ctx.net().size();
    if (n == 0) return std::nullopt;
    auto order = sorted_by_value(ctx);
    // Band/reach scans use the gated radius so they cover every pair that
    // pair_separated could treat as conflicting.
    const double gate = detail::sep_gate(eps);
    const std::size_t band = conflict_band(ctx, order, gate);
    if (band > max_band) return std::nullopt;
    if (band == 0) return order; // everything pairwise separated

    // conf[i] bit (t-1) set when position i conflicts with position i-t
    // (t = 1..band); sorted order makes base-coordinate gaps grow with t
    std::vector<std::uint32_t> conf(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t back = std::min(band, i);
        for (std::size_t t = 1; t <= back; ++t) {
            const double gap =
                ctx.net()[order[i]].as_real() - ctx.net()[order[i - t]].as_real();
            if (gap > gate) break;
            if (!ctx.pair_separated(order[i], order[i - t], eps))
                conf[i] |= (std::uint32_t(1) << (t - 1));
        }
    }

    // reach[j] = last sorted position within eps of j in the base coordinate;
    // a chosen position whose reach has passed can never conflict again, so
    // its state bit is dead and gets cleared
    std::vector<std::size_t> reach(n);
    {
        std::size_t hi = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (hi < j) hi = j;
            const double limit = ctx.net()[order[j]].as_real() + gate;
            while (hi + 1 < n && ctx.net()[order[hi + 1]].as_real() <= limit) ++hi;
            reach[j] = hi;
        }
    }
    // state bit b (0..band) after processing position i: position i-b chosen
    auto live_mask = [&](std::size_t i) {
        std::uint32_t live = 0;
        for (std::size_t b = 0; b <= std::min(band, i); ++b)
            if (reach[i - b] > i) live |= (std::uint32_t(1) << b);
        return live;
    };

    struct State {
        std::uint32_t mask;
        std::uint32_t count;
        std::int32_t parent;
        bool chose;
    };
    std::vector<std::vector<State>> layers(n);
    const std::uint32_t window = (std::uint32_t(1) << (band + 1)) - 1;
    layers[0].push_back({1u & live_mask(0), 1u, -1, true});
    layers[0].push_back({0u, 0u, -1, false});
    constexpr std::size_t kLayerCap = 200'000;
    for (std::size_t i = 1; i < n; ++i) {
        const std::uint32_t live = live_mask(i);
        std::vector<State> next;
        next.reserve(layers[i - 1].size() * 2);
        for (std::size_t s = 0; s < layers[i - 1].size(); ++s) {
            const State& st = layers[i - 1][s];
            const std::uint32_t shifted = (st.mask << 1) & window;
            next.push_back({shifted & live, st.count, (std::int32_t)s, false});
            // shifted bit t corresponds to position i-t, conf bit t-1 to the
            // same position: align by a single right shift
            if (((shifted >> 1) & conf[i]) == 0)
                next.push_back({(shifted | 1u) & live, st.count + 1, (std::int32_t)s, true});
        }
        // keep only the best count per mask, then drop dominated masks
        std::sort(next.begin(), next.end(), [](const State& a, const State& b) {
            return a.mask != b.mask ? a.mask < b.mask : a.count > b.count;
        });
        std::vector<State> dedup;
        for (const auto& st : next)
            if (dedup.empty() || dedup.back().mask != st.mask) dedup.push_back(st);
        std::vector<State> kept;
        for (const auto& st : dedup) {
            bool dominated = false;
            for (const auto& other : dedup) {
                if (&other == &st) continue;
                // fewer chosen-recently constraints and at least the count
                if ((other.mask & st.mask) == other.mask &&
                    (other.count > st.count || (other.count == st.count && other.mask != st.mask)))
                    dominated = true;
                if (dominated) break;
            }
            if (!dominated) kept.push_back(st);
        }
        if (kept.size() > kLayerCap) return std::nullopt;
        layers[i] = std::move(kept);
    }

    std::size_t best_idx = 0;
    for (std::size_t s = 1; s < layers[n - 1].size(); ++s)
        if (layers[n - 1][s].count > layers[n - 1][best_idx].count) best_idx = s;
    std::vector<std::size_t> chosen;
    std::int32_t at = (std::int32_t)best_idx;
    for (std::size_t i = n; i-- > 0;) {
        const State& st = layers[i][std::size_t(at)];
        if (st.chose) chosen.push_back(order[i]);
        at = st.parent;
        if (at < 0 && i > 0) return std::nullopt; // should not happen
    }
    std::reverse(chosen.begin(), chosen.end());
    return chosen;
}

inline BitRows conflict_graph(const OrbitContext& ctx, double eps) {
    const std::size_t n = ctx.net().size();
    BitRows g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!ctx.pair_separated(i, j, eps)) {
                g.set(i, j);
                g.set(j, i);
            }
    return g;
}

inline BitRows proximity_graph(const OrbitContext& ctx, double eps, bool closed) {
    const std::size_t n = ctx.net().size();
    BitRows g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (closed) g.set(i, i);
        for (std::size_t j = i + 1; j < n; ++j)
            if (ctx.pair_within(i, j, eps)) {
                g.set(i, j);
                g.set(j, i);
            }
    }
    return g;
}

// farthest-point-first maximal separated set (valid lower bound); stops
// early once `stop_at` points are found (still a lower-bound certificate)
inline std::vector<std::size_t> greedy_separated(const OrbitContext& ctx, double eps,
                                                 long long stop_at) {
    const std::size_t n = ctx.net().size();
    const double gate = detail::sep_gate(eps);
    std::vector<std::size_t> chosen{0};
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    while (stop_at < 0 || (long long)chosen.size() < stop_at) {
        const std::size_t last = chosen.back();
        std::size_t best = n;
        double best_d = gate;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isinf(min_dist[i]) || min_dist[i] > gate) {
                min_dist[i] = std::min(min_dist[i], ctx.pair_distance(last, i));
                if (min_dist[i] > best_d) {
                    best_d = min_dist[i];
                    best = i;
                }
            }
        }
        if (best == n) break;
        chosen.push_back(best);
        min_dist[best] = 0.0;
    }
    return chosen;
}

// first-uncovered sweep dominating set (valid upper bound)
inline std::vector<std::size_t> greedy_spanning(const OrbitContext& ctx, double eps) {
    const std::size_t n = ctx.net().size();
    std::vector<bool> covered(n, false);
    std::vector<std::size_t> centers;
    for (std::size_t i = 0; i < n; ++i) {
        if (covered[i]) continue;
        centers.push_back(i);
        covered[i] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (!covered[j] && ctx.pair_within(i, j, eps)) covered[j] = true;
    }
    return centers;
}

// grow diameter-<eps cells in index order (valid upper bound); returns cell
// count and one representative per cell as the witness
inline std::vector<std::vector<std::size_t>> greedy_cover(const OrbitContext& ctx, double eps) {
    const std::size_t n = ctx.net().size();
    std::vector<bool> used(n, false);
    std::vector<std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> cell{i};
        used[i] = true;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (used[j]) continue;
            bool fits = true;
            for (std::size_t m : cell)
                if (!ctx.pair_within(m, j, eps)) {
                    fits = false;
                    break;
                }
            if (fits) {
                cell.push_back(j);
                used[j] = true;
            }
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

} // namespace detail

// True when the exact separated count is cheap regardless of net size:
// either the sorted sweep applies or the banded DP band is small.
inline bool exact_separated_feasible(const OrbitContext& ctx, double eps) {
    if (ctx.line_like()) return true;
    if (!ctx.on_real_line()) return false;
    auto order = detail::sorted_by_value(ctx);
    return detail::conflict_band(ctx, order, eps) <= detail::kMaxMisBand;
}

// Largest subset of the net with pairwise orbit distance strictly above eps.
// Exact mode solves maximum independent set on the conflict graph; Greedy is
// farthest-point-first (a maximal set, hence a lower bound).  `stop_at`
// short-circuits Greedy once enough points certify a target.
inline CountResult max_separated(const OrbitContext& ctx, double eps, CountMode mode,
                                 std::size_t exact_cap = kDefaultExactCap,
                                 long long stop_at = -1) {
    if (!(eps > 0.0)) fail(errc::invalid_argument, "max_separated: epsilon must be positive");
    detail::Timer timer;
    CountResult out;
    out.epsilon = eps;
    out.horizon = ctx.horizon();
    const std::size_t n = ctx.net().size();
    if (ctx.line_like()) {
        // optimal left-to-right sweep on the line, regardless of mode or cap
        auto order = detail::sorted_by_value(ctx);
        std::vector<std::size_t> chosen{order.front()};
        bool truncated = false;
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (stop_at > 0 && (long long)chosen.size() >= stop_at) {
                truncated = true;
                break;
            }
            if (ctx.pair_separated(chosen.back(), order[k], eps)) chosen.push_back(order[k]);
        }
        out.count = (long long)chosen.size();
        out.mode = truncated ? ResultMode::GreedyLower : ResultMode::Exact;
        out.witness = detail::collect(ctx, chosen);
    } else if (mode == CountMode::Exact) {
        std::optional<std::vector<std::size_t>> banded = detail::banded_mis(ctx, eps);
        if (banded) {
            out.count = (long long)banded->size();
            out.mode = ResultMode::Exact;
            out.witness = detail::collect(ctx, *banded);
        } else {
            if (n > exact_cap)
                fail(errc::cap_exceeded, "max_separated: net of " + std::to_string(n) +
                                             " points exceeds the exact cap " +
                                             std::to_string(exact_cap) + "; use Greedy mode");
            detail::BitRows g = detail::conflict_graph(ctx, eps);
            detail::MisSolver solver(g);
            detail::VSet best = solver.solve();
            std::vector<std::size_t> ids;
            best.for_each([&](std::size_t v) { ids.push_back(v); });
            out.count = (long long)ids.size();
            out.mode = ResultMode::Exact;
            out.witness = detail::collect(ctx, ids);
        }
    } else {
        auto ids = detail::greedy_separated(ctx, eps, stop_at);
        out.count = (long long)ids.size();
        out.mode = ResultMode::GreedyLower;
        out.witness = detail::collect(ctx, ids);
    }
    out.wall_ms = timer.ms();
    return out;
}

// Smallest set of net points within strict eps of every net point in the
// orbit metric.  Exact mode solves minimum dominating set; Greedy sweeps
// first-uncovered centers (an upper bound).
inline CountResult min_spanning(const OrbitContext& ctx, double eps, CountMode mode,
                                std::size_t exact_cap = kDefaultExactCap) {
    if (!(eps > 0.0)) fail(errc::invalid_argument, "min_spanning: epsilon must be positive");
    detail::Timer timer;
    CountResult out;
    out.epsilon = eps;
    out.horizon = ctx.horizon();
    const std::size_t n = ctx.net().size();
    if (ctx.line_like()) {
        // optimal sweep regardless of mode or cap: cover the leftmost
        // uncovered point from the farthest admissible center
        auto order = detail::sorted_by_value(ctx);
        std::vector<std::size_t> centers;
        std::size_t at = 0;
        while (at < order.size()) {
            std::size_t center = order[at];
            for (std::size_t k = at; k < order.size(); ++k) {
                if (ctx.pair_within(order[at], order[k], eps))
                    center = order[k];
                else
                    break;
            }
            centers.push_back(center);
            while (at < order.size() && ctx.pair_within(center, order[at], eps)) ++at;
        }
        out.count = (long long)centers.size();
        out.mode = ResultMode::Exact;
        out.witness = detail::collect(ctx, centers);
    } else if (mode == CountMode::Exact) {
        if (n > exact_cap)
            fail(errc::cap_exceeded, "min_spanning: net of " + std::to_string(n) +
                                         " points exceeds the exact cap " +
                                         std::to_string(exact_cap) + "; use Greedy mode");
        {
            detail::BitRows g = detail::proximity_graph(ctx, eps, /*closed=*/true);
            detail::VSet seed(n);
            for (auto c : detail::greedy_spanning(ctx, eps)) seed.set(c);
            detail::DomSolver solver(g);
            detail::VSet best = solver.solve(seed);
            std::vector<std::size_t> ids;
            best.for_each([&](std::size_t v) { ids.push_back(v); });
            out.count = (long long)ids.size();
            out.mode = ResultMode::Exact;
            out.witness = detail::collect(ctx, ids);
        }
    } else {
        auto ids = detail::greedy_spanning(ctx, eps);
        out.count = (long long)ids.size();
        out.mode = ResultMode::GreedyUpper;
        out.witness = detail::collect(ctx, ids);
    }
    out.wall_ms = timer.ms();
    return out;
}

// Minimum number of net subsets of orbit diameter strictly below eps that
// cover the net.  Exact mode runs set cover over maximal cliques; Greedy
// grows cells in index order (an upper bound).  The witness holds one
// representative per cell.
inline CountResult min_cover(const OrbitContext& ctx, double eps, CountMode mode,
                             std::size_t exact_cap = kDefaultExactCap) {
    if (!(eps > 0.0)) fail(errc::invalid_argument, "min_cover: epsilon must be positive");
    detail::Timer timer;
    CountResult out;
    out.epsilon = eps;
    out.horizon = ctx.horizon();
    const std::size_t n = ctx.net().size();
    const bool line = ctx.line_like();
    if (mode == CountMode::Exact && !line && n > exact_cap)
        fail(errc::cap_exceeded, "min_cover: net of " + std::to_string(n) +
                                     " points exceeds the exact cap " + std::to_string(exact_cap) +
                                     "; use Greedy mode");
    if (line) {
        // optimal on the line regardless of mode: windows of width < eps,
        // greedily extended from the leftmost uncovered point
        auto order = detail::sorted_by_value(ctx);
        std::vector<std::size_t> reps;
        std::size_t at = 0;
        while (at < order.size()) {
            reps.push_back(order[at]);
            std::size_t next = at + 1;
            while (next < order.size() && ctx.pair_within(order[at], order[next], eps)) ++next;
            at = next;
        }
        out.count = (long long)reps.size();
        out.mode = ResultMode::Exact;
        out.witness = detail::collect(ctx, reps);
    } else if (mode == CountMode::Exact) {
        detail::BitRows g = detail::proximity_graph(ctx, eps, /*closed=*/false);
        std::vector<detail::VSet> cliques;
        detail::maximal_cliques(g, cliques, 500'000);
        auto cells = detail::greedy_cover(ctx, eps);
        // map greedy cells into covering cliques for the incumbent
        std::vector<std::size_t> seed;
        for (const auto& cell : cells) {
            for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
                bool covers = true;
                for (auto v : cell)
                    if (!cliques[ci].get(v)) {
                        covers = false;
                        break;
                    }
                if (covers) {
                    seed.push_back(ci);
                    break;
                }
            }
        }
        if (seed.size() != cells.size()) {
            // greedy cells are cliques; every clique extends to a maximal
            // one, so this cannot happen on a consistent graph
            fail(errc::invalid_argument, "min_cover: internal clique mapping failure");
        }
        detail::CoverSolver solver(g, cliques);
        auto picks = solver.solve(seed);
        std::vector<std::size_t> reps;
        for (auto ci : picks) reps.push_back(std::size_t(cliques[ci].first()));
        out.count = (long long)picks.size();
        out.mode = ResultMode::Exact;
        out.witness = detail::collect(ctx, reps);
    } else {
        auto cells = detail::greedy_cover(ctx, eps);
        std::vector<std::size_t> reps;
        for (const auto& cell : cells) reps.push_back(cell.front());
        out.count = (long long)cells.size();
        out.mode = ResultMode::GreedyUpper;
        out.witness = detail::collect(ctx, reps);
    }
    out.wall_ms = timer.ms();
    return out;
}

// Convenience overloads taking the net explicitly; the context must have
// been built over the same net.
namespace detail {
inline void check_same_net(const OrbitContext& ctx, const std::vector<Point>& net) {
    if (net.size() != ctx.net().size() || !std::equal(net.begin(), net.end(), ctx.net().begin()))
        fail(errc::invalid_argument, "counting: context was built over a different net");
    if (net.empty()) fail(errc::invalid_argument, "counting: empty net");
}
} // namespace detail

inline CountResult max_separated(const OrbitContext& ctx, const std::vector<Point>& net,
                                 double eps, CountMode mode,
                                 std::size_t exact_cap = kDefaultExactCap) {
    detail::check_same_net(ctx, net);
    return max_separated(ctx, eps, mode, exact_cap);
}

inline CountResult min_spanning(const OrbitContext& ctx, const std::vector<Point>& net, double eps,
                                CountMode mode, std::size_t exact_cap = kDefaultExactCap) {
    detail::check_same_net(ctx, net);
    return min_spanning(ctx, eps, mode, exact_cap);
}

inline CountResult min_cover(const OrbitContext& ctx, const std::vector<Point>& net, double eps,
                             CountMode mode, std::size_t exact_cap = kDefaultExactCap) {
    detail::check_same_net(ctx, net);
    return min_cover(ctx, eps, mode, exact_cap);
}

} // namespace mdimlab
