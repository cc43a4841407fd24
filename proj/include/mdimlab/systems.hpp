#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "piecewise_affine.hpp"
#include "point.hpp"
#include "rational.hpp"
#include "space.hpp"

namespace mdimlab {

class MapSystem;
using MapSystemPtr = std::shared_ptr<const MapSystem>;

// Piecewise-affine dynamics on the interval, or on the circle via a lift
// whose values wrap mod 1 at evaluation time.
struct AffineDynamics {
    PiecewiseAffineMap map;
    bool on_circle = false;
};

// Symbol dynamics: keep the first `preserve` symbols, shift the remainder
// left by `block`.  preserve=0 is the plain k-block shift.
struct ShiftDynamics {
    int block = 1;
    int preserve = 0;
};

struct IterateDynamics {
    MapSystemPtr base;
    long long power = 1;
};

struct ProductDynamics {
    MapSystemPtr left;
    MapSystemPtr right;
};

// Pointwise scaling x -> factor * base(x) on the interval.
struct ScaledDynamics {
    double factor = 1.0;
    MapSystemPtr base;
};

struct IdentityDynamics {};

class MapSystem {
public:
    using Kind = std::variant<AffineDynamics, ShiftDynamics, IterateDynamics, ProductDynamics,
                              ScaledDynamics, IdentityDynamics>;

    Kind kind;
    SpacePtr domain;
    std::string label;

    MapSystem(Kind k, SpacePtr s, std::string l)
        : kind(std::move(k)), domain(std::move(s)), label(std::move(l)) {}
};

inline bool space_equal(const Space& a, const Space& b) {
    if (a.kind.index() != b.kind.index()) return false;
    if (const auto* cw = std::get_if<CantorWordsSpace>(&a.kind)) {
        const auto& o = std::get<CantorWordsSpace>(b.kind);
        return cw->depth == o.depth && cw->alphabet == o.alphabet;
    }
    if (const auto* pp = std::get_if<ProductPowerSpace>(&a.kind)) {
        const auto& o = std::get<ProductPowerSpace>(b.kind);
        return pp->index == o.index && pp->depth == o.depth && space_equal(*pp->base, *o.base);
    }
    if (const auto* sp = std::get_if<SumProductSpace>(&a.kind)) {
        const auto& o = std::get<SumProductSpace>(b.kind);
        return space_equal(*sp->left, *o.left) && space_equal(*sp->right, *o.right);
    }
    if (const auto* fc = std::get_if<FinitePointCloudSpace>(&a.kind)) {
        const auto& o = std::get<FinitePointCloudSpace>(b.kind);
        return fc->points == o.points && fc->table == o.table;
    }
    return true; // Interval/Circle carry no parameters
}

// ---- factories ----

inline MapSystemPtr make_affine(PiecewiseAffineMap map, bool on_circle, std::string label) {
    if (map.domain_lo() != 0 || map.domain_hi() != 1)
        fail(errc::invalid_argument, "affine system: domain must be [0,1]");
    if (!on_circle && !map.values_in_unit_range())
        fail(errc::invalid_argument, "affine system: interval map values must stay in [0,1]");
    SpacePtr s = on_circle ? Space::circle() : Space::interval();
    return std::make_shared<MapSystem>(AffineDynamics{std::move(map), on_circle}, std::move(s),
                                       std::move(label));
}

inline MapSystemPtr make_shift(SpacePtr space, int block, int preserve, std::string label) {
    if (!space) fail(errc::invalid_argument, "shift system: null space");
    if (block < 1) fail(errc::invalid_argument, "shift system: block must be >= 1");
    if (preserve < 0) fail(errc::invalid_argument, "shift system: negative preserve length");
    if (!std::holds_alternative<CantorWordsSpace>(space->kind) &&
        !std::holds_alternative<ProductPowerSpace>(space->kind))
        fail(errc::invalid_argument, "shift system: space must be words or a product power");
    return std::make_shared<MapSystem>(ShiftDynamics{block, preserve}, std::move(space),
                                       std::move(label));
}

inline MapSystemPtr make_iterate(MapSystemPtr base, long long power) {
    if (!base) fail(errc::invalid_argument, "iterate: null base");
    if (power < 1) fail(errc::invalid_argument, "iterate: power must be >= 1");
    std::string label = "iterate(" + base->label + "," + std::to_string(power) + ")";
    SpacePtr s = base->domain;
    return std::make_shared<MapSystem>(IterateDynamics{std::move(base), power}, std::move(s),
                                       std::move(label));
}

inline MapSystemPtr make_product(MapSystemPtr left, MapSystemPtr right) {
    if (!left || !right) fail(errc::invalid_argument, "product: null factor");
    SpacePtr s = Space::sum_product(left->domain, right->domain);
    std::string label = "product(" + left->label + "," + right->label + ")";
    return std::make_shared<MapSystem>(ProductDynamics{std::move(left), std::move(right)},
                                       std::move(s), std::move(label));
}

inline MapSystemPtr make_scaled(double factor, MapSystemPtr base) {
    if (!base) fail(errc::invalid_argument, "scaled: null base");
    if (!(factor >= 0.0 && factor <= 1.0))
        fail(errc::invalid_argument, "scaled: factor must lie in [0,1]");
    if (!std::holds_alternative<IntervalSpace>(base->domain->kind))
        fail(errc::invalid_argument, "scaled: base must act on the interval");
    std::string label = "scaled(" + std::to_string(factor) + "," + base->label + ")";
    SpacePtr s = base->domain;
    return std::make_shared<MapSystem>(ScaledDynamics{factor, std::move(base)}, std::move(s),
                                       std::move(label));
}

inline MapSystemPtr make_identity(SpacePtr space, std::string label = "identity") {
    if (!space) fail(errc::invalid_argument, "identity: null space");
    return std::make_shared<MapSystem>(IdentityDynamics{}, std::move(space), std::move(label));
}

// ---- evaluation ----

inline Point evaluate(const MapSystem& sys, const Point& p);

namespace detail {

inline double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

struct EvalVisitor {
    const MapSystem& sys;
    const Point& p;

    Point operator()(const AffineDynamics& a) const {
        if (a.on_circle) {
            const double v = a.map(p.as_angle());
            return Point::angle(v);
        }
        return Point::real(clamp_unit(a.map(p.as_real())));
    }

    Point operator()(const ShiftDynamics& s) const {
        if (std::holds_alternative<CantorWordsSpace>(sys.domain->kind)) {
            const auto& w = p.as_word();
            const std::size_t keep = std::size_t(s.preserve);
            std::vector<std::uint8_t> out;
            const std::size_t len = w.symbols.size();
            out.reserve(len > keep + s.block ? len - s.block : keep);
            for (std::size_t i = 1; i <= keep; ++i) out.push_back(word_symbol(w, i));
            for (std::size_t i = keep + s.block + 1; i <= len; ++i)
                out.push_back(w.symbols[i - 1]);
            return Point::word(std::move(out), w.tail);
        }
        // product power: drop leading components, repeat the last to keep the
        // truncation depth (an artifact of the finite representation).
        const auto& comps = p.as_tuple();
        if (comps.empty()) fail(errc::point_space_mismatch, "shift: empty tuple");
        std::vector<Point> out;
        out.reserve(comps.size());
        const std::size_t keep = std::size_t(s.preserve);
        for (std::size_t i = 0; i < keep && i < comps.size(); ++i) out.push_back(comps[i]);
        for (std::size_t i = keep + s.block; i < comps.size(); ++i) out.push_back(comps[i]);
        while (out.size() < comps.size()) out.push_back(comps.back());
        return Point::tuple(std::move(out));
    }

    Point operator()(const IterateDynamics& it) const {
        Point v = p;
        for (long long i = 0; i < it.power; ++i) {
            Point next = evaluate(*it.base, v);
            if (next == v) return v; // fixed point: remaining steps are no-ops
            v = std::move(next);
        }
        return v;
    }

    Point operator()(const ProductDynamics& pr) const {
        const auto& comps = p.as_tuple();
        if (comps.size() != 2) fail(errc::point_space_mismatch, "product: expected a pair");
        return Point::tuple({evaluate(*pr.left, comps[0]), evaluate(*pr.right, comps[1])});
    }

    Point operator()(const ScaledDynamics& sc) const {
        const Point base = evaluate(*sc.base, p);
        return Point::real(clamp_unit(sc.factor * base.as_real()));
    }

    Point operator()(const IdentityDynamics&) const { return p; }
};

} // namespace detail

inline Point evaluate(const MapSystem& sys, const Point& p) {
    return std::visit(detail::EvalVisitor{sys, p}, sys.kind);
}

// Upper bound on the Lipschitz constant of one application (may be inf).
inline double expansion_bound(const MapSystem& sys) {
    struct V {
        const MapSystem& s;
        double operator()(const AffineDynamics& a) const {
            double worst = 0.0;
            for (std::size_t i = 0; i + 1 < a.map.fx.size(); ++i)
                worst = std::max(worst, std::fabs((a.map.fy[i + 1] - a.map.fy[i]) /
                                                  (a.map.fx[i + 1] - a.map.fx[i])));
            return worst;
        }
        double operator()(const ShiftDynamics& sh) const {
            return std::pow(3.0, sh.block); // word metric stretches by 3 per dropped symbol
        }
        double operator()(const IterateDynamics& it) const {
            return std::pow(expansion_bound(*it.base), double(it.power));
        }
        double operator()(const ProductDynamics& pr) const {
            return std::max(expansion_bound(*pr.left), expansion_bound(*pr.right));
        }
        double operator()(const ScaledDynamics& sc) const {
            return sc.factor * expansion_bound(*sc.base);
        }
        double operator()(const IdentityDynamics&) const { return 1.0; }
    };
    return std::visit(V{sys}, sys.kind);
}

// Flatten to a single exact piecewise-affine map where the structure allows
// (affine, scaled affine, iterated affine within the breakpoint budget).
inline std::optional<PiecewiseAffineMap> flatten_affine(const MapSystem& sys,
                                                        std::size_t max_breakpoints = 2'000'000) {
    if (const auto* a = std::get_if<AffineDynamics>(&sys.kind)) return a->map;
    if (std::holds_alternative<IdentityDynamics>(sys.kind)) {
        if (std::holds_alternative<IntervalSpace>(sys.domain->kind) ||
            std::holds_alternative<CircleSpace>(sys.domain->kind))
            return PiecewiseAffineMap({rational(0), rational(1)}, {rational(0), rational(1)});
        return std::nullopt;
    }
    if (const auto* sc = std::get_if<ScaledDynamics>(&sys.kind)) {
        auto base = flatten_affine(*sc->base, max_breakpoints);
        if (!base) return std::nullopt;
        const rational lambda = rational_from_double(sc->factor);
        std::vector<rational> ys = base->ys;
        for (auto& y : ys) y *= lambda;
        return PiecewiseAffineMap(base->xs, std::move(ys));
    }
    if (const auto* it = std::get_if<IterateDynamics>(&sys.kind)) {
        auto base = flatten_affine(*it->base, max_breakpoints);
        if (!base) return std::nullopt;
        return iterate_exact(*base, it->power, max_breakpoints);
    }
    return std::nullopt;
}

// Max pointwise distance between two systems over a mesh net (a lower bound
// of the true sup); exact merged-breakpoint supremum when both flatten to
// piecewise-affine maps.
inline double c0_distance(const MapSystem& a, const MapSystem& b, double mesh) {
    if (!(mesh > 0.0)) fail(errc::invalid_mesh, "c0_distance: mesh must be positive");
    if (!space_equal(*a.domain, *b.domain))
        fail(errc::point_space_mismatch, "c0_distance: systems live on different spaces");
    const bool circle = std::holds_alternative<CircleSpace>(a.domain->kind);
    const bool interval = std::holds_alternative<IntervalSpace>(a.domain->kind);
    if (interval || circle) {
        try {
            auto fa = flatten_affine(a);
            auto fb = flatten_affine(b);
            if (fa && fb)
                return to_double(circle ? c0_sup_circle(*fa, *fb) : c0_sup_interval(*fa, *fb));
        } catch (const error& e) {
            if (e.code() != errc::iteration_cap) throw; // budget blown: fall back to the net
        }
    }
    double worst = 0.0;
    for (const auto& p : sample_net(*a.domain, mesh))
        worst = std::max(worst, distance(*a.domain, evaluate(a, p), evaluate(b, p)));
    return worst;
}

// ---- non-autonomous sequences ----

struct NonAutonomousSystem {
    std::function<MapSystemPtr(long long)> generator; // 1-based index
    std::string description;
    SpacePtr space;
};

// f_start+length-1 o ... o f_start; length 0 is the identity.
inline Point compose_window(const NonAutonomousSystem& nas, long long start, long long length,
                            const Point& p) {
    if (start < 1) fail(errc::invalid_argument, "compose_window: start must be >= 1");
    if (length < 0) fail(errc::invalid_argument, "compose_window: negative length");
    Point v = p;
    for (long long i = 0; i < length; ++i) {
        MapSystemPtr f = nas.generator(start + i);
        if (!f) fail(errc::invalid_argument, "compose_window: generator returned null");
        v = evaluate(*f, v);
    }
    return v;
}

// ---- toral fixed-point counting ----

using bigint = boost::multiprecision::cpp_int;

// |det(A^n - I)| for a hyperbolic unimodular integer matrix, in exact
// integer arithmetic.
inline bigint toral_fix_count(const std::array<std::array<long long, 2>, 2>& m, long long n) {
    if (n < 1) fail(errc::invalid_argument, "toral_fix_count: n must be >= 1");
    const bigint a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    const bigint det = a * d - b * c;
    const bigint tr = a + d;
    if (det != 1 && det != -1)
        fail(errc::non_hyperbolic, "toral_fix_count: |det| must equal 1");
    if (tr * tr <= 4) fail(errc::non_hyperbolic, "toral_fix_count: |trace| must exceed 2");
    std::array<bigint, 4> acc{1, 0, 0, 1}, base{a, b, c, d};
    long long p = n;
    auto mul = [](const std::array<bigint, 4>& x, const std::array<bigint, 4>& y) {
        return std::array<bigint, 4>{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                                     x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
    };
    while (p > 0) {
        if (p & 1) acc = mul(acc, base);
        p >>= 1;
        if (p > 0) base = mul(base, base);
    }
    bigint fix = (acc[0] - 1) * (acc[3] - 1) - acc[1] * acc[2];
    if (fix < 0) fix = -fix;
    return fix;
}

} // namespace mdimlab
