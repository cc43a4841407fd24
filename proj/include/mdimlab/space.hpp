#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "point.hpp"

namespace mdimlab {

class Space;
using SpacePtr = std::shared_ptr<const Space>;

struct IntervalSpace {};

struct CircleSpace {};

// Eventually-constant symbol sequences over `alphabet`, metrized by the
// weighted symbol-difference sum with weights 3^-i.  `depth` bounds the
// prefix length sample_net may resolve.
struct CantorWordsSpace {
    int depth = 1;
    std::vector<std::uint8_t> alphabet{0, 2};
};

enum class IndexSet { HalfLine, FullLine };

// Truncated countable power of a base space under the weighted sum metric
// with coordinate weights 2^-|i|.  HalfLine indexes coordinates 1..depth,
// FullLine indexes -depth..depth (coordinate i=0 carries weight 1).
struct ProductPowerSpace {
    SpacePtr base;
    IndexSet index = IndexSet::HalfLine;
    int depth = 1;
};

// Cartesian product of two spaces under the sum metric d_left + d_right.
struct SumProductSpace {
    SpacePtr left;
    SpacePtr right;
};

// Finite metric space.  With `table` present, distances come from the
// explicit symmetric matrix (points are labels).  Without it, distances are
// computed from coordinates: |x-y| for real points, Euclidean for pairs of
// reals.  The implicit form keeps large clouds (10^4+ points) affordable.
struct FinitePointCloudSpace {
    std::vector<Point> points;
    std::vector<std::vector<double>> table; // empty => coordinate metric
};

class Space {
public:
    using Kind = std::variant<IntervalSpace, CircleSpace, CantorWordsSpace,
                              ProductPowerSpace, SumProductSpace, FinitePointCloudSpace>;

    Kind kind;
    double diameter = 0.0;

    static SpacePtr interval() {
        return std::make_shared<Space>(Space{IntervalSpace{}, 1.0});
    }

    static SpacePtr circle() {
        return std::make_shared<Space>(Space{CircleSpace{}, 0.5});
    }

    static SpacePtr cantor_words(int depth, std::vector<std::uint8_t> alphabet = {0, 2}) {
        if (depth < 1) fail(errc::invalid_argument, "cantor_words: depth must be positive");
        if (alphabet.size() < 2) fail(errc::invalid_argument, "cantor_words: need >= 2 symbols");
        double span = double(*std::max_element(alphabet.begin(), alphabet.end()) -
                             *std::min_element(alphabet.begin(), alphabet.end()));
        // Extreme constant words differ by `span` at every position: sum is span/2.
        return std::make_shared<Space>(Space{CantorWordsSpace{depth, std::move(alphabet)}, span / 2.0});
    }

    static SpacePtr product_power(SpacePtr base, IndexSet index, int depth) {
        if (!base) fail(errc::invalid_argument, "product_power: null base");
        if (depth < 1) fail(errc::invalid_argument, "product_power: depth must be positive");
        const double wsum = index == IndexSet::HalfLine
                                ? 1.0 - std::ldexp(1.0, -depth)     // sum 2^-i, i=1..depth
                                : 3.0 - std::ldexp(1.0, 1 - depth); // 1 + 2*sum, i=1..depth
        const double diam = base->diameter * wsum;
        return std::make_shared<Space>(Space{ProductPowerSpace{std::move(base), index, depth}, diam});
    }

    static SpacePtr sum_product(SpacePtr left, SpacePtr right) {
        if (!left || !right) fail(errc::invalid_argument, "sum_product: null factor");
        double diam = left->diameter + right->diameter;
        return std::make_shared<Space>(Space{SumProductSpace{std::move(left), std::move(right)}, diam});
    }

    static SpacePtr cloud(std::vector<Point> points,
                          std::vector<std::vector<double>> table = {});
};

namespace detail {

inline double planar_cross(const std::pair<double, double>& o, const std::pair<double, double>& a,
                           const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
}

// Diameter of a planar point set via convex hull (monotone chain) and a
// brute-force pass over hull vertices; hulls here are tiny.
inline double planar_diameter(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 2) return 0.0;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<std::pair<double, double>> hull(2 * pts.size());
    std::size_t h = 0;
    for (const auto& p : pts) {
        while (h >= 2 && planar_cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
        hull[h++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (h >= lower && planar_cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
        hull[h++] = p;
    }
    hull.resize(h > 1 ? h - 1 : h);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best = std::max(best, std::hypot(hull[i].first - hull[j].first,
                                             hull[i].second - hull[j].second));
    return best;
}

inline double cloud_point_diameter(const std::vector<Point>& points) {
    if (points.empty()) return 0.0;
    if (points.front().is_real()) {
        double lo = points.front().as_real(), hi = lo;
        for (const auto& p : points) {
            lo = std::min(lo, p.as_real());
            hi = std::max(hi, p.as_real());
        }
        return hi - lo;
    }
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size());
    for (const auto& p : points) {
        const auto& t = p.as_tuple();
        if (t.size() != 2) fail(errc::invalid_argument, "cloud: expected planar pairs");
        xy.emplace_back(t[0].as_real(), t[1].as_real());
    }
    return planar_diameter(std::move(xy));
}

} // namespace detail

inline SpacePtr Space::cloud(std::vector<Point> points, std::vector<std::vector<double>> table) {
    if (points.empty()) fail(errc::invalid_argument, "cloud: no points");
    double diam = 0.0;
    if (!table.empty()) {
        const std::size_t n = points.size();
        if (table.size() != n) fail(errc::invalid_argument, "cloud: table size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (table[i].size() != n) fail(errc::invalid_argument, "cloud: table row size mismatch");
            if (table[i][i] != 0.0) fail(errc::invalid_argument, "cloud: nonzero diagonal");
            for (std::size_t j = 0; j < n; ++j) {
                if (table[i][j] < 0.0) fail(errc::invalid_argument, "cloud: negative distance");
                if (table[i][j] != table[j][i]) fail(errc::invalid_argument, "cloud: asymmetric table");
                if (i != j && table[i][j] == 0.0)
                    fail(errc::invalid_argument, "cloud: distinct points at distance 0");
                diam = std::max(diam, table[i][j]);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (table[i][j] > table[i][k] + table[k][j] + 1e-12)
                        fail(errc::invalid_argument, "cloud: triangle inequality violated");
    } else {
        diam = detail::cloud_point_diameter(points);
    }
    return std::make_shared<Space>(Space{FinitePointCloudSpace{std::move(points), std::move(table)}, diam});
}

namespace detail {

inline std::size_t cloud_index(const FinitePointCloudSpace& c, const Point& p) {
    for (std::size_t i = 0; i < c.points.size(); ++i)
        if (c.points[i] == p) return i;
    fail(errc::point_space_mismatch, "point is not a member of this cloud");
}

inline double implicit_cloud_distance(const Point& p, const Point& q) {
    if (p.is_real() && q.is_real()) return std::fabs(p.as_real() - q.as_real());
    const auto& a = p.as_tuple();
    const auto& b = q.as_tuple();
    if (a.size() != 2 || b.size() != 2)
        fail(errc::point_space_mismatch, "cloud points must be reals or planar pairs");
    return std::hypot(a[0].as_real() - b[0].as_real(), a[1].as_real() - b[1].as_real());
}

} // namespace detail

inline double distance(const Space& space, const Point& p, const Point& q);

namespace detail {

struct DistanceVisitor {
    const Space& space;
    const Point& p;
    const Point& q;

    double operator()(const IntervalSpace&) const { return std::fabs(p.as_real() - q.as_real()); }

    double operator()(const CircleSpace&) const {
        double gap = std::fabs(p.as_angle() - q.as_angle());
        return std::min(gap, 1.0 - gap);
    }

    double operator()(const CantorWordsSpace&) const {
        const auto& a = p.as_word();
        const auto& b = q.as_word();
        const std::size_t len = std::max(a.symbols.size(), b.symbols.size());
        double sum = 0.0;
        double weight = 1.0;
        for (std::size_t i = 1; i <= len; ++i) {
            weight /= 3.0;
            int da = word_symbol(a, i), db = word_symbol(b, i);
            sum += weight * std::abs(da - db);
        }
        // Tails beyond the common prefix contribute a geometric series.
        if (a.tail != b.tail) sum += std::abs(int(a.tail) - int(b.tail)) * weight / 2.0;
        return sum;
    }

    double operator()(const ProductPowerSpace& pr) const {
        const auto& a = p.as_tuple();
        const auto& b = q.as_tuple();
        const std::size_t want =
            pr.index == IndexSet::HalfLine ? std::size_t(pr.depth) : std::size_t(2 * pr.depth + 1);
        if (a.size() != want || b.size() != want)
            fail(errc::point_space_mismatch, "tuple length does not match product depth");
        double sum = 0.0;
        for (std::size_t c = 0; c < want; ++c) {
            const long long i = pr.index == IndexSet::HalfLine ? (long long)c + 1
                                                               : (long long)c - pr.depth;
            sum += std::ldexp(1.0, -int(std::llabs(i))) * distance(*pr.base, a[c], b[c]);
        }
        return sum;
    }

    double operator()(const SumProductSpace& sp) const {
        const auto& a = p.as_tuple();
        const auto& b = q.as_tuple();
        if (a.size() != 2 || b.size() != 2)
            fail(errc::point_space_mismatch, "sum-product points are pairs");
        return distance(*sp.left, a[0], b[0]) + distance(*sp.right, a[1], b[1]);
    }

    double operator()(const FinitePointCloudSpace& c) const {
        if (c.table.empty()) return implicit_cloud_distance(p, q);
        return c.table[cloud_index(c, p)][cloud_index(c, q)];
    }
};

} // namespace detail

inline double distance(const Space& space, const Point& p, const Point& q) {
    return std::visit(detail::DistanceVisitor{space, p, q}, space.kind);
}

// Upper bound on the metric mass of coordinates beyond `depth` in a product
// power: base_diameter * sum of the remaining weights (closed form).
inline double tail_bound(const Space& space, int depth) {
    const auto* pr = std::get_if<ProductPowerSpace>(&space.kind);
    if (!pr) fail(errc::not_a_product, "tail_bound: space is not a product power");
    if (depth < 0) fail(errc::invalid_argument, "tail_bound: negative depth");
    const double tail = std::ldexp(1.0, -depth); // sum 2^-i for i > depth
    return pr->base->diameter * (pr->index == IndexSet::HalfLine ? tail : 2.0 * tail);
}

namespace detail {

inline void cartesian_tuples(const std::vector<std::vector<Point>>& factors, std::size_t at,
                             std::vector<Point>& current, std::vector<Point>& out) {
    if (at == factors.size()) {
        out.push_back(Point::tuple(current));
        return;
    }
    for (const auto& p : factors[at]) {
        current.push_back(p);
        cartesian_tuples(factors, at + 1, current, out);
        current.pop_back();
    }
}

} // namespace detail

// Deterministic mesh-dense finite net.
inline std::vector<Point> sample_net(const Space& space, double mesh);

namespace detail {

struct NetVisitor {
    const Space& space;
    double mesh;

    std::vector<Point> operator()(const IntervalSpace&) const {
        const int k = std::max(1, int(std::ceil(1.0 / mesh)));
        std::vector<Point> net;
        net.reserve(k + 1);
        for (int i = 0; i <= k; ++i) net.push_back(Point::real(double(i) / k));
        return net;
    }

    std::vector<Point> operator()(const CircleSpace&) const {
        const int k = std::max(2, int(std::ceil(1.0 / mesh)));
        std::vector<Point> net;
        net.reserve(k);
        for (int i = 0; i < k; ++i) net.push_back(Point::angle(double(i) / k));
        return net;
    }

    std::vector<Point> operator()(const CantorWordsSpace& cw) const {
        int need = 0;
        double scale = 1.0;
        while (scale > mesh) {
            scale /= 3.0;
            ++need;
        }
        if (need > cw.depth)
            fail(errc::depth_insufficient,
                 "sample_net: word depth " + std::to_string(cw.depth) +
                     " cannot resolve mesh " + std::to_string(mesh));
        const std::size_t branch = cw.alphabet.size();
        std::size_t total = 1;
        for (int i = 0; i < need; ++i) total *= branch;
        std::vector<Point> net;
        net.reserve(total);
        std::vector<std::uint8_t> symbols(need, 0);
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t rest = code;
            for (int pos = need - 1; pos >= 0; --pos) {
                symbols[pos] = cw.alphabet[rest % branch];
                rest /= branch;
            }
            net.push_back(Point::word(symbols, cw.alphabet[0]));
        }
        return net;
    }

    std::vector<Point> operator()(const ProductPowerSpace& pr) const {
        const std::size_t comps =
            pr.index == IndexSet::HalfLine ? std::size_t(pr.depth) : std::size_t(2 * pr.depth + 1);
        const double wsum = pr.index == IndexSet::HalfLine
                                ? 1.0 - std::ldexp(1.0, -pr.depth)
                                : 3.0 - std::ldexp(1.0, 1 - pr.depth);
        std::vector<std::vector<Point>> factors(comps, sample_net(*pr.base, mesh / wsum));
        std::vector<Point> out, current;
        detail::cartesian_tuples(factors, 0, current, out);
        return out;
    }

    std::vector<Point> operator()(const SumProductSpace& sp) const {
        std::vector<std::vector<Point>> factors{sample_net(*sp.left, mesh / 2.0),
                                                sample_net(*sp.right, mesh / 2.0)};
        std::vector<Point> out, current;
        detail::cartesian_tuples(factors, 0, current, out);
        return out;
    }

    std::vector<Point> operator()(const FinitePointCloudSpace& c) const { return c.points; }
};

} // namespace detail

inline std::vector<Point> sample_net(const Space& space, double mesh) {
    if (!(mesh > 0.0)) fail(errc::invalid_mesh, "sample_net: mesh must be positive");
    return std::visit(detail::NetVisitor{space, mesh}, space.kind);
}

// Splits a tuple of pairs into the pair of component tuples, preserving the
// weighted-sum distance exactly (coordinatewise regrouping of the same sum).
inline std::pair<Point, Point> theta_reindex(const Point& p) {
    const auto& pairs = p.as_tuple();
    std::vector<Point> left, right;
    left.reserve(pairs.size());
    right.reserve(pairs.size());
    for (const auto& entry : pairs) {
        if (!entry.is_tuple() || entry.as_tuple().size() != 2)
            fail(errc::point_space_mismatch, "theta_reindex: components must be pairs");
        left.push_back(entry.as_tuple()[0]);
        right.push_back(entry.as_tuple()[1]);
    }
    return {Point::tuple(std::move(left)), Point::tuple(std::move(right))};
}

} // namespace mdimlab
