#include <catch2/catch_amalgamated.hpp>

#include <mdimlab/constructions.hpp>

#include <cmath>
#include <random>
#include <set>

using namespace mdimlab;
using Catch::Approx;

namespace {

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("expected an mdimlab::error");
    return errc::invalid_argument; // unreachable
}

std::uint8_t sym(const WordPoint& w, std::size_t i) {
    return i < w.symbols.size() ? w.symbols[i] : w.tail;
}

MapSystemPtr identity_affine() {
    return make_affine(PiecewiseAffineMap({rat(0), rat(1)}, {rat(0), rat(1)}), false, "id");
}

} // namespace

TEST_CASE("cascade block layout follows the Basel partial sums") {
    auto ends = cascade_block_ends(CascadeSpec{});
    REQUIRE(ends.size() == 7);
    CHECK(ends[0] == 0.0);
    CHECK(ends[1] == Approx(0.6079271018540267).margin(1e-12));
    CHECK(ends[6] == Approx(0.9066557249595193).margin(1e-12));
    for (std::size_t i = 1; i < ends.size(); ++i) CHECK(ends[i] > ends[i - 1]);
    CHECK(ends.back() < 1.0);

    CHECK_THROWS_AS(cascade_block_ends(CascadeSpec{0, [](long long n) { return n; }, "linear"}),
                    error);
    CascadeSpec flat{2, [](long long) { return 1; }, "const"};
    CHECK_THROWS_AS(cascade_block_ends(flat), error);
}

TEST_CASE("the full cascade is one map with every block wired in") {
    auto sys = horseshoe_cascade();
    auto flat = flatten_affine(*sys);
    REQUIRE(flat.has_value());
    CHECK(lap_count(*flat) == 1087);

    // every block endpoint is an exact fixed point
    auto ends = cascade_block_ends(CascadeSpec{});
    for (double e : ends) {
        const rational x = rational_from_double(e);
        CHECK(flat->eval_exact(x) == x);
    }
    CHECK(flat->eval_exact(rational(1)) == rational(1));

    // block n carries a full 3^n-branch horseshoe on itself
    for (long long n = 1; n <= 3; ++n) {
        const rational a = rational_from_double(ends[std::size_t(n - 1)]);
        const rational b = rational_from_double(ends[std::size_t(n)]);
        long long s = 1;
        for (long long k = 0; k < n; ++k) s *= 3;
        auto check = verify_horseshoe(*flat, a, b, s);
        CHECK(check.ok);
        // but not one branch more
        CHECK_FALSE(verify_horseshoe(*flat, a, b, s + 1).ok);
    }
}

TEST_CASE("truncations converge to the full cascade in sup distance") {
    CascadeSpec spec;
    auto full = horseshoe_cascade(spec);
    auto ends = cascade_block_ends(spec);
    double prev = 2.0;
    for (long long n = 0; n <= 4; ++n) {
        auto trunc = truncated_cascade(spec, n);
        const double d = c0_distance(*trunc, *full, 0.01);
        // the first missing block dominates the sup difference
        CHECK(d <= (ends[std::size_t(n + 2)] - ends[std::size_t(n + 1)]) + 1e-9);
        CHECK(d > 0.0);
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
    CHECK(c0_distance(*truncated_cascade(spec, 5), *full, 0.01) == 0.0);
    CHECK_THROWS_AS(truncated_cascade(spec, 6), error);
}

TEST_CASE("quadratic exponents blow the breakpoint budget at six blocks") {
    CHECK(code_of([] { horseshoe_cascade(quadratic_cascade_spec(6)); }) == errc::iteration_cap);
    auto small = horseshoe_cascade(quadratic_cascade_spec(2));
    auto flat = flatten_affine(*small);
    REQUIRE(flat.has_value());
    CHECK(lap_count(*flat) == 83);
}

TEST_CASE("cylinder maps preserve the prefix and shift the tail") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int k = 1; k <= 3; ++k) {
        auto sys = cantor_cylinder_system(k, 12);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::uint8_t> in(12);
            for (auto& s : in) s = std::uint8_t(bit(rng) * 2);
            const Point p = Point::word(in);
            const WordPoint out = evaluate(*sys, p).as_word();
            for (std::size_t j = 0; j < std::size_t(k); ++j)
                CHECK(sym(out, j) == in[j]);
            for (std::size_t j = std::size_t(k); j + std::size_t(k) < in.size(); ++j)
                CHECK(sym(out, j) == in[j + std::size_t(k)]);
        }
    }
    CHECK_THROWS_AS(cantor_cylinder_system(0), error);
}

TEST_CASE("halving maps are exact dyadic contractions") {
    CHECK(evaluate(*halving_map(3), Point::real(1.0)).as_real() == 0.125);
    CHECK(evaluate(*halving_map(0), Point::real(0.7)).as_real() == 0.7);
    CHECK(evaluate(*halving_map(60), Point::real(1.0)).as_real() == std::ldexp(1.0, -60));
    CHECK_THROWS_AS(halving_map(61), error);
    CHECK_THROWS_AS(halving_map(-1), error);
}

TEST_CASE("alternating sequence interleaves expansion and contraction") {
    auto nas = ks_alternating();
    CHECK(evaluate(*nas.generator(1), Point::real(0.5)).as_real() == 1.0);
    CHECK(evaluate(*nas.generator(2), Point::real(1.0)).as_real() == 0.5);
    for (int i = 0; i <= 10; ++i) {
        const Point p = Point::real(i / 10.0);
        CHECK(compose_window(nas, 1, 2, p).as_real() <= 0.5);
    }
    CHECK_THROWS_AS(nas.generator(0), error);
}

TEST_CASE("damping wrapper scales pointwise and validates its inputs") {
    NonAutonomousSystem base = power_growth_sequence(tent2());

    auto unit = damped_sequence(base, [](long long) { return 1.0; });
    for (long long i = 1; i <= 3; ++i)
        for (int g = 0; g <= 16; ++g) {
            const Point p = Point::real(g / 16.0);
            CHECK(evaluate(*unit.generator(i), p).as_real() ==
                  evaluate(*base.generator(i), p).as_real());
        }

    auto dead = damped_sequence(base, [](long long) { return 0.0; });
    CHECK(evaluate(*dead.generator(2), Point::real(0.37)).as_real() == 0.0);

    auto loud = damped_sequence(base, [](long long) { return 1.5; });
    CHECK_THROWS_AS(loud.generator(1), error);

    NonAutonomousSystem drift;
    drift.space = Space::interval();
    drift.generator = [](long long) {
        return make_affine(PiecewiseAffineMap::from_doubles({0.0, 1.0}, {0.5, 1.0}), false,
                           "halfshift");
    };
    CHECK_THROWS_AS(damped_sequence(drift, [](long long) { return 0.5; }), error);
}

TEST_CASE("power growth doubles the exponent at every index") {
    auto nas = power_growth_sequence(tent2());
    CHECK(evaluate(*nas.generator(1), Point::real(0.25)).as_real() == 1.0); // tent2^2
    auto flat = flatten_affine(*power_growth_sequence(tent3()).generator(2));
    REQUIRE(flat.has_value());
    CHECK(lap_count(*flat) == 81); // tent3^4
    // saturated exponents stay evaluable on orbits that collapse
    CHECK(evaluate(*nas.generator(62), Point::real(0.375)).as_real() == 0.0);
    CHECK(evaluate(*nas.generator(100), Point::real(0.5)).as_real() == 0.0);
    CHECK_THROWS_AS(power_growth_sequence(nullptr), error);
}

TEST_CASE("snowflake vertex clouds") {
    for (int depth = 1; depth <= 4; ++depth) {
        auto space = koch_points(depth);
        const auto& cloud = std::get<FinitePointCloudSpace>(space->kind);
        long long want = 1;
        for (int d = 0; d < depth; ++d) want *= 4;
        CHECK((long long)cloud.points.size() == want + 1);
        CHECK(distance(*space, cloud.points.front(), cloud.points.back()) == Approx(1.0));
    }
    auto one = koch_points(1);
    const auto& pts = std::get<FinitePointCloudSpace>(one->kind).points;
    REQUIRE(pts.size() == 5);
    CHECK(pts[2].as_tuple()[0].as_real() == Approx(0.5));
    CHECK(pts[2].as_tuple()[1].as_real() == Approx(std::sqrt(3.0) / 6.0));
    CHECK_THROWS_AS(koch_points(0), error);
    CHECK_THROWS_AS(koch_points(9), error);
}

TEST_CASE("convergent sequence cloud") {
    auto space = convergent_sequence_space(10);
    const auto& pts = std::get<FinitePointCloudSpace>(space->kind).points;
    REQUIRE(pts.size() == 11);
    CHECK(pts.front().as_real() == 0.0);
    CHECK(distance(*space, Point::real(0.1), Point::real(1.0 / 9.0)) ==
          Approx(1.0 / 90.0).margin(1e-15));
    CHECK_THROWS_AS(convergent_sequence_space(9), error);
}

TEST_CASE("splicing a squeezed cascade at a fixed point") {
    auto base = identity_affine();
    auto spliced = splice_cascade(base, 0.1);
    const double d = c0_distance(*spliced, *base, 0.01);
    CHECK(d > 0.0);
    CHECK(d <= 0.1);

    // squeezed block endpoints are fixed points of the spliced map
    auto flat = flatten_affine(*spliced);
    REQUIRE(flat.has_value());
    const rational half = rational_from_double(0.1) / 2;
    for (double e : cascade_block_ends(CascadeSpec{})) {
        const rational x = half * rational_from_double(e);
        CHECK(flat->eval_exact(x) == x);
    }
}

TEST_CASE("splice preconditions") {
    auto drifting = make_affine(PiecewiseAffineMap::from_doubles({0.0, 1.0}, {0.5, 1.0}), false,
                                "halfshift");
    CHECK(code_of([&] { splice_cascade(drifting, 0.1); }) == errc::no_periodic_point);

    auto base = identity_affine();
    CHECK_THROWS_AS(splice_cascade(base, 0.0), error);
    CHECK_THROWS_AS(splice_cascade(base, 1.0), error);
    CHECK_THROWS_AS(splice_cascade(nullptr, 0.1), error);

    // smallest fixed point too close to 1 for the requested width
    auto late = make_affine(PiecewiseAffineMap::from_doubles({0.0, 0.95, 1.0}, {0.5, 0.95, 1.0}),
                            false, "late_fix");
    CHECK_THROWS_AS(splice_cascade(late, 0.1), error);
}

TEST_CASE("splicing works on the doubling circle map") {
    auto doubling =
        make_affine(PiecewiseAffineMap({rat(0), rat(1)}, {rat(0), rat(2)}), true, "doubling");
    auto spliced = splice_cascade(doubling, 0.1);
    CHECK(std::holds_alternative<CircleSpace>(spliced->domain->kind));
    CHECK(spliced->label.find("splice") != std::string::npos);
    // angle 0 stays fixed after the splice
    CHECK(evaluate(*spliced, Point::angle(0.0)).as_angle() == 0.0);
}

TEST_CASE("construction registry lists each id once") {
    const auto& rows = construction_registry();
    CHECK(rows.size() >= 15);
    std::set<std::string> ids;
    for (const auto& r : rows) {
        CHECK(!r.id.empty());
        CHECK(!r.note.empty());
        ids.insert(r.id);
    }
    CHECK(ids.size() == rows.size());
    CHECK(ids.count("tent3") == 1);
    CHECK(ids.count("horseshoe_cascade") == 1);
    CHECK(ids.count("custom") == 1);
}
