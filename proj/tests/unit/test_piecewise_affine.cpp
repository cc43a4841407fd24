#include <catch2/catch_amalgamated.hpp>

#include <mdimlab/piecewise_affine.hpp>

#include <cmath>

using namespace mdimlab;
using Catch::Approx;

namespace {
PiecewiseAffineMap tent3_map() {
    return PiecewiseAffineMap({rat(0), rat(1, 3), rat(2, 3), rat(1)},
                              {rat(0), rat(1), rat(0), rat(1)});
}
PiecewiseAffineMap tent2_map() {
    return PiecewiseAffineMap({rat(0), rat(1, 2), rat(1)}, {rat(0), rat(1), rat(0)});
}
PiecewiseAffineMap identity_map() {
    return PiecewiseAffineMap({rat(0), rat(1)}, {rat(0), rat(1)});
}
} // namespace

TEST_CASE("exact rationals round-trip through doubles") {
    CHECK(to_double(rat(1, 3) + rat(2, 3)) == 1.0);
    // 0.1 as an IEEE double is exactly 3602879701896397 / 2^55
    const rational expected = rational(boost::multiprecision::cpp_int("3602879701896397")) /
                              boost::multiprecision::pow(boost::multiprecision::cpp_int(2), 55);
    CHECK(rational_from_double(0.1) == expected);
    CHECK(rational_from_double(0.5) == rat(1, 2));
    CHECK(rational_from_double(-0.75) == rat(-3, 4));
    CHECK(to_double(rational_from_double(0.1)) == 0.1);
}

TEST_CASE("oscillation counts of tent maps and their iterates") {
    auto t3 = tent3_map();
    auto t2 = tent2_map();
    CHECK(lap_count(t3) == 3);
    CHECK(lap_count(t2) == 2);
    CHECK(lap_count(identity_map()) == 1);
    long long expect = 1;
    for (int p = 1; p <= 6; ++p) {
        expect *= 3;
        CHECK(lap_count(iterate_exact(t3, p)) == expect);
    }
    // breakpoints of the p-th iterate: 3^p + 1
    CHECK(iterate_exact(t3, 4).xs.size() == 82);
}

TEST_CASE("composition matches iteration exactly") {
    auto t3 = tent3_map();
    auto a = iterate_exact(t3, 2);
    auto b = iterate_exact(t3, 3);
    auto c = iterate_exact(t3, 5);
    auto ab = compose(a, b);
    for (int i = 0; i <= 500; ++i) {
        rational x = rat(i, 500);
        REQUIRE(ab.eval_exact(x) == c.eval_exact(x));
    }
}

TEST_CASE("pointwise evaluation, exact and floating") {
    auto t3 = tent3_map();
    CHECK(t3.eval_exact(rat(1, 3)) == rat(1));
    CHECK(t3.eval_exact(rat(1, 2)) == rat(1, 2));
    CHECK(t3(0.5) == Approx(0.5).margin(1e-15)); // thirds are not dyadic
    auto t2 = tent2_map();
    CHECK(t2(0.5) == 1.0); // dyadic breakpoints evaluate exactly
    CHECK(t2(0.25) == 0.5);
}

TEST_CASE("fixed points via exact root finding") {
    auto fps = fixed_points(tent3_map());
    REQUIRE(fps.size() == 3);
    CHECK(fps[0] == rat(0));
    CHECK(fps[1] == rat(1, 2));
    CHECK(fps[2] == rat(1));

    // doubling on the circle: lift fixes 0 (mod 1)
    PiecewiseAffineMap doubling({rat(0), rat(1)}, {rat(0), rat(2)});
    auto pfix = fixed_points_mod1(doubling);
    REQUIRE(pfix.size() == 1);
    CHECK(pfix[0] == rat(0));
}

TEST_CASE("horseshoe verification on whole-interval maps") {
    auto t3 = tent3_map();
    auto hs = verify_horseshoe(t3, rat(0), rat(1), 3);
    CHECK(hs.ok);
    CHECK(hs.pieces_found == 3);
    REQUIRE(hs.cuts.size() == 4); // s+1 boundaries including both endpoints
    CHECK(hs.cuts[0] == rat(0));
    CHECK(hs.cuts[1] == rat(1, 3));
    CHECK(hs.cuts[2] == rat(2, 3));
    CHECK(hs.cuts[3] == rat(1));

    CHECK_FALSE(verify_horseshoe(t3, rat(0), rat(1), 4).ok);
    CHECK_FALSE(verify_horseshoe(identity_map(), rat(0), rat(1), 2).ok);
    CHECK(verify_horseshoe(tent2_map(), rat(0), rat(1), 2).ok);
}

TEST_CASE("sup distance between maps is exact") {
    CHECK(c0_sup_interval(tent3_map(), identity_map()) == rat(2, 3));
    CHECK(c0_sup_interval(tent3_map(), tent3_map()) == rat(0));
    CHECK(c0_sup_interval(tent2_map(), identity_map()) == rat(1)); // |f(1) - 1| = 1
}

TEST_CASE("periodic extension builds circle-lift compositions") {
    PiecewiseAffineMap doubling({rat(0), rat(1)}, {rat(0), rat(2)});
    auto ext = extend_periodic(doubling, 2, 0, 2);
    auto dd = compose(ext, doubling);
    CHECK(lap_count(dd) == 1);
    CHECK(dd.eval_exact(rat(3, 4)) == rat(3));
    CHECK(dd.eval_exact(rat(1, 4)) == rat(1));
}
