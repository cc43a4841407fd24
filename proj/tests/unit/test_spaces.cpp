#include <catch2/catch_amalgamated.hpp>

#include <mdimlab/space.hpp>

#include <cmath>
#include <random>

using namespace mdimlab;
using Catch::Approx;

TEST_CASE("interval and circle metrics") {
    auto iv = Space::interval();
    CHECK(distance(*iv, Point::real(0.0), Point::real(1.0)) == 1.0);
    CHECK(distance(*iv, Point::real(0.25), Point::real(0.75)) == 0.5);
    CHECK(iv->diameter == 1.0);

    auto ci = Space::circle();
    CHECK(distance(*ci, Point::angle(0.1), Point::angle(0.9)) == Approx(0.2).margin(1e-15));
    CHECK(distance(*ci, Point::angle(0.0), Point::angle(0.5)) == 0.5);
    CHECK(ci->diameter == 0.5);
    // angles normalize mod 1
    CHECK(distance(*ci, Point::angle(1.25), Point::angle(0.25)) == Approx(0.0).margin(1e-15));
}

TEST_CASE("word space metric is the weighted symbol-difference sum") {
    auto cantor = Space::cantor_words(10);
    CHECK(cantor->diameter == 1.0); // constant 0s vs constant 2s: sum 2*3^-i = 1
    CHECK(distance(*cantor, Point::word({0}, 0), Point::word({2}, 0)) == Approx(2.0 / 3));
    CHECK(distance(*cantor, Point::word({0, 0}, 0), Point::word({0, 2}, 0)) == Approx(2.0 / 9));
    // first mismatch at position j dominates: between 2*3^-(j+1) and 3^-j
    CHECK(distance(*cantor, Point::word({0, 2, 0, 2}, 0), Point::word({0, 2, 2, 0}, 0)) ==
          Approx(2.0 / 27 + 2.0 / 81));
    CHECK_THROWS_AS(Space::cantor_words(0), error);
    CHECK_THROWS_AS(Space::cantor_words(3, {1}), error);
}

TEST_CASE("product powers weight coordinates by 2^-|i|") {
    auto prod = Space::product_power(Space::interval(), IndexSet::HalfLine, 8);
    std::vector<Point> a(8, Point::real(0.0));
    std::vector<Point> b = a;
    b[0] = Point::real(1.0);
    CHECK(distance(*prod, Point::tuple(a), Point::tuple(b)) == Approx(0.5));
    b[0] = Point::real(0.0);
    b[2] = Point::real(1.0);
    CHECK(distance(*prod, Point::tuple(a), Point::tuple(b)) == Approx(0.125));
    CHECK(tail_bound(*prod, 3) == Approx(0.125));
    CHECK(prod->diameter == Approx(1.0 - std::ldexp(1.0, -8)));

    auto full = Space::product_power(Space::interval(), IndexSet::FullLine, 3);
    CHECK(tail_bound(*full, 3) == Approx(0.25));
    CHECK(full->diameter == Approx(3.0 - std::ldexp(1.0, -2)));
    std::vector<Point> c(7, Point::real(0.0)); // coordinates -3..3
    std::vector<Point> d = c;
    d[3] = Point::real(1.0); // center coordinate, weight 1
    CHECK(distance(*full, Point::tuple(c), Point::tuple(d)) == Approx(1.0));

    CHECK_THROWS_AS(tail_bound(*Space::interval(), 2), error);
    CHECK_THROWS_AS(Space::product_power(nullptr, IndexSet::HalfLine, 2), error);
}

TEST_CASE("sum products add factor distances") {
    auto sp = Space::sum_product(Space::interval(), Space::circle());
    Point p = Point::tuple({Point::real(0.2), Point::angle(0.1)});
    Point q = Point::tuple({Point::real(0.7), Point::angle(0.9)});
    CHECK(distance(*sp, p, q) == Approx(0.5 + 0.2));
    CHECK(sp->diameter == Approx(1.5));
}

TEST_CASE("clouds use the table when present, coordinates otherwise") {
    std::vector<Point> pts{Point::real(0.0), Point::real(0.3), Point::real(1.0)};
    auto implicit = Space::cloud(pts);
    CHECK(distance(*implicit, pts[0], pts[2]) == 1.0);
    CHECK(implicit->diameter == 1.0);

    auto tabled = Space::cloud(pts, {{0.0, 2.0, 3.0}, {2.0, 0.0, 2.5}, {3.0, 2.5, 0.0}});
    CHECK(distance(*tabled, pts[0], pts[1]) == 2.0);
    CHECK(tabled->diameter == 3.0);

    // planar points get the Euclidean metric
    Point o = Point::tuple({Point::real(0.0), Point::real(0.0)});
    Point e = Point::tuple({Point::real(3.0), Point::real(4.0)});
    auto planar = Space::cloud({o, e});
    CHECK(distance(*planar, o, e) == Approx(5.0));
}

TEST_CASE("sample nets are deterministic and mesh-dense") {
    auto iv_net = sample_net(*Space::interval(), 0.25);
    REQUIRE(iv_net.size() == 5);
    for (std::size_t i = 0; i < iv_net.size(); ++i)
        CHECK(iv_net[i].as_real() == Approx(i / 4.0));

    auto ci_net = sample_net(*Space::circle(), 0.25);
    CHECK(ci_net.size() == 4);

    auto cantor = Space::cantor_words(10);
    CHECK(sample_net(*cantor, std::pow(3.0, -4)).size() == 16); // 2^4 resolved prefixes
    CHECK(sample_net(*cantor, std::pow(3.0, -6)).size() == 64);
    CHECK_THROWS_AS(sample_net(*cantor, std::pow(3.0, -11)), error); // depth 10 cannot resolve
    CHECK_THROWS_AS(sample_net(*cantor, 0.0), error);

    // product nets are cartesian over per-factor nets
    auto prod = Space::product_power(Space::interval(), IndexSet::HalfLine, 2);
    auto pnet = sample_net(*prod, 0.5);
    CHECK(pnet.size() >= 4);
    for (const auto& p : pnet) CHECK(p.as_tuple().size() == 2);
}

TEST_CASE("metric axioms hold on sampled triples") {
    std::mt19937 rng(7701);
    std::vector<SpacePtr> spaces{
        Space::interval(),
        Space::circle(),
        Space::cantor_words(6),
        Space::product_power(Space::interval(), IndexSet::HalfLine, 3),
        Space::sum_product(Space::interval(), Space::circle()),
    };
    for (const auto& sp : spaces) {
        auto net = sample_net(*sp, 0.2);
        REQUIRE(net.size() >= 3);
        std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
        for (int t = 0; t < 200; ++t) {
            const Point& p = net[pick(rng)];
            const Point& q = net[pick(rng)];
            const Point& r = net[pick(rng)];
            const double dpq = distance(*sp, p, q);
            CHECK(dpq >= 0.0);
            CHECK(dpq == distance(*sp, q, p));
            CHECK(distance(*sp, p, p) == 0.0);
            CHECK(dpq <= distance(*sp, p, r) + distance(*sp, r, q) + 1e-12);
        }
    }
}

TEST_CASE("pair-splitting reindex preserves the weighted sum distance") {
    auto base = Space::sum_product(Space::interval(), Space::interval());
    auto prod = Space::product_power(base, IndexSet::HalfLine, 4);
    auto left_pow = Space::product_power(Space::interval(), IndexSet::HalfLine, 4);

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<Point> a, b;
        for (int i = 0; i < 4; ++i) {
            a.push_back(Point::tuple({Point::real(ud(rng)), Point::real(ud(rng))}));
            b.push_back(Point::tuple({Point::real(ud(rng)), Point::real(ud(rng))}));
        }
        Point p = Point::tuple(a), q = Point::tuple(b);
        auto [px, py] = theta_reindex(p);
        auto [qx, qy] = theta_reindex(q);
        CHECK(distance(*prod, p, q) ==
              Approx(distance(*left_pow, px, qx) + distance(*left_pow, py, qy)).margin(1e-12));
    }
    CHECK_THROWS_AS(theta_reindex(Point::tuple({Point::real(0.5)})), error);
}
