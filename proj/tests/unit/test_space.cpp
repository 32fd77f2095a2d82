#include "support.hpp"

#include <algorithm>
#include <cstdlib>

using namespace psdocalc;

TEST_SUITE("space") {

TEST_CASE("cycle distance is the circular distance") {
    auto s = build_space({SpaceKind::cycle, 17});
    for (PointId x = 0; x < 17; ++x)
        for (PointId y = 0; y < 17; ++y) {
            int d = int(std::abs(x - y));
            CHECK(s.dist(x, y) == std::min(d, 17 - d));
        }
    CHECK(s.diameter() == 8);
}

TEST_CASE("gasket point count") {
    for (int n = 1; n <= 4; ++n) {
        auto s = build_space({SpaceKind::sierpinski, n});
        int p = 1;
        for (int i = 0; i <= n; ++i) p *= 3;
        CHECK(s.size() == (p + 3) / 2);
    }
}

TEST_CASE("other kinds have the expected sizes") {
    CHECK(build_space({SpaceKind::grid_torus, 4, 6}).size() == 24);
    CHECK(build_space({SpaceKind::path, 9}).size() == 9);
    CHECK(build_space({SpaceKind::binary_tree, 4}).size() == 15);
    CHECK(build_space({SpaceKind::path, 9}).diameter() == 8);
}

TEST_CASE("ball volume equals the brute-force sum") {
    SpaceSpec spec{SpaceKind::grid_torus, 5, 7, MeasureChoice::degree};
    auto s = build_space(spec);
    for (PointId x : {PointId(0), PointId(13)})
        for (double r : {0.5, 1.0, 1.5, 2.0, 3.7, 10.0}) {
            double brute = 0;
            for (PointId y = 0; y < s.size(); ++y)
                if (s.dist(x, y) < r) brute += s.measure(y);
            CHECK(s.ball_volume(x, r) == doctest::Approx(brute));
            auto b = make_ball(s, x, r);
            double viaball = 0;
            for (auto y : b.members) viaball += s.measure(y);
            CHECK(viaball == doctest::Approx(brute));
            CHECK(std::is_sorted(b.members.begin(), b.members.end()));
        }
}

TEST_CASE("degree measure") {
    auto s = build_space({SpaceKind::path, 5, 0, MeasureChoice::degree});
    CHECK(s.measure(0) == 1.0);
    CHECK(s.measure(2) == 2.0);
}

TEST_CASE("disconnected graph is rejected") {
    SpaceSpec spec{SpaceKind::path, 4};
    std::vector<Edge> edges{{0, 1}, {2, 3}};
    std::vector<std::vector<double>> coords(4, std::vector<double>{0.0});
    CHECK_THROWS_AS(MetricMeasureSpace(spec, edges, coords, Vec::Ones(4)), InvalidArgument);
}

TEST_CASE("bad sizes are rejected") {
    CHECK_THROWS(build_space({SpaceKind::cycle, 2}));
    CHECK_THROWS(build_space({SpaceKind::grid_torus, 4, 2}));
    CHECK_THROWS(build_space({SpaceKind::sierpinski, 0}));
    CHECK_THROWS(build_space({SpaceKind::cycle, 100000}));
    CHECK_THROWS(parse_space_kind("klein_bottle"));
}

TEST_CASE("ball distance") {
    auto s = build_space({SpaceKind::cycle, 40});
    auto b1 = make_ball(s, 0, 2), b2 = make_ball(s, 10, 3);
    CHECK(ball_distance(s, b1, b2) == doctest::Approx(5));
    CHECK(ball_distance(s, b1, make_ball(s, 3, 2)) == 0.0);
}

TEST_CASE("ball pair grid separations") {
    auto s = build_space({SpaceKind::cycle, 32});
    auto pairs = ball_pair_grid(s, 0, 2.0, 10);
    REQUIRE(pairs.size() == 11);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        CHECK(s.dist(pairs[k].b1.center, pairs[k].b2.center) == int(k));
}

TEST_CASE("json round trip") {
    auto s = build_space({SpaceKind::sierpinski, 2, 0, MeasureChoice::degree});
    auto t = space_from_json(space_to_json(s));
    REQUIRE(t.size() == s.size());
    CHECK(t.edges() == s.edges());
    CHECK((t.measure() - s.measure()).norm() == 0.0);
    CHECK(t.diameter() == s.diameter());
}

TEST_CASE("doubling exponent of a cycle is close to one") {
    auto s = build_space({SpaceKind::cycle, 256});
    auto prof = doubling_profile(s);
    CHECK(prof.n == doctest::Approx(1.0).epsilon(0.05));
    CHECK(prof.A2 >= 1.0);
}

}
