#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fdl/errors.hpp"
#include "fdl/layout.hpp"
#include "fdl/rng.hpp"

using namespace fdl;

TEST_CASE("xoshiro256++ reference sequence") {
    // Frozen from an independent implementation of the published algorithm
    // (splitmix64 seeding, 53-bit double conversion).
    Rng rng1(1);
    CHECK(rng1.next_u64() == 14971601782005023387ULL);
    CHECK(rng1.next_u64() == 13781649495232077965ULL);
    CHECK(rng1.next_u64() == 1847458086238483744ULL);
    CHECK(rng1.next_u64() == 13765271635752736470ULL);

    Rng rng42(42);
    CHECK(rng42.next_u64() == 15021278609987233951ULL);
    CHECK(rng42.next_u64() == 5881210131331364753ULL);

    Rng d1(1);
    CHECK(d1.next_double() == doctest::Approx(0.8116121588818848).epsilon(1e-15));
}

TEST_CASE("rng helpers") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 10000; ++i) {
        const auto v = rng.next_below(13);
        CHECK(v < 13);
    }
    Rng cover(3);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 1000; ++i) ++seen[cover.next_below(5)];
    for (int count : seen) CHECK(count > 0);
}

TEST_CASE("init_random_layout") {
    SUBCASE("same seed gives identical layouts") {
        Layout a = init_random_layout(100, {50.0, 80.0}, 99);
        Layout b = init_random_layout(100, {50.0, 80.0}, 99);
        CHECK(a.positions == b.positions);
    }
    SUBCASE("coordinates stay in bounds") {
        Layout layout = init_random_layout(1000, {100.0, 100.0}, 4);
        for (const auto& p : layout.positions) {
            CHECK(p.x >= 0.0);
            CHECK(p.x <= 100.0);
            CHECK(p.y >= 0.0);
            CHECK(p.y <= 100.0);
        }
    }
    SUBCASE("adjacent seeds differ") {
        Layout a = init_random_layout(20, {100.0, 100.0}, 5);
        Layout b = init_random_layout(20, {100.0, 100.0}, 6);
        CHECK(a.positions != b.positions);
    }
    SUBCASE("bounds must be positive") {
        CHECK_THROWS_AS(init_random_layout(3, {0.0, 10.0}, 1), DomainError);
    }
}

TEST_CASE("init_circular_layout") {
    SUBCASE("four nodes on a 2x2 canvas sit at the axis points") {
        Layout layout = init_circular_layout(4, {2.0, 2.0});
        REQUIRE(layout.positions.size() == 4);
        CHECK(layout.positions[0].x == doctest::Approx(2.0));
        CHECK(layout.positions[0].y == doctest::Approx(1.0));
        CHECK(layout.positions[1].x == doctest::Approx(1.0));
        CHECK(layout.positions[1].y == doctest::Approx(2.0));
        CHECK(layout.positions[2].x == doctest::Approx(0.0));
        CHECK(layout.positions[2].y == doctest::Approx(1.0));
        CHECK(layout.positions[3].x == doctest::Approx(1.0));
        CHECK(layout.positions[3].y == doctest::Approx(0.0));
    }
    SUBCASE("single node lands on the center") {
        Layout layout = init_circular_layout(1, {10.0, 4.0});
        CHECK(layout.positions[0] == Vec2{5.0, 2.0});
    }
    SUBCASE("all pairwise distances positive for 10^4 nodes") {
        Layout layout = init_circular_layout(10000, {1000.0, 1000.0});
        auto sorted = layout.positions;
        std::sort(sorted.begin(), sorted.end(), [](Vec2 a, Vec2 b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            CHECK(distance(sorted[i - 1], sorted[i]) > 0.0);
    }
}
