#include <doctest.h>

#include "helpers.hpp"
#include "uavplan/geometry.hpp"

using namespace uavplan;
using testutil::chord_length;
using testutil::random_segment_box;
using testutil::sampled_segment_hit;

namespace {

const ObstacleAABB kUnitBox{{0, 0, 0}, {10, 10, 10}};

}  // namespace

TEST_CASE("point containment follows the closed-box OR semantics") {
    CHECK(kUnitBox.contains({5, 5, 5}));      // interior on all axes
    CHECK_FALSE(kUnitBox.contains({5, 5, 11}));  // outside along z is enough
    CHECK(kUnitBox.contains({0, 5, 5}));      // a face point violates all three strict tests
    CHECK(kUnitBox.contains({10, 10, 10}));
    CHECK_FALSE(kUnitBox.contains({-1e-9, 5, 5}));
}

TEST_CASE("segment through a box is a collision even when both ends are safe") {
    CHECK(env::segment_intersects_aabb({-5, 5, 5}, {15, 5, 5}, kUnitBox));
    CHECK_FALSE(env::segment_intersects_aabb({-5, 5, 11}, {15, 5, 11}, kUnitBox));
    CHECK(env::segment_intersects_aabb({5, 5, 5}, {5, 5, 5}, kUnitBox));  // degenerate point
    CHECK_FALSE(env::segment_intersects_aabb({11, 11, 11}, {12, 12, 12}, kUnitBox));
}

TEST_CASE("check_collision returns the first intersected obstacle") {
    std::vector<ObstacleAABB> obstacles{{{20, 0, 0}, {30, 10, 10}}, kUnitBox};
    auto hit = env::check_collision({5, 5, 5}, {5, 5, 5}, obstacles);
    REQUIRE(hit.has_value());
    CHECK(*hit == 1);
    CHECK_FALSE(env::check_collision({-5, -5, -5}, {-1, -1, -1}, obstacles).has_value());
}

TEST_CASE("slab test is symmetric in the segment endpoints") {
    Rng rng(20250811);
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_segment_box(rng);
        CHECK(env::segment_intersects_aabb(c.a, c.b, c.box) ==
              env::segment_intersects_aabb(c.b, c.a, c.box));
    }
}

TEST_CASE("slab test agrees with the 1e-3 m sampling oracle") {
    Rng rng(42);
    int checked = 0;
    int skipped = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto c = random_segment_box(rng);
        // Grazing-tangency guard: cases whose outcome flips within a 1e-6 m
        // margin, or whose chord is below the oracle's resolution, are
        // unresolvable by sampling and excluded.
        const bool inflated = env::segment_intersects_aabb(c.a, c.b, c.box.inflated(1e-6));
        const bool deflated = env::segment_intersects_aabb(c.a, c.b, c.box.inflated(-1e-6));
        const double chord = chord_length(c.a, c.b, c.box);
        if (inflated != deflated || (chord > 0.0 && chord < 2e-3)) {
            ++skipped;
            continue;
        }
        const bool slab = env::segment_intersects_aabb(c.a, c.b, c.box);
        const bool sampled = sampled_segment_hit(c.a, c.b, c.box);
        CHECK(slab == sampled);
        ++checked;
    }
    CHECK(checked >= 950);  // exclusions must stay rare
    INFO("skipped " << skipped);
}

TEST_CASE("clearance measures distance to the box surface") {
    CHECK(kUnitBox.clearance({5, 5, 5}) == 0.0);
    CHECK(kUnitBox.clearance({15, 5, 5}) == doctest::Approx(5.0));
    CHECK(kUnitBox.clearance({13, 14, 5}) == doctest::Approx(5.0));
    CHECK(std::isinf(env::min_clearance({5, 5, 5}, {})));

    std::vector<ObstacleAABB> obstacles{kUnitBox, {{100, 0, 0}, {110, 10, 10}}};
    CHECK(env::min_clearance({12, 5, 5}, obstacles) == doctest::Approx(2.0));
}
