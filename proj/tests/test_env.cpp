#include <doctest.h>

#include "helpers.hpp"
#include "uavplan/env.hpp"
#include "uavplan/scenario_io.hpp"

using namespace uavplan;

namespace {

Scenario paper_world() {
    Scenario s = io::template_defaults(io::ScenarioTemplate::paper_default);
    s.items = {{500, 500, 500}};
    return s;
}

}  // namespace

TEST_CASE("step: rest is a fixed point of the integrator") {
    Scenario s = paper_world();
    UAVState state = UAVState::initial(s);
    const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.next_state.position == s.depot);
    CHECK(out.next_state.velocity == Vec3{});
    CHECK(out.next_state.slot_index == 1);
}

TEST_CASE("step: one forward-Euler slot with the post-update velocity") {
    Scenario s = paper_world();
    UAVState state = UAVState::initial(s);
    state.position = {0, 0, 0};
    state.velocity = {3, 4, 0};
    const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.next_state.position == Vec3{3, 4, 0});
    CHECK(out.next_state.velocity == Vec3{3, 4, 0});
}

TEST_CASE("step: velocity norm-clamps to v_max") {
    Scenario s = paper_world();  // v_max 50, a_max 20
    UAVState state = UAVState::initial(s);
    state.position = {100, 100, 100};
    state.velocity = {50, 0, 0};
    const auto out = env::step(state, {20, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.next_state.velocity.norm() == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(out.applied_acceleration.norm() <= s.a_max + 1e-9);
}

TEST_CASE("step: hover snap followed by zero acceleration is a fixed point") {
    Scenario s = paper_world();
    UAVState state = UAVState::initial(s);
    state.position = {100, 100, 100};
    state.velocity = {0.05, 0.0, 0.0};  // below hover_speed_tol = 0.1
    auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.next_state.velocity == Vec3{});
    const Vec3 rest_pos = out.next_state.position;
    out = env::step(out.next_state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.next_state.position == rest_pos);
    CHECK(out.next_state.velocity == Vec3{});
}

TEST_CASE("step rejects non-finite acceleration") {
    Scenario s = paper_world();
    UAVState state = UAVState::initial(s);
    CHECK_THROWS_AS(env::step(state, {std::nan(""), 0, 0}, s, Goal::item(s, 0)),
                    std::invalid_argument);
}

TEST_CASE("event priority: bounds exit outranks collision") {
    Scenario s = paper_world();
    s.obstacles = {{{0, 0, 0}, {100, 100, 100}}};
    s.depot = {500, 500, 500};  // keep the scenario itself valid
    UAVState state = UAVState::initial(s);
    state.position = {40, 40, 2};
    state.velocity = {0, 0, -40};
    const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.event == Event::out_of_bounds);
    CHECK(out.done);
}

TEST_CASE("collision event carries the obstacle index") {
    Scenario s = paper_world();
    s.obstacles = {{{200, 200, 200}, {300, 300, 300}}};
    UAVState state = UAVState::initial(s);
    state.position = {150, 250, 250};
    state.velocity = {50, 0, 0};
    const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.event == Event::collided);
    CHECK(out.event_index == 0);
    CHECK(out.reward < -99.0);
}

TEST_CASE("check_collection: hover inside the threshold, inclusive") {
    Scenario s = paper_world();
    UAVState state = UAVState::initial(s);
    state.position = s.items[0];
    state.velocity = {};
    CHECK(env::check_collection(state, s.items[0], s));

    state.position = s.items[0] + Vec3{5.0, 0, 0};  // exactly epsilon away
    CHECK(env::check_collection(state, s.items[0], s));

    state.position = s.items[0] + Vec3{1.0, 0, 0};
    state.velocity = {0.5, 0, 0};  // moving: not hovering
    CHECK_FALSE(env::check_collection(state, s.items[0], s));
}

TEST_CASE("collection and return events fire only when hovering at the goal") {
    Scenario s = paper_world();
    s.items = {{3, 0, 0}};
    UAVState state = UAVState::initial(s);
    // Already inside epsilon of the item; a zero-acceleration hover step collects.
    auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0));
    CHECK(out.event == Event::collected);
    CHECK(out.event_index == 0);
    CHECK_FALSE(out.done);
    CHECK(out.next_state.collected[0]);

    // All collected and hovering within epsilon of the depot: returned.
    out = env::step(out.next_state, {0, 0, 0}, s, Goal::depot(s));
    CHECK(out.event == Event::returned);
    CHECK(out.done);
}

TEST_CASE("reward terms match the six-component definition") {
    Scenario s = paper_world();
    s.items = {{3, 0, 0}, {800, 800, 800}};
    const RewardConfig unit{1.0};

    SUBCASE("no event: distance-to-goal penalty r1") {
        UAVState state = UAVState::initial(s);
        state.position = {100, 100, 100};
        // After a zero-acceleration step from rest the UAV stays put.
        const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 1), unit);
        CHECK(out.event == Event::none);
        const double want = -distance(state.position, s.items[1]);
        CHECK(out.reward == doctest::Approx(want));
    }
    SUBCASE("collection adds +100 on top of the r1 shaping toward the step goal") {
        UAVState state = UAVState::initial(s);
        const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 0), unit);
        CHECK(out.event == Event::collected);
        const double want = 100.0 - distance(out.next_state.position, s.items[0]);
        CHECK(out.reward == doctest::Approx(want));
    }
    SUBCASE("after all items are collected the depot distance r3 applies, never r1") {
        UAVState state = UAVState::initial(s);
        state.position = {100, 100, 100};
        state.collected = {true, true};
        const auto out = env::step(state, {0, 0, 0}, s, Goal::depot(s), unit);
        CHECK(out.event == Event::none);
        const double want = -distance(out.next_state.position, s.depot);
        CHECK(out.reward == doctest::Approx(want));
    }
    SUBCASE("scaled distance penalty: 12 m at scale 1 gives -12") {
        UAVState state = UAVState::initial(s);
        state.position = s.items[1] + Vec3{12.0, 0, 0};
        const auto out = env::step(state, {0, 0, 0}, s, Goal::item(s, 1), unit);
        CHECK(out.reward == doctest::Approx(-12.0));
    }
}

TEST_CASE("kinematic bounds hold along any control sequence") {
    Scenario s = paper_world();
    Rng rng(7);
    UAVState state = UAVState::initial(s);
    state.position = {500, 500, 500};
    for (int i = 0; i < 500; ++i) {
        const Vec3 wild{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
        const auto out = env::step(state, wild, s, Goal::item(s, 0));
        CHECK(out.next_state.velocity.norm() <= s.v_max + 1e-9);
        CHECK(out.applied_acceleration.norm() <= s.a_max + 1e-9);
        if (out.done) break;
        state = out.next_state;
    }
}

TEST_CASE("encode_state: padding, goal block, nearest-obstacle selection") {
    Scenario s = paper_world();

    SUBCASE("zero obstacles pad with the world-diagonal sentinel") {
        UAVState state = UAVState::initial(s);
        const auto v = env::encode_state(state, s.items[0], s, 2);
        REQUIRE(v.size() == env::state_vector_size(2));
        for (std::size_t i = 6; i < 18; ++i) CHECK(v[i] == 1.0);
    }
    SUBCASE("at the goal the relative block and distance are zero") {
        UAVState state = UAVState::initial(s);
        state.position = s.items[0];
        const auto v = env::encode_state(state, s.items[0], s, 0);
        REQUIRE(v.size() == env::state_vector_size(0));
        CHECK(v[6] == 0.0);
        CHECK(v[7] == 0.0);
        CHECK(v[8] == 0.0);
        CHECK(v[9] == 0.0);
    }
    SUBCASE("the nearer of two obstacles is encoded first") {
        s.obstacles = {{{700, 495, 495}, {720, 515, 515}}, {{510, 495, 495}, {530, 515, 515}}};
        UAVState state = UAVState::initial(s);
        state.position = {500, 505, 505};
        // Independent oracle: sort centers by distance.
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < s.obstacles.size(); ++i)
            order.emplace_back(distance(state.position, s.obstacles[i].center()), i);
        std::sort(order.begin(), order.end());
        const auto v = env::encode_state(state, s.items[0], s, 1);
        const Vec3 rel = s.obstacles[order[0].second].center() - state.position;
        const double scale = s.world_diagonal() / 8.0;
        CHECK(v[6] == doctest::Approx(std::tanh(rel.x / scale)));
        CHECK(v[7] == doctest::Approx(std::tanh(rel.y / scale)));
        CHECK(v[8] == doctest::Approx(std::tanh(rel.z / scale)));
    }
    SUBCASE("pure function: identical inputs, identical outputs") {
        UAVState state = UAVState::initial(s);
        state.position = {123.4, 567.8, 90.1};
        state.velocity = {1, -2, 3};
        CHECK(env::encode_state(state, s.items[0], s, 3) ==
              env::encode_state(state, s.items[0], s, 3));
    }
}

TEST_CASE("in_bounds is inclusive at the boundary") {
    Scenario s = paper_world();
    CHECK(env::in_bounds({0, 0, 0}, s));
    CHECK(env::in_bounds({500, 500, 500}, s));
    CHECK_FALSE(env::in_bounds({1000.01, 0, 0}, s));
    CHECK(env::in_bounds({1000, 1000, 1000}, s));
}
