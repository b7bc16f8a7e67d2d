#include "uavplan/env.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uavplan {

const char* event_name(Event e) {
    switch (e) {
        case Event::none: return "none";
        case Event::collected: return "collected";
        case Event::collided: return "collided";
        case Event::out_of_bounds: return "out_of_bounds";
        case Event::returned: return "returned";
    }
    return "unknown";
}

std::size_t UAVState::collected_count() const {
    return static_cast<std::size_t>(std::count(collected.begin(), collected.end(), true));
}

bool UAVState::all_collected() const {
    return std::all_of(collected.begin(), collected.end(), [](bool b) { return b; });
}

UAVState UAVState::initial(const Scenario& scenario) {
    UAVState s;
    s.position = scenario.depot;
    s.velocity = Vec3{};
    s.slot_index = 0;
    s.collected.assign(scenario.item_count(), false);
    return s;
}

namespace env {

Propagated propagate(const Vec3& position, const Vec3& velocity, const Vec3& accel,
                     const Scenario& scenario) {
    const Vec3 a = clamp_norm(accel, scenario.a_max);
    Vec3 v = clamp_norm(velocity + a * scenario.delta, scenario.v_max);
    if (v.norm() <= scenario.hover_speed_tol) v = Vec3{};
    return {position + v * scenario.delta, v, a};
}

bool check_collection(const UAVState& state, const Vec3& item, const Scenario& scenario) {
    return state.velocity == Vec3{} && distance(state.position, item) <= scenario.epsilon;
}

double reward(const UAVState& prev, const StepOutcome& outcome, const Goal& goal,
              const Scenario& scenario, const RewardConfig& reward_cfg) {
    (void)prev;
    const UAVState& next = outcome.next_state;
    double r = 0.0;

    // Distance shaping tracks the active objective: the current goal while
    // items remain, the depot once everything is collected.
    if (next.all_collected()) {
        r -= reward_cfg.scale_dist * distance(next.position, scenario.depot);
    } else {
        r -= reward_cfg.scale_dist * distance(next.position, goal.position);
    }

    switch (outcome.event) {
        case Event::collected: r += 100.0; break;
        case Event::returned: r += 100.0; break;
        case Event::collided: r -= 100.0; break;
        case Event::out_of_bounds: r -= 200.0; break;
        case Event::none: break;
    }
    return r;
}

StepOutcome step(const UAVState& state, const Vec3& accel, const Scenario& scenario,
                 const Goal& goal, const RewardConfig& reward_cfg) {
    if (!accel.finite()) throw std::invalid_argument("step: acceleration must be finite");

    StepOutcome out;
    const Propagated p = propagate(state.position, state.velocity, accel, scenario);
    out.applied_acceleration = p.applied_acceleration;
    out.next_state = state;
    out.next_state.position = p.position;
    out.next_state.velocity = p.velocity;
    out.next_state.slot_index = state.slot_index + 1;

    UAVState& next = out.next_state;
    if (!in_bounds(next.position, scenario)) {
        out.event = Event::out_of_bounds;
    } else if (auto hit = check_collision(state.position, next.position, scenario.obstacles)) {
        out.event = Event::collided;
        out.event_index = static_cast<int>(*hit);
    } else if (!goal.is_depot() && !next.collected[goal.item_index] &&
               check_collection(next, goal.position, scenario)) {
        out.event = Event::collected;
        out.event_index = goal.item_index;
        next.collected[goal.item_index] = true;
    } else if (next.all_collected() && check_collection(next, scenario.depot, scenario)) {
        out.event = Event::returned;
    }

    out.done = out.event == Event::collided || out.event == Event::out_of_bounds ||
               out.event == Event::returned;
    out.reward = reward(state, out, goal, scenario, reward_cfg);
    return out;
}

StateVector encode_state(const UAVState& state, const Vec3& goal, const Scenario& scenario,
                         std::size_t n_obs) {
    const Vec3 extent = scenario.world_extent();
    const double diag = scenario.world_diagonal();
    // Relative quantities are squashed at an eighth of the world diagonal:
    // entries stay within (-1, 1) while meter-scale offsets near the goal or
    // an obstacle remain resolvable, which raw world-scale division loses.
    const double rel_scale = diag / 8.0;
    const double vel_scale = scenario.v_max / 4.0;
    auto squash = [](double v, double scale) { return std::tanh(v / scale); };

    StateVector s;
    s.reserve(state_vector_size(n_obs));

    // Own position mapped to [-1, 1] across the world box.
    for (std::size_t i = 0; i < 3; ++i)
        s.push_back(2.0 * (state.position[i] - scenario.world_min[i]) / extent[i] - 1.0);
    for (std::size_t i = 0; i < 3; ++i) s.push_back(squash(state.velocity[i], vel_scale));

    // Nearest obstacles by center distance, ties broken by index.
    std::vector<std::size_t> order(scenario.obstacles.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(scenario.obstacles.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        dist[i] = distance(state.position, scenario.obstacles[i].center());
    std::sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) {
        return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });

    for (std::size_t slot = 0; slot < n_obs; ++slot) {
        if (slot < order.size()) {
            const auto& box = scenario.obstacles[order[slot]];
            const Vec3 rel = box.center() - state.position;
            const Vec3 half = box.half_extents();
            for (std::size_t i = 0; i < 3; ++i) s.push_back(squash(rel[i], rel_scale));
            for (std::size_t i = 0; i < 3; ++i) s.push_back(squash(half[i], rel_scale));
        } else {
            // Absent obstacle slots read as infinitely far: tanh saturates at 1.
            for (std::size_t i = 0; i < 6; ++i) s.push_back(1.0);
        }
    }

    const Vec3 rel_goal = goal - state.position;
    for (std::size_t i = 0; i < 3; ++i) s.push_back(squash(rel_goal[i], rel_scale));
    s.push_back(squash(rel_goal.norm(), rel_scale));

    const double total = static_cast<double>(state.collected.size());
    const double remaining = total - static_cast<double>(state.collected_count());
    s.push_back(total > 0.0 ? remaining / total : 0.0);
    return s;
}

}  // namespace env
}  // namespace uavplan
