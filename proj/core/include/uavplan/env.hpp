#pragma once

#include <cstdint>
#include <vector>

#include "uavplan/scenario.hpp"

namespace uavplan {

enum class Event : std::uint8_t { none, collected, collided, out_of_bounds, returned };

const char* event_name(Event e);

struct UAVState {
    Vec3 position;
    Vec3 velocity;
    std::uint64_t slot_index = 0;
    std::vector<bool> collected;  // one flag per item

    std::size_t collected_count() const;
    bool all_collected() const;

    static UAVState initial(const Scenario& scenario);
};

// Current navigation target: an item (by index) or the depot (item_index < 0).
struct Goal {
    Vec3 position;
    int item_index = -1;

    static Goal item(const Scenario& scenario, std::size_t k) {
        return {scenario.items.at(k), static_cast<int>(k)};
    }
    static Goal depot(const Scenario& scenario) { return {scenario.depot, -1}; }
    bool is_depot() const { return item_index < 0; }
};

struct StepOutcome {
    UAVState next_state;
    double reward = 0.0;
    bool done = false;
    Event event = Event::none;
    int event_index = -1;              // item collected or obstacle hit, -1 otherwise
    Vec3 applied_acceleration;         // post-clamp acceleration the dynamics used
};

// Reward shaping knobs. scale_dist keeps distance penalties commensurate with
// the +/-100 event rewards in kilometer-scale worlds; 1.0 reproduces the
// unscaled distance penalty.
struct RewardConfig {
    double scale_dist = 0.01;
};

using StateVector = std::vector<double>;

namespace env {

inline bool in_bounds(const Vec3& p, const Scenario& scenario) {
    return scenario.point_in_bounds(p);
}

// One slot of discrete-time kinematics, no events or reward:
// clamp a to a_max, v' = clamp(v + delta*a, v_max), hover-snap, q' = q + delta*v'.
// Position advances with the post-update velocity.
struct Propagated {
    Vec3 position;
    Vec3 velocity;
    Vec3 applied_acceleration;
};
Propagated propagate(const Vec3& position, const Vec3& velocity, const Vec3& accel,
                     const Scenario& scenario);

// Hovering within epsilon of the item (Euclidean, inclusive). Velocity must be
// exactly zero, which the hover snap in propagate() makes reachable.
bool check_collection(const UAVState& state, const Vec3& item, const Scenario& scenario);

// One environment step against the current goal. Events are evaluated in fixed
// priority -- out_of_bounds, collided, collected, returned -- so a step yields
// at most one event. Throws std::invalid_argument on non-finite acceleration.
StepOutcome step(const UAVState& state, const Vec3& accel, const Scenario& scenario,
                 const Goal& goal, const RewardConfig& reward_cfg = {});

// Six-component reward of the step that produced `outcome`.
double reward(const UAVState& prev, const StepOutcome& outcome, const Goal& goal,
              const Scenario& scenario, const RewardConfig& reward_cfg = {});

// Fixed-length policy observation: own position and velocity, the n_obs
// nearest obstacles (relative center + half extents), relative goal vector,
// distance to goal and remaining-items fraction. All entries are normalized
// by world scale; missing obstacle slots hold a world-diagonal sentinel.
StateVector encode_state(const UAVState& state, const Vec3& goal, const Scenario& scenario,
                         std::size_t n_obs);

inline std::size_t state_vector_size(std::size_t n_obs) { return 11 + 6 * n_obs; }

}  // namespace env
}  // namespace uavplan
