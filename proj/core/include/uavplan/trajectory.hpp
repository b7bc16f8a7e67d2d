#pragma once

#include <cstdint>
#include <vector>

#include "uavplan/env.hpp"

namespace uavplan {

// One executed slot: the post-step state, the acceleration the dynamics
// applied, and the event raised (if any).
struct TrajectorySample {
    std::uint64_t slot = 0;  // consecutive from 1
    Vec3 position;
    Vec3 velocity;
    Vec3 acceleration;
    Event event = Event::none;
    int event_index = -1;
};

// Time-indexed mission trace. Slot 0 (depot, at rest) is implicit; samples
// must chain through env::propagate from that state.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    double delta = 1.0;

    double duration() const { return static_cast<double>(samples.size()) * delta; }

    void append_step(const StepOutcome& outcome) {
        samples.push_back({outcome.next_state.slot_index, outcome.next_state.position,
                           outcome.next_state.velocity, outcome.applied_acceleration,
                           outcome.event, outcome.event_index});
    }
};

// Outcome of flying one leg of a mission under some controller.
struct LegResult {
    Trajectory trajectory;  // samples for this leg only
    UAVState end_state;
    bool reached = false;   // collected at an item goal / returned at the depot
    Event final_event = Event::none;
};

}  // namespace uavplan
