#pragma once

#include <cstdint>

#include "uavplan/env.hpp"
#include "uavplan/rng.hpp"
#include "uavplan/trajectory.hpp"

namespace uavplan::mpc {

struct MPCConfig {
    std::size_t horizon = 8;         // prediction horizon, slots
    std::size_t candidates = 256;    // sampled acceleration sequences per iteration
    double elite_fraction = 0.1;
    std::size_t iterations = 5;      // cross-entropy refinement rounds
    double w_goal = 1.0;
    double w_effort = 1e-3;
    double w_prox = 0.5;
    double proximity_margin = 10.0;  // meters of desired obstacle clearance
    double w_brake = 1.0;            // terminal-speed penalty inside the braking zone
};

// Open-loop rollout of one candidate acceleration sequence, produced with
// env::propagate from a known start state (no events, no reward).
struct Rollout {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<Vec3> accels;   // post-clamp accelerations actually applied
    bool feasible = true;       // no segment collision, never out of bounds
    double min_clearance = 0.0;
};

Rollout roll_out(const UAVState& state, const std::vector<Vec3>& accels,
                 const Scenario& scenario);

// Finite-horizon cost: terminal distance to goal, control effort, quadratic
// proximity penalty below the margin, and (inside the 2*epsilon braking zone)
// terminal speed. Infeasible rollouts cost +infinity.
double mpc_cost(const Rollout& rollout, const Vec3& goal, const Scenario& scenario,
                const MPCConfig& cfg);

// Cross-entropy search over acceleration sequences; returns the first action
// of the best feasible sequence, or of the max-clearance candidate when every
// sample is infeasible. Deterministic for a fixed rng state.
Vec3 plan_step(const UAVState& state, const Vec3& goal, const Scenario& scenario,
               const MPCConfig& cfg, Rng& rng);

// Receding-horizon loop toward one goal: plan, apply the first action, repeat
// until the collection (or return) event fires or step_cap slots elapse. Once
// a pure braking maneuver is verified to stop inside the collection ball
// without collision, it is committed so the hover condition becomes reachable.
LegResult run_mpc_leg(const UAVState& state, const Goal& goal, const Scenario& scenario,
                      const MPCConfig& cfg, std::size_t step_cap, Rng& rng);

}  // namespace uavplan::mpc
