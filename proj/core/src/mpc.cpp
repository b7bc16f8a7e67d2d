#include "uavplan/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uavplan/geometry.hpp"

namespace uavplan::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pure deceleration along -v, strongest admissible each slot.
Vec3 braking_accel(const Vec3& velocity, const Scenario& scenario) {
    const double speed = velocity.norm();
    if (speed == 0.0) return {};
    const double mag = std::min(scenario.a_max, speed / scenario.delta);
    return velocity * (-mag / speed);
}

struct BrakeCheck {
    bool stops_in_ball = false;
    std::vector<Vec3> accels;
};

// Simulate braking to rest; usable only if the swept path stays legal and the
// stop point is inside the collection ball of the goal.
BrakeCheck braking_plan(const UAVState& state, const Vec3& goal, const Scenario& scenario) {
    BrakeCheck plan;
    Vec3 pos = state.position;
    Vec3 vel = state.velocity;
    for (int guard = 0; guard < 64; ++guard) {
        if (vel == Vec3{}) break;
        const Vec3 a = braking_accel(vel, scenario);
        const auto next = env::propagate(pos, vel, a, scenario);
        if (!env::in_bounds(next.position, scenario)) return {};
        if (env::check_collision(pos, next.position, scenario.obstacles)) return {};
        plan.accels.push_back(a);
        pos = next.position;
        vel = next.velocity;
    }
    plan.stops_in_ball = distance(pos, goal) <= scenario.epsilon;
    return plan;
}

}  // namespace

Rollout roll_out(const UAVState& state, const std::vector<Vec3>& accels,
                 const Scenario& scenario) {
    Rollout r;
    r.positions.reserve(accels.size());
    r.velocities.reserve(accels.size());
    r.accels.reserve(accels.size());
    r.min_clearance = env::min_clearance(state.position, scenario.obstacles);

    Vec3 pos = state.position;
    Vec3 vel = state.velocity;
    for (const Vec3& a : accels) {
        const auto next = env::propagate(pos, vel, a, scenario);
        if (!env::in_bounds(next.position, scenario) ||
            env::check_collision(pos, next.position, scenario.obstacles)) {
            r.feasible = false;
        }
        pos = next.position;
        vel = next.velocity;
        r.positions.push_back(pos);
        r.velocities.push_back(vel);
        r.accels.push_back(next.applied_acceleration);
        r.min_clearance = std::min(r.min_clearance, env::min_clearance(pos, scenario.obstacles));
        if (!r.feasible) break;
    }
    return r;
}

double mpc_cost(const Rollout& rollout, const Vec3& goal, const Scenario& scenario,
                const MPCConfig& cfg) {
    if (!rollout.feasible) return kInf;
    if (rollout.positions.empty()) return kInf;

    double cost = cfg.w_goal * distance(rollout.positions.back(), goal);
    for (const Vec3& a : rollout.accels) cost += cfg.w_effort * a.norm_squared();
    for (const Vec3& p : rollout.positions) {
        const double c = env::min_clearance(p, scenario.obstacles);
        if (c < cfg.proximity_margin) {
            const double gap = cfg.proximity_margin - c;
            cost += cfg.w_prox * gap * gap;
        }
    }
    if (distance(rollout.positions.back(), goal) <= 2.0 * scenario.epsilon)
        cost += cfg.w_brake * rollout.velocities.back().norm_squared();
    return cost;
}

Vec3 plan_step(const UAVState& state, const Vec3& goal, const Scenario& scenario,
               const MPCConfig& cfg, Rng& rng) {
    const std::size_t H = cfg.horizon;
    const std::size_t n_elite = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(cfg.elite_fraction *
                                               static_cast<double>(cfg.candidates))));

    std::vector<double> mean(3 * H, 0.0);
    std::vector<double> stddev(3 * H, 0.5 * scenario.a_max);
    const double std_floor = 0.02 * scenario.a_max;

    double best_cost = kInf;
    std::vector<Vec3> best_seq;
    double best_clearance = -kInf;
    std::vector<Vec3> best_clearance_seq;

    std::vector<Vec3> seq(H);
    std::vector<std::pair<double, std::size_t>> ranked;
    std::vector<std::vector<Vec3>> pool(cfg.candidates);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        ranked.clear();
        for (std::size_t c = 0; c < cfg.candidates; ++c) {
            for (std::size_t t = 0; t < H; ++t) {
                for (std::size_t ax = 0; ax < 3; ++ax) {
                    // Candidate 0 carries the mean so the incumbent survives.
                    const double draw =
                        c == 0 ? mean[3 * t + ax]
                               : rng.normal(mean[3 * t + ax], stddev[3 * t + ax]);
                    seq[t][ax] = std::clamp(draw, -scenario.a_max, scenario.a_max);
                }
            }
            const Rollout r = roll_out(state, seq, scenario);
            const double cost = mpc_cost(r, goal, scenario, cfg);
            pool[c] = seq;
            if (cost < best_cost) {
                best_cost = cost;
                best_seq = seq;
            }
            if (r.min_clearance > best_clearance) {
                best_clearance = r.min_clearance;
                best_clearance_seq = seq;
            }
            if (cost < kInf) ranked.emplace_back(cost, c);
        }
        if (ranked.empty()) continue;  // nothing feasible to refit on

        std::sort(ranked.begin(), ranked.end());
        const std::size_t take = std::min(n_elite, ranked.size());
        for (std::size_t t = 0; t < H; ++t) {
            for (std::size_t ax = 0; ax < 3; ++ax) {
                double mu = 0.0;
                for (std::size_t e = 0; e < take; ++e) mu += pool[ranked[e].second][t][ax];
                mu /= static_cast<double>(take);
                double var = 0.0;
                for (std::size_t e = 0; e < take; ++e) {
                    const double dv = pool[ranked[e].second][t][ax] - mu;
                    var += dv * dv;
                }
                var /= static_cast<double>(take);
                mean[3 * t + ax] = mu;
                stddev[3 * t + ax] = std::max(std_floor, std::sqrt(var));
            }
        }
    }

    if (best_cost < kInf) return best_seq.front();
    // Everything collided: steer by maximum clearance (documented fallback).
    return best_clearance_seq.empty() ? Vec3{} : best_clearance_seq.front();
}

LegResult run_mpc_leg(const UAVState& state, const Goal& goal, const Scenario& scenario,
                      const MPCConfig& cfg, std::size_t step_cap, Rng& rng) {
    LegResult leg;
    leg.trajectory.delta = scenario.delta;
    leg.end_state = state;

    // Already hovering inside the ball: zero-step collection.
    if (!goal.is_depot() && !state.collected[goal.item_index] &&
        env::check_collection(state, goal.position, scenario)) {
        leg.end_state.collected[goal.item_index] = true;
        leg.reached = true;
        leg.final_event = Event::collected;
        return leg;
    }

    bool braking = false;
    for (std::size_t step = 0; step < step_cap; ++step) {
        Vec3 action;
        if (!braking && distance(leg.end_state.position, goal.position) <=
                            2.0 * scenario.epsilon) {
            const BrakeCheck plan = braking_plan(leg.end_state, goal.position, scenario);
            if (plan.stops_in_ball) braking = true;
        }
        if (braking) {
            action = braking_accel(leg.end_state.velocity, scenario);
        } else {
            action = plan_step(leg.end_state, goal.position, scenario, cfg, rng);
        }

        const StepOutcome out = env::step(leg.end_state, action, scenario, goal);
        leg.trajectory.append_step(out);
        leg.end_state = out.next_state;

        if (out.event == Event::collected || out.event == Event::returned) {
            leg.reached = true;
            leg.final_event = out.event;
            return leg;
        }
        if (out.done) {  // collision or bounds exit
            leg.final_event = out.event;
            return leg;
        }
        if (braking && leg.end_state.velocity == Vec3{}) braking = false;  // stopped short
    }
    return leg;  // step cap exhausted, reported by the caller
}

}  // namespace uavplan::mpc
