#include "uavplan/mission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "uavplan/format.hpp"
#include "uavplan/rng.hpp"

namespace uavplan::mission {

namespace {

std::vector<Goal> goals_for_order(const Scenario& scenario, const tsp::Tour& order) {
    std::vector<Goal> goals;
    for (std::size_t i = 1; i < order.order.size(); ++i)
        goals.push_back(Goal::item(scenario, order.order[i] - 1));
    goals.push_back(Goal::depot(scenario));
    return goals;
}

std::string leg_failure_message(const Goal& goal, const LegResult& leg, std::size_t cap) {
    std::ostringstream os;
    os << "leg to " << (goal.is_depot() ? "depot" : "item " + std::to_string(goal.item_index))
       << " failed: ";
    if (leg.final_event == Event::collided) os << "collision";
    else if (leg.final_event == Event::out_of_bounds) os << "bounds exit";
    else os << "step cap (" << cap << " slots) exhausted";
    if (!leg.trajectory.samples.empty())
        os << " at slot " << leg.trajectory.samples.back().slot;
    return os.str();
}

// Zero-step completion when the leg goal is already satisfied at leg start.
bool leg_done_at_start(UAVState& state, const Goal& goal, const Scenario& scenario,
                       LegResult& leg) {
    if (!goal.is_depot() && !state.collected[goal.item_index] &&
        env::check_collection(state, goal.position, scenario)) {
        state.collected[goal.item_index] = true;
        leg.end_state = state;
        leg.reached = true;
        leg.final_event = Event::collected;
        return true;
    }
    if (goal.is_depot() && state.all_collected() &&
        env::check_collection(state, scenario.depot, scenario)) {
        leg.end_state = state;
        leg.reached = true;
        leg.final_event = Event::returned;
        return true;
    }
    return false;
}

template <typename LegRunner>
MissionResult run_mission(const Scenario& scenario, const tsp::Tour& order,
                          const std::string& scheme, LegRunner&& run_leg) {
    scenario.validate_or_throw();
    const auto check = tsp::validate_tour(order, scenario.item_count());
    if (!check.ok) throw std::invalid_argument("run_mission: invalid order: " + check.violation);

    MissionResult res;
    res.scheme = scheme;
    res.order = order;
    res.trajectory.delta = scenario.delta;
    const auto dm = tsp::distance_matrix(scenario.depot, scenario.items);
    res.tour_length = tsp::tour_length(order, dm);

    UAVState state = UAVState::initial(scenario);
    for (const Goal& goal : goals_for_order(scenario, order)) {
        auto [leg, cap] = run_leg(state, goal);
        res.per_leg_times.push_back(leg.trajectory.duration());
        res.trajectory.samples.insert(res.trajectory.samples.end(),
                                      leg.trajectory.samples.begin(),
                                      leg.trajectory.samples.end());
        state = leg.end_state;
        if (!leg.reached) {
            res.failure = leg_failure_message(goal, leg, cap);
            break;
        }
        if (leg.final_event == Event::returned) res.returned = true;
    }
    res.collected = state.collected;
    res.mission_time = res.trajectory.duration();
    return res;
}

}  // namespace

LegResult run_policy_leg(const UAVState& state, const Goal& goal, const Scenario& scenario,
                         const ddpg::PolicyParameters& policy, const ddpg::Hyperparams& hp) {
    LegResult leg;
    leg.trajectory.delta = scenario.delta;
    leg.end_state = state;

    UAVState cur = state;
    if (leg_done_at_start(cur, goal, scenario, leg)) return leg;

    const std::size_t cap = ddpg::leg_step_cap(distance(state.position, goal.position),
                                               scenario, hp.leg_cap_factor);
    const RewardConfig rcfg{hp.reward_scale_dist};
    for (std::size_t i = 0; i < cap; ++i) {
        const StateVector s = env::encode_state(cur, goal.position, scenario, policy.n_obs);
        const Vec3 action = ddpg::actor_forward(policy.actor, s);
        const StepOutcome out = env::step(cur, action, scenario, goal, rcfg);
        leg.trajectory.append_step(out);
        cur = out.next_state;
        leg.end_state = cur;
        if (out.event == Event::collected || out.event == Event::returned) {
            leg.reached = true;
            leg.final_event = out.event;
            return leg;
        }
        if (out.done) {
            leg.final_event = out.event;
            return leg;
        }
    }
    return leg;
}

namespace {

MissionResult run_policy_mission(const Scenario& scenario, const tsp::Tour& order,
                                 const std::string& scheme, const ddpg::Hyperparams& hp,
                                 const ddpg::PolicyParameters* policy) {
    ddpg::PolicyParameters trained;
    if (!policy) {
        trained = ddpg::train(scenario, order, hp).policy;
        policy = &trained;
    }
    return run_mission(scenario, order, scheme,
                       [&](const UAVState& state, const Goal& goal) {
                           const std::size_t cap = ddpg::leg_step_cap(
                               distance(state.position, goal.position), scenario,
                               hp.leg_cap_factor);
                           return std::pair{run_policy_leg(state, goal, scenario, *policy, hp),
                                            cap};
                       });
}

}  // namespace

MissionResult run_lkh_ddpg(const Scenario& scenario, const ddpg::Hyperparams& hp,
                           const ddpg::PolicyParameters* policy, const tsp::LKParams& lk) {
    const auto dm = tsp::distance_matrix(scenario.depot, scenario.items);
    const tsp::Tour order = tsp::solve_lk(dm, hp.seed, lk);
    return run_policy_mission(scenario, order, kSchemeLkhDdpg, hp, policy);
}

MissionResult run_ddpg_random_order(const Scenario& scenario, const ddpg::Hyperparams& hp,
                                    std::uint64_t order_seed,
                                    const ddpg::PolicyParameters* policy) {
    Rng rng(order_seed);
    tsp::Tour order;
    order.order.push_back(0);
    std::vector<std::size_t> items(scenario.item_count());
    for (std::size_t i = 0; i < items.size(); ++i) items[i] = i + 1;
    rng.shuffle(items);
    order.order.insert(order.order.end(), items.begin(), items.end());
    return run_policy_mission(scenario, order, kSchemeDdpgRandom, hp, policy);
}

MissionResult run_mpc_mission(const Scenario& scenario, const mpc::MPCConfig& cfg,
                              const tsp::Tour& order, std::uint64_t seed,
                              double leg_cap_factor) {
    Rng rng(seed);
    return run_mission(scenario, order, kSchemeMpc,
                       [&](const UAVState& state, const Goal& goal) {
                           const std::size_t cap = ddpg::leg_step_cap(
                               distance(state.position, goal.position), scenario,
                               leg_cap_factor);
                           return std::pair{
                               mpc::run_mpc_leg(state, goal, scenario, cfg, cap, rng), cap};
                       });
}

std::string VerifyReport::to_string() const {
    if (violations.empty()) return "ok: 0 violations\n";
    std::ostringstream os;
    os << violations.size() << " violation(s):\n";
    for (const auto& v : violations) {
        os << "  slot " << v.slot << ": " << v.what << '\n';
    }
    return os.str();
}

VerifyReport verify_mission(const MissionResult& result, const Scenario& scenario) {
    VerifyReport report;
    auto fail = [&report](std::uint64_t slot, std::string what) {
        report.violations.push_back({std::move(what), slot});
    };

    const auto& samples = result.trajectory.samples;
    const double tol = 1e-9;
    const std::size_t K = scenario.item_count();

    if (result.trajectory.delta != scenario.delta)
        fail(0, "trajectory delta does not match the scenario");
    if (std::abs(result.mission_time - result.trajectory.duration()) > tol)
        fail(0, "mission_time is not slot count times delta");

    std::vector<std::size_t> collect_count(K, 0);
    Vec3 prev_pos = scenario.depot;
    Vec3 prev_vel{};

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const std::uint64_t slot = s.slot;
        if (slot != i + 1) fail(slot, "slots must be consecutive from 1");

        // Slot-to-slot consistency with the discrete dynamics.
        const auto p = env::propagate(prev_pos, prev_vel, s.acceleration, scenario);
        if (distance(p.position, s.position) > tol || distance(p.velocity, s.velocity) > tol)
            fail(slot, "sample inconsistent with the discrete dynamics");

        if (s.velocity.norm() > scenario.v_max + tol) fail(slot, "speed exceeds v_max");
        if (s.acceleration.norm() > scenario.a_max + tol) fail(slot, "acceleration exceeds a_max");

        if (!env::in_bounds(s.position, scenario)) fail(slot, "position out of bounds");
        if (auto hit = env::check_collision(prev_pos, s.position, scenario.obstacles))
            fail(slot, "segment intersects obstacle " + std::to_string(*hit));

        if (s.event == Event::collected) {
            if (s.event_index < 0 || static_cast<std::size_t>(s.event_index) >= K) {
                fail(slot, "collected event with invalid item index");
            } else {
                const std::size_t item = static_cast<std::size_t>(s.event_index);
                if (++collect_count[item] > 1)
                    fail(slot, "item " + std::to_string(item) + " collected more than once");
                if (!(s.velocity == Vec3{}))
                    fail(slot, "collection while not hovering");
                if (distance(s.position, scenario.items[item]) > scenario.epsilon)
                    fail(slot, "collection outside the epsilon threshold");
            }
        }
        if (s.event == Event::returned && i + 1 != samples.size())
            fail(slot, "samples continue after the returned event");

        prev_pos = s.position;
        prev_vel = s.velocity;
    }

    for (std::size_t k = 0; k < K; ++k) {
        if (collect_count[k] == 0)
            fail(0, "item " + std::to_string(k) + " never collected");
        if (k < result.collected.size() && result.collected[k] != (collect_count[k] > 0))
            fail(0, "collected bitmap disagrees with trajectory events for item " +
                        std::to_string(k));
    }

    // Final hover at the depot (the return condition, relaxed to the
    // collection threshold).
    const bool all_collected =
        std::all_of(collect_count.begin(), collect_count.end(),
                    [](std::size_t c) { return c == 1; });
    const bool final_hover = !samples.empty() && samples.back().velocity == Vec3{} &&
                             distance(samples.back().position, scenario.depot) <=
                                 scenario.epsilon;
    if (!(all_collected && final_hover)) {
        const std::uint64_t slot = samples.empty() ? 0 : samples.back().slot;
        fail(slot, "mission does not end hovering at the depot with all items collected");
    }
    if (result.returned && !(all_collected && final_hover))
        fail(0, "result claims returned but the trajectory does not support it");

    return report;
}

ComparisonTable compare_schemes(const Scenario& scenario,
                                const std::vector<std::uint64_t>& seeds,
                                const ddpg::Hyperparams& hp, const mpc::MPCConfig& mpc_cfg) {
    if (seeds.empty()) throw std::invalid_argument("compare_schemes: need at least one seed");

    ComparisonTable table;
    const auto dm = tsp::distance_matrix(scenario.depot, scenario.items);
    const std::size_t K = scenario.item_count();

    for (std::uint64_t seed : seeds) {
        ddpg::Hyperparams hp_seed = hp;
        hp_seed.seed = seed;
        const tsp::Tour lk_order = tsp::solve_lk(dm, seed);

        // One policy per seed, shared by both DDPG schemes.
        const ddpg::PolicyParameters policy = ddpg::train(scenario, lk_order, hp_seed).policy;

        const MissionResult r_lkh = run_lkh_ddpg(scenario, hp_seed, &policy);
        const MissionResult r_rand = run_ddpg_random_order(scenario, hp_seed, seed, &policy);
        const MissionResult r_mpc = run_mpc_mission(scenario, mpc_cfg, lk_order, seed);

        for (const MissionResult* r : {&r_lkh, &r_rand, &r_mpc}) {
            table.rows.push_back({r->scheme, K, seed, r->mission_time,
                                  r->returned && r->failure.empty(), r->tour_length});
        }
    }

    for (const char* scheme : {kSchemeLkhDdpg, kSchemeDdpgRandom, kSchemeMpc}) {
        SchemeAggregate agg;
        agg.scheme = scheme;
        double sum = 0.0;
        std::size_t ok = 0;
        agg.min_time = std::numeric_limits<double>::infinity();
        agg.max_time = 0.0;
        for (const auto& row : table.rows) {
            if (row.scheme != scheme) continue;
            ++agg.runs;
            if (!row.success) continue;
            ++ok;
            sum += row.mission_time;
            agg.min_time = std::min(agg.min_time, row.mission_time);
            agg.max_time = std::max(agg.max_time, row.mission_time);
        }
        agg.success_rate = agg.runs ? static_cast<double>(ok) / static_cast<double>(agg.runs) : 0.0;
        agg.mean_time = ok ? sum / static_cast<double>(ok) : 0.0;
        if (ok == 0) agg.min_time = 0.0;
        table.aggregates.push_back(agg);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Trajectory CSV

namespace {

std::string event_cell(const TrajectorySample& s) {
    if (s.event == Event::collected) return "collected:" + std::to_string(s.event_index);
    return event_name(s.event);
}

void parse_event_cell(const std::string& cell, TrajectorySample& s) {
    if (cell.rfind("collected:", 0) == 0) {
        s.event = Event::collected;
        s.event_index = std::stoi(cell.substr(10));
        return;
    }
    for (Event e : {Event::none, Event::collided, Event::out_of_bounds, Event::returned}) {
        if (cell == event_name(e)) {
            s.event = e;
            return;
        }
    }
    throw std::runtime_error("trajectory csv: unknown event '" + cell + "'");
}

}  // namespace

void save_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
    std::string out = "n,x,y,z,vx,vy,vz,ax,ay,az,event\n";
    for (const auto& s : trajectory.samples) {
        out += std::to_string(s.slot);
        for (const Vec3* v : {&s.position, &s.velocity, &s.acceleration}) {
            for (std::size_t i = 0; i < 3; ++i) {
                out += ',';
                append_double(out, (*v)[i]);
            }
        }
        out += ',';
        out += event_cell(s);
        out += '\n';
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_trajectory_csv: cannot open " + path);
    os << out;
    if (!os) throw std::runtime_error("save_trajectory_csv: write failed for " + path);
}

MissionResult mission_result_from_trajectory(Trajectory trajectory, const Scenario& scenario) {
    MissionResult res;
    res.trajectory = std::move(trajectory);
    res.trajectory.delta = scenario.delta;
    res.mission_time = res.trajectory.duration();
    res.collected.assign(scenario.item_count(), false);
    for (const auto& s : res.trajectory.samples) {
        if (s.event == Event::collected && s.event_index >= 0 &&
            static_cast<std::size_t>(s.event_index) < res.collected.size())
            res.collected[s.event_index] = true;
        if (s.event == Event::returned) res.returned = true;
    }
    // A mission may also end hovering at the depot without an explicit event.
    if (!res.returned && !res.trajectory.samples.empty()) {
        const auto& last = res.trajectory.samples.back();
        res.returned = std::all_of(res.collected.begin(), res.collected.end(),
                                   [](bool b) { return b; }) &&
                       last.velocity == Vec3{} &&
                       distance(last.position, scenario.depot) <= scenario.epsilon;
    }
    return res;
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_trajectory_csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "n,x,y,z,vx,vy,vz,ax,ay,az,event")
        throw std::runtime_error("load_trajectory_csv: bad or missing header in " + path);

    Trajectory t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 11)
            throw std::runtime_error("load_trajectory_csv: line " + std::to_string(lineno) +
                                     ": expected 11 columns");
        TrajectorySample s;
        try {
            s.slot = std::stoull(cells[0]);
            double* fields[9] = {&s.position.x, &s.position.y, &s.position.z,
                                 &s.velocity.x, &s.velocity.y, &s.velocity.z,
                                 &s.acceleration.x, &s.acceleration.y, &s.acceleration.z};
            for (std::size_t i = 0; i < 9; ++i) *fields[i] = std::stod(cells[i + 1]);
        } catch (const std::exception&) {
            throw std::runtime_error("load_trajectory_csv: line " + std::to_string(lineno) +
                                     ": malformed number");
        }
        parse_event_cell(cells[10], s);
        t.samples.push_back(s);
    }
    return t;
}

}  // namespace uavplan::mission
