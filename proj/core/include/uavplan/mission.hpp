#pragma once

#include <string>
#include <vector>

#include "uavplan/ddpg.hpp"
#include "uavplan/mpc.hpp"
#include "uavplan/trajectory.hpp"
#include "uavplan/tsp.hpp"

namespace uavplan::mission {

inline constexpr const char* kSchemeLkhDdpg = "lkh-ddpg";
inline constexpr const char* kSchemeDdpgRandom = "ddpg-random";
inline constexpr const char* kSchemeMpc = "mpc";

struct MissionResult {
    Trajectory trajectory;
    double mission_time = 0.0;            // slots * delta, seconds
    std::vector<bool> collected;
    bool returned = false;
    std::vector<double> per_leg_times;    // K item legs plus the depot-return leg
    std::string scheme;
    tsp::Tour order;                      // visiting order actually flown
    double tour_length = 0.0;             // Euclidean length of that order
    std::string failure;                  // empty on success, diagnostic otherwise
};

struct VerifyViolation {
    std::string what;
    std::uint64_t slot = 0;  // 0 = not tied to a specific slot
};

struct VerifyReport {
    std::vector<VerifyViolation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Flies one leg greedily under the frozen actor (no exploration noise).
LegResult run_policy_leg(const UAVState& state, const Goal& goal, const Scenario& scenario,
                         const ddpg::PolicyParameters& policy, const ddpg::Hyperparams& hp);

// LKH order, then the goal-conditioned policy leg by leg, then the return
// leg. Trains a fresh policy when none is supplied.
MissionResult run_lkh_ddpg(const Scenario& scenario, const ddpg::Hyperparams& hp,
                           const ddpg::PolicyParameters* policy = nullptr,
                           const tsp::LKParams& lk = {});

// Same execution with a uniformly random visiting order drawn from order_seed.
MissionResult run_ddpg_random_order(const Scenario& scenario, const ddpg::Hyperparams& hp,
                                    std::uint64_t order_seed,
                                    const ddpg::PolicyParameters* policy = nullptr);

MissionResult run_mpc_mission(const Scenario& scenario, const mpc::MPCConfig& cfg,
                              const tsp::Tour& order, std::uint64_t seed,
                              double leg_cap_factor = 4.0);

// Checks the recorded trajectory against the scenario: every item collected
// exactly once under the hover-to-collect rule, final hover at the depot,
// kinematic bounds, collision-free segments, in-bounds positions, and
// slot-to-slot consistency with the discrete dynamics.
VerifyReport verify_mission(const MissionResult& result, const Scenario& scenario);

struct ComparisonRow {
    std::string scheme;
    std::size_t K = 0;
    std::uint64_t seed = 0;
    double mission_time = 0.0;
    bool success = false;
    double tour_length = 0.0;
};

struct SchemeAggregate {
    std::string scheme;
    double mean_time = 0.0;  // over successful runs
    double min_time = 0.0;
    double max_time = 0.0;
    double success_rate = 0.0;
    std::size_t runs = 0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<SchemeAggregate> aggregates;
};

// Runs all three schemes per seed. One policy is trained per seed and shared
// by both DDPG schemes so the comparison isolates the visiting order; MPC
// flies the same LKH order.
ComparisonTable compare_schemes(const Scenario& scenario,
                                const std::vector<std::uint64_t>& seeds,
                                const ddpg::Hyperparams& hp, const mpc::MPCConfig& mpc_cfg);

// Trajectory CSV: header n,x,y,z,vx,vy,vz,ax,ay,az,event; values in shortest
// round-trip form so files reload bit-exactly.
void save_trajectory_csv(const Trajectory& trajectory, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);

// Wraps a bare trajectory (e.g. one reloaded from CSV) for verification;
// collection state and the return flag are derived from the recorded events.
MissionResult mission_result_from_trajectory(Trajectory trajectory, const Scenario& scenario);

}  // namespace uavplan::mission
