#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uavplan/mission.hpp"
#include "uavplan/scenario_io.hpp"

namespace uavplan::runner {

// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMissionFailure = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitInternalError = 3;

struct RunConfig {
    std::string scheme = "all";  // lkh-ddpg | ddpg-random | mpc | all
    std::vector<std::uint64_t> seeds{0};
    std::string out_dir = ".";
    std::size_t jobs = 1;
    bool paper_rewards = false;  // scale_dist = 1 for strict reward fidelity
    bool reuse_policy = false;   // load a previously written policy file if present
    std::size_t sweep_obstacles = 4;
    ddpg::Hyperparams hp;
    mpc::MPCConfig mpc;
    tsp::LKParams lk;
};

// Writes `content` under `path` atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

// Canonical line-delimited metrics record for one mission.
std::string metrics_record(const mission::ComparisonRow& row);

// Executes the selected scheme(s) on one scenario file, writing trajectory
// CSVs, per-seed policies and training logs, metrics.jsonl and (for "all") a
// comparison table into out_dir. Returns an exit code.
int cmd_run(const std::string& scenario_path, const RunConfig& cfg, std::ostream& out,
            std::ostream& err);

// compare_schemes per K on generated scenarios; writes sweep.csv (long form)
// and sweep_agg.csv (per-K aggregates).
int cmd_sweep(const std::vector<std::size_t>& k_list, const std::vector<std::uint64_t>& seeds,
              io::ScenarioTemplate tpl, const RunConfig& cfg, std::ostream& out,
              std::ostream& err);

// Verifies a trajectory CSV against a scenario; prints the report.
int cmd_validate(const std::string& trajectory_path, const std::string& scenario_path,
                 std::ostream& out, std::ostream& err);

// Generates and writes a scenario file.
int cmd_generate(std::size_t K, std::size_t n_obstacles, std::uint64_t seed,
                 io::ScenarioTemplate tpl, const std::string& out_path, std::ostream& out,
                 std::ostream& err);

}  // namespace uavplan::runner
