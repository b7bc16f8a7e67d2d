#include "uavplan/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uavplan/format.hpp"

namespace uavplan::runner {

namespace fs = std::filesystem;

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp);
        os << content;
        if (!os) throw std::runtime_error("atomic_write: write failed for " + tmp);
    }
    fs::rename(tmp, path);
}

std::string metrics_record(const mission::ComparisonRow& row) {
    nlohmann::ordered_json j;
    j["scheme"] = row.scheme;
    j["K"] = row.K;
    j["seed"] = row.seed;
    j["mission_time_s"] = row.mission_time;
    j["success"] = row.success;
    j["tour_length_m"] = row.tour_length;
    return j.dump();
}

namespace {

bool scheme_selected(const std::string& selector, const char* scheme) {
    return selector == "all" || selector == scheme;
}

mission::ComparisonRow row_of(const mission::MissionResult& r, std::size_t K,
                              std::uint64_t seed) {
    return {r.scheme, K, seed, r.mission_time, r.returned && r.failure.empty(), r.tour_length};
}

// Runs `count` tasks over at most `jobs` threads. Tasks must not touch shared
// state except their own result slot.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct SeedRun {
    std::vector<mission::ComparisonRow> rows;
    std::vector<std::pair<std::string, Trajectory>> trajectories;  // file name, data
    std::string policy_path;
    ddpg::PolicyParameters policy;
    bool has_policy = false;
    ddpg::TrainingLog log;
    bool has_log = false;
};

SeedRun run_one_seed(const Scenario& scenario, std::uint64_t seed, const RunConfig& cfg) {
    SeedRun out;
    const std::size_t K = scenario.item_count();
    const bool want_lkh = scheme_selected(cfg.scheme, mission::kSchemeLkhDdpg);
    const bool want_random = scheme_selected(cfg.scheme, mission::kSchemeDdpgRandom);
    const bool want_mpc = scheme_selected(cfg.scheme, mission::kSchemeMpc);

    ddpg::Hyperparams hp = cfg.hp;
    hp.seed = seed;
    if (cfg.paper_rewards) hp.reward_scale_dist = 1.0;

    const auto dm = tsp::distance_matrix(scenario.depot, scenario.items);
    const tsp::Tour lk_order = tsp::solve_lk(dm, seed, cfg.lk);

    if (want_lkh || want_random) {
        const std::string policy_file =
            (fs::path(cfg.out_dir) / ("policy_seed" + std::to_string(seed) + ".bin")).string();
        bool loaded = false;
        if (cfg.reuse_policy && fs::exists(policy_file)) {
            out.policy = ddpg::load_policy(policy_file);
            loaded = out.policy.scenario_hash == scenario_fingerprint(scenario);
        }
        if (!loaded) {
            auto trained = ddpg::train(scenario, lk_order, hp);
            out.policy = std::move(trained.policy);
            out.log = std::move(trained.log);
            out.has_log = true;
        }
        out.has_policy = true;
        out.policy_path = policy_file;

        if (want_lkh) {
            auto r = mission::run_lkh_ddpg(scenario, hp, &out.policy, cfg.lk);
            out.rows.push_back(row_of(r, K, seed));
            out.trajectories.emplace_back(
                "trajectory_lkh-ddpg_seed" + std::to_string(seed) + ".csv",
                std::move(r.trajectory));
        }
        if (want_random) {
            auto r = mission::run_ddpg_random_order(scenario, hp, seed, &out.policy);
            out.rows.push_back(row_of(r, K, seed));
            out.trajectories.emplace_back(
                "trajectory_ddpg-random_seed" + std::to_string(seed) + ".csv",
                std::move(r.trajectory));
        }
    }
    if (want_mpc) {
        auto r = mission::run_mpc_mission(scenario, cfg.mpc, lk_order, seed, hp.leg_cap_factor);
        out.rows.push_back(row_of(r, K, seed));
        out.trajectories.emplace_back("trajectory_mpc_seed" + std::to_string(seed) + ".csv",
                                      std::move(r.trajectory));
    }
    return out;
}

std::string comparison_csv(const std::vector<mission::ComparisonRow>& rows) {
    std::string out = "scheme,K,seed,mission_time_s,success,tour_length_m\n";
    for (const auto& r : rows) {
        out += r.scheme;
        out += ',' + std::to_string(r.K) + ',' + std::to_string(r.seed) + ',';
        append_double(out, r.mission_time);
        out += ',';
        out += r.success ? '1' : '0';
        out += ',';
        append_double(out, r.tour_length);
        out += '\n';
    }
    return out;
}

std::string aggregate_csv(const std::vector<mission::ComparisonRow>& rows,
                          bool group_by_k) {
    struct Key {
        std::string scheme;
        std::size_t K;
        bool operator<(const Key& o) const {
            return K != o.K ? K < o.K : scheme < o.scheme;
        }
    };
    std::map<Key, std::vector<const mission::ComparisonRow*>> groups;
    for (const auto& r : rows) groups[{r.scheme, group_by_k ? r.K : 0}].push_back(&r);

    std::string out = group_by_k ? "scheme,K,runs,successes,mean_time_s,min_time_s,max_time_s\n"
                                 : "scheme,runs,successes,mean_time_s,min_time_s,max_time_s\n";
    for (const auto& [key, members] : groups) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        std::size_t ok = 0;
        for (const auto* r : members) {
            if (!r->success) continue;
            if (ok == 0) {
                lo = hi = r->mission_time;
            } else {
                lo = std::min(lo, r->mission_time);
                hi = std::max(hi, r->mission_time);
            }
            sum += r->mission_time;
            ++ok;
        }
        out += key.scheme;
        if (group_by_k) out += ',' + std::to_string(key.K);
        out += ',' + std::to_string(members.size()) + ',' + std::to_string(ok) + ',';
        append_double(out, ok ? sum / static_cast<double>(ok) : 0.0);
        out += ',';
        append_double(out, lo);
        out += ',';
        append_double(out, hi);
        out += '\n';
    }
    return out;
}

}  // namespace

int cmd_run(const std::string& scenario_path, const RunConfig& cfg, std::ostream& out,
            std::ostream& err) {
    Scenario scenario;
    try {
        scenario = io::load_scenario(scenario_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
    if (cfg.scheme != "all" && cfg.scheme != mission::kSchemeLkhDdpg &&
        cfg.scheme != mission::kSchemeDdpgRandom && cfg.scheme != mission::kSchemeMpc) {
        err << "error: unknown scheme '" << cfg.scheme << "'\n";
        return kExitInvalidInput;
    }
    if (cfg.seeds.empty()) {
        err << "error: at least one seed required\n";
        return kExitInvalidInput;
    }

    try {
        fs::create_directories(cfg.out_dir);
        std::vector<SeedRun> runs(cfg.seeds.size());
        parallel_for(cfg.seeds.size(), cfg.jobs,
                     [&](std::size_t i) { runs[i] = run_one_seed(scenario, cfg.seeds[i], cfg); });

        std::vector<mission::ComparisonRow> rows;
        std::string metrics;
        for (auto& run : runs) {
            for (auto& [name, traj] : run.trajectories)
                mission::save_trajectory_csv(traj, (fs::path(cfg.out_dir) / name).string());
            if (run.has_policy) ddpg::save_policy(run.policy, run.policy_path);
            if (run.has_log) {
                const std::string log_path =
                    run.policy_path.substr(0, run.policy_path.size() - 4) + "_training.csv";
                ddpg::save_training_log_csv(run.log, log_path);
            }
            for (const auto& row : run.rows) {
                rows.push_back(row);
                metrics += metrics_record(row) + "\n";
            }
        }
        atomic_write((fs::path(cfg.out_dir) / "metrics.jsonl").string(), metrics);
        if (cfg.scheme == "all")
            atomic_write((fs::path(cfg.out_dir) / "comparison.csv").string(),
                         comparison_csv(rows) );

        bool all_ok = true;
        for (const auto& row : rows) {
            out << row.scheme << " seed " << row.seed << ": "
                << (row.success ? "success" : "FAILED") << ", "
                << double_str(row.mission_time) << " s\n";
            all_ok = all_ok && row.success;
        }
        return all_ok ? kExitOk : kExitMissionFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

int cmd_sweep(const std::vector<std::size_t>& k_list, const std::vector<std::uint64_t>& seeds,
              io::ScenarioTemplate tpl, const RunConfig& cfg, std::ostream& out,
              std::ostream& err) {
    if (k_list.empty() || seeds.empty()) {
        err << "error: sweep needs nonempty K list and seeds\n";
        return kExitInvalidInput;
    }
    try {
        fs::create_directories(cfg.out_dir);
        std::vector<mission::ComparisonTable> tables(k_list.size());
        parallel_for(k_list.size(), cfg.jobs, [&](std::size_t i) {
            const std::size_t K = k_list[i];
            // One scenario per K; layout seeded independently of the run seeds.
            const std::uint64_t scenario_seed = seeds.front() + 1000003ull * K;
            ddpg::Hyperparams hp = cfg.hp;
            if (cfg.paper_rewards) hp.reward_scale_dist = 1.0;
            const Scenario scenario =
                io::generate_scenario(K, cfg.sweep_obstacles, scenario_seed, tpl);
            tables[i] = mission::compare_schemes(scenario, seeds, hp, cfg.mpc);
        });

        std::vector<mission::ComparisonRow> rows;
        for (const auto& t : tables)
            rows.insert(rows.end(), t.rows.begin(), t.rows.end());

        std::string sweep = "scheme,K,seed,mission_time_s,success\n";
        for (const auto& r : rows) {
            sweep += r.scheme;
            sweep += ',' + std::to_string(r.K) + ',' + std::to_string(r.seed) + ',';
            append_double(sweep, r.mission_time);
            sweep += ',';
            sweep += r.success ? '1' : '0';
            sweep += '\n';
        }
        atomic_write((fs::path(cfg.out_dir) / "sweep.csv").string(), sweep);
        atomic_write((fs::path(cfg.out_dir) / "sweep_agg.csv").string(),
                     aggregate_csv(rows, true));
        out << "sweep complete: " << rows.size() << " runs over " << k_list.size()
            << " K values\n";
        bool all_ok = true;
        for (const auto& r : rows) all_ok = all_ok && r.success;
        return all_ok ? kExitOk : kExitMissionFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

int cmd_validate(const std::string& trajectory_path, const std::string& scenario_path,
                 std::ostream& out, std::ostream& err) {
    Scenario scenario;
    Trajectory trajectory;
    try {
        scenario = io::load_scenario(scenario_path);
        trajectory = mission::load_trajectory_csv(trajectory_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
    try {
        const auto result = mission::mission_result_from_trajectory(std::move(trajectory), scenario);
        const auto report = mission::verify_mission(result, scenario);
        out << report.to_string();
        return report.ok() ? kExitOk : kExitMissionFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

int cmd_generate(std::size_t K, std::size_t n_obstacles, std::uint64_t seed,
                 io::ScenarioTemplate tpl, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
    try {
        const Scenario scenario = io::generate_scenario(K, n_obstacles, seed, tpl);
        if (!out_path.empty()) {
            if (fs::path(out_path).has_parent_path())
                fs::create_directories(fs::path(out_path).parent_path());
            atomic_write(out_path, io::scenario_to_json(scenario));
            out << out_path << '\n';
        } else {
            out << io::scenario_to_json(scenario);
        }
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

}  // namespace uavplan::runner
