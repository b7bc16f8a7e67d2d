// uavplan: scenario generation, mission runs, K-sweeps and trajectory
// validation for the UAV logistics-collection planner.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavplan/runner.hpp"

namespace {

using uavplan::runner::RunConfig;

void add_common_run_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--scheme", cfg.scheme, "lkh-ddpg | ddpg-random | mpc | all")
        ->envname("UAVPLAN_SCHEME");
    cmd->add_option("--seeds", cfg.seeds, "Run seeds (repeat or comma-separate)")
        ->delimiter(',')
        ->envname("UAVPLAN_SEEDS");
    cmd->add_option("--out", cfg.out_dir, "Output directory")->envname("UAVPLAN_OUT");
    cmd->add_option("--jobs", cfg.jobs, "Parallel independent runs")->envname("UAVPLAN_JOBS");
    cmd->add_flag("--paper-rewards", cfg.paper_rewards,
                  "Unscaled distance rewards (scale_dist = 1)")
        ->envname("UAVPLAN_PAPER_REWARDS");
    cmd->add_flag("--reuse-policy", cfg.reuse_policy,
                  "Load a previously written policy file when present")
        ->envname("UAVPLAN_REUSE_POLICY");

    cmd->add_option("--episodes", cfg.hp.episodes, "Training episodes (M)")
        ->envname("UAVPLAN_EPISODES");
    cmd->add_option("--batch", cfg.hp.batch_size, "Replay batch size")
        ->envname("UAVPLAN_BATCH");
    cmd->add_option("--actor-lr", cfg.hp.actor_lr, "Actor learning rate")
        ->envname("UAVPLAN_ACTOR_LR");
    cmd->add_option("--critic-lr", cfg.hp.critic_lr, "Critic learning rate")
        ->envname("UAVPLAN_CRITIC_LR");
    cmd->add_option("--hidden", cfg.hp.hidden, "Hidden layer widths")
        ->delimiter(',')
        ->envname("UAVPLAN_HIDDEN");
    cmd->add_option("--n-obs", cfg.hp.n_obs, "Obstacle slots in the state encoding")
        ->envname("UAVPLAN_N_OBS");
    cmd->add_flag("--adam", cfg.hp.use_adam, "Adam updates instead of plain gradient steps")
        ->envname("UAVPLAN_ADAM");
    cmd->add_flag("!--no-shuffle-legs", cfg.hp.shuffle_legs,
                  "Disable per-episode leg order shuffling during training");
    cmd->add_flag("!--no-keep-best", cfg.hp.keep_best,
                  "Return the final networks instead of the best greedy checkpoint");

    cmd->add_option("--mpc-horizon", cfg.mpc.horizon, "MPC prediction horizon (slots)")
        ->envname("UAVPLAN_MPC_HORIZON");
    cmd->add_option("--mpc-candidates", cfg.mpc.candidates, "MPC candidate sequences")
        ->envname("UAVPLAN_MPC_CANDIDATES");
    cmd->add_option("--mpc-iterations", cfg.mpc.iterations, "MPC cross-entropy iterations")
        ->envname("UAVPLAN_MPC_ITERATIONS");

    cmd->add_option("--lk-restarts", cfg.lk.restarts, "Lin-Kernighan restarts")
        ->envname("UAVPLAN_LK_RESTARTS");
    cmd->add_option("--lk-depth", cfg.lk.max_depth, "Lin-Kernighan move depth")
        ->envname("UAVPLAN_LK_DEPTH");
    cmd->add_option("--lk-candidates", cfg.lk.candidates, "Lin-Kernighan candidate list size")
        ->envname("UAVPLAN_LK_CANDIDATES");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV logistics collection planner"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a scenario file");
    std::size_t gen_k = 4;
    std::size_t gen_obstacles = 6;
    std::uint64_t gen_seed = 0;
    std::string gen_template = "paper_default";
    std::string gen_out;
    gen->add_option("--items,-k", gen_k, "Number of items (K)")->envname("UAVPLAN_ITEMS");
    gen->add_option("--obstacles", gen_obstacles, "Number of obstacles")
        ->envname("UAVPLAN_OBSTACLES");
    gen->add_option("--seed", gen_seed, "Generation seed")->envname("UAVPLAN_SEED");
    gen->add_option("--template", gen_template, "paper_default | small_desk")
        ->envname("UAVPLAN_TEMPLATE");
    gen->add_option("--out", gen_out, "Output path (stdout when omitted)")
        ->envname("UAVPLAN_OUT");

    // run
    auto* run = app.add_subcommand("run", "Run mission scheme(s) on a scenario");
    std::string run_scenario;
    RunConfig run_cfg;
    run->add_option("--scenario", run_scenario, "Scenario JSON file")
        ->required()
        ->envname("UAVPLAN_SCENARIO");
    add_common_run_options(run, run_cfg);
    std::uint64_t run_seed_single = 0;
    auto* seed_opt = run->add_option("--seed", run_seed_single, "Single run seed")
                         ->envname("UAVPLAN_SEED");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Mission time versus K for all schemes");
    std::vector<std::size_t> sweep_k{2, 4, 6};
    std::string sweep_template = "small_desk";
    RunConfig sweep_cfg;
    sweep->add_option("--K", sweep_k, "Item counts to sweep")
        ->delimiter(',')
        ->envname("UAVPLAN_K");
    sweep->add_option("--template", sweep_template, "paper_default | small_desk")
        ->envname("UAVPLAN_TEMPLATE");
    sweep->add_option("--obstacles", sweep_cfg.sweep_obstacles,
                      "Obstacles per generated scenario")
        ->envname("UAVPLAN_OBSTACLES");
    add_common_run_options(sweep, sweep_cfg);

    // validate
    auto* validate = app.add_subcommand("validate", "Verify a trajectory against a scenario");
    std::string val_trajectory;
    std::string val_scenario;
    validate->add_option("--trajectory", val_trajectory, "Trajectory CSV")
        ->required()
        ->envname("UAVPLAN_TRAJECTORY");
    validate->add_option("--scenario", val_scenario, "Scenario JSON file")
        ->required()
        ->envname("UAVPLAN_SCENARIO");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : uavplan::runner::kExitInvalidInput;
    }

    try {
        if (gen->parsed()) {
            return uavplan::runner::cmd_generate(gen_k, gen_obstacles, gen_seed,
                                                 uavplan::io::parse_template(gen_template),
                                                 gen_out, std::cout, std::cerr);
        }
        if (run->parsed()) {
            if (seed_opt->count() > 0) run_cfg.seeds = {run_seed_single};
            return uavplan::runner::cmd_run(run_scenario, run_cfg, std::cout, std::cerr);
        }
        if (sweep->parsed()) {
            return uavplan::runner::cmd_sweep(sweep_k, sweep_cfg.seeds,
                                              uavplan::io::parse_template(sweep_template),
                                              sweep_cfg, std::cout, std::cerr);
        }
        if (validate->parsed()) {
            return uavplan::runner::cmd_validate(val_trajectory, val_scenario, std::cout,
                                                 std::cerr);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return uavplan::runner::kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return uavplan::runner::kExitInternalError;
    }
    return uavplan::runner::kExitInvalidInput;
}
