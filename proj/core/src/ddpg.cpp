#include "uavplan/ddpg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uavplan/format.hpp"

namespace uavplan::ddpg {

namespace {

thread_local NetScratch tl_scratch;

StateVector concat_state_action(const StateVector& s, const Vec3& a, double action_scale) {
    StateVector x;
    x.reserve(s.size() + 3);
    x.insert(x.end(), s.begin(), s.end());
    x.push_back(a.x / action_scale);
    x.push_back(a.y / action_scale);
    x.push_back(a.z / action_scale);
    return x;
}

}  // namespace

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[cursor_] = std::move(t);
        cursor_ = (cursor_ + 1) % capacity_;
    }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
        out.push_back(&data_[rng.uniform_int(data_.size())]);
    return out;
}

Vec3 actor_forward(const Network& actor, const StateVector& s) {
    if (s.size() != actor.input_size())
        throw std::invalid_argument("actor_forward: state size does not match input layer");
    if (actor.output_size() != 3)
        throw std::invalid_argument("actor_forward: actor must emit a 3D acceleration");
    forward(actor, s.data(), tl_scratch);
    const auto& y = tl_scratch.act.back();
    return {y[0], y[1], y[2]};
}

double critic_forward(const Network& critic, const StateVector& s, const Vec3& a) {
    if (s.size() + 3 != critic.input_size())
        throw std::invalid_argument("critic_forward: state/action size does not match input layer");
    const StateVector x = concat_state_action(s, a, critic.action_scale);
    forward(critic, x.data(), tl_scratch);
    return tl_scratch.act.back()[0];
}

std::vector<double> td_target(const std::vector<const Transition*>& batch,
                              const Network& target_actor, const Network& target_critic,
                              double gamma) {
    if (batch.empty()) throw std::invalid_argument("td_target: batch must be nonempty");
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition* t : batch) {
        double u = t->r;
        if (!t->done && gamma != 0.0) {
            const Vec3 a_next = actor_forward(target_actor, t->s_next);
            u += gamma * critic_forward(target_critic, t->s_next, a_next);
        }
        targets.push_back(u);
    }
    return targets;
}

double update_critic(Network& critic, const std::vector<const Transition*>& batch,
                     const std::vector<double>& targets, double critic_lr, double grad_clip) {
    if (batch.size() != targets.size())
        throw std::invalid_argument("update_critic: targets must align with batch");
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    std::vector<double> grad(critic.param_count(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const StateVector x = concat_state_action(batch[i]->s, batch[i]->a, critic.action_scale);
        forward(critic, x.data(), tl_scratch);
        const double q = tl_scratch.act.back()[0];
        const double err = q - targets[i];
        loss += err * err * inv_b;
        const double upstream = 2.0 * err * inv_b;
        backward(critic, tl_scratch, &upstream, &grad, nullptr);
    }
    if (!std::isfinite(loss))
        throw TrainingDiverged("critic update produced a non-finite loss");

    clip_global_norm(grad, grad_clip);
    for (std::size_t i = 0; i < grad.size(); ++i) critic.params[i] -= critic_lr * grad[i];
    if (!critic.finite()) throw TrainingDiverged("critic parameters became non-finite");
    return loss;
}

void update_actor(Network& actor, const Network& critic,
                  const std::vector<const Transition*>& batch, double actor_lr,
                  double grad_clip) {
    if (batch.empty()) throw std::invalid_argument("update_actor: batch must be nonempty");
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    std::vector<double> grad(actor.param_count(), 0.0);
    std::vector<double> critic_in_grad(critic.input_size());
    NetScratch actor_scratch;
    const std::size_t sdim = actor.input_size();

    for (const Transition* t : batch) {
        forward(actor, t->s.data(), actor_scratch);
        const auto& a = actor_scratch.act.back();
        const StateVector x = concat_state_action(t->s, {a[0], a[1], a[2]}, critic.action_scale);
        forward(critic, x.data(), tl_scratch);
        const double upstream = inv_b;  // ascend mean q
        backward(critic, tl_scratch, &upstream, nullptr, critic_in_grad.data());
        // Chain rule through the normalized action slice of the critic input.
        double da[3];
        for (std::size_t i = 0; i < 3; ++i)
            da[i] = critic_in_grad[sdim + i] / critic.action_scale;
        backward(actor, actor_scratch, da, &grad, nullptr);
    }
    for (double g : grad)
        if (!std::isfinite(g)) throw TrainingDiverged("actor gradient became non-finite");

    clip_global_norm(grad, grad_clip);
    for (std::size_t i = 0; i < grad.size(); ++i) actor.params[i] += actor_lr * grad[i];
    if (!actor.finite()) throw TrainingDiverged("actor parameters became non-finite");
}

void soft_update(Network& target, const Network& online, double rate) {
    if (!target.same_architecture(online))
        throw std::invalid_argument("soft_update: architecture mismatch");
    for (std::size_t i = 0; i < target.params.size(); ++i)
        target.params[i] = (1.0 - rate) * target.params[i] + rate * online.params[i];
}

Vec3 explore(const Vec3& action, double sigma, Rng& rng, double a_max) {
    Vec3 noisy = action;
    if (sigma > 0.0) {
        noisy.x += rng.normal(0.0, sigma);
        noisy.y += rng.normal(0.0, sigma);
        noisy.z += rng.normal(0.0, sigma);
    }
    return clamp_per_axis(noisy, a_max);
}

std::size_t min_leg_slots(double dist, const Scenario& scenario) {
    if (dist <= 0.0) return 1;
    const double v = scenario.v_max;
    const double a = scenario.a_max;
    const double t = dist <= v * v / a ? 2.0 * std::sqrt(dist / a) : dist / v + v / a;
    return static_cast<std::size_t>(std::ceil(t / scenario.delta)) + 1;  // +1 hover slot
}

std::size_t leg_step_cap(double dist, const Scenario& scenario, double factor) {
    const auto base = static_cast<double>(min_leg_slots(dist, scenario));
    return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(factor * base)));
}

namespace {

std::vector<std::size_t> legs_from_tour(const tsp::Tour& tour) {
    std::vector<std::size_t> legs;
    for (std::size_t i = 1; i < tour.order.size(); ++i) legs.push_back(tour.order[i] - 1);
    return legs;
}

std::vector<Goal> goal_sequence(const Scenario& scenario, const std::vector<std::size_t>& legs) {
    std::vector<Goal> goals;
    goals.reserve(legs.size() + 1);
    for (std::size_t item : legs) goals.push_back(Goal::item(scenario, item));
    goals.push_back(Goal::depot(scenario));
    return goals;
}

std::size_t mission_step_cap(const Scenario& scenario, const std::vector<Goal>& goals,
                             double factor) {
    std::size_t cap = 0;
    Vec3 from = scenario.depot;
    for (const auto& g : goals) {
        cap += leg_step_cap(distance(from, g.position), scenario, factor);
        from = g.position;
    }
    return cap;
}

struct GreedyEval {
    bool success = false;
    std::size_t collected = 0;
    std::size_t slots = 0;

    // Rank: success first, then mission progress, then shorter missions.
    bool better_than(const GreedyEval& o) const {
        if (success != o.success) return success;
        if (collected != o.collected) return collected > o.collected;
        return success && slots < o.slots;
    }
};

// Greedy rollout of the mission in tour order; no noise, no learning.
GreedyEval evaluate_greedy(const Network& actor, const Scenario& scenario,
                           const std::vector<Goal>& goals, const Hyperparams& hp) {
    UAVState state = UAVState::initial(scenario);
    GreedyEval ev;
    for (const Goal& goal : goals) {
        if (!goal.is_depot() && env::check_collection(state, goal.position, scenario)) {
            state.collected[goal.item_index] = true;  // zero-step collection
            ev.collected = state.collected_count();
            continue;
        }
        const std::size_t cap =
            leg_step_cap(distance(state.position, goal.position), scenario, hp.leg_cap_factor);
        bool leg_done = false;
        for (std::size_t i = 0; i < cap; ++i) {
            const StateVector s = env::encode_state(state, goal.position, scenario, hp.n_obs);
            const StepOutcome out = env::step(state, actor_forward(actor, s), scenario, goal,
                                              RewardConfig{hp.reward_scale_dist});
            state = out.next_state;
            ++ev.slots;
            ev.collected = state.collected_count();
            if (out.event == Event::collected) {
                leg_done = true;
                break;
            }
            if (out.event == Event::returned) {
                ev.success = true;
                return ev;
            }
            if (out.done) return ev;  // collision or bounds exit
        }
        if (!leg_done) return ev;  // step cap exhausted (or return leg ended)
    }
    return ev;
}

}  // namespace

TrainResult train(const Scenario& scenario, const tsp::Tour& tour, const Hyperparams& hp) {
    scenario.validate_or_throw();
    const auto check = tsp::validate_tour(tour, scenario.item_count());
    if (!check.ok) throw std::invalid_argument("train: invalid tour: " + check.violation);

    Rng rng(hp.seed);
    const std::size_t sdim = env::state_vector_size(hp.n_obs);

    std::vector<std::size_t> actor_sizes{sdim};
    actor_sizes.insert(actor_sizes.end(), hp.hidden.begin(), hp.hidden.end());
    actor_sizes.push_back(3);
    std::vector<std::size_t> critic_sizes{sdim + 3};
    critic_sizes.insert(critic_sizes.end(), hp.hidden.begin(), hp.hidden.end());
    critic_sizes.push_back(1);

    TrainResult result;
    PolicyParameters& pp = result.policy;
    pp.actor = Network::make(actor_sizes, OutputSquash::scaled_tanh, scenario.a_max, rng);
    pp.critic = Network::make(critic_sizes, OutputSquash::identity, 1.0, rng);
    pp.critic.action_scale = scenario.a_max;
    pp.actor_target = pp.actor;
    pp.critic_target = pp.critic;
    pp.n_obs = hp.n_obs;
    pp.seed = hp.seed;
    pp.scenario_hash = scenario_fingerprint(scenario);

    ReplayBuffer buffer(hp.buffer_capacity);
    const RewardConfig rcfg{hp.reward_scale_dist};
    const std::vector<std::size_t> base_legs = legs_from_tour(tour);
    const std::vector<Goal> mission_goals = goal_sequence(scenario, base_legs);
    const std::size_t cap =
        hp.steps_per_episode > 0 ? hp.steps_per_episode
                                 : mission_step_cap(scenario, mission_goals, hp.leg_cap_factor);

    double sigma = hp.noise_stddev < 0.0 ? 0.3 * scenario.a_max : hp.noise_stddev;
    const double sigma_floor = hp.noise_floor_frac * scenario.a_max;

    // Adam state, used only when hp.use_adam is set.
    std::vector<double> m_a, v_a, m_c, v_c;
    std::size_t adam_t = 0;
    auto adam_step = [&](Network& net, std::vector<double>& grad, std::vector<double>& m,
                         std::vector<double>& v, double lr, double sign) {
        if (m.empty()) {
            m.assign(net.param_count(), 0.0);
            v.assign(net.param_count(), 0.0);
        }
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            net.params[i] += sign * lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    };

    GreedyEval best_eval;
    PolicyParameters best_params;
    bool have_best = false;
    auto consider_checkpoint = [&]() {
        if (!hp.keep_best) return;
        const GreedyEval ev = evaluate_greedy(pp.actor, scenario, mission_goals, hp);
        if (!have_best || ev.better_than(best_eval)) {
            best_eval = ev;
            best_params = pp;
            have_best = true;
        }
    };

    std::size_t total_steps = 0;
    const bool debug = std::getenv("UAVPLAN_TRAIN_DEBUG") != nullptr;
    std::size_t dbg_events[5] = {0, 0, 0, 0, 0};

    for (std::size_t episode = 1; episode <= hp.episodes; ++episode) {
        std::vector<std::size_t> legs = base_legs;
        if (hp.shuffle_legs && legs.size() > 1) rng.shuffle(legs);
        const std::vector<Goal> goals = goal_sequence(scenario, legs);

        UAVState state = UAVState::initial(scenario);
        std::size_t goal_idx = 0;
        double ep_return = 0.0;
        std::size_t steps = 0;
        bool done = false;
        bool success = false;

        for (std::size_t p = 0; p < cap && !done; ++p) {
            for (std::size_t u1 = 0; u1 < hp.collect_ops && !done; ++u1) {
                const Goal& goal = goals[goal_idx];
                StateVector s = env::encode_state(state, goal.position, scenario, hp.n_obs);
                // Uniform-random actions until the warmup budget is spent, so
                // the first updates see varied experience rather than the
                // untrained actor's drift.
                Vec3 action;
                if (total_steps < hp.warmup_steps) {
                    action = {rng.uniform(-scenario.a_max, scenario.a_max),
                              rng.uniform(-scenario.a_max, scenario.a_max),
                              rng.uniform(-scenario.a_max, scenario.a_max)};
                } else {
                    action = explore(actor_forward(pp.actor, s), sigma, rng, scenario.a_max);
                }
                ++total_steps;
                StepOutcome out = env::step(state, action, scenario, goal, rcfg);

                std::size_t next_goal_idx = goal_idx;
                if (out.event == Event::collected && goal_idx + 1 < goals.size())
                    next_goal_idx = goal_idx + 1;

                Transition tr;
                tr.s = std::move(s);
                tr.a = out.applied_acceleration;
                tr.r = out.reward * hp.td_reward_scale;
                tr.s_next = env::encode_state(out.next_state, goals[next_goal_idx].position,
                                              scenario, hp.n_obs);
                tr.done = out.done || (p + 1 == cap && u1 + 1 == hp.collect_ops);
                buffer.push(std::move(tr));

                ep_return += out.reward;
                ++steps;
                state = out.next_state;
                goal_idx = next_goal_idx;
                if (out.done || out.event == Event::collected)
                    ++dbg_events[static_cast<std::size_t>(out.event)];
                if (out.done) {
                    done = true;
                    success = out.event == Event::returned;
                }
            }
            for (std::size_t u2 = 0; u2 < hp.update_ops; ++u2) {
                if (total_steps < hp.warmup_steps) continue;
                if (buffer.size() < hp.batch_size) continue;
                const auto batch = buffer.sample(hp.batch_size, rng);
                const auto targets = td_target(batch, pp.actor_target, pp.critic_target, hp.gamma);

                if (hp.use_adam) {
                    ++adam_t;
                    // Same gradients as the plain path, routed through Adam.
                    std::vector<double> grad(pp.critic.param_count(), 0.0);
                    const double inv_b = 1.0 / static_cast<double>(batch.size());
                    for (std::size_t i = 0; i < batch.size(); ++i) {
                        const StateVector x = concat_state_action(batch[i]->s, batch[i]->a,
                                                                  pp.critic.action_scale);
                        forward(pp.critic, x.data(), tl_scratch);
                        const double err = tl_scratch.act.back()[0] - targets[i];
                        const double upstream = 2.0 * err * inv_b;
                        backward(pp.critic, tl_scratch, &upstream, &grad, nullptr);
                    }
                    clip_global_norm(grad, hp.grad_clip);
                    adam_step(pp.critic, grad, m_c, v_c, hp.critic_lr, -1.0);
                    if (!pp.critic.finite())
                        throw TrainingDiverged("critic parameters became non-finite");

                    std::vector<double> agrad(pp.actor.param_count(), 0.0);
                    std::vector<double> cin(pp.critic.input_size());
                    NetScratch ascr;
                    for (const Transition* t : batch) {
                        forward(pp.actor, t->s.data(), ascr);
                        const auto& a = ascr.act.back();
                        const StateVector x = concat_state_action(t->s, {a[0], a[1], a[2]},
                                                                  pp.critic.action_scale);
                        forward(pp.critic, x.data(), tl_scratch);
                        const double upstream = inv_b;
                        backward(pp.critic, tl_scratch, &upstream, nullptr, cin.data());
                        double da[3];
                        for (std::size_t i = 0; i < 3; ++i)
                            da[i] = cin[sdim + i] / pp.critic.action_scale;
                        backward(pp.actor, ascr, da, &agrad, nullptr);
                    }
                    clip_global_norm(agrad, hp.grad_clip);
                    adam_step(pp.actor, agrad, m_a, v_a, hp.actor_lr, +1.0);
                    if (!pp.actor.finite())
                        throw TrainingDiverged("actor parameters became non-finite");
                } else {
                    update_critic(pp.critic, batch, targets, hp.critic_lr, hp.grad_clip);
                    update_actor(pp.actor, pp.critic, batch, hp.actor_lr, hp.grad_clip);
                }
                soft_update(pp.critic_target, pp.critic, hp.target_rate);
                soft_update(pp.actor_target, pp.actor, hp.target_rate);
            }
        }

        result.log.episodes.push_back({episode, ep_return, steps, success});
        sigma = std::max(sigma_floor, sigma * hp.noise_decay);
        // Evaluate on the cadence, after the final episode, and whenever a
        // noisy episode just succeeded (the policy is likely in a good region
        // right then, and later updates can drift away from it).
        if (hp.keep_best &&
            (success || episode % hp.eval_every == 0 || episode == hp.episodes))
            consider_checkpoint();

        if (debug && episode % 50 == 0) {
            StateVector s0 = env::encode_state(UAVState::initial(scenario),
                                               mission_goals.front().position, scenario,
                                               hp.n_obs);
            const Vec3 a0 = actor_forward(pp.actor, s0);
            std::fprintf(stderr,
                         "[train] ep %zu sigma %.2f steps %zu events(col/hit/oob/ret) "
                         "%zu/%zu/%zu/%zu q0 %.3f a0 (%.2f,%.2f,%.2f)\n",
                         episode, sigma, total_steps, dbg_events[1], dbg_events[2],
                         dbg_events[3], dbg_events[4],
                         critic_forward(pp.critic, s0, a0), a0.x, a0.y, a0.z);
        }
    }

    if (hp.keep_best && have_best) result.policy = best_params;
    return result;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void write_net_header(std::ostream& os, const char* name, const Network& net) {
    os << name;
    for (std::size_t s : net.sizes) os << ' ' << s;
    os << ' ' << (net.squash == OutputSquash::scaled_tanh ? "tanh" : "identity") << ' '
       << double_str(net.squash_scale) << ' ' << double_str(net.action_scale) << '\n';
}

Network read_net_header(std::istream& is, const std::string& expected_name) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("policy file: truncated header");
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name != expected_name)
        throw std::runtime_error("policy file: expected '" + expected_name + "' line");
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.size() < 5) throw std::runtime_error("policy file: malformed network line");

    Network net;
    net.action_scale = std::stod(tokens.back());
    tokens.pop_back();
    net.squash_scale = std::stod(tokens.back());
    tokens.pop_back();
    const std::string squash = tokens.back();
    tokens.pop_back();
    if (squash == "tanh") net.squash = OutputSquash::scaled_tanh;
    else if (squash == "identity") net.squash = OutputSquash::identity;
    else throw std::runtime_error("policy file: unknown squash '" + squash + "'");
    for (const auto& t : tokens) net.sizes.push_back(std::stoul(t));
    if (net.sizes.size() < 2) throw std::runtime_error("policy file: malformed layer sizes");
    net.params.assign(net.weight_offset(net.layer_count()), 0.0);
    return net;
}

void write_doubles_le(std::ostream& os, const std::vector<double>& v) {
    static_assert(std::endian::native == std::endian::little,
                  "policy serialization assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles_le(std::istream& is, std::vector<double>& v) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw std::runtime_error("policy file: truncated parameter block");
}

}  // namespace

void save_policy(const PolicyParameters& policy, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_policy: cannot open " + path);
    os << "uavplan-policy 1\n";
    os << "n_obs " << policy.n_obs << '\n';
    os << "seed " << policy.seed << '\n';
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(policy.scenario_hash));
    os << "scenario_hash " << hash << '\n';
    write_net_header(os, "actor", policy.actor);
    write_net_header(os, "critic", policy.critic);
    const std::size_t total = policy.actor.param_count() + policy.critic.param_count() +
                              policy.actor_target.param_count() +
                              policy.critic_target.param_count();
    os << "params " << total << '\n';
    write_doubles_le(os, policy.actor.params);
    write_doubles_le(os, policy.critic.params);
    write_doubles_le(os, policy.actor_target.params);
    write_doubles_le(os, policy.critic_target.params);
    if (!os) throw std::runtime_error("save_policy: write failed for " + path);
}

PolicyParameters load_policy(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_policy: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "uavplan-policy 1")
        throw std::runtime_error("load_policy: not a uavplan-policy file: " + path);

    PolicyParameters pp;
    std::string key;
    is >> key >> pp.n_obs;
    if (key != "n_obs") throw std::runtime_error("policy file: expected n_obs");
    is >> key >> pp.seed;
    if (key != "seed") throw std::runtime_error("policy file: expected seed");
    std::string hash_hex;
    is >> key >> hash_hex;
    if (key != "scenario_hash") throw std::runtime_error("policy file: expected scenario_hash");
    pp.scenario_hash = std::stoull(hash_hex, nullptr, 16);
    is.ignore(2, '\n');

    pp.actor = read_net_header(is, "actor");
    pp.critic = read_net_header(is, "critic");
    pp.actor_target = pp.actor;
    pp.critic_target = pp.critic;

    std::size_t total = 0;
    is >> key >> total;
    if (key != "params") throw std::runtime_error("policy file: expected params");
    const std::size_t expected = pp.actor.param_count() + pp.critic.param_count() +
                                 pp.actor_target.param_count() +
                                 pp.critic_target.param_count();
    if (total != expected) throw std::runtime_error("policy file: parameter count mismatch");
    is.ignore(2, '\n');

    read_doubles_le(is, pp.actor.params);
    read_doubles_le(is, pp.critic.params);
    read_doubles_le(is, pp.actor_target.params);
    read_doubles_le(is, pp.critic_target.params);
    return pp;
}

void save_training_log_csv(const TrainingLog& log, const std::string& path) {
    std::string out = "episode,return,steps,success\n";
    for (const auto& e : log.episodes) {
        out += std::to_string(e.episode);
        out += ',';
        append_double(out, e.episode_return);
        out += ',';
        out += std::to_string(e.steps);
        out += ',';
        out += e.success ? '1' : '0';
        out += '\n';
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_training_log_csv: cannot open " + path);
    os << out;
}

}  // namespace uavplan::ddpg
