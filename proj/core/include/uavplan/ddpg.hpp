#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavplan/env.hpp"
#include "uavplan/network.hpp"
#include "uavplan/tsp.hpp"

namespace uavplan::ddpg {

struct Transition {
    StateVector s;
    Vec3 a;  // executed (norm-clamped) acceleration, m/s^2
    double r = 0.0;
    StateVector s_next;
    bool done = false;
};

// Fixed-capacity ring with FIFO eviction; sampling is uniform with
// replacement over the current contents.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> data_;
};

struct Hyperparams {
    double actor_lr = 1e-4;               // alpha^(theta)
    double critic_lr = 1e-3;              // alpha^(w)
    double gamma = 0.99;
    double target_rate = 0.005;           // alpha_target
    std::size_t episodes = 1000;          // M
    std::size_t steps_per_episode = 0;    // P; 0 = 4x straight-line lower bound
    std::size_t collect_ops = 1;          // U1
    std::size_t update_ops = 1;           // U2
    std::size_t batch_size = 128;
    double noise_stddev = -1.0;           // sigma_0; negative = 0.3 * a_max
    double noise_decay = 0.995;           // per-episode multiplicative decay
    double noise_floor_frac = 0.05;       // sigma floor = frac * a_max
    std::size_t buffer_capacity = 100000;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden = {128, 128};
    std::size_t n_obs = 3;                // obstacle slots in the state encoding
    double grad_clip = 1.0;
    std::size_t warmup_steps = 2000;      // uniform-random action steps before updates begin
    bool use_adam = false;                // plain clipped gradient steps by default
    bool shuffle_legs = false;            // visit legs in a fresh random order each episode
    bool keep_best = false;               // return the best greedy checkpoint instead of the final nets
    std::size_t eval_every = 25;          // checkpoint cadence when keep_best is on
    double reward_scale_dist = 0.01;
    // Uniform scaling of stored rewards. Keeps TD targets near unit scale so
    // clipped plain-gradient updates condition well; scaling every reward by
    // one constant leaves the optimal policy unchanged.
    double td_reward_scale = 0.01;
    double leg_cap_factor = 4.0;          // per-leg step cap multiplier over the kinematic bound
};

struct PolicyParameters {
    Network actor;
    Network critic;
    Network actor_target;
    Network critic_target;
    std::size_t n_obs = 3;
    std::uint64_t seed = 0;
    std::uint64_t scenario_hash = 0;
};

struct EpisodeRecord {
    std::size_t episode = 0;
    double episode_return = 0.0;
    std::size_t steps = 0;
    bool success = false;
};

struct TrainingLog {
    std::vector<EpisodeRecord> episodes;
};

struct TrainResult {
    PolicyParameters policy;
    TrainingLog log;
};

// Raised when an update produces a non-finite loss or gradient.
struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// pi(s): bounded acceleration, |component| <= a_max through the tanh squash.
Vec3 actor_forward(const Network& actor, const StateVector& s);

// q(s, a): the action is concatenated to the state at the network input.
double critic_forward(const Network& critic, const StateVector& s, const Vec3& a);

// U_i = r_i + gamma * q_target(s'_i, pi_target(s'_i)) * (1 - done_i).
std::vector<double> td_target(const std::vector<const Transition*>& batch,
                              const Network& target_actor, const Network& target_critic,
                              double gamma);

// One clipped gradient step on the mean squared TD error; returns the loss
// before the step.
double update_critic(Network& critic, const std::vector<const Transition*>& batch,
                     const std::vector<double>& targets, double critic_lr,
                     double grad_clip = 1.0);

// One clipped ascent step on mean_i q(s_i, pi(s_i)); the gradient flows
// through the critic's action input, critic parameters are untouched.
void update_actor(Network& actor, const Network& critic,
                  const std::vector<const Transition*>& batch, double actor_lr,
                  double grad_clip = 1.0);

// theta_target <- (1 - rate) * theta_target + rate * theta.
void soft_update(Network& target, const Network& online, double rate);

// Adds iid Gaussian noise per axis, then re-clamps each axis to [-a_max, a_max].
Vec3 explore(const Vec3& action, double sigma, Rng& rng, double a_max);

// Minimum number of slots to fly `dist` meters from rest to rest under the
// speed/acceleration bounds, plus the collection hover slot.
std::size_t min_leg_slots(double dist, const Scenario& scenario);

// Step cap for one leg of the mission (leg_cap_factor x the kinematic bound).
std::size_t leg_step_cap(double dist, const Scenario& scenario, double factor);

// Algorithm: M episodes over the mission legs of `tour` with goal-conditioned
// states, alternating U1 environment steps with U2 gradient updates.
// Deterministic for a fixed seed.
TrainResult train(const Scenario& scenario, const tsp::Tour& tour, const Hyperparams& hp);

void save_policy(const PolicyParameters& policy, const std::string& path);
PolicyParameters load_policy(const std::string& path);

void save_training_log_csv(const TrainingLog& log, const std::string& path);

}  // namespace uavplan::ddpg
