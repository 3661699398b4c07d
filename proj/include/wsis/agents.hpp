#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wsis/mdp.hpp"
#include "wsis/nn.hpp"
#include "wsis/rng.hpp"

namespace wsis::agents {

struct Transition {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool done = false;
    // Raw quantities for the physics residual: current-minute farm output and
    // the grid power it is compared against.  Only lower-level transitions
    // carry them.
    bool has_aux = false;
    double aux_p_w = 0.0;
    double aux_p_g_prev = 0.0;

    // Extra critic-only input appended between state and action (empty when
    // unused); the same vector conditions both the current and the bootstrap
    // critic evaluations.
    Eigen::VectorXd critic_extra;
};

// Fixed-capacity ring, oldest-first eviction, uniform batch sampling without
// replacement.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, Rng rng);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; } // storage order

    std::vector<const Transition*> sample(std::size_t batch_size);

private:
    std::size_t capacity_;
    std::vector<Transition> data_;
    std::size_t write_pos_ = 0;
    Rng rng_;
};

// Per-dimension Gaussian exploration noise with exponential per-episode decay
// and a floor, both expressed as fractions of each action dimension's range.
struct NoiseSchedule {
    Eigen::VectorXd sigma;
    Eigen::VectorXd floor;
    double decay = 0.9995;

    static NoiseSchedule from_range(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                    double initial_frac, double decay, double floor_frac);
    void end_episode(); // sigma <- max(sigma * decay, floor)
};

// Actor-critic pair with target copies; the critic consumes [state; action].
struct AgentPair {
    nn::MlpNetwork actor, critic;
    nn::MlpNetwork target_actor, target_critic;
    nn::OptimizerState actor_opt, critic_opt;
    double gamma = 0.99;
    double tau = 0.001;
    NoiseSchedule noise;

    int state_dim() const { return actor.input_size(); }
    int action_dim() const { return actor.output_size(); }
};

struct PinnConfig {
    bool enabled = false;
    double omega_u = 1.0;
    double omega_f = 0.1;
};

struct AgentHyper {
    std::vector<int> hidden_sizes = {64, 64};
    double actor_lr = 1e-4;
    double critic_lr = 1e-2;
    double gamma = 0.99;
    double tau = 0.001;
    double noise_initial_frac = 0.2;
    double noise_decay = 0.9995;
    double noise_floor_frac = 0.01;
};

// Builds actor (bounded to [lo, hi]), critic (identity scalar) and exact
// target copies.  `symmetric` picks the tanh-style actor head.
AgentPair make_agent_pair(int state_dim, const Eigen::VectorXd& action_lo,
                          const Eigen::VectorXd& action_hi, bool symmetric,
                          const AgentHyper& hyper, Rng& init_rng,
                          int critic_extra_dim = 0);

// Deterministic actor output, plus exploration noise when asked; the
// environment is responsible for clipping out-of-range results.
Eigen::VectorXd select_action(const AgentPair& agent, const Eigen::VectorXd& state,
                              bool explore, Rng& noise_rng);

// One optimizer step on the mean squared TD error; returns the pre-step loss.
// Targets never bootstrap through done transitions.
double critic_update(AgentPair& agent, const std::vector<const Transition*>& batch);

// One gradient-ascent step on mean Q(s, mu(s)); with PINN enabled the update
// direction is omega_u * grad J - omega_f * grad L_f where L_f is the mean
// squared one-minute power-hold residual f = (P_W - mu(s)) - P_G_prev.
// Returns (policy objective value, pinn loss value).
std::pair<double, double> actor_update(AgentPair& agent,
                                       const std::vector<const Transition*>& batch,
                                       const PinnConfig& pinn);

void soft_update_targets(AgentPair& agent);

struct TrainOptions {
    PinnConfig pinn;
    int batch_size = 32;
    std::size_t warmup = 1000; // buffer size before updates start
    bool explore = true;
    bool learn = true;
    bool lower_critic_sees_upper_action = false;
    // Applied to the window-level rewards fed to the upper/joint learners so
    // their value targets stay at a magnitude small networks can reach.
    // Policy-invariant (positive constant); logs and accounting stay in
    // dollars.
    double upper_reward_scale = 1.0;
    mdp::NormBounds bounds;
};

struct EpisodeStats {
    double total_profit = 0.0;
    double fs = 0.0;
    int vo = 0;
    double reward_sum = 0.0; // all lower rewards plus all window rewards
    double critic_loss_mean = 0.0;
    double actor_obj_mean = 0.0;
    double pinn_loss_mean = 0.0;
    int lower_transitions = 0;
    int upper_transitions = 0;
};

// One episode of the hierarchical scheme: the upper agent acts on each
// decision minute, the lower agent every minute; both levels store
// transitions and take one gradient step per stored transition once their
// buffer has warmed up, with target soft updates after each step.
EpisodeStats train_episode(mdp::Environment& env, AgentPair& upper, AgentPair& lower,
                           ReplayBuffer& upper_buffer, ReplayBuffer& lower_buffer,
                           const TrainOptions& opt, Rng& noise_rng);

// Flat single-agent baseline: one joint action (alphas..., P_B) per decision
// minute, P_B held across the window.
EpisodeStats train_single_ddpg(mdp::Environment& env, AgentPair& agent, ReplayBuffer& buffer,
                               const TrainOptions& opt, Rng& noise_rng);

// Greedy rollouts used by evaluation (no exploration, no learning).
EpisodeStats run_hierarchical_episode(mdp::Environment& env, const AgentPair& upper,
                                      const AgentPair& lower, const TrainOptions& opt);
EpisodeStats run_single_episode(mdp::Environment& env, const AgentPair& agent,
                                const TrainOptions& opt);

// Single-agent joint state (u, dir, price, P_G_prev, P_W_prev, soc).
Eigen::VectorXd joint_state(const mdp::UpperState& upper, double p_g_prev, double p_w_prev,
                            double soc, const mdp::NormBounds& bounds);

} // namespace wsis::agents
