#include "wsis/agents.hpp"

#include <algorithm>
#include <cmath>

#include "wsis/errors.hpp"
#include "wsis/metrics.hpp"

namespace wsis::agents {

namespace {

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() + b.size());
    out.head(a.size()) = a;
    out.tail(b.size()) = b;
    return out;
}

// Column-stacks [state; critic_extra; action] for a batch. `states` may be the
// stored states or the stored next-states; the extra block is the same either
// way (the induction held over the transition's window).
Eigen::MatrixXd critic_input(const AgentPair& agent,
                             const std::vector<const Transition*>& batch,
                             const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) {
    const auto b = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index sdim = states.rows();
    const Eigen::Index adim = actions.rows();
    const Eigen::Index edim = agent.critic.input_size() - sdim - adim;
    if (edim < 0)
        throw ContractError("critic input is narrower than the state-action pair");
    Eigen::MatrixXd x(sdim + edim + adim, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        if (batch[i]->critic_extra.size() != edim)
            throw ContractError("transition extra-input width does not match the critic");
        x.col(i).head(sdim) = states.col(i);
        if (edim > 0) x.col(i).segment(sdim, edim) = batch[i]->critic_extra;
        x.col(i).tail(adim) = actions.col(i);
    }
    return x;
}

void fill_episode_stats(EpisodeStats& stats, const mdp::Environment& env) {
    const auto summary =
        metrics::summarize(env.trajectory().records, env.config().fluct_threshold_mw);
    stats.total_profit = summary.total_profit;
    stats.fs = summary.fs;
    stats.vo = summary.vo;
}

struct UpdateAverages {
    double critic_sum = 0.0;
    double actor_sum = 0.0;
    double pinn_sum = 0.0;
    int critic_n = 0;
    int actor_n = 0;

    void absorb(double critic_loss, double actor_obj, double pinn_loss) {
        critic_sum += critic_loss;
        actor_sum += actor_obj;
        pinn_sum += pinn_loss;
        ++critic_n;
        ++actor_n;
    }
    void finalize(EpisodeStats& stats) const {
        if (critic_n > 0) stats.critic_loss_mean = critic_sum / critic_n;
        if (actor_n > 0) {
            stats.actor_obj_mean = actor_sum / actor_n;
            stats.pinn_loss_mean = pinn_sum / actor_n;
        }
    }
};

bool ready_to_learn(const ReplayBuffer& buffer, const TrainOptions& opt) {
    return buffer.size() >= std::max<std::size_t>(opt.warmup,
                                                  static_cast<std::size_t>(opt.batch_size));
}

} // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, Rng rng) : capacity_(capacity), rng_(rng) {
    if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[write_pos_] = std::move(t); // overwrite oldest
        write_pos_ = (write_pos_ + 1) % capacity_;
    }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size) {
    if (batch_size == 0 || data_.empty()) throw ContractError("cannot sample an empty batch");
    const auto indices = rng_.sample_indices(data_.size(), batch_size);
    std::vector<const Transition*> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(&data_[i]);
    return out;
}

NoiseSchedule NoiseSchedule::from_range(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                        double initial_frac, double decay, double floor_frac) {
    NoiseSchedule n;
    n.sigma = initial_frac * (hi - lo);
    n.floor = floor_frac * (hi - lo);
    n.decay = decay;
    return n;
}

void NoiseSchedule::end_episode() { sigma = (decay * sigma).cwiseMax(floor); }

AgentPair make_agent_pair(int state_dim, const Eigen::VectorXd& action_lo,
                          const Eigen::VectorXd& action_hi, bool symmetric,
                          const AgentHyper& hyper, Rng& init_rng, int critic_extra_dim) {
    if (action_lo.size() != action_hi.size() || action_lo.size() == 0)
        throw ConfigError("action bounds must be non-empty and matched");
    if (critic_extra_dim < 0) throw ConfigError("critic extra-input width must be non-negative");
    const int action_dim = static_cast<int>(action_lo.size());

    std::vector<int> actor_sizes{state_dim};
    actor_sizes.insert(actor_sizes.end(), hyper.hidden_sizes.begin(), hyper.hidden_sizes.end());
    actor_sizes.push_back(action_dim);
    std::vector<int> critic_sizes{state_dim + critic_extra_dim + action_dim};
    critic_sizes.insert(critic_sizes.end(), hyper.hidden_sizes.begin(), hyper.hidden_sizes.end());
    critic_sizes.push_back(1);

    AgentPair agent;
    agent.actor = nn::make_mlp(actor_sizes,
                               symmetric ? nn::OutputActivation::symmetric_bounded
                                         : nn::OutputActivation::bounded,
                               action_lo, action_hi, init_rng, 1e-3);
    agent.critic = nn::make_mlp(critic_sizes, nn::OutputActivation::identity, {}, {}, init_rng);
    agent.target_actor = agent.actor;
    agent.target_critic = agent.critic;
    agent.actor_opt = nn::OptimizerState::for_network(agent.actor, hyper.actor_lr);
    agent.critic_opt = nn::OptimizerState::for_network(agent.critic, hyper.critic_lr);
    agent.gamma = hyper.gamma;
    agent.tau = hyper.tau;
    agent.noise = NoiseSchedule::from_range(action_lo, action_hi, hyper.noise_initial_frac,
                                            hyper.noise_decay, hyper.noise_floor_frac);
    return agent;
}

Eigen::VectorXd select_action(const AgentPair& agent, const Eigen::VectorXd& state,
                              bool explore, Rng& noise_rng) {
    Eigen::VectorXd action = nn::forward1(agent.actor, state);
    if (explore)
        for (Eigen::Index i = 0; i < action.size(); ++i)
            action[i] += agent.noise.sigma[i] * noise_rng.gaussian();
    return action;
}

double critic_update(AgentPair& agent, const std::vector<const Transition*>& batch) {
    if (batch.empty()) throw ContractError("critic update needs a non-empty batch");
    const auto b = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index sdim = batch[0]->state.size();
    const Eigen::Index adim = batch[0]->action.size();

    Eigen::MatrixXd states(sdim, b);
    Eigen::MatrixXd next_states(sdim, b);
    Eigen::MatrixXd actions(adim, b);
    for (Eigen::Index i = 0; i < b; ++i) {
        states.col(i) = batch[i]->state;
        next_states.col(i) = batch[i]->next_state;
        actions.col(i) = batch[i]->action;
    }

    // Bootstrapped targets from the target pair; done transitions take r only.
    const Eigen::MatrixXd next_actions = nn::forward(agent.target_actor, next_states);
    const Eigen::MatrixXd next_q =
        nn::forward(agent.target_critic, critic_input(agent, batch, next_states, next_actions));

    Eigen::RowVectorXd targets(b);
    for (Eigen::Index i = 0; i < b; ++i)
        targets[i] = batch[i]->reward +
                     (batch[i]->done ? 0.0 : agent.gamma * next_q(0, i));

    nn::ForwardCache cache;
    const Eigen::MatrixXd q =
        nn::forward(agent.critic, critic_input(agent, batch, states, actions), &cache);
    const Eigen::RowVectorXd err = q.row(0) - targets;
    const double loss = err.squaredNorm() / static_cast<double>(b);

    Eigen::MatrixXd dq(1, b);
    dq.row(0) = (2.0 / static_cast<double>(b)) * err;
    nn::Gradients grads;
    nn::backward(agent.critic, cache, dq, grads);
    nn::apply_gradients(agent.critic, agent.critic_opt, grads, /*maximize=*/false);
    return loss;
}

std::pair<double, double> actor_update(AgentPair& agent,
                                       const std::vector<const Transition*>& batch,
                                       const PinnConfig& pinn) {
    if (batch.empty()) throw ContractError("actor update needs a non-empty batch");
    const auto b = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index sdim = batch[0]->state.size();
    const Eigen::Index adim = agent.actor.output_size();

    Eigen::MatrixXd states(sdim, b);
    for (Eigen::Index i = 0; i < b; ++i) states.col(i) = batch[i]->state;

    nn::ForwardCache actor_cache;
    const Eigen::MatrixXd mu = nn::forward(agent.actor, states, &actor_cache);

    nn::ForwardCache critic_cache;
    const Eigen::MatrixXd q =
        nn::forward(agent.critic, critic_input(agent, batch, states, mu), &critic_cache);
    const double objective = q.row(0).mean();

    // dJ/d(action) through the frozen critic, averaged over the batch.
    Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(1, b, 1.0 / static_cast<double>(b));
    nn::Gradients critic_scratch;
    const Eigen::MatrixXd dq_dinput = nn::backward(agent.critic, critic_cache, dq, critic_scratch);
    Eigen::MatrixXd d_action = dq_dinput.bottomRows(adim);

    double pinn_loss = 0.0;
    const bool use_pinn = pinn.enabled && pinn.omega_f > 0.0;
    if (pinn.enabled) {
        if (pinn.omega_u < 0.0 || pinn.omega_f < 0.0)
            throw ConfigError("physics-loss weights must be non-negative");
        if (use_pinn && adim != 1)
            throw ContractError("physics residual applies to the scalar battery action only");
        Eigen::MatrixXd ascent = pinn.omega_u * d_action;
        if (use_pinn) {
            // Residual f = (P_W - mu(s)) - P_G_prev per transition;
            // L_f = mean f^2, dL_f/dmu = -2 f / B.
            for (Eigen::Index i = 0; i < b; ++i) {
                if (!batch[i]->has_aux)
                    throw ContractError("physics loss needs transitions with aux power fields");
                const double f = (batch[i]->aux_p_w - mu(0, i)) - batch[i]->aux_p_g_prev;
                pinn_loss += f * f;
                // Combined ascent direction: omega_u * dJ - omega_f * dL_f.
                ascent(0, i) -= pinn.omega_f * (-2.0 * f / static_cast<double>(b));
            }
            pinn_loss /= static_cast<double>(b);
        }
        d_action = std::move(ascent);
    }

    nn::Gradients actor_grads;
    nn::backward(agent.actor, actor_cache, d_action, actor_grads);
    nn::apply_gradients(agent.actor, agent.actor_opt, actor_grads, /*maximize=*/true);
    return {objective, pinn_loss};
}

void soft_update_targets(AgentPair& agent) {
    nn::soft_update(agent.target_actor, agent.actor, agent.tau);
    nn::soft_update(agent.target_critic, agent.critic, agent.tau);
}

EpisodeStats train_episode(mdp::Environment& env, AgentPair& upper, AgentPair& lower,
                           ReplayBuffer& upper_buffer, ReplayBuffer& lower_buffer,
                           const TrainOptions& opt, Rng& noise_rng) {
    EpisodeStats stats;
    UpdateAverages lower_avg, upper_avg;

    Eigen::VectorXd window_state;
    Eigen::VectorXd window_action;
    bool window_open = false;

    while (!env.done()) {
        if (env.upper_decision_due()) {
            window_state = mdp::normalize_upper(env.upper_state(), opt.bounds);
            window_action = select_action(upper, window_state, opt.explore, noise_rng);
            env.apply_upper(std::vector<double>(window_action.data(),
                                                window_action.data() + window_action.size()));
            window_open = true;
        }

        const mdp::LowerState& ls = env.lower_state();
        const Eigen::VectorXd state =
            mdp::normalize_lower(ls, opt.bounds, env.config().include_soc_in_lower_state);
        const Eigen::VectorXd action = select_action(lower, state, opt.explore, noise_rng);
        const mdp::StepOutcome out = env.step(action[0]);
        stats.reward_sum += out.record.r_l;

        Transition t;
        t.state = state;
        t.action = action;
        t.reward = out.record.r_l;
        t.next_state = mdp::normalize_lower(out.next_lower, opt.bounds,
                                            env.config().include_soc_in_lower_state);
        t.done = out.done;
        t.has_aux = true;
        t.aux_p_w = out.record.p_w_mw;
        t.aux_p_g_prev = out.p_g_prev_used;
        if (opt.lower_critic_sees_upper_action) {
            const auto& alphas = env.induction().alphas;
            t.critic_extra = Eigen::Map<const Eigen::VectorXd>(
                alphas.data(), static_cast<Eigen::Index>(alphas.size()));
        }
        lower_buffer.push(std::move(t));
        ++stats.lower_transitions;

        if (opt.learn && ready_to_learn(lower_buffer, opt)) {
            const auto batch = lower_buffer.sample(static_cast<std::size_t>(opt.batch_size));
            const double closs = critic_update(lower, batch);
            const auto [aobj, ploss] = actor_update(lower, batch, opt.pinn);
            soft_update_targets(lower);
            lower_avg.absorb(closs, aobj, ploss);
        }

        if (out.window_closed && window_open) {
            stats.reward_sum += out.window_reward;
            Transition ut;
            ut.state = window_state;
            ut.action = window_action;
            ut.reward = out.window_reward * opt.upper_reward_scale;
            ut.next_state = mdp::normalize_upper(out.next_upper, opt.bounds);
            ut.done = out.done;
            upper_buffer.push(std::move(ut));
            ++stats.upper_transitions;
            window_open = false;

            if (opt.learn && ready_to_learn(upper_buffer, opt)) {
                const auto batch = upper_buffer.sample(static_cast<std::size_t>(opt.batch_size));
                const double closs = critic_update(upper, batch);
                const auto [aobj, ploss] = actor_update(upper, batch, PinnConfig{});
                soft_update_targets(upper);
                upper_avg.absorb(closs, aobj, ploss);
            }
        }
    }

    if (opt.explore) {
        upper.noise.end_episode();
        lower.noise.end_episode();
    }

    fill_episode_stats(stats, env);
    UpdateAverages combined;
    combined.critic_sum = lower_avg.critic_sum + upper_avg.critic_sum;
    combined.actor_sum = lower_avg.actor_sum + upper_avg.actor_sum;
    combined.pinn_sum = lower_avg.pinn_sum + upper_avg.pinn_sum;
    combined.critic_n = lower_avg.critic_n + upper_avg.critic_n;
    combined.actor_n = lower_avg.actor_n + upper_avg.actor_n;
    combined.finalize(stats);
    return stats;
}

Eigen::VectorXd joint_state(const mdp::UpperState& upper, double p_g_prev, double p_w_prev,
                            double soc, const mdp::NormBounds& bounds) {
    mdp::LowerState ls;
    ls.upper = upper;
    ls.prev_grid_power_mw = p_g_prev;
    ls.signal_mw = p_w_prev;
    ls.soc = soc;
    return mdp::normalize_lower(ls, bounds, /*include_soc=*/true);
}

EpisodeStats train_single_ddpg(mdp::Environment& env, AgentPair& agent, ReplayBuffer& buffer,
                               const TrainOptions& opt, Rng& noise_rng) {
    EpisodeStats stats;
    UpdateAverages avg;
    const std::size_t n_turbines = env.layout().turbines.size();
    if (agent.action_dim() != static_cast<int>(n_turbines) + 1)
        throw ContractError("joint agent needs one action entry per turbine plus the battery");

    double p_g_prev = 0.0;
    double p_w_prev = 0.0;

    auto soc_of = [&]() {
        const auto& bp = env.battery_params();
        return (env.battery().energy_mwh - bp.e_min_mwh) / (bp.e_max_mwh - bp.e_min_mwh);
    };

    while (!env.done()) {
        const Eigen::VectorXd state =
            joint_state(env.upper_state(), p_g_prev, p_w_prev, soc_of(), opt.bounds);
        const Eigen::VectorXd action = select_action(agent, state, opt.explore, noise_rng);

        const double g_u = env.apply_upper(
            std::vector<double>(action.data(), action.data() + n_turbines));
        const double p_b_raw = action[static_cast<Eigen::Index>(n_turbines)];

        double window_reward = -env.config().kappa * g_u;
        mdp::StepOutcome out;
        do {
            out = env.step(p_b_raw); // battery command held across the window
            window_reward += out.record.r_l;
            p_g_prev = out.record.p_g_mw;
            p_w_prev = out.record.p_w_mw;
        } while (!out.window_closed);
        stats.reward_sum += window_reward;

        Transition t;
        t.state = state;
        t.action = action;
        t.reward = window_reward * opt.upper_reward_scale;
        t.next_state = joint_state(out.next_upper, p_g_prev, p_w_prev, soc_of(), opt.bounds);
        t.done = out.done;
        buffer.push(std::move(t));
        ++stats.upper_transitions;

        if (opt.learn && ready_to_learn(buffer, opt)) {
            const auto batch = buffer.sample(static_cast<std::size_t>(opt.batch_size));
            const double closs = critic_update(agent, batch);
            const auto [aobj, ploss] = actor_update(agent, batch, PinnConfig{});
            soft_update_targets(agent);
            avg.absorb(closs, aobj, ploss);
        }
    }

    if (opt.explore) agent.noise.end_episode();
    fill_episode_stats(stats, env);
    avg.finalize(stats);
    return stats;
}

EpisodeStats run_hierarchical_episode(mdp::Environment& env, const AgentPair& upper,
                                      const AgentPair& lower, const TrainOptions& opt) {
    EpisodeStats stats;
    while (!env.done()) {
        if (env.upper_decision_due()) {
            const Eigen::VectorXd s = mdp::normalize_upper(env.upper_state(), opt.bounds);
            const Eigen::VectorXd a = nn::forward1(upper.actor, s);
            env.apply_upper(std::vector<double>(a.data(), a.data() + a.size()));
        }
        const mdp::LowerState& ls = env.lower_state();
        const Eigen::VectorXd s =
            mdp::normalize_lower(ls, opt.bounds, env.config().include_soc_in_lower_state);
        const Eigen::VectorXd a = nn::forward1(lower.actor, s);
        const mdp::StepOutcome out = env.step(a[0]);
        stats.reward_sum += out.record.r_l;
        if (out.window_closed) stats.reward_sum += out.window_reward;
        ++stats.lower_transitions;
        if (out.window_closed) ++stats.upper_transitions;
    }
    fill_episode_stats(stats, env);
    return stats;
}

EpisodeStats run_single_episode(mdp::Environment& env, const AgentPair& agent,
                                const TrainOptions& opt) {
    EpisodeStats stats;
    const std::size_t n_turbines = env.layout().turbines.size();
    double p_g_prev = 0.0;
    double p_w_prev = 0.0;
    auto soc_of = [&]() {
        const auto& bp = env.battery_params();
        return (env.battery().energy_mwh - bp.e_min_mwh) / (bp.e_max_mwh - bp.e_min_mwh);
    };
    while (!env.done()) {
        const Eigen::VectorXd state =
            joint_state(env.upper_state(), p_g_prev, p_w_prev, soc_of(), opt.bounds);
        const Eigen::VectorXd action = nn::forward1(agent.actor, state);
        const double g_u = env.apply_upper(
            std::vector<double>(action.data(), action.data() + n_turbines));
        double window_reward = -env.config().kappa * g_u;
        mdp::StepOutcome out;
        do {
            out = env.step(action[static_cast<Eigen::Index>(n_turbines)]);
            window_reward += out.record.r_l;
            p_g_prev = out.record.p_g_mw;
            p_w_prev = out.record.p_w_mw;
        } while (!out.window_closed);
        stats.reward_sum += window_reward;
        ++stats.upper_transitions;
    }
    fill_episode_stats(stats, env);
    return stats;
}

} // namespace wsis::agents
