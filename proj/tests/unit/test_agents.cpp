#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "wsis/agents.hpp"
#include "wsis/errors.hpp"
#include "wsis/farm.hpp"
#include "wsis/mdp.hpp"
#include "wsis/metrics.hpp"
#include "wsis/winddata.hpp"

using namespace wsis;

namespace {

agents::Transition make_transition(double reward, int state_dim = 3, int action_dim = 1) {
    agents::Transition t;
    t.state = Eigen::VectorXd::Constant(state_dim, 0.4);
    t.action = Eigen::VectorXd::Constant(action_dim, 0.1);
    t.reward = reward;
    t.next_state = Eigen::VectorXd::Constant(state_dim, 0.5);
    return t;
}

agents::AgentPair small_pair(int state_dim, int action_dim, std::uint64_t seed,
                             bool symmetric = true, int extra = 0,
                             agents::AgentHyper hyper = {}) {
    hyper.hidden_sizes = {16, 16};
    Rng rng(seed);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(action_dim, -3.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(action_dim, 3.0);
    return agents::make_agent_pair(state_dim, lo, hi, symmetric, hyper, rng, extra);
}

farm::FarmLayout tiny_layout(int count) {
    farm::TurbineSpec proto;
    return farm::FarmLayout::linear_row(count, 5.0, proto, 0.08, 1.2, 0.95);
}

winddata::WindSeries constant_wind(int minutes, double speed) {
    winddata::WindSeries series;
    for (int m = 0; m < minutes; ++m) series.samples.push_back({m, speed, 0.0});
    return series;
}

mdp::Environment tiny_env(int minutes, double speed, int turbines = 2) {
    mdp::EnvConfig cfg;
    cfg.episode_minutes = minutes;
    return mdp::Environment(tiny_layout(turbines), bess::BatteryParams{}, cfg,
                            constant_wind(minutes, speed));
}

agents::TrainOptions no_learning_options() {
    agents::TrainOptions opt;
    opt.warmup = 100000; // never reached in these short episodes
    opt.explore = true;
    return opt;
}

} // namespace

TEST_CASE("the replay buffer evicts oldest entries first") {
    agents::ReplayBuffer buffer(3, Rng(1));
    for (int i = 1; i <= 5; ++i) buffer.push(make_transition(i));
    CHECK(buffer.size() == 3);
    CHECK(buffer.capacity() == 3);
    std::multiset<double> rewards;
    for (std::size_t i = 0; i < buffer.size(); ++i) rewards.insert(buffer.at(i).reward);
    CHECK(rewards == std::multiset<double>({3.0, 4.0, 5.0}));
}

TEST_CASE("replay sampling returns distinct transitions") {
    agents::ReplayBuffer buffer(64, Rng(2));
    for (int i = 0; i < 40; ++i) buffer.push(make_transition(i));
    const auto batch = buffer.sample(16);
    REQUIRE(batch.size() == 16);
    std::set<const agents::Transition*> unique(batch.begin(), batch.end());
    CHECK(unique.size() == 16);
    for (const auto* t : batch) CHECK(t->reward < 40.0);
}

TEST_CASE("noise schedules decay per episode down to their floor") {
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, 0.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(1, 10.0);
    auto noise = agents::NoiseSchedule::from_range(lo, hi, 0.2, 0.5, 0.01);
    CHECK(noise.sigma[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(noise.floor[0] == doctest::Approx(0.1).epsilon(1e-12));
    noise.end_episode();
    CHECK(noise.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
    noise.end_episode();
    CHECK(noise.sigma[0] == doctest::Approx(0.5).epsilon(1e-12));
    for (int i = 0; i < 20; ++i) noise.end_episode();
    CHECK(noise.sigma[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("agent pairs start with identical target copies and a near-centred policy") {
    const auto pair = small_pair(4, 2, 7);
    CHECK(pair.state_dim() == 4);
    CHECK(pair.action_dim() == 2);
    CHECK(pair.critic.input_size() == 6);
    CHECK(pair.critic.output_size() == 1);

    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd s =
            Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return rng.uniform(); });
        const Eigen::VectorXd a = nn::forward1(pair.actor, s);
        CHECK((nn::forward1(pair.target_actor, s) - a).cwiseAbs().maxCoeff() == 0.0);
        // The scaled-down final layer keeps the initial policy near mid-range.
        CHECK(std::abs(a(0)) < 0.05);
        CHECK(std::abs(a(1)) < 0.05);
        for (int d = 0; d < 2; ++d) {
            CHECK(a(d) >= -3.0);
            CHECK(a(d) <= 3.0);
        }
    }
}

TEST_CASE("the critic extra dimension widens only the critic input") {
    const auto pair = small_pair(4, 1, 7, true, 3);
    CHECK(pair.actor.input_size() == 4);
    CHECK(pair.critic.input_size() == 4 + 3 + 1);
}

TEST_CASE("asymmetric action boxes are respected") {
    agents::AgentHyper hyper;
    hyper.hidden_sizes = {8};
    Rng rng(9);
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.0, -1.0;
    hi << 0.5, 2.0;
    auto pair = agents::make_agent_pair(3, lo, hi, false, hyper, rng);
    // Saturate the head: outputs must stay inside the box.
    for (auto& w : pair.actor.weights) w.setConstant(5.0);
    for (auto& b : pair.actor.biases) b.setConstant(5.0);
    const Eigen::VectorXd a = nn::forward1(pair.actor, Eigen::Vector3d(1.0, 1.0, 1.0));
    CHECK(a(0) <= 0.5);
    CHECK(a(0) >= 0.0);
    CHECK(a(1) <= 2.0);
    CHECK(a(1) >= -1.0);
}

TEST_CASE("greedy action selection is deterministic, exploration is not") {
    const auto pair = small_pair(3, 1, 11);
    const Eigen::VectorXd s = Eigen::Vector3d(0.2, 0.4, 0.6);
    Rng noise(5);
    const Eigen::VectorXd greedy1 = agents::select_action(pair, s, false, noise);
    const Eigen::VectorXd greedy2 = agents::select_action(pair, s, false, noise);
    CHECK(greedy1(0) == greedy2(0));
    CHECK(greedy1(0) == nn::forward1(pair.actor, s)(0));

    const Eigen::VectorXd noisy = agents::select_action(pair, s, true, noise);
    CHECK(noisy(0) != greedy1(0));
}

TEST_CASE("critic updates regress toward terminal rewards") {
    auto pair = small_pair(3, 1, 13);
    auto t = make_transition(7.0);
    t.done = true; // no bootstrap: the target is exactly the reward
    std::vector<const agents::Transition*> batch(8, &t);

    const double first_loss = agents::critic_update(pair, batch);
    double last_loss = first_loss;
    for (int i = 0; i < 1500; ++i) last_loss = agents::critic_update(pair, batch);
    CHECK(last_loss < first_loss);
    CHECK(last_loss < 1e-3);

    Eigen::VectorXd sa(4);
    sa << t.state, t.action;
    CHECK(nn::forward1(pair.critic, sa)(0) == doctest::Approx(7.0).epsilon(0.02));
}

TEST_CASE("critic targets bootstrap through non-terminal transitions") {
    auto pair = small_pair(3, 1, 17);
    // Freeze targets at zero output so the TD target is exactly the reward
    // even for non-terminal transitions.
    for (auto& w : pair.target_critic.weights) w.setZero();
    for (auto& b : pair.target_critic.biases) b.setZero();

    auto t = make_transition(2.0);
    std::vector<const agents::Transition*> batch(4, &t);
    for (int i = 0; i < 1200; ++i) agents::critic_update(pair, batch);
    Eigen::VectorXd sa(4);
    sa << t.state, t.action;
    CHECK(nn::forward1(pair.critic, sa)(0) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("actor updates climb the critic's value surface") {
    auto pair = small_pair(3, 1, 19);
    // A critic that pays for large actions: Q = sum(inputs), so dQ/da = 1.
    pair.critic.weights[0].setZero();
    pair.critic.weights[0].row(0).setOnes();
    for (std::size_t l = 1; l < pair.critic.weights.size(); ++l) {
        pair.critic.weights[l].setZero();
        pair.critic.weights[l](0, 0) = 1.0;
    }
    for (auto& b : pair.critic.biases) b.setZero();

    auto t = make_transition(0.0);
    std::vector<const agents::Transition*> batch(8, &t);
    const double before = nn::forward1(pair.actor, t.state)(0);
    double objective = 0.0;
    for (int i = 0; i < 200; ++i)
        objective = agents::actor_update(pair, batch, agents::PinnConfig{}).first;
    const double after = nn::forward1(pair.actor, t.state)(0);
    CHECK(after > before);
    CHECK(objective > before);
}

TEST_CASE("soft target updates move targets a tau-step toward the live nets") {
    auto pair = small_pair(3, 1, 23);
    pair.tau = 0.5;
    auto t = make_transition(1.0);
    std::vector<const agents::Transition*> batch(4, &t);
    agents::critic_update(pair, batch); // live critic moves away from target
    const double live = nn::forward1(pair.critic, (Eigen::VectorXd(4) << t.state,
                                                   t.action).finished())(0);
    const double target_before = nn::forward1(pair.target_critic,
                                              (Eigen::VectorXd(4) << t.state,
                                               t.action).finished())(0);
    agents::soft_update_targets(pair);
    const double target_after = nn::forward1(pair.target_critic,
                                             (Eigen::VectorXd(4) << t.state,
                                              t.action).finished())(0);
    CHECK(std::abs(target_after - live) < std::abs(target_before - live));
}

TEST_CASE("the physics residual needs auxiliary data and a scalar action") {
    auto pair = small_pair(3, 1, 29);
    agents::PinnConfig pinn;
    pinn.enabled = true;

    auto plain = make_transition(0.0);
    std::vector<const agents::Transition*> batch(4, &plain);
    CHECK_THROWS_AS(agents::actor_update(pair, batch, pinn), ContractError);

    auto wide = small_pair(3, 2, 29);
    auto with_aux = make_transition(0.0, 3, 2);
    with_aux.has_aux = true;
    std::vector<const agents::Transition*> wide_batch(4, &with_aux);
    CHECK_THROWS_AS(agents::actor_update(wide, wide_batch, pinn), ContractError);

    agents::PinnConfig negative;
    negative.enabled = true;
    negative.omega_f = -0.1;
    auto ok = make_transition(0.0);
    ok.has_aux = true;
    std::vector<const agents::Transition*> ok_batch(4, &ok);
    CHECK_THROWS_AS(agents::actor_update(pair, ok_batch, negative), ConfigError);
}

TEST_CASE("a pure physics loss drives the actor toward the hold action") {
    agents::AgentHyper hyper;
    hyper.actor_lr = 1e-2;
    auto pair = small_pair(3, 1, 31, true, 0, hyper);

    // Transitions with constant farm power 2.0 and varying previous grid
    // power; the residual-zeroing action is P_W - P_G_prev in [-1.5, 1.5].
    Rng rng(6);
    std::vector<agents::Transition> pool;
    for (int i = 0; i < 64; ++i) {
        auto t = make_transition(0.0);
        t.state(0) = rng.uniform();
        t.has_aux = true;
        t.aux_p_w = 2.0;
        t.aux_p_g_prev = 0.5 + 3.0 * t.state(0);
        pool.push_back(t);
    }
    std::vector<const agents::Transition*> batch;
    for (const auto& t : pool) batch.push_back(&t);

    agents::PinnConfig pinn;
    pinn.enabled = true;
    pinn.omega_u = 0.0;
    pinn.omega_f = 1.0;

    const double first = agents::actor_update(pair, batch, pinn).second;
    double last = first;
    for (int i = 0; i < 400; ++i) last = agents::actor_update(pair, batch, pinn).second;
    CHECK(last < first / 4.0);
}

TEST_CASE("a zero physics weight reports zero residual loss") {
    auto pair = small_pair(3, 1, 37);
    auto t = make_transition(0.0);
    t.has_aux = true;
    t.aux_p_w = 5.0;
    t.aux_p_g_prev = 1.0;
    std::vector<const agents::Transition*> batch(4, &t);
    agents::PinnConfig pinn;
    pinn.enabled = true;
    pinn.omega_f = 0.0;
    const auto [objective, residual] = agents::actor_update(pair, batch, pinn);
    CHECK(residual == 0.0);
    (void)objective;
}

TEST_CASE("hierarchical episodes store transitions at both cadences") {
    auto env = tiny_env(10, 8.0);
    auto upper = small_pair(3, 2, 41, false);
    auto lower = small_pair(6, 1, 43);
    agents::ReplayBuffer upper_buffer(100, Rng(1));
    agents::ReplayBuffer lower_buffer(100, Rng(2));
    Rng noise(3);

    const auto opt = no_learning_options();
    const auto stats = agents::train_episode(env, upper, lower, upper_buffer, lower_buffer,
                                             opt, noise);
    CHECK(stats.lower_transitions == 10);
    CHECK(stats.upper_transitions == 2);
    CHECK(lower_buffer.size() == 10);
    CHECK(upper_buffer.size() == 2);
    CHECK(stats.critic_loss_mean == 0.0); // warmup not reached: no learning
    CHECK(std::isfinite(stats.reward_sum));
    CHECK(stats.total_profit == doctest::Approx(metrics::summarize(
              env.trajectory().records, env.config().fluct_threshold_mw).total_profit));

    // Lower transitions carry the physics aux data; upper ones do not.
    CHECK(lower_buffer.at(0).has_aux);
    CHECK(lower_buffer.at(0).aux_p_w > 0.0);
    CHECK(!upper_buffer.at(0).has_aux);
    CHECK(upper_buffer.at(0).state.size() == 3);
    CHECK(lower_buffer.at(0).state.size() == 6);
}

TEST_CASE("the lower critic can be conditioned on the applied induction") {
    auto env = tiny_env(10, 8.0);
    auto upper = small_pair(3, 2, 47, false);
    auto lower = small_pair(6, 1, 49, true, 2);
    agents::ReplayBuffer upper_buffer(100, Rng(1));
    agents::ReplayBuffer lower_buffer(100, Rng(2));
    Rng noise(3);

    auto opt = no_learning_options();
    opt.lower_critic_sees_upper_action = true;
    agents::train_episode(env, upper, lower, upper_buffer, lower_buffer, opt, noise);
    REQUIRE(lower_buffer.size() == 10);
    CHECK(lower_buffer.at(0).critic_extra.size() == 2);
    for (int d = 0; d < 2; ++d) {
        CHECK(lower_buffer.at(0).critic_extra(d) >= 0.0);
        CHECK(lower_buffer.at(0).critic_extra(d) <= 0.5);
    }
}

TEST_CASE("training with learning enabled reports finite diagnostics") {
    auto env = tiny_env(20, 8.0);
    auto upper = small_pair(3, 2, 53, false);
    auto lower = small_pair(6, 1, 59);
    agents::ReplayBuffer upper_buffer(1000, Rng(1));
    agents::ReplayBuffer lower_buffer(1000, Rng(2));
    Rng noise(3);

    agents::TrainOptions opt;
    opt.batch_size = 4;
    opt.warmup = 4;
    opt.pinn.enabled = true;

    agents::EpisodeStats stats;
    for (int e = 0; e < 3; ++e) {
        env.reset(constant_wind(20, 8.0));
        stats = agents::train_episode(env, upper, lower, upper_buffer, lower_buffer, opt,
                                      noise);
    }
    CHECK(stats.critic_loss_mean > 0.0);
    CHECK(std::isfinite(stats.actor_obj_mean));
    CHECK(std::isfinite(stats.pinn_loss_mean));
    CHECK(stats.pinn_loss_mean > 0.0);
}

TEST_CASE("training runs are reproducible given identical streams") {
    auto run = [](std::uint64_t seed) {
        auto env = tiny_env(15, 9.0);
        auto upper = small_pair(3, 2, seed, false);
        auto lower = small_pair(6, 1, seed + 1);
        agents::ReplayBuffer upper_buffer(100, Rng(seed + 2));
        agents::ReplayBuffer lower_buffer(100, Rng(seed + 3));
        Rng noise(seed + 4);
        agents::TrainOptions opt;
        opt.batch_size = 4;
        opt.warmup = 4;
        return agents::train_episode(env, upper, lower, upper_buffer, lower_buffer, opt,
                                     noise);
    };
    const auto a = run(100);
    const auto b = run(100);
    CHECK(a.total_profit == b.total_profit);
    CHECK(a.reward_sum == b.reward_sum);
    CHECK(a.critic_loss_mean == b.critic_loss_mean);

    const auto c = run(101);
    CHECK(c.reward_sum != a.reward_sum);
}

TEST_CASE("the joint baseline couples farm and battery in one action") {
    auto env = tiny_env(10, 8.0);
    // 2 turbines + 1 battery dimension on the 6-component joint state.
    agents::AgentHyper hyper;
    hyper.hidden_sizes = {16, 16};
    Rng rng(61);
    Eigen::VectorXd lo(3), hi(3);
    lo << 0.0, 0.0, -3.0;
    hi << 0.5, 0.5, 3.0;
    auto joint = agents::make_agent_pair(6, lo, hi, false, hyper, rng);
    agents::ReplayBuffer buffer(100, Rng(1));
    Rng noise(2);

    const auto opt = no_learning_options();
    const auto stats = agents::train_single_ddpg(env, joint, buffer, opt, noise);
    CHECK(stats.upper_transitions == 2);
    CHECK(stats.lower_transitions == 0);
    CHECK(buffer.size() == 2);
    CHECK(buffer.at(0).state.size() == 6);
    CHECK(buffer.at(0).action.size() == 3);

    // Wrong action dimensionality must be rejected.
    auto env2 = tiny_env(10, 8.0);
    auto bad = small_pair(6, 2, 67, false);
    agents::ReplayBuffer buffer2(100, Rng(1));
    CHECK_THROWS_AS(agents::train_single_ddpg(env2, bad, buffer2, opt, noise), ContractError);
}

TEST_CASE("greedy rollouts leave the policies untouched") {
    auto env = tiny_env(10, 8.0);
    auto upper = small_pair(3, 2, 71, false);
    auto lower = small_pair(6, 1, 73);
    const auto upper_w = upper.actor.weights[0];

    agents::TrainOptions opt;
    const auto stats = agents::run_hierarchical_episode(env, upper, lower, opt);
    CHECK(stats.lower_transitions == 10);
    CHECK(stats.critic_loss_mean == 0.0);
    CHECK(env.trajectory().records.size() == 10);
    CHECK((upper.actor.weights[0] - upper_w).cwiseAbs().maxCoeff() == 0.0);

    // Deterministic: a second rollout reproduces the profit bitwise.
    auto env2 = tiny_env(10, 8.0);
    const auto stats2 = agents::run_hierarchical_episode(env2, upper, lower, opt);
    CHECK(stats.total_profit == stats2.total_profit);
}
