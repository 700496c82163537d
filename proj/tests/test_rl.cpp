#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fastcharge/environments.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/mlp.hpp"
#include "fastcharge/parameters.hpp"
#include "fastcharge/reward.hpp"
#include "fastcharge/td3.hpp"
#include "fastcharge/trainer.hpp"

using namespace fastcharge;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

Td3Config small_config()
{
    Td3Config c;
    c.hidden = 8;
    c.minibatch = 16;
    c.buffer_capacity = 1000;
    return c;
}

Batch random_batch(int n, int dim, Rng& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0), a(0.0, 10.0);
    Batch b;
    b.s = MatrixXd::NullaryExpr(dim, n, [&] { return u(rng); });
    b.s_next = MatrixXd::NullaryExpr(dim, n, [&] { return u(rng); });
    b.a = RowVectorXd::NullaryExpr(n, [&] { return a(rng); });
    b.r = RowVectorXd::NullaryExpr(n, [&] { return u(rng); });
    b.done = RowVectorXd::Zero(n);
    return b;
}

/// Network whose output is the constant c: all weights zero, last bias c.
Mlp constant_net(int in, int hidden, double c)
{
    Mlp m({in, hidden, hidden, 1});
    m.params().setZero();
    m.params()(m.params().size() - 1) = c;
    return m;
}

double relative_error(double a, double b)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

TEST(Mlp, HandComputedForward)
{
    // 2 -> 2 -> 1, W1 = [[1, -1], [2, 0.5]], b1 = [0, -1], W2 = [3, -2], b2 = 0.5
    Mlp m({2, 2, 1});
    auto& p = m.params();
    ASSERT_EQ(p.size(), 9);
    p << 1, 2, -1, 0.5, 0, -1, 3, -2, 0.5;  // column-major W1, b1, W2, b2
    VectorXd x(2);
    x << 1.0, 2.0;
    // h = relu([1 - 2, 2 + 1 - 1]) = [0, 2]; y = 3*0 - 2*2 + 0.5
    EXPECT_NEAR(m.forward(x)(0, 0), -3.5, 1e-15);
}

TEST(Mlp, ZeroWeightsGiveOutputBias)
{
    Mlp lin = constant_net(3, 5, 0.7);
    VectorXd x = VectorXd::Constant(3, 4.0);
    EXPECT_DOUBLE_EQ(lin.forward(x)(0, 0), 0.7);
    Mlp act({3, 5, 1}, OutputHead::bounded, 0.0, 10.0);
    act.params().setZero();
    EXPECT_DOUBLE_EQ(act.forward(x)(0, 0), 5.0);
    act.params()(act.params().size() - 1) = 1.0;
    EXPECT_NEAR(act.forward(x)(0, 0), 10.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(Mlp, BoundedHeadStaysInRange)
{
    Rng rng(3);
    Mlp m({2, 16, 16, 1}, OutputHead::bounded, 0.0, 10.0);
    m.initialize(rng, 3.0);
    std::normal_distribution<double> n(0.0, 50.0);
    const MatrixXd x = MatrixXd::NullaryExpr(2, 500, [&] { return n(rng); });
    const MatrixXd y = m.forward(x);
    EXPECT_GE(y.minCoeff(), 0.0);
    EXPECT_LE(y.maxCoeff(), 10.0);
}

TEST(Mlp, InitializationRanges)
{
    Rng rng(5);
    Mlp m({4, 50, 1});
    m.initialize(rng, 3e-3);
    const auto& p = m.params();
    const double bound = 1.0 / std::sqrt(4.0);
    EXPECT_LE(p.head(50 * 4 + 50).cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(p.tail(51).cwiseAbs().maxCoeff(), 3e-3);
}

TEST(Mlp, ParameterGradientMatchesFiniteDifferences)
{
    Rng rng(11);
    for (OutputHead head : {OutputHead::linear, OutputHead::bounded}) {
        Mlp m({3, 7, 6, 1}, head, 0.0, 10.0);
        m.initialize(rng, 0.5);
        std::normal_distribution<double> n(0.0, 1.0);
        const MatrixXd x = MatrixXd::NullaryExpr(3, 5, [&] { return n(rng); });
        const MatrixXd w = MatrixXd::NullaryExpr(1, 5, [&] { return n(rng); });
        // loss = sum(w .* y)
        MlpCache cache;
        m.forward(x, cache);
        VectorXd grad;
        m.backward(cache, w, grad);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < m.params().size(); ++i) {
            Mlp plus = m, minus = m;
            plus.params()(i) += h;
            minus.params()(i) -= h;
            const double fd = ((w.array() * plus.forward(x).array()).sum() -
                               (w.array() * minus.forward(x).array()).sum()) / (2 * h);
            EXPECT_LT(relative_error(grad(i), fd), 1e-4) << "param " << i;
        }
    }
}

TEST(Mlp, InputGradientMatchesFiniteDifferences)
{
    Rng rng(12);
    Mlp m({3, 9, 9, 1});
    m.initialize(rng, 0.5);
    std::normal_distribution<double> n(0.0, 1.0);
    MatrixXd x = MatrixXd::NullaryExpr(3, 4, [&] { return n(rng); });
    const MatrixXd w = MatrixXd::Ones(1, 4);
    MlpCache cache;
    m.forward(x, cache);
    const MatrixXd gx = m.backward_input(cache, w);
    const double h = 1e-5;
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            MatrixXd xp = x, xm = x;
            xp(r, c) += h;
            xm(r, c) -= h;
            const double fd = (m.forward(xp).sum() - m.forward(xm).sum()) / (2 * h);
            EXPECT_LT(relative_error(gx(r, c), fd), 1e-4);
        }
}

TEST(Mlp, BackwardAccumulatesGradients)
{
    Rng rng(13);
    Mlp m({2, 4, 1});
    m.initialize(rng, 0.5);
    const MatrixXd x = MatrixXd::Random(2, 3);
    const MatrixXd w = MatrixXd::Ones(1, 3);
    MlpCache cache;
    m.forward(x, cache);
    VectorXd once, twice;
    m.backward(cache, w, once);
    m.backward(cache, w, twice);
    m.forward(x, cache);
    m.backward(cache, w, twice);
    EXPECT_LT((twice - 2.0 * once).norm(), 1e-12);
}

TEST(Adam, FirstStepIsLearningRateTimesSign)
{
    VectorXd p = VectorXd::Zero(3), g(3);
    g << 0.3, -5.0, 1e-3;
    AdamState st;
    adam_update(p, g, 1e-3, st);
    EXPECT_NEAR(p(0), -1e-3, 1e-8);
    EXPECT_NEAR(p(1), 1e-3, 1e-8);
    EXPECT_NEAR(p(2), -1e-3, 1e-7);
    EXPECT_EQ(st.step, 1);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged)
{
    VectorXd p = VectorXd::LinSpaced(4, -1.0, 1.0);
    const VectorXd p0 = p;
    AdamState st;
    for (int k = 0; k < 5; ++k) adam_update(p, VectorXd::Zero(4), 1e-2, st);
    EXPECT_EQ(p, p0);
}

TEST(Adam, FitsActorToConstantTarget)
{
    // minimise mean (mu(s) - 3)^2 through backward + Adam
    Rng rng(21);
    Mlp m({2, 16, 16, 1}, OutputHead::bounded, 0.0, 10.0);
    m.initialize(rng);
    const MatrixXd s = MatrixXd::Random(2, 32);
    AdamState st;
    MlpCache cache;
    VectorXd grad;
    for (int k = 0; k < 2000; ++k) {
        const MatrixXd y = m.forward(s, cache);
        const MatrixXd g = 2.0 * (y.array() - 3.0).matrix() / 32.0;
        grad.setZero(static_cast<Eigen::Index>(m.parameter_count()));
        m.backward(cache, g, grad);
        adam_update(m.params(), grad, 1e-2, st);
    }
    EXPECT_LT((m.forward(s).array() - 3.0).abs().maxCoeff(), 1e-2);
}

TEST(SoftUpdate, Examples)
{
    VectorXd t = VectorXd::Zero(2), o = VectorXd::Ones(2);
    soft_update(t, o, 0.005);
    EXPECT_NEAR(t(0), 0.005, 1e-15);
    soft_update(t, o, 1.0);
    EXPECT_EQ(t, o);
}

TEST(Replay, RingEvictsOldest)
{
    ReplayBuffer b(2, 1);
    for (int k = 0; k < 3; ++k) b.push({VectorXd::Constant(1, k), double(k), 0.0, VectorXd::Zero(1), false});
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(b.at(0).a, 1.0);
    EXPECT_EQ(b.at(1).a, 2.0);
    EXPECT_EQ(b.at(1).s(0), 2.0);
}

TEST(Replay, UnderfilledAndDeterministicSampling)
{
    ReplayBuffer b(100, 2);
    Rng rng(1);
    EXPECT_THROW(b.sample(4, rng), Underfilled);
    for (int k = 0; k < 50; ++k) b.push({VectorXd::Constant(2, k), double(k), -double(k), VectorXd::Constant(2, k + 1), k == 49});
    Rng r1(9), r2(9);
    const auto i1 = b.sample_indices(16, r1);
    const auto i2 = b.sample_indices(16, r2);
    EXPECT_EQ(i1, i2);
    Rng r3(9);
    const Batch batch = b.sample(16, r3);
    for (int k = 0; k < 16; ++k) {
        const auto t = b.at(i1[k]);
        EXPECT_EQ(batch.a(k), t.a);
        EXPECT_EQ(batch.r(k), t.r);
        EXPECT_EQ(batch.s(0, k), t.s(0));
        EXPECT_EQ(batch.s_next(1, k), t.s_next(1));
        EXPECT_EQ(batch.done(k), t.done ? 1.0 : 0.0);
    }
}

TEST(Exploration, ZeroSigmaIsDeterministic)
{
    Rng rng(2);
    for (double mu : {0.0, 3.3, 10.0}) EXPECT_EQ(sample_truncated_action(mu, 0.0, 0.0, 10.0, rng), mu);
    Td3Agent agent(2, small_config());
    VectorXd s(2);
    s << 0.3, 0.4;
    EXPECT_EQ(agent.select_action(s, 0.0, rng), agent.act(s));
}

TEST(Exploration, TruncatedNormalMoments)
{
    const double mu = 8.0, sigma = 2.0, lo = 0.0, hi = 10.0;
    const double al = (lo - mu) / sigma, be = (hi - mu) / sigma;
    const double z = normal_cdf(be) - normal_cdf(al);
    const double mean = mu + sigma * (normal_pdf(al) - normal_pdf(be)) / z;
    const double var = sigma * sigma *
                       (1.0 + (al * normal_pdf(al) - be * normal_pdf(be)) / z -
                        std::pow((normal_pdf(al) - normal_pdf(be)) / z, 2));
    Rng rng(77);
    const int n = 200000;
    double s1 = 0, s2 = 0;
    for (int k = 0; k < n; ++k) {
        const double a = sample_truncated_action(mu, sigma, lo, hi, rng);
        ASSERT_GE(a, lo);
        ASSERT_LE(a, hi);
        s1 += a;
        s2 += a * a;
    }
    const double m = s1 / n, v = s2 / n - m * m;
    EXPECT_NEAR(m, mean, 0.02 * mean);
    EXPECT_NEAR(v, var, 0.02 * var);
}

TEST(Exploration, SigmaSchedule)
{
    Td3Config c;
    EXPECT_DOUBLE_EQ(exploration_sigma(c, 0), 0.5);
    EXPECT_NEAR(exploration_sigma(c, 250), 0.275, 1e-12);
    EXPECT_DOUBLE_EQ(exploration_sigma(c, 500), 0.05);
    EXPECT_DOUBLE_EQ(exploration_sigma(c, 5000), 0.05);
}

TEST(Td3, TargetExamples)
{
    Td3Agent agent(2, small_config());
    agent.critic1_target = constant_net(3, 8, 2.0);
    agent.critic2_target = constant_net(3, 8, 3.0);
    Batch b;
    b.s = b.s_next = MatrixXd::Zero(2, 2);
    b.a = RowVectorXd::Zero(2);
    b.r = RowVectorXd::Ones(2);
    b.done = RowVectorXd::Zero(2);
    b.done(1) = 1.0;
    Rng rng(1);
    const RowVectorXd y = agent.target(b, rng, false);
    EXPECT_NEAR(y(0), 2.98, 1e-12);
    EXPECT_DOUBLE_EQ(y(1), 1.0);
}

TEST(Td3, TargetUsesMinimumOfTwinCritics)
{
    Rng rng(4);
    Td3Agent agent(2, small_config());
    for (Mlp* m : {&agent.critic1_target, &agent.critic2_target, &agent.actor_target}) m->initialize(rng, 1.0);
    const Batch b = random_batch(64, 2, rng);
    const RowVectorXd y = agent.target(b, rng, false);
    const MatrixXd a = agent.actor_target.forward(b.s_next);
    const MatrixXd in = agent.critic_input(b.s_next, a.row(0));
    const MatrixXd q1 = agent.critic1_target.forward(in), q2 = agent.critic2_target.forward(in);
    for (int k = 0; k < 64; ++k)
        EXPECT_NEAR(y(k), b.r(k) + 0.99 * std::min(q1(0, k), q2(0, k)), 1e-12);
}

TEST(Td3, CriticLossDecreasesOnFixedTargets)
{
    Rng rng(6);
    auto cfg = small_config();
    cfg.lr_critic = 1e-2;
    Td3Agent agent(2, cfg);
    const Batch b = random_batch(64, 2, rng);
    const RowVectorXd y = b.s.row(0) - 0.5 * b.s.row(1);
    const auto first = agent.critic_update(b, y);
    std::pair<double, double> last;
    for (int k = 0; k < 300; ++k) last = agent.critic_update(b, y);
    EXPECT_LT(last.first, 0.5 * first.first);
    EXPECT_LT(last.second, 0.5 * first.second);
}

TEST(Td3, CriticAtTargetDoesNotMove)
{
    Rng rng(8);
    Td3Agent agent(2, small_config());
    const Batch b = random_batch(16, 2, rng);
    agent.critic1 = constant_net(3, 8, 0.4);
    agent.critic2 = constant_net(3, 8, 0.4);
    const VectorXd p0 = agent.critic1.params();
    agent.critic_update(b, RowVectorXd::Constant(16, 0.4));
    EXPECT_LT((agent.critic1.params() - p0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Td3, ActorGradientMatchesFiniteDifferences)
{
    Rng rng(10);
    Td3Agent agent(2, small_config());
    agent.actor.initialize(rng, 1.0);
    agent.critic1.initialize(rng, 1.0);
    const MatrixXd s = MatrixXd::Random(2, 8);
    const VectorXd g = agent.actor_objective_gradient(s);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        Td3Agent plus = agent, minus = agent;
        plus.actor.params()(i) += h;
        minus.actor.params()(i) -= h;
        const double fd = (plus.actor_objective(s) - minus.actor_objective(s)) / (2 * h);
        EXPECT_LT(relative_error(g(i), fd), 1e-4) << i;
    }
}

TEST(Td3, ActorClimbsToCriticOptimum)
{
    // Q1(s, a) = -|a/10 - 0.3| built from two ReLU units; the optimum is a = 3 A
    auto cfg = small_config();
    cfg.lr_actor = 1e-2;
    Td3Agent agent(2, cfg);
    Mlp& q = agent.critic1;
    q.params().setZero();
    const int h = cfg.hidden;
    auto& p = q.params();
    // layer 1: W1 is h x 3 (column-major), input index 2 is the scaled action
    p(2 * h + 0) = 1.0;
    p(2 * h + 1) = -1.0;
    const int b1 = 3 * h;
    p(b1 + 0) = -0.3;
    p(b1 + 1) = 0.3;
    // layer 2: identity on the two units
    const int w2 = b1 + h;
    p(w2 + 0 * h + 0) = 1.0;
    p(w2 + 1 * h + 1) = 1.0;
    // output: -(u0 + u1)
    const int w3 = w2 + h * h + h;
    p(w3 + 0) = -1.0;
    p(w3 + 1) = -1.0;

    Rng rng(5);
    const Batch b = random_batch(32, 2, rng);
    for (int k = 0; k < 3000; ++k) agent.actor_update(b);
    const MatrixXd a = agent.actor.forward(b.s);
    EXPECT_LT((a.array() - 3.0).abs().maxCoeff(), 0.05);
}

TEST(SoftUpdate, RepeatedUpdatesConvergeGeometrically)
{
    VectorXd t = VectorXd::Zero(1), o = VectorXd::Ones(1);
    for (int k = 0; k < 100; ++k) soft_update(t, o, 0.1);
    EXPECT_NEAR(1.0 - t(0), std::pow(0.9, 100), 1e-12);
}

TEST(Td3, PolicyDelayGatesActor)
{
    Rng rng(12);
    auto cfg = small_config();
    cfg.policy_delay = 2;
    Td3Agent agent(2, cfg);
    const Batch b = random_batch(16, 2, rng);
    agent.critic_update(b, agent.target(b, rng));
    const VectorXd p0 = agent.actor.params();
    EXPECT_FALSE(agent.actor_update(b));
    EXPECT_EQ(agent.actor.params(), p0);
    agent.critic_update(b, agent.target(b, rng));
    EXPECT_TRUE(agent.actor_update(b));
    EXPECT_NE(agent.actor.params(), p0);
}

TEST(Td3, ConfigValidationNamesField)
{
    Td3Config c;
    EXPECT_NO_THROW(c.validate());
    c.tau = 1.5;
    try {
        c.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
    }
}

TEST(Reward, Examples)
{
    RewardConfig cfg;
    EXPECT_NEAR(reward_terms(0.5, 4.0, 4.17, 5.0, 5.0, cfg).total(), -0.6, 1e-12);
    EXPECT_NEAR(reward_terms(0.5, 4.25, 4.17, 5.0, 5.0, cfg).voltage, -0.8, 1e-12);
    EXPECT_EQ(reward_terms(0.5, 4.17, 4.17, 5.0, 5.0, cfg).voltage, 0.0);
    EXPECT_NEAR(reward_terms(0.8, 4.0, 4.17, 7.0, 5.0, cfg).smooth, -1.0, 1e-12);
    EXPECT_EQ(reward_terms(0.8, 4.0, 4.17, 7.0, 5.0, cfg).timeout, 0.0);
}

TEST(Reward, TimeoutPenaltyAppliedOnce)
{
    auto p = default_parameters();
    p.degradation.enabled = false;
    BatteryEnvConfig cfg;
    cfg.reward.timeout_minutes = 2.0;
    BatteryEnv env([p] { return Cell(CellModel::make(p), 0.0); }, VoltageSohMap{{{1.0, 4.2}}}, cfg);
    Rng rng(1);
    env.reset(rng);
    int penalties = 0, steps = 0;
    for (;;) {
        const auto st = env.step(0.0);
        ++steps;
        if (st.reward <= cfg.reward.timeout_penalty) ++penalties;
        if (st.done) {
            EXPECT_TRUE(st.timed_out);
            break;
        }
    }
    EXPECT_EQ(penalties, 1);
    EXPECT_EQ(steps, 6);
    EXPECT_TRUE(env.summary().timed_out);
}

TEST(Environment, BatteryEpisodeRunsFromPrechargeToTarget)
{
    auto p = default_parameters();
    BatteryEnv env([p] { return Cell(CellModel::make(p), 0.0); }, VoltageSohMap{{{1.0, 4.14}, {0.8, 4.17}}},
                   BatteryEnvConfig{});
    Rng rng(1);
    const VectorXd s = env.reset(rng);
    // the rest after the precharge loses a little lithium to SEI growth
    EXPECT_NEAR(s(1), 0.2, 1e-4);
    EXPECT_NEAR(env.v_max(), 4.14, 1e-4);
    EnvStep st;
    do st = env.step(10.0);
    while (!st.done);
    EXPECT_GE(env.cell().outputs().soc, 0.8);
    EXPECT_FALSE(st.timed_out);
    // the next episode starts from a recycled precharged cell
    EXPECT_NEAR(env.reset(rng)(1), 0.2, 1e-4);
    EXPECT_EQ(env.cells_used(), 1);
}

TEST(Environment, TrackingOptimumMatchesBangBangRollout)
{
    TrackingConfig cfg;
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int ep = 0; ep < 20; ++ep) {
        TrackingEnv env(cfg);
        const VectorXd s = env.reset(rng);
        const double best = env.optimal_return();
        // move at full speed, then land on the target with a partial action
        double x = s(0), total = 0.0;
        TrackingEnv copy = env;
        for (int k = 0; k < cfg.horizon; ++k) {
            const double want = std::clamp((s(1) - x) / cfg.max_speed, -1.0, 1.0);
            const auto st = copy.step((want + 1.0) * 0.5 * cfg.action_high);
            x = st.state(0);
            total += st.reward;
        }
        EXPECT_NEAR(total, best, 1e-9);
        // random policies never beat it
        for (int trial = 0; trial < 20; ++trial) {
            TrackingEnv r = env;
            double ret = 0.0;
            for (int k = 0; k < cfg.horizon; ++k) ret += r.step(u(rng)).reward;
            EXPECT_LE(ret, best + 1e-9);
        }
    }
}
