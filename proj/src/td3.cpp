#include "fastcharge/td3.hpp"

#include <algorithm>
#include <cmath>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim)
    : capacity_(capacity), state_dim_(state_dim)
{
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    if (state_dim < 1) throw ConfigError("replay buffer state dimension must be positive");
}

void ReplayBuffer::push(const Transition& t)
{
    if (t.s.size() != state_dim_ || t.s_next.size() != state_dim_)
        throw ConfigError("transition state dimension mismatch");
    const auto d = static_cast<std::size_t>(state_dim_);
    if (a_.size() < capacity_ && head_ == a_.size()) {
        s_.insert(s_.end(), t.s.data(), t.s.data() + d);
        s_next_.insert(s_next_.end(), t.s_next.data(), t.s_next.data() + d);
        a_.push_back(t.a);
        r_.push_back(t.r);
        done_.push_back(t.done ? 1.0 : 0.0);
    } else {
        std::copy(t.s.data(), t.s.data() + d, s_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
        std::copy(t.s_next.data(), t.s_next.data() + d,
                  s_next_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
        a_[head_] = t.a;
        r_[head_] = t.r;
        done_[head_] = t.done ? 1.0 : 0.0;
    }
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const
{
    if (batch_size == 0 || size_ < batch_size)
        throw Underfilled(format("replay buffer holds %zu transitions, %zu requested", size_, batch_size));
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    std::vector<std::size_t> idx(batch_size);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const
{
    const auto n = static_cast<Eigen::Index>(indices.size());
    const auto d = static_cast<std::size_t>(state_dim_);
    Batch b;
    b.s.resize(state_dim_, n);
    b.s_next.resize(state_dim_, n);
    b.a.resize(n);
    b.r.resize(n);
    b.done.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const std::size_t k = slot(indices[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < d; ++i) {
            b.s(static_cast<Eigen::Index>(i), j) = s_[k * d + i];
            b.s_next(static_cast<Eigen::Index>(i), j) = s_next_[k * d + i];
        }
        b.a[j] = a_[k];
        b.r[j] = r_[k];
        b.done[j] = done_[k];
    }
    return b;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const
{
    return gather(sample_indices(batch_size, rng));
}

Transition ReplayBuffer::at(std::size_t i) const
{
    if (i >= size_) throw BoundViolation(format("replay index %zu out of range %zu", i, size_));
    const Batch b = gather({i});
    return {b.s.col(0), b.a[0], b.r[0], b.s_next.col(0), b.done[0] > 0.5};
}

void Td3Config::validate() const
{
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0)) throw ConfigError(format("%s must be positive (got %g)", key, v));
    };
    positive(lr_actor, "lr_actor");
    positive(lr_critic, "lr_critic");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError(format("gamma must lie in (0, 1) (got %g)", gamma));
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError(format("tau must lie in (0, 1] (got %g)", tau));
    if (minibatch == 0 || minibatch > buffer_capacity)
        throw ConfigError(format("minibatch must lie in [1, buffer_capacity] (got %zu)", minibatch));
    if (policy_delay < 1) throw ConfigError(format("policy_delay must be >= 1 (got %d)", policy_delay));
    if (hidden < 1) throw ConfigError(format("hidden must be >= 1 (got %d)", hidden));
    if (sigma_explore_start < 0.0 || sigma_explore_end < 0.0 || sigma_target < 0.0 || target_clip < 0.0)
        throw ConfigError("noise scales must be non-negative");
    if (warmup_steps < 0) throw ConfigError("warmup_steps must be non-negative");
    if (sigma_decay_episodes < 0) throw ConfigError("sigma_decay_episodes must be non-negative");
    if (!(action_high > action_low)) throw ConfigError("action bounds must satisfy low < high");
    positive(actor_final_scale, "actor_final_scale");
}

double sample_truncated_action(double mu, double sigma, double lo, double hi, Rng& rng)
{
    mu = std::clamp(mu, lo, hi);
    if (sigma <= 0.0) return mu;
    std::normal_distribution<double> n(0.0, sigma);
    // The acceptance region always contains mu, so it has probability of at
    // least half of the narrower side; rejection terminates quickly.
    for (int k = 0; k < 1000; ++k) {
        const double a = mu + n(rng);
        if (a >= lo && a <= hi) return a;
    }
    return mu;
}

Td3Agent::Td3Agent(int state_dim, const Td3Config& cfg) : cfg_(cfg), state_dim_(state_dim)
{
    cfg_.validate();
    Rng rng(cfg_.seed);
    const int h = cfg_.hidden;
    actor = Mlp({state_dim, h, h, 1}, OutputHead::bounded, cfg_.action_low, cfg_.action_high);
    critic1 = Mlp({state_dim + 1, h, h, 1});
    critic2 = Mlp({state_dim + 1, h, h, 1});
    actor.initialize(rng, cfg_.actor_final_scale);
    critic1.initialize(rng, 1.0 / std::sqrt(double(h)));
    critic2.initialize(rng, 1.0 / std::sqrt(double(h)));
    actor_target = actor;
    critic1_target = critic1;
    critic2_target = critic2;
}

double Td3Agent::act(const Eigen::VectorXd& s) const { return actor.forward(s)(0, 0); }

double Td3Agent::select_action(const Eigen::VectorXd& s, double sigma, Rng& rng) const
{
    return sample_truncated_action(act(s), sigma, cfg_.action_low, cfg_.action_high, rng);
}

Eigen::MatrixXd Td3Agent::critic_input(const Eigen::MatrixXd& s, const Eigen::RowVectorXd& a) const
{
    Eigen::MatrixXd x(s.rows() + 1, s.cols());
    x.topRows(s.rows()) = s;
    x.bottomRows(1) = a / cfg_.action_high;
    return x;
}

Eigen::RowVectorXd Td3Agent::target(const Batch& b, Rng& rng, bool noise,
                                    Eigen::RowVectorXd* actions) const
{
    Eigen::RowVectorXd a_next = actor_target.forward(b.s_next, ws_.actor_target);
    if (noise && cfg_.sigma_target > 0.0) {
        std::normal_distribution<double> n(0.0, cfg_.sigma_target);
        for (Eigen::Index j = 0; j < a_next.size(); ++j) {
            const double e = std::clamp(n(rng), -cfg_.target_clip, cfg_.target_clip);
            a_next[j] = std::clamp(a_next[j] + e, cfg_.action_low, cfg_.action_high);
        }
    }
    if (actions) *actions = a_next;
    const Eigen::MatrixXd x = critic_input(b.s_next, a_next);
    const Eigen::RowVectorXd q1 = critic1_target.forward(x, ws_.critic1_target);
    const Eigen::RowVectorXd q2 = critic2_target.forward(x, ws_.critic2_target);
    const Eigen::RowVectorXd not_done = (1.0 - b.done.array()).matrix();
    return b.r + cfg_.gamma * not_done.cwiseProduct(q1.cwiseMin(q2));
}

namespace {

double mse_step(Mlp& net, AdamState& opt, const Eigen::MatrixXd& x, const Eigen::RowVectorXd& y,
                double lr, MlpCache& cache, Eigen::VectorXd& grad)
{
    const Eigen::RowVectorXd q = net.forward(x, cache);
    const Eigen::RowVectorXd err = q - y;
    const double n = double(y.size());
    grad.setZero(static_cast<Eigen::Index>(net.parameter_count()));
    net.backward(cache, (2.0 / n) * err, grad);
    adam_update(net.params(), grad, lr, opt);
    return err.squaredNorm() / n;
}

}  // namespace

std::pair<double, double> Td3Agent::critic_update(const Batch& b, const Eigen::RowVectorXd& y)
{
    const Eigen::MatrixXd x = critic_input(b.s, b.a);
    const double l1 = mse_step(critic1, critic1_opt, x, y, cfg_.lr_critic, ws_.critic1, ws_.grad_critic1);
    const double l2 = mse_step(critic2, critic2_opt, x, y, cfg_.lr_critic, ws_.critic2, ws_.grad_critic2);
    ++updates;
    return {l1, l2};
}

double Td3Agent::actor_objective(const Eigen::MatrixXd& s) const
{
    const Eigen::RowVectorXd a = actor.forward(s);
    return -critic1.forward(critic_input(s, a)).mean();
}

Eigen::VectorXd Td3Agent::actor_objective_gradient(const Eigen::MatrixXd& s) const
{
    const Eigen::RowVectorXd a = actor.forward(s, ws_.actor);
    critic1.forward(critic_input(s, a), ws_.critic1);
    const double n = double(s.cols());
    const Eigen::MatrixXd dx =
        critic1.backward_input(ws_.critic1, Eigen::RowVectorXd::Constant(s.cols(), -1.0 / n));
    const Eigen::RowVectorXd da = dx.bottomRows(1) / cfg_.action_high;
    ws_.grad_actor.setZero(static_cast<Eigen::Index>(actor.parameter_count()));
    actor.backward(ws_.actor, da, ws_.grad_actor);
    return ws_.grad_actor;
}

bool Td3Agent::actor_update(const Batch& b)
{
    if (updates % cfg_.policy_delay != 0) return false;
    adam_update(actor.params(), actor_objective_gradient(b.s), cfg_.lr_actor, actor_opt);
    return true;
}

void Td3Agent::soft_update_targets()
{
    soft_update(actor_target.params(), actor.params(), cfg_.tau);
    soft_update(critic1_target.params(), critic1.params(), cfg_.tau);
    soft_update(critic2_target.params(), critic2.params(), cfg_.tau);
}

void Td3Agent::train_step(const ReplayBuffer& buffer, Rng& rng)
{
    const Batch b = buffer.sample(cfg_.minibatch, rng);
    const Eigen::RowVectorXd y = target(b, rng);
    critic_update(b, y);
    if (actor_update(b)) soft_update_targets();
}

}  // namespace fastcharge
