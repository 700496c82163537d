#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fastcharge/mlp.hpp"

namespace fastcharge {

struct Transition {
    Eigen::VectorXd s;
    double a{};
    double r{};
    Eigen::VectorXd s_next;
    bool done{};
};

/// Column-per-sample view of a minibatch.
struct Batch {
    Eigen::MatrixXd s;       // state_dim x n
    Eigen::RowVectorXd a;    // 1 x n
    Eigen::RowVectorXd r;
    Eigen::MatrixXd s_next;
    Eigen::RowVectorXd done;  // 1 for terminal
    Eigen::Index size() const { return a.size(); }
};

/// Fixed-capacity ring; the oldest transition is overwritten when full.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int state_dim);

    void push(const Transition& t);
    /// Uniform draw with replacement; throws Underfilled when fewer than
    /// batch_size transitions are stored.
    Batch sample(std::size_t batch_size, Rng& rng) const;
    /// The indices sample() would draw with the same rng state.
    std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
    Batch gather(const std::vector<std::size_t>& indices) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    int state_dim() const { return state_dim_; }
    /// i-th stored transition, 0 being the oldest.
    Transition at(std::size_t i) const;

private:
    std::size_t slot(std::size_t i) const { return (head_ + capacity_ - size_ + i) % capacity_; }

    std::size_t capacity_;
    int state_dim_;
    std::size_t head_{0};  // next write slot
    std::size_t size_{0};
    std::vector<double> s_, a_, r_, s_next_, done_;
};

struct Td3Config {
    double lr_actor{1e-4};
    double lr_critic{1e-4};
    double gamma{0.99};
    std::size_t buffer_capacity{1000000};
    std::size_t minibatch{256};
    double tau{0.005};
    int policy_delay{1};
    int hidden{200};
    double sigma_explore_start{0.5};  // A
    double sigma_explore_end{0.05};   // A
    int sigma_decay_episodes{500};
    long warmup_steps{5000};  // uniform random actions before the policy acts
    double sigma_target{0.2};  // A
    double target_clip{0.5};   // A
    double action_low{0.0};
    double action_high{10.0};
    double actor_final_scale{3e-3};
    unsigned long long seed{1};

    void validate() const;
};

/// a = clamp(mu + eps, lo, hi) with eps ~ N(0, sigma^2) conditioned on
/// mu + eps landing inside [lo, hi]. sigma = 0 returns mu.
double sample_truncated_action(double mu, double sigma, double lo, double hi, Rng& rng);

class Td3Agent {
public:
    Td3Agent(int state_dim, const Td3Config& cfg);

    const Td3Config& config() const { return cfg_; }
    int state_dim() const { return state_dim_; }

    double act(const Eigen::VectorXd& s) const;
    double select_action(const Eigen::VectorXd& s, double sigma, Rng& rng) const;

    /// Critic input [s; a / a_high].
    Eigen::MatrixXd critic_input(const Eigen::MatrixXd& s, const Eigen::RowVectorXd& a) const;

    /// y = r + gamma (1 - done) min(Q1', Q2') at a smoothed target action.
    /// With noise == false the target action is mu'(s') itself. The smoothed
    /// actions are copied to `actions` when given.
    Eigen::RowVectorXd target(const Batch& b, Rng& rng, bool noise = true,
                              Eigen::RowVectorXd* actions = nullptr) const;

    /// One Adam step per critic on the mean squared error to y; returns the
    /// losses before the step.
    std::pair<double, double> critic_update(const Batch& b, const Eigen::RowVectorXd& y);
    /// Ascends mean Q1(s, mu(s)) when the update counter is a multiple of
    /// policy_delay; returns whether it ran.
    bool actor_update(const Batch& b);
    void soft_update_targets();

    /// target + critic update + delayed actor update + soft update.
    void train_step(const ReplayBuffer& buffer, Rng& rng);

    /// Gradient of -mean Q1(s, mu(s)) with respect to the actor parameters.
    Eigen::VectorXd actor_objective_gradient(const Eigen::MatrixXd& s) const;
    double actor_objective(const Eigen::MatrixXd& s) const;

    Mlp actor, critic1, critic2;
    Mlp actor_target, critic1_target, critic2_target;
    AdamState actor_opt, critic1_opt, critic2_opt;
    long updates{0};

private:
    // Reused buffers; avoids large per-update allocations.
    struct Workspace {
        MlpCache actor, critic1, critic2, actor_target, critic1_target, critic2_target;
        Eigen::VectorXd grad_actor, grad_critic1, grad_critic2;
    };

    Td3Config cfg_;
    int state_dim_;
    mutable Workspace ws_;
};

}  // namespace fastcharge
