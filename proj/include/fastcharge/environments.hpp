#pragma once

#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fastcharge/cell.hpp"
#include "fastcharge/controllers.hpp"
#include "fastcharge/lifecycle.hpp"
#include "fastcharge/mlp.hpp"
#include "fastcharge/reward.hpp"
#include "fastcharge/voltage_map.hpp"

namespace fastcharge {

struct EnvStep {
    Eigen::VectorXd state;
    double reward{};
    bool done{};
    bool timed_out{};
};

struct EpisodeSummary {
    double total_reward{};
    double max_voltage{};
    double min_eta_side{};
    double charge_minutes{};
    double soh{};  // at episode start
    int steps{};
    bool timed_out{};
};

/// Episodic environment with a scalar action in [action_low, action_high].
class Environment {
public:
    virtual ~Environment() = default;
    virtual int state_dim() const = 0;
    virtual double action_low() const = 0;
    virtual double action_high() const = 0;
    virtual Eigen::VectorXd reset(Rng& rng) = 0;
    virtual EnvStep step(double action) = 0;
    virtual const EpisodeSummary& summary() const = 0;
    virtual std::unique_ptr<Environment> clone() const = 0;
};

/// [(V - 3.0) / 1.5, SoC]
Eigen::VectorXd battery_state(const CellOutputs& o);

enum class AgingMode {
    persistent,  // one cell ages across episodes, replaced at end of life
    fresh,       // a new cell for every episode
};

struct BatteryEnvConfig {
    ProtocolConfig protocol;
    RewardConfig reward;
    AgingMode mode{AgingMode::persistent};
    double action_high{10.0};  // A
};

/// One episode is one precharged 20 % -> 80 % charge, controlled every
/// protocol.sample_seconds. Between episodes the cell goes through the rest
/// of the cycling protocol (discharge, rest, precharge, rest).
class BatteryEnv : public Environment {
public:
    BatteryEnv(PlantFactory factory, VoltageSohMap map, BatteryEnvConfig cfg);

    int state_dim() const override { return 2; }
    double action_low() const override { return 0.0; }
    double action_high() const override { return cfg_.action_high; }
    Eigen::VectorXd reset(Rng& rng) override;
    EnvStep step(double action) override;
    const EpisodeSummary& summary() const override { return summary_; }
    std::unique_ptr<Environment> clone() const override;

    const Cell& cell() const { return *cell_; }
    double v_max() const { return v_max_; }
    int cells_used() const { return cells_used_; }

private:
    void new_cell();

    PlantFactory factory_;
    VoltageSohMap map_;
    BatteryEnvConfig cfg_;
    std::optional<Cell> cell_;
    bool mid_cycle_{false};  // an episode ran since the last discharge
    double t_start_{};
    double v_max_{};
    double previous_action_{};
    bool first_step_{true};
    int cells_used_{0};
    EpisodeSummary summary_;
};

struct TrackingConfig {
    int horizon{20};
    double max_speed{0.1};  // per step at the action bounds
    double width{0.05};     // reward bandwidth
    double action_high{10.0};
};

/// 1-D tracking task: state [x, target], x' = x + v * (2 a / a_high - 1),
/// reward exp(-(x' - target)^2 / (2 width^2)). Moving straight to the target
/// at full speed is optimal, so the best return is known in closed form.
class TrackingEnv : public Environment {
public:
    explicit TrackingEnv(TrackingConfig cfg = {}) : cfg_(cfg) {}

    int state_dim() const override { return 2; }
    double action_low() const override { return 0.0; }
    double action_high() const override { return cfg_.action_high; }
    Eigen::VectorXd reset(Rng& rng) override;
    EnvStep step(double action) override;
    const EpisodeSummary& summary() const override { return summary_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<TrackingEnv>(*this); }

    /// Best achievable return from the current episode's start.
    double optimal_return() const;
    static double optimal_return(const TrackingConfig& cfg, double x0, double target);

private:
    TrackingConfig cfg_;
    double x_{}, x0_{}, target_{};
    int t_{};
    EpisodeSummary summary_;
};

/// Runs one deterministic episode with the given policy; returns its summary.
EpisodeSummary rollout(Environment& env, const Mlp& actor, Rng& rng);

/// Wraps a trained actor as a charging strategy.
std::unique_ptr<ChargingStrategy> make_policy_strategy(const Mlp& actor, std::string name = "Proposed");

}  // namespace fastcharge
