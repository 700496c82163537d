#include "fastcharge/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastcharge/errors.hpp"

namespace fastcharge {

Eigen::VectorXd battery_state(const CellOutputs& o)
{
    Eigen::VectorXd s(2);
    s << (o.voltage - 3.0) / 1.5, o.soc;
    return s;
}

BatteryEnv::BatteryEnv(PlantFactory factory, VoltageSohMap map, BatteryEnvConfig cfg)
    : factory_(std::move(factory)), map_(std::move(map)), cfg_(std::move(cfg))
{
    if (map_.empty()) throw EmptyMap("battery environment needs a voltage-SoH map");
    cfg_.protocol.validate();
    cfg_.reward.validate();
    if (!(cfg_.action_high > 0.0)) throw ConfigError("action_high must be > 0");
}

void BatteryEnv::new_cell()
{
    cell_.emplace(factory_());
    ++cells_used_;
    mid_cycle_ = true;
}

Eigen::VectorXd BatteryEnv::reset(Rng&)
{
    const auto& pc = cfg_.protocol;
    if (!cell_ || cfg_.mode == AgingMode::fresh || cell_->outputs().soh <= pc.soh_end) new_cell();
    Cell& c = *cell_;
    if (mid_cycle_) {
        discharge_to_empty(c, pc.discharge_current, pc.sample_seconds);
        c.rest(pc.rest_seconds);
    }
    charge_to_soc(c, pc.precharge_current, pc.soc_precharge, pc.sample_seconds);
    c.rest(pc.rest_seconds);
    mid_cycle_ = true;

    t_start_ = c.state().time;
    v_max_ = lookup_vmax(map_, c.outputs().soh);
    first_step_ = true;
    previous_action_ = 0.0;
    summary_ = {};
    summary_.soh = c.outputs().soh;
    summary_.max_voltage = -std::numeric_limits<double>::infinity();
    summary_.min_eta_side = std::numeric_limits<double>::infinity();
    return battery_state(c.outputs());
}

EnvStep BatteryEnv::step(double action)
{
    if (!cell_) throw ConfigError("battery environment stepped before reset");
    const auto& pc = cfg_.protocol;
    const double a = std::clamp(action, 0.0, cfg_.action_high);
    const auto& o = cell_->step(a, pc.sample_seconds);
    // The first action of an episode has no predecessor to be smooth against.
    const double prev = first_step_ ? a : previous_action_;
    first_step_ = false;
    previous_action_ = a;

    EnvStep r;
    r.reward = reward_terms(o.soc, o.voltage, v_max_, a, prev, cfg_.reward).total();
    const double minutes = (cell_->state().time - t_start_) / 60.0;
    r.done = o.soc >= pc.soc_target;
    if (!r.done && minutes >= cfg_.reward.timeout_minutes) {
        r.done = true;
        r.timed_out = true;
        r.reward += cfg_.reward.timeout_penalty;
    }
    r.state = battery_state(o);

    summary_.total_reward += r.reward;
    summary_.max_voltage = std::max(summary_.max_voltage, o.voltage);
    summary_.min_eta_side = std::min(summary_.min_eta_side, o.eta_side);
    summary_.charge_minutes = minutes;
    summary_.timed_out = r.timed_out;
    ++summary_.steps;
    return r;
}

std::unique_ptr<Environment> BatteryEnv::clone() const { return std::make_unique<BatteryEnv>(*this); }

Eigen::VectorXd TrackingEnv::reset(Rng& rng)
{
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    std::uniform_real_distribution<double> tgt(0.2, 0.8);
    x0_ = x_ = pos(rng);
    target_ = tgt(rng);
    t_ = 0;
    summary_ = {};
    Eigen::VectorXd s(2);
    s << x_, target_;
    return s;
}

EnvStep TrackingEnv::step(double action)
{
    const double a = std::clamp(action, 0.0, cfg_.action_high);
    x_ += cfg_.max_speed * (2.0 * a / cfg_.action_high - 1.0);
    ++t_;
    const double d = x_ - target_;
    EnvStep r;
    r.reward = std::exp(-d * d / (2.0 * cfg_.width * cfg_.width));
    r.done = t_ >= cfg_.horizon;
    r.state.resize(2);
    r.state << x_, target_;
    summary_.total_reward += r.reward;
    ++summary_.steps;
    return r;
}

double TrackingEnv::optimal_return() const { return optimal_return(cfg_, x0_, target_); }

double TrackingEnv::optimal_return(const TrackingConfig& cfg, double x0, double target)
{
    double d = std::abs(x0 - target);
    double total = 0.0;
    for (int k = 0; k < cfg.horizon; ++k) {
        d = std::max(d - cfg.max_speed, 0.0);
        total += std::exp(-d * d / (2.0 * cfg.width * cfg.width));
    }
    return total;
}

EpisodeSummary rollout(Environment& env, const Mlp& actor, Rng& rng)
{
    Eigen::VectorXd s = env.reset(rng);
    for (;;) {
        const EnvStep st = env.step(actor.forward(s)(0, 0));
        if (st.done) break;
        s = st.state;
    }
    return env.summary();
}

namespace {

class PolicyStrategy : public ChargingStrategy {
public:
    PolicyStrategy(const Mlp& actor, std::string name) : actor_(actor), name_(std::move(name)) {}
    std::string name() const override { return name_; }
    void begin_charge(const Cell&) override {}
    double next_current(const Cell& cell, double) override
    {
        return actor_.forward(battery_state(cell.outputs()))(0, 0);
    }
    std::unique_ptr<ChargingStrategy> clone() const override
    {
        return std::make_unique<PolicyStrategy>(*this);
    }

private:
    Mlp actor_;
    std::string name_;
};

}  // namespace

std::unique_ptr<ChargingStrategy> make_policy_strategy(const Mlp& actor, std::string name)
{
    return std::make_unique<PolicyStrategy>(actor, std::move(name));
}

}  // namespace fastcharge
