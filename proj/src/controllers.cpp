#include "fastcharge/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "fastcharge/errors.hpp"

namespace fastcharge {

void ControllerConfig::validate() const
{
    if (!(i_max > 0)) throw ConfigError("controller.i_max: must be > 0");
    if (!(i_cc > 0 && i_cc <= i_max)) throw ConfigError("controller.i_cc: must lie in (0, i_max]");
    if (!(i_taper_min > 0)) throw ConfigError("controller.i_taper_min: must be > 0");
    if (!(soc_target > 0 && soc_target <= 1)) throw ConfigError("controller.soc_target: must lie in (0, 1]");
    if (!(v_cut > 0)) throw ConfigError("controller.v_cut: must be > 0");
    if (!(kp >= 0) || !(ki >= 0)) throw ConfigError("controller.kp/ki: must be >= 0");
    if (!(voltage_tol > 0)) throw ConfigError("controller.voltage_tol: must be > 0");
}

double max_current_below_voltage(const StepPreview& preview, double v_cut, double i_upper, double tol)
{
    double f_hi = preview(i_upper).voltage - v_cut;
    if (f_hi <= 0) return i_upper;
    double lo = 0.0, hi = i_upper;
    double f_lo = preview(0.0).voltage - v_cut;
    if (f_lo > 0) return 0.0;
    // Illinois-modified regula falsi; lo always stays feasible. w_lo and w_hi
    // are the weighted residuals used for the secant, f_lo the true one.
    double w_lo = f_lo, w_hi = f_hi;
    int side = 0;
    for (int it = 0; it < 60; ++it) {
        if (f_lo >= -tol || hi - lo < 1e-6) break;
        double x = lo - w_lo * (hi - lo) / (w_hi - w_lo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = preview(x).voltage - v_cut;
        if (fx <= 0) {
            lo = x;
            f_lo = w_lo = fx;
            if (side == -1) w_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            w_hi = fx;
            if (side == 1) w_lo *= 0.5;
            side = 1;
        }
    }
    return lo;
}

namespace {

double cv_with_cutoff(const CellOutputs& meas, const ControllerConfig& cfg, double v_cut,
                      PhaseState& st, const StepPreview& preview)
{
    if (st.phase == ChargePhase::done || meas.soc >= cfg.soc_target) {
        st.phase = ChargePhase::done;
        return st.current = 0.0;
    }
    if (st.phase == ChargePhase::constant_current) {
        if (meas.voltage < v_cut && preview(cfg.i_cc).voltage <= v_cut) return st.current = cfg.i_cc;
        st.phase = ChargePhase::constant_voltage;
    }
    const double i = max_current_below_voltage(preview, v_cut, cfg.i_cc, cfg.voltage_tol);
    if (i < cfg.i_taper_min) {
        st.phase = ChargePhase::done;
        return st.current = 0.0;
    }
    return st.current = i;
}

}  // namespace

double cc_cv_step(const CellOutputs& meas, const ControllerConfig& cfg, PhaseState& st,
                  const StepPreview& preview)
{
    return cv_with_cutoff(meas, cfg, cfg.v_cut, st, preview);
}

double cc_cv_v_step(const CellOutputs& meas, const ControllerConfig& cfg, const VoltageSohMap& map,
                    PhaseState& st, const StepPreview& preview)
{
    if (!st.started) {
        st.v_cut = lookup_vmax(map, meas.soh);
        st.started = true;
    }
    return cv_with_cutoff(meas, cfg, st.v_cut, st, preview);
}

double cc_cop_step(const CellOutputs& meas, const ControllerConfig& cfg, PhaseState& st, double dt)
{
    if (st.phase == ChargePhase::done || meas.soc >= cfg.soc_target) {
        st.phase = ChargePhase::done;
        return st.current = 0.0;
    }
    if (st.phase == ChargePhase::constant_current) {
        if (meas.eta_side > cfg.eta_ref) return st.current = cfg.i_max;
        st.phase = ChargePhase::regulating;
        st.current = cfg.i_max;
        st.integral = 0.0;
    }
    const double e = meas.eta_side - cfg.eta_ref;
    const double integral = st.integral + e * dt;
    const double raw = st.current + cfg.kp * e + cfg.ki * integral;
    const double i = std::clamp(raw, 0.0, cfg.i_max);
    // conditional integration: freeze the integrator while saturated
    if (i == raw) st.integral = integral;
    return st.current = i;
}

namespace {

class CcCv final : public ChargingStrategy {
public:
    CcCv(ControllerConfig cfg, std::string name) : cfg_(cfg), name_(std::move(name)) {}
    std::string name() const override { return name_; }
    void begin_charge(const Cell&) override { st_ = {}; }
    double next_current(const Cell& cell, double dt) override
    {
        return cc_cv_step(cell.outputs(), cfg_, st_, [&](double i) { return cell.preview(i, dt); });
    }
    std::unique_ptr<ChargingStrategy> clone() const override { return std::make_unique<CcCv>(*this); }

private:
    ControllerConfig cfg_;
    std::string name_;
    PhaseState st_;
};

class CcCvV final : public ChargingStrategy {
public:
    CcCvV(ControllerConfig cfg, VoltageSohMap map, std::string name)
        : cfg_(cfg), map_(std::move(map)), name_(std::move(name))
    {
        if (map_.empty()) throw EmptyMap("CC-CV-V needs a voltage-SoH map");
    }
    std::string name() const override { return name_; }
    void begin_charge(const Cell&) override { st_ = {}; }
    double next_current(const Cell& cell, double dt) override
    {
        return cc_cv_v_step(cell.outputs(), cfg_, map_, st_,
                            [&](double i) { return cell.preview(i, dt); });
    }
    std::unique_ptr<ChargingStrategy> clone() const override { return std::make_unique<CcCvV>(*this); }

private:
    ControllerConfig cfg_;
    VoltageSohMap map_;
    std::string name_;
    PhaseState st_;
};

class CcCop final : public ChargingStrategy {
public:
    CcCop(ControllerConfig cfg, std::string name) : cfg_(cfg), name_(std::move(name)) {}
    std::string name() const override { return name_; }
    void begin_charge(const Cell&) override { st_ = {}; }
    double next_current(const Cell& cell, double dt) override
    {
        return cc_cop_step(cell.outputs(), cfg_, st_, dt);
    }
    std::unique_ptr<ChargingStrategy> clone() const override { return std::make_unique<CcCop>(*this); }

private:
    ControllerConfig cfg_;
    std::string name_;
    PhaseState st_;
};

class ConstantCurrent final : public ChargingStrategy {
public:
    ConstantCurrent(double current, double soc_target, std::string name)
        : current_(current), target_(soc_target), name_(std::move(name))
    {
    }
    std::string name() const override { return name_; }
    void begin_charge(const Cell&) override {}
    double next_current(const Cell& cell, double) override
    {
        return cell.outputs().soc >= target_ ? 0.0 : current_;
    }
    std::unique_ptr<ChargingStrategy> clone() const override
    {
        return std::make_unique<ConstantCurrent>(*this);
    }

private:
    double current_;
    double target_;
    std::string name_;
};

}  // namespace

std::unique_ptr<ChargingStrategy> make_cc_cv(const ControllerConfig& cfg, std::string name)
{
    cfg.validate();
    return std::make_unique<CcCv>(cfg, std::move(name));
}

std::unique_ptr<ChargingStrategy> make_cc_cv_v(const ControllerConfig& cfg, VoltageSohMap map,
                                               std::string name)
{
    cfg.validate();
    return std::make_unique<CcCvV>(cfg, std::move(map), std::move(name));
}

std::unique_ptr<ChargingStrategy> make_cc_cop(const ControllerConfig& cfg, std::string name)
{
    cfg.validate();
    return std::make_unique<CcCop>(cfg, std::move(name));
}

std::unique_ptr<ChargingStrategy> make_constant_current(double current, double soc_target,
                                                        std::string name)
{
    return std::make_unique<ConstantCurrent>(current, soc_target, std::move(name));
}

}  // namespace fastcharge
