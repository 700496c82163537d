#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fastcharge/cell.hpp"
#include "fastcharge/voltage_map.hpp"

namespace fastcharge {

struct ControllerConfig {
    double i_cc{10.0};          // A
    double v_cut{4.2};          // V
    double i_taper_min{0.25};   // A, CV stage ends below this
    double eta_ref{0.01};       // V
    double kp{40.0};            // A/V
    double ki{2.0};             // A/(V s)
    double i_max{10.0};         // A
    double soc_target{0.8};
    double voltage_tol{1e-3};   // V, CV bisection tolerance

    void validate() const;
};

/// Outputs of a hypothetical next step at the given current.
using StepPreview = std::function<CellOutputs(double current)>;

enum class ChargePhase { constant_current, constant_voltage, regulating, done };

struct PhaseState {
    ChargePhase phase{ChargePhase::constant_current};
    double current{};   // last commanded current, A
    double integral{};  // V s
    double v_cut{};     // cut-off frozen at charge start (CC-CV-V)
    bool started{};
};

/// Largest current in [0, i_upper] whose previewed voltage stays at or below
/// v_cut, to within tol.
double max_current_below_voltage(const StepPreview& preview, double v_cut, double i_upper,
                                 double tol);

double cc_cv_step(const CellOutputs& meas, const ControllerConfig& cfg, PhaseState& st,
                  const StepPreview& preview);
double cc_cv_v_step(const CellOutputs& meas, const ControllerConfig& cfg, const VoltageSohMap& map,
                    PhaseState& st, const StepPreview& preview);
double cc_cop_step(const CellOutputs& meas, const ControllerConfig& cfg, PhaseState& st, double dt);

/// A charging policy driven by the lifecycle harness: one call per sample.
class ChargingStrategy {
public:
    virtual ~ChargingStrategy() = default;
    virtual std::string name() const = 0;
    virtual void begin_charge(const Cell& cell) = 0;
    /// Current for the next sampling interval; zero ends the charge.
    virtual double next_current(const Cell& cell, double dt) = 0;
    virtual std::unique_ptr<ChargingStrategy> clone() const = 0;
};

std::unique_ptr<ChargingStrategy> make_cc_cv(const ControllerConfig& cfg, std::string name = "CC-CV");
std::unique_ptr<ChargingStrategy> make_cc_cv_v(const ControllerConfig& cfg, VoltageSohMap map,
                                               std::string name = "CC-CV-V");
std::unique_ptr<ChargingStrategy> make_cc_cop(const ControllerConfig& cfg, std::string name = "CC-COP");
/// Fixed current until the SoC target; used for precharge and discharge legs.
std::unique_ptr<ChargingStrategy> make_constant_current(double current, double soc_target,
                                                        std::string name = "CC");

}  // namespace fastcharge
