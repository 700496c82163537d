#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fastcharge/cell.hpp"
#include "fastcharge/controllers.hpp"
#include "fastcharge/voltage_map.hpp"

namespace fastcharge {

struct ProtocolConfig {
    double soc_precharge{0.2};
    double soc_target{0.8};
    double rest_seconds{3600.0};
    double soh_end{0.8};
    double sample_seconds{20.0};
    double precharge_current{5.0 / 3.0};  // A
    double discharge_current{5.0};        // A
    double capacity_charge_current{5.0};  // A, CC stage of the capacity check
    double capacity_taper_current{0.25};  // A, CV stage end of the capacity check
    double capacity_voltage{4.2};         // V
    int max_cycles{5000};
    double charge_timeout_minutes{480.0};

    void validate() const;
};

/// One row of a charge trace, sampled at the control period.
struct TraceRow {
    double t_s{};
    double current{};
    double voltage{};
    double soc{};
    double soh{};
    double eta_side{};
    double sei_thickness{};  // m, inner + outer
    double dead_li{};        // mol/m^3
};
using Trace = std::vector<TraceRow>;

struct CycleMetrics {
    int cycle{};
    double charge_minutes{};
    double efc_cumulative{};
    double soh_at_cycle{};     // at the start of the strategy charge
    double soh_after{};        // at the end-of-cycle check
    double capacity_loss_plating_ah{};
    double capacity_loss_sei_ah{};
    double max_voltage{};
    double min_eta_side{};
    double objective{};        // integral of J over the charge, s
    double end_soc{};
};

struct ObjectiveWeights {
    double w_soc{1.0};
    double w_side{1.0};
    double eta_min{-0.145};  // V
    double soc_target{0.8};
};

/// J(t) = w1 |SoC* - SoC| + w2 |eta_side - eta_min| for each trace row.
std::vector<double> objective_cost(const Trace& trace, const ObjectiveWeights& w);
/// Time integral of J by the left rectangle rule on the trace timestamps.
double objective_integral(const Trace& trace, const ObjectiveWeights& w);

double compute_efc(double ah_discharged, double q_nominal);

struct ChargeResult {
    double minutes{};
    double max_voltage{};
    double min_eta_side{};
    bool timed_out{};
    Trace trace;
};

/// Samples the strategy every dt until it returns zero, the SoC target is
/// met or the timeout passes.
ChargeResult run_charge(Cell& cell, ChargingStrategy& strategy, double soc_target, double dt,
                        double timeout_minutes, bool record = true);

/// Constant-current discharge to 0 % SoC; the last step is shortened to land
/// on the target. Also stops at the cell's minimum voltage. Returns Ah.
double discharge_to_empty(Cell& cell, double current, double dt);

/// Constant-current charge to a SoC; returns Ah.
double charge_to_soc(Cell& cell, double current, double soc_target, double dt);

/// Discharge, CC-CV charge to 100 %, full discharge; returns the Ah of the
/// final discharge. The cell's ledger is not touched.
double measure_capacity(Cell& cell, const ProtocolConfig& cfg);

struct ProtocolOptions {
    std::set<int> snapshot_cycles{1, 200};
    ObjectiveWeights objective;
    /// Called after every cycle; returning false stops the run early.
    std::function<bool(const CycleMetrics&)> on_cycle;
};

struct ProtocolResult {
    std::string strategy;
    double initial_capacity{};  // Ah, measured
    std::vector<CycleMetrics> cycles;
    std::vector<std::pair<int, Trace>> snapshots;
    Trace last_trace;
    bool reached_end_of_life{};
    double ah_discharged{};  // protocol loop only

    double average_charge_minutes() const;
    double final_efc() const { return cycles.empty() ? 0.0 : cycles.back().efc_cumulative; }
};

ProtocolResult run_protocol(ChargingStrategy& strategy, Cell& plant, const ProtocolConfig& cfg,
                            const ProtocolOptions& options = {});

using PlantFactory = std::function<Cell()>;

struct MapBuildConfig {
    double bin_width{0.01};
    double v_low{3.9};   // safe band
    double v_high{4.4};
};

/// Runs the protocol under CC-COP and turns per-cycle (start SoH, peak
/// voltage) pairs into a regularized map.
VoltageSohMap build_voltage_soh_map(const PlantFactory& plant, const ControllerConfig& cop,
                                    const ProtocolConfig& protocol, const MapBuildConfig& cfg = {},
                                    ProtocolResult* run = nullptr);

}  // namespace fastcharge
