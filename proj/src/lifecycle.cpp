#include "fastcharge/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fastcharge/degradation.hpp"
#include "fastcharge/errors.hpp"

namespace fastcharge {

void ProtocolConfig::validate() const
{
    if (!(soc_precharge > 0 && soc_precharge < soc_target && soc_target <= 1))
        throw ConfigError("protocol: need 0 < soc_precharge < soc_target <= 1");
    if (!(soh_end > 0 && soh_end < 1)) throw ConfigError("protocol.soh_end: must lie in (0, 1)");
    if (!(rest_seconds >= 0)) throw ConfigError("protocol.rest_seconds: must be >= 0");
    if (!(sample_seconds > 0)) throw ConfigError("protocol.sample_seconds: must be > 0");
    if (!(precharge_current > 0)) throw ConfigError("protocol.precharge_current: must be > 0");
    if (!(discharge_current > 0)) throw ConfigError("protocol.discharge_current: must be > 0");
    if (!(capacity_charge_current > 0)) throw ConfigError("protocol.capacity_charge_current: must be > 0");
    if (!(capacity_taper_current > 0)) throw ConfigError("protocol.capacity_taper_current: must be > 0");
    if (max_cycles < 1) throw ConfigError("protocol.max_cycles: must be >= 1");
    if (!(charge_timeout_minutes > 0)) throw ConfigError("protocol.charge_timeout_minutes: must be > 0");
}

std::vector<double> objective_cost(const Trace& trace, const ObjectiveWeights& w)
{
    std::vector<double> j;
    j.reserve(trace.size());
    for (const auto& r : trace)
        j.push_back(w.w_soc * std::abs(w.soc_target - r.soc) + w.w_side * std::abs(r.eta_side - w.eta_min));
    return j;
}

double objective_integral(const Trace& trace, const ObjectiveWeights& w)
{
    const auto j = objective_cost(trace, w);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) total += j[k] * (trace[k + 1].t_s - trace[k].t_s);
    return total;
}

double compute_efc(double ah_discharged, double q_nominal)
{
    if (!(q_nominal > 0)) throw ConfigError("nominal capacity must be > 0");
    return ah_discharged / q_nominal;
}

namespace {

TraceRow row_of(const Cell& cell, double t0)
{
    const auto& o = cell.outputs();
    const auto& s = cell.state();
    return {s.time - t0, o.current, o.voltage, o.soc, o.soh, o.eta_side, s.sei_inner + s.sei_outer,
            s.dead_li};
}

}  // namespace

ChargeResult run_charge(Cell& cell, ChargingStrategy& strategy, double soc_target, double dt,
                        double timeout_minutes, bool record)
{
    ChargeResult r;
    r.max_voltage = -std::numeric_limits<double>::infinity();
    r.min_eta_side = std::numeric_limits<double>::infinity();
    const double t0 = cell.state().time;
    strategy.begin_charge(cell);
    if (record) r.trace.push_back(row_of(cell, t0));
    while (cell.outputs().soc < soc_target) {
        if (cell.state().time - t0 >= timeout_minutes * 60.0) {
            r.timed_out = true;
            break;
        }
        const double i = strategy.next_current(cell, dt);
        if (!(i > 0)) break;
        cell.step(i, dt);
        r.max_voltage = std::max(r.max_voltage, cell.outputs().voltage);
        r.min_eta_side = std::min(r.min_eta_side, cell.outputs().eta_side);
        if (record) r.trace.push_back(row_of(cell, t0));
    }
    r.minutes = (cell.state().time - t0) / 60.0;
    return r;
}

double discharge_to_empty(Cell& cell, double current, double dt)
{
    const auto& p = cell.params().cell;
    const double ah0 = cell.state().ah_discharged;
    for (int guard = 0; guard < 1'000'000; ++guard) {
        const double soc = cell.outputs().soc;
        if (soc <= 1e-9 || cell.outputs().voltage <= p.min_voltage) break;
        const double remaining_s =
            soc * window_capacity(cell.state(), p, cell.model().grid) * 3600.0 / current;
        const double h = std::min(dt, remaining_s);
        if (h < 1e-6) break;
        cell.step(-current, h);
    }
    return cell.state().ah_discharged - ah0;
}

double charge_to_soc(Cell& cell, double current, double soc_target, double dt)
{
    const auto& p = cell.params().cell;
    const double ah0 = cell.state().ah_charged;
    for (int guard = 0; guard < 1'000'000; ++guard) {
        const double soc = cell.outputs().soc;
        if (soc >= soc_target - 1e-9 || cell.outputs().voltage >= p.max_voltage) break;
        const double remaining_s =
            (soc_target - soc) * window_capacity(cell.state(), p, cell.model().grid) * 3600.0 / current;
        const double h = std::min(dt, remaining_s);
        if (h < 1e-6) break;
        cell.step(current, h);
    }
    return cell.state().ah_charged - ah0;
}

double measure_capacity(Cell& cell, const ProtocolConfig& cfg)
{
    discharge_to_empty(cell, cfg.discharge_current, cfg.sample_seconds);
    ControllerConfig cv;
    cv.i_cc = cfg.capacity_charge_current;
    cv.i_max = std::max(cfg.capacity_charge_current, cv.i_max);
    cv.v_cut = cfg.capacity_voltage;
    cv.i_taper_min = cfg.capacity_taper_current;
    cv.soc_target = 1.0;
    auto strategy = make_cc_cv(cv, "capacity check");
    run_charge(cell, *strategy, 1.0, cfg.sample_seconds, 24 * 60.0, false);
    return discharge_to_empty(cell, cfg.discharge_current, cfg.sample_seconds);
}

double ProtocolResult::average_charge_minutes() const
{
    if (cycles.empty()) return 0.0;
    double total = 0.0;
    for (const auto& c : cycles) total += c.charge_minutes;
    return total / static_cast<double>(cycles.size());
}

ProtocolResult run_protocol(ChargingStrategy& strategy, Cell& plant, const ProtocolConfig& cfg,
                            const ProtocolOptions& options)
{
    cfg.validate();
    ProtocolResult result;
    result.strategy = strategy.name();
    const double q_nominal = plant.params().cell.nominal_capacity;
    const double dt = cfg.sample_seconds;

    const double q0 = measure_capacity(plant, cfg);
    result.initial_capacity = q0;
    plant.reset_capacity_reference(q0);
    const double ah_start = plant.state().ah_discharged;

    for (int cycle = 1;; ++cycle) {
        if (cycle > cfg.max_cycles)
            throw BudgetExceeded(strategy.name() + ": SoH still above " + std::to_string(cfg.soh_end) +
                                 " after " + std::to_string(cfg.max_cycles) + " cycles");
        charge_to_soc(plant, cfg.precharge_current, cfg.soc_precharge, dt);
        plant.rest(cfg.rest_seconds);

        CycleMetrics m;
        m.cycle = cycle;
        m.soh_at_cycle = plant.outputs().soh;
        auto charge = run_charge(plant, strategy, cfg.soc_target, dt, cfg.charge_timeout_minutes, true);
        if (charge.timed_out)
            throw BudgetExceeded(strategy.name() + ": charge in cycle " + std::to_string(cycle) +
                                 " exceeded " + std::to_string(cfg.charge_timeout_minutes) + " min");
        m.charge_minutes = charge.minutes;
        m.max_voltage = charge.max_voltage;
        m.min_eta_side = charge.min_eta_side;
        m.objective = objective_integral(charge.trace, options.objective);
        m.end_soc = plant.outputs().soc;

        discharge_to_empty(plant, cfg.discharge_current, dt);
        plant.rest(cfg.rest_seconds);

        result.ah_discharged = plant.state().ah_discharged - ah_start;
        m.efc_cumulative = compute_efc(result.ah_discharged, q_nominal);
        m.soh_after = plant.outputs().soh;
        m.capacity_loss_plating_ah = plant.state().ledger.q_loss_plating;
        m.capacity_loss_sei_ah = plant.state().ledger.q_loss_sei;
        result.cycles.push_back(m);
        if (options.snapshot_cycles.contains(cycle)) result.snapshots.emplace_back(cycle, charge.trace);
        result.last_trace = std::move(charge.trace);

        if (options.on_cycle && !options.on_cycle(m)) break;
        if (m.soh_after <= cfg.soh_end) {
            result.reached_end_of_life = true;
            break;
        }
    }
    return result;
}

VoltageSohMap build_voltage_soh_map(const PlantFactory& plant_factory, const ControllerConfig& cop,
                                    const ProtocolConfig& protocol, const MapBuildConfig& cfg,
                                    ProtocolResult* run)
{
    Cell plant = plant_factory();
    auto strategy = make_cc_cop(cop, "CC-COP map");
    auto result = run_protocol(*strategy, plant, protocol);
    std::vector<std::pair<double, double>> samples;
    for (const auto& c : result.cycles) samples.emplace_back(c.soh_at_cycle, c.max_voltage);
    auto map = regularize_map(samples, cfg.bin_width, cfg.v_low, cfg.v_high);
    if (run) *run = std::move(result);
    return map;
}

}  // namespace fastcharge
