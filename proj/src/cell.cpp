#include "fastcharge/cell.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastcharge/electrochem.hpp"
#include "fastcharge/errors.hpp"

namespace fastcharge {

CellModel CellModel::make(ParameterSet params, const GridResolution& resolution,
                          const StepConfig& step)
{
    if (!(step.dt > 0) || !(step.rest_dt > 0)) throw ConfigError("step dt must be > 0");
    if (!(step.newton_tol > 0)) throw ConfigError("newton_tol must be > 0");
    CellModel m{std::move(params), {}, step};
    m.grid = build_grid(m.params.cell, resolution);
    return m;
}

namespace {

double solid_moles(std::span<const double> c, Electrode e, const CellParameters& p,
                   const SpatialGrid& g)
{
    return particle_average(c, g.radial(e)) * p.solid_fraction(e) * p.electrode(e).thickness *
           p.electrode_area;
}

double sei_lithium_moles(double l_total, const ParameterSet& p)
{
    const auto& d = p.degradation;
    const auto& c = p.cell;
    return d.sei_lithium_ratio * c.negative.surface_area_density * c.negative.thickness *
           c.electrode_area * (l_total - d.initial_sei_thickness()) / d.sei_molar_volume;
}

struct AnodeProblem {
    double ocp;
    double i0;
    double eta_film;  // drop across the film seen by intercalation
    double eta_sei;   // drop across the SEI seen by plating
    double n_total;   // lithium flux the applied current delivers, mol/m^2/s
    double n_sei;     // lithium flux consumed by SEI growth
    double c_li;
    double c_e;
    double min_deposition;  // stripping cap (negative), -inf when unlimited
    bool plating;
};

struct AnodeSolution {
    double delta_phi;     // phi_s - phi_e
    double n_deposition;  // lithium flux into plated metal
    double n_intercalation;
    bool clamped{};
};

AnodeSolution solve_anode(const AnodeProblem& pr, const ParameterSet& p, const StepConfig& cfg)
{
    const auto& c = p.cell;
    const double F = c.constants.faraday;
    const double f = 1.0 / c.thermal_voltage();
    const double af = c.transfer_coefficient * f;

    // intercalation-only closed form; exact when plating is off
    const double guess =
        pr.ocp + pr.eta_film + std::asinh(-F * (pr.n_total - pr.n_sei) / (2.0 * pr.i0)) / af;
    if (!pr.plating) return {guess, 0.0, pr.n_total - pr.n_sei};

    bool clamped = false;
    auto deposition = [&](double dphi, double* slope) {
        const auto n = stripping_flux(pr.c_li, pr.c_e, dphi - pr.eta_sei, c.temperature,
                                      p.degradation, c.constants);
        clamped = clamped || n.overflow_clamped;
        double dep = -irreversible_plating_guard(n.value, p.degradation.plating_mode);
        double d = 0.0;
        if (dep > 0.0 || p.degradation.plating_mode == PlatingMode::reversible) {
            const double eta = std::clamp(dphi - pr.eta_sei, -50.0 / f, 50.0 / f);
            const auto& dg = p.degradation;
            d = -dg.plating_rate_constant *
                (pr.c_li * dg.plating_alpha_anodic * f * std::exp(dg.plating_alpha_anodic * f * eta) +
                 pr.c_e * dg.plating_alpha_cathodic * f *
                     std::exp(-dg.plating_alpha_cathodic * f * eta));
        }
        if (dep < pr.min_deposition) {
            dep = pr.min_deposition;
            d = 0.0;
        }
        if (slope) *slope = d;
        return dep;
    };
    auto residual = [&](double dphi, double* slope) {
        const double x = af * (dphi - pr.ocp - pr.eta_film);
        const double n_bv = -2.0 * pr.i0 / F * std::sinh(x);
        double d_dep = 0.0;
        const double dep = deposition(dphi, slope ? &d_dep : nullptr);
        if (slope) *slope = -2.0 * pr.i0 / F * af * std::cosh(x) + d_dep;
        return n_bv + dep + pr.n_sei - pr.n_total;
    };

    const double scale = std::abs(pr.n_total) + std::abs(pr.n_sei) + 2.0 * pr.i0 / F;
    const double tol = cfg.newton_tol * scale;
    double g0 = residual(guess, nullptr);
    if (std::abs(g0) <= tol) {
        const double dep = deposition(guess, nullptr);
        return {guess, dep, pr.n_total - pr.n_sei - dep, clamped};
    }

    // residual is strictly decreasing in dphi; bracket the root
    double lo = guess, hi = guess;
    double width = 0.01;
    for (int k = 0;; ++k) {
        if (k > 60) throw NonConvergence("anode potential solve failed to bracket the root");
        if (g0 > 0) {
            hi = guess + width;
            if (residual(hi, nullptr) < 0) break;
            lo = hi;
        } else {
            lo = guess - width;
            if (residual(lo, nullptr) > 0) break;
            hi = lo;
        }
        width *= 2.0;
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < cfg.max_newton_iters; ++it) {
        double slope = 0.0;
        const double r = residual(x, &slope);
        if (std::abs(r) <= tol || hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
            const double dep = deposition(x, nullptr);
            return {x, dep, pr.n_total - pr.n_sei - dep, clamped};
        }
        if (r > 0)
            lo = x;
        else
            hi = x;
        double next = slope < 0 ? x - r / slope : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw NonConvergence("anode potential solve exceeded " + std::to_string(cfg.max_newton_iters) +
                         " iterations");
}

struct SeiStep {
    double inner;
    double outer;
    double n_sei;  // mol/m^2/s of particle surface
};

SeiStep advance_sei(const CellState& s, const ParameterSet& p, double dt)
{
    const auto& d = p.degradation;
    if (!d.enabled) return {s.sei_inner, s.sei_outer, 0.0};
    const double k = sei_growth_constant(p.cell.temperature, d, p.cell.constants.gas_constant);
    const double li = sei_thickness_after(s.sei_inner, k, dt);
    const double lo = sei_thickness_after(s.sei_outer, k, dt);
    const double dl = (li - s.sei_inner) + (lo - s.sei_outer);
    return {li, lo, d.sei_lithium_ratio * dl / (d.sei_molar_volume * dt)};
}

double sei_flux_now(const CellState& s, const ParameterSet& p)
{
    const auto& d = p.degradation;
    if (!d.enabled) return 0.0;
    const auto r = sei_growth_rate(s.sei_inner, s.sei_outer, p.cell.temperature, d,
                                   p.cell.constants.gas_constant);
    return d.sei_lithium_ratio * (r.inner + r.outer) / d.sei_molar_volume;
}

AnodeProblem anode_problem(const CellState& s, double current, double n_sei, double surface_flux,
                           const ParameterSet& p, const SpatialGrid& g, double& c_ss)
{
    const auto& c = p.cell;
    const auto& neg = c.negative;
    c_ss = surface_concentration(s.c_s_neg, g.r_neg, neg.solid_diffusivity, surface_flux);
    const double c_e = region_average(s.c_e, g.x, Region::negative);
    const double j_interface = -c.current_density(current) / (neg.surface_area_density * neg.thickness);

    AnodeProblem pr{};
    pr.ocp = neg.ocp(c_ss / neg.max_concentration);
    pr.i0 = exchange_current(c_ss, c_e, Electrode::negative, c);
    pr.n_total = intercalation_flux(current, Electrode::negative, c);
    pr.n_sei = n_sei;
    pr.c_li = s.plated_li;
    pr.c_e = c_e;
    pr.min_deposition = -INFINITY;
    pr.plating = p.degradation.enabled;
    if (p.degradation.enabled) {
        pr.eta_sei = sei_overpotential(s.sei_inner, s.sei_outer, j_interface * neg.surface_area_density,
                                       p.degradation, neg.surface_area_density);
        pr.eta_film = pr.eta_sei;
    } else {
        pr.eta_sei = 0.0;
        pr.eta_film = neg.film_resistance * j_interface;
    }
    return pr;
}

void check_bounds(const CellState& s, const ParameterSet& p, const SpatialGrid& g)
{
    auto check_solid = [&](const std::vector<double>& c, Electrode e, const char* name) {
        const double cmax = p.cell.electrode(e).max_concentration;
        for (double v : c)
            if (!(v >= 0.0 && v <= cmax))
                throw PhysicalBoundViolation(std::string(name) +
                                             " solid concentration left [0, c_max]; reduce dt");
        (void)g;
    };
    check_solid(s.c_s_neg, Electrode::negative, "negative");
    check_solid(s.c_s_pos, Electrode::positive, "positive");
    for (double v : s.c_e)
        if (!(v >= electrolyte_floor))
            throw PhysicalBoundViolation("electrolyte concentration fell below " +
                                         std::to_string(electrolyte_floor) + " mol/m^3");
}

void substep(CellState& s, double current, double dt, const ParameterSet& p, const SpatialGrid& g,
             const StepConfig& cfg)
{
    const auto& c = p.cell;
    const auto& neg = c.negative;
    const auto sei = advance_sei(s, p, dt);

    double c_ss = 0.0;
    AnodeSolution sol{};
    try {
        auto pr = anode_problem(s, current, sei.n_sei, s.surface_flux_neg, p, g, c_ss);
        if (p.degradation.plating_mode == PlatingMode::reversible)
            pr.min_deposition = -s.plated_li / (neg.surface_area_density * dt);
        sol = solve_anode(pr, p, cfg);
    } catch (const BoundViolation& e) {
        throw PhysicalBoundViolation(std::string("negative surface: ") + e.what());
    }

    solid_diffusion_implicit(s.c_s_neg, g.r_neg, neg.solid_diffusivity, sol.n_intercalation, dt);
    solid_diffusion_implicit(s.c_s_pos, g.r_pos, c.positive.solid_diffusivity,
                             intercalation_flux(current, Electrode::positive, c), dt);
    electrolyte_diffusion_implicit(s.c_e, current, c, g, dt);

    if (p.degradation.enabled) {
        double plated = s.plated_li + neg.surface_area_density * sol.n_deposition * dt;
        plated = std::max(plated, 0.0);
        // exact decay over the step for the freshly updated plated inventory
        const double gamma = p.degradation.dead_lithium_rate(s.sei_inner + s.sei_outer);
        const double to_dead = plated * -std::expm1(-gamma * dt);
        s.plated_li = plated - to_dead;
        s.dead_li += to_dead;
        s.sei_inner = sei.inner;
        s.sei_outer = sei.outer;
    }
    s.surface_flux_neg = sol.n_intercalation;

    const double ah = current * dt / 3600.0;
    s.ah_throughput += std::abs(ah);
    if (ah > 0)
        s.ah_charged += ah;
    else
        s.ah_discharged -= ah;
    s.time += dt;
    check_bounds(s, p, g);
}

void update_ledger(CellState& s, const ParameterSet& p, const SpatialGrid& g)
{
    const auto inv = lithium_inventory(s, p, g);
    s.ledger.update_losses(moles_to_ah(inv.plated + inv.dead, p.cell.constants),
                           moles_to_ah(inv.sei, p.cell.constants));
}

}  // namespace

CellState initial_state(const ParameterSet& params, const SpatialGrid& grid, double soc)
{
    const auto& c = params.cell;
    if (!(soc >= 0 && soc <= 1)) throw ConfigError("initial SoC must lie in [0, 1]");
    const auto& w = c.window;
    const double x = w.x_0 + soc * (w.x_100 - w.x_0);
    const double y = w.y_100 + (w.x_100 - x) * c.site_inventory(Electrode::negative) /
                                   c.site_inventory(Electrode::positive);
    CellState s;
    s.c_s_neg.assign(grid.r_neg.size(), x * c.negative.max_concentration);
    s.c_s_pos.assign(grid.r_pos.size(), y * c.positive.max_concentration);
    s.c_e.assign(grid.x.size(), c.initial_electrolyte_concentration);
    s.sei_inner = params.degradation.inner_thickness;
    s.sei_outer = params.degradation.outer_thickness;
    const double q = window_capacity(s, c, grid);
    s.ledger.q_initial = q;
    s.ledger.calibrate(q);
    return s;
}

double mean_stoichiometry(const CellState& s, Electrode e, const CellParameters& p,
                          const SpatialGrid& g)
{
    const auto& c = e == Electrode::negative ? s.c_s_neg : s.c_s_pos;
    return particle_average(c, g.radial(e)) / p.electrode(e).max_concentration;
}

double full_charge_stoichiometry(const CellState& s, const CellParameters& p, const SpatialGrid& g)
{
    const double cn = p.site_inventory(Electrode::negative);
    const double cp = p.site_inventory(Electrode::positive);
    const double cyclable = solid_moles(s.c_s_neg, Electrode::negative, p, g) +
                            solid_moles(s.c_s_pos, Electrode::positive, p, g);
    return (cyclable - p.window.y_100 * cp) / cn;
}

double state_of_charge(const CellState& s, const CellParameters& p, const SpatialGrid& g)
{
    const double x = mean_stoichiometry(s, Electrode::negative, p, g);
    const double x_full = full_charge_stoichiometry(s, p, g);
    return std::clamp((x - p.window.x_0) / (x_full - p.window.x_0), 0.0, 1.0);
}

double window_capacity(const CellState& s, const CellParameters& p, const SpatialGrid& g)
{
    const double span = full_charge_stoichiometry(s, p, g) - p.window.x_0;
    return moles_to_ah(span * p.site_inventory(Electrode::negative), p.constants);
}

LithiumInventory lithium_inventory(const CellState& s, const ParameterSet& p, const SpatialGrid& g)
{
    const auto& c = p.cell;
    LithiumInventory inv;
    inv.neg_solid = solid_moles(s.c_s_neg, Electrode::negative, c, g);
    inv.pos_solid = solid_moles(s.c_s_pos, Electrode::positive, c, g);
    for (int k = 0; k < g.x.size(); ++k)
        inv.electrolyte += s.c_e[k] * g.x.porosity[k] * g.x.widths[k] * c.electrode_area;
    const double vol = c.negative.thickness * c.electrode_area;
    inv.plated = s.plated_li * vol;
    inv.dead = s.dead_li * vol;
    inv.sei = sei_lithium_moles(s.sei_inner + s.sei_outer, p);
    return inv;
}

double check_mass_balance(const CellState& before, const CellState& after, double current,
                          double dt, const ParameterSet& p, const SpatialGrid& g)
{
    const auto a = lithium_inventory(before, p, g);
    const auto b = lithium_inventory(after, p, g);
    const double moved = current * dt / p.cell.constants.faraday;
    return std::abs((b.negative_side() - a.negative_side()) - moved) +
           std::abs((b.pos_solid - a.pos_solid) + moved) + std::abs(b.electrolyte - a.electrolyte);
}

CellOutputs evaluate_outputs(const CellState& s, double current, const ParameterSet& p,
                             const SpatialGrid& g, const StepConfig& cfg)
{
    const auto& c = p.cell;
    CellOutputs out;
    out.current = current;

    const double n_sei = sei_flux_now(s, p);
    double n_int = intercalation_flux(current, Electrode::negative, c) - n_sei;
    AnodeProblem pr{};
    AnodeSolution sol{};
    double c_ss_n = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        pr = anode_problem(s, current, n_sei, n_int, p, g, c_ss_n);
        sol = solve_anode(pr, p, cfg);
        n_int = sol.n_intercalation;
    }

    const auto& pos = c.positive;
    const double n_pos = intercalation_flux(current, Electrode::positive, c);
    const double c_ss_p = surface_concentration(s.c_s_pos, g.r_pos, pos.solid_diffusivity, n_pos);
    const double c_e_p = region_average(s.c_e, g.x, Region::positive);
    const double i0_p = exchange_current(c_ss_p, c_e_p, Electrode::positive, c);
    const double u_p = pos.ocp(c_ss_p / pos.max_concentration);
    const double eta_p = reaction_overpotential(current, Electrode::positive, i0_p, c);
    const double j_p = c.current_density(current) / (pos.surface_area_density * pos.thickness);
    const double dphi_p = u_p + eta_p + pos.film_resistance * j_p;
    const double dphi_e = electrolyte_potential_drop(s.c_e, current, c, g);

    out.voltage = dphi_p - sol.delta_phi + dphi_e;
    out.ocv = u_p - pr.ocp;
    out.phi_sn = 0.0;
    out.phi_en = -sol.delta_phi;
    out.eta_side = side_reaction_overpotential(out.phi_sn, out.phi_en, p.degradation);
    out.eta_sei = pr.eta_sei;
    out.eta_neg = sol.delta_phi - pr.ocp - pr.eta_film;
    out.eta_pos = eta_p;
    out.c_ss_neg = c_ss_n;
    out.c_ss_pos = c_ss_p;
    out.soc = state_of_charge(s, c, g);
    out.soh = state_of_health(s.ledger);
    out.plating_flux_clamped = sol.clamped;
    return out;
}

double terminal_voltage(const CellState& s, double current, const ParameterSet& p,
                        const SpatialGrid& g)
{
    return evaluate_outputs(s, current, p, g).voltage;
}

StepResult step(const CellState& s, double current, double dt, const ParameterSet& p,
                const SpatialGrid& g, const StepConfig& cfg)
{
    if (!(dt > 0)) throw ConfigError("step dt must be > 0");
    const double h = current == 0.0 ? cfg.rest_dt : cfg.dt;
    const double n = std::ceil(dt / h - 1e-9);
    if (n > cfg.max_substeps)
        throw ConfigError("step of " + std::to_string(dt) + " s needs more than max_substeps");
    const int count = std::max(1, static_cast<int>(n));
    StepResult r{s, {}};
    for (int k = 0; k < count; ++k) substep(r.state, current, dt / count, p, g, cfg);
    update_ledger(r.state, p, g);
    try {
        r.outputs = evaluate_outputs(r.state, current, p, g, cfg);
    } catch (const BoundViolation& e) {
        throw PhysicalBoundViolation(e.what());
    }
    return r;
}

Cell::Cell(CellModel model, double soc)
    : model_(std::move(model)), state_(initial_state(model_.params, model_.grid, soc))
{
    outputs_ = evaluate_outputs(state_, 0.0, model_.params, model_.grid, model_.step);
}

const CellOutputs& Cell::step(double current, double dt)
{
    auto r = fastcharge::step(state_, current, dt, model_.params, model_.grid, model_.step);
    state_ = std::move(r.state);
    outputs_ = r.outputs;
    return outputs_;
}

CellOutputs Cell::preview(double current, double dt) const
{
    return fastcharge::step(state_, current, dt, model_.params, model_.grid, model_.step).outputs;
}

void Cell::set_state(CellState s)
{
    state_ = std::move(s);
    outputs_ = evaluate_outputs(state_, 0.0, model_.params, model_.grid, model_.step);
}

void Cell::calibrate_capacity(double measured_ah)
{
    state_.ledger.calibrate(measured_ah);
    outputs_.soh = state_of_health(state_.ledger);
}

void Cell::reset_capacity_reference(double measured_ah)
{
    state_.ledger.q_initial = measured_ah;
    state_.ledger.calibrate(measured_ah);
    outputs_.soh = state_of_health(state_.ledger);
}

}  // namespace fastcharge
