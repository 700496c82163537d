#include "fastcharge/degradation.hpp"

#include <algorithm>
#include <cmath>

#include "fastcharge/errors.hpp"

namespace fastcharge {

double sei_growth_constant(double temperature, const DegradationParams& d, double gas_constant)
{
    return d.solvent_concentration * d.solvent_diffusivity_at(temperature, gas_constant) *
           d.sei_molar_volume / 4.0;
}

SeiRates sei_growth_rate(double l_inner, double l_outer, double temperature,
                         const DegradationParams& d, double gas_constant)
{
    if (!(l_inner > 0) || !(l_outer > 0)) throw ZeroThickness("SEI layer thickness must be > 0");
    const double k = sei_growth_constant(temperature, d, gas_constant);
    return {k / l_inner, k / l_outer};
}

double sei_thickness_after(double l, double k, double dt) { return std::sqrt(l * l + 2.0 * k * dt); }

double sei_overpotential(double l_inner, double l_outer, double j_tot, const DegradationParams& d,
                         double surface_area_density)
{
    return d.sei_resistivity * (l_inner + l_outer) * j_tot / surface_area_density;
}

double stripping_overpotential(double phi_s, double phi_e, double eta_sei)
{
    return phi_s - phi_e - eta_sei;
}

StrippingFlux stripping_flux(double c_li, double c_e, double eta_stripping, double temperature,
                             const DegradationParams& d, const PhysicalConstants& k)
{
    constexpr double limit = 50.0;
    const double f = k.faraday / (k.gas_constant * temperature);
    double ea = d.plating_alpha_anodic * f * eta_stripping;
    double ec = -d.plating_alpha_cathodic * f * eta_stripping;
    const bool clamped = std::abs(ea) > limit || std::abs(ec) > limit;
    ea = std::clamp(ea, -limit, limit);
    ec = std::clamp(ec, -limit, limit);
    return {d.plating_rate_constant * (c_li * std::exp(ea) - c_e * std::exp(ec)), clamped};
}

double irreversible_plating_guard(double n_li, PlatingMode mode)
{
    return mode == PlatingMode::irreversible ? std::min(n_li, 0.0) : n_li;
}

PlatingRates plating_rhs(double c_li, double /*c_dli*/, double l_sei_total, double n_li,
                         const DegradationParams& d, double surface_area_density)
{
    const double decay = d.dead_lithium_rate(l_sei_total) * c_li;
    return {-surface_area_density * n_li - decay, decay};
}

double side_reaction_overpotential(double phi_sn, double phi_en, const DegradationParams& d)
{
    return phi_sn - phi_en - d.side_reaction_potential;
}

void SohLedger::update_losses(double plating_ah, double sei_ah)
{
    q_loss_plating = plating_ah;
    q_loss_sei = sei_ah;
    q_latest = std::min(q_initial, q_calibrated - (total_loss() - loss_at_calibration));
}

void SohLedger::calibrate(double measured_ah)
{
    if (q_initial <= 0) q_initial = measured_ah;
    q_calibrated = measured_ah;
    loss_at_calibration = total_loss();
    q_latest = std::min(q_initial, measured_ah);
}

double state_of_health(const SohLedger& ledger) { return ledger.q_latest / ledger.q_initial; }

double moles_to_ah(double moles, const PhysicalConstants& k) { return moles * k.faraday / 3600.0; }

double plating_capacity_loss(double c_dli, const CellParameters& p)
{
    return moles_to_ah(c_dli * p.negative.thickness * p.electrode_area, p.constants);
}

}  // namespace fastcharge
