#pragma once

#include "fastcharge/parameters.hpp"

namespace fastcharge {

struct SeiRates {
    double inner;  // m/s
    double outer;  // m/s
};

/// Growth constant k (m^2/s) of one diffusion-limited layer: dL/dt = k / L.
double sei_growth_constant(double temperature, const DegradationParams& d, double gas_constant);

SeiRates sei_growth_rate(double l_inner, double l_outer, double temperature,
                         const DegradationParams& d, double gas_constant);

/// Exact solution of dL/dt = k / L over dt.
double sei_thickness_after(double l, double k, double dt);

/// Voltage across the SEI film for a volumetric interfacial current j_tot (A/m^3).
double sei_overpotential(double l_inner, double l_outer, double j_tot, const DegradationParams& d,
                         double surface_area_density);

double stripping_overpotential(double phi_s, double phi_e, double eta_sei);

struct StrippingFlux {
    double value;           // mol/m^2/s, positive = stripping back into solution
    bool overflow_clamped;  // an exponent hit the +/-50 guard
};

StrippingFlux stripping_flux(double c_li, double c_e, double eta_stripping, double temperature,
                             const DegradationParams& d, const PhysicalConstants& k);

/// Irreversible mode forbids stripping, so only deposition (negative flux) survives.
double irreversible_plating_guard(double n_li, PlatingMode mode);

struct PlatingRates {
    double plated;  // dc_li/dt, mol/m^3/s
    double dead;    // dc_dli/dt
};

PlatingRates plating_rhs(double c_li, double c_dli, double l_sei_total, double n_li,
                         const DegradationParams& d, double surface_area_density);

double side_reaction_overpotential(double phi_sn, double phi_en, const DegradationParams& d);

/// Capacity bookkeeping. Between measurements the latest capacity is the last
/// calibrated value minus the losses booked since.
struct SohLedger {
    double q_initial{};       // Ah
    double q_latest{};        // Ah
    double q_loss_plating{};  // Ah held in plated and dead lithium
    double q_loss_sei{};      // Ah consumed by SEI growth
    double q_calibrated{};    // Ah at the last measurement
    double loss_at_calibration{};

    double total_loss() const { return q_loss_plating + q_loss_sei; }
    /// Books new loss totals and refreshes the continuous estimate.
    void update_losses(double plating_ah, double sei_ah);
    void calibrate(double measured_ah);
};

double state_of_health(const SohLedger& ledger);

/// Ah equivalent of an amount of lithium.
double moles_to_ah(double moles, const PhysicalConstants& k);

/// Capacity locked in dead lithium spread over the negative electrode.
double plating_capacity_loss(double c_dli, const CellParameters& p);

}  // namespace fastcharge
