#pragma once

#include <span>
#include <vector>

#include "fastcharge/grid.hpp"
#include "fastcharge/parameters.hpp"

namespace fastcharge {

// Lowest electrolyte concentration (mol/m^3) the log terms accept.
inline constexpr double electrolyte_floor = 1.0;

/// Lithium flux into one particle (mol/m^2/s of particle surface) when the
/// whole applied current goes to intercalation. Positive current charges the
/// cell, so the negative particle gains lithium and the positive one loses it.
double intercalation_flux(double current_a, Electrode e, const CellParameters& p);

/// Finite-volume rate dc/dt (mol/m^3/s) in each shell for a prescribed
/// inward surface flux (mol/m^2/s).
std::vector<double> solid_diffusion_rhs(std::span<const double> c, const RadialGrid& g,
                                        double diffusivity, double surface_flux);
std::vector<double> solid_diffusion_rhs(std::span<const double> c, Electrode e, double current_a,
                                        const CellParameters& p, const SpatialGrid& g);

/// One theta-method step of spherical diffusion, in place. theta = 1 is
/// implicit Euler, 0.5 is Crank-Nicolson. The surface flux is held over the step.
void solid_diffusion_implicit(std::span<double> c, const RadialGrid& g, double diffusivity,
                              double surface_flux, double dt, double theta = 0.5);

/// Surface value reconstructed from the outer shell and the surface flux.
double surface_concentration(std::span<const double> c, const RadialGrid& g, double diffusivity,
                             double surface_flux);

/// Volume-averaged concentration of a particle.
double particle_average(std::span<const double> c, const RadialGrid& g);

/// Effective electrolyte diffusivity D(c) * eps^b in one control volume.
double effective_electrolyte_diffusivity(double c_e, double porosity, const CellParameters& p);

/// Salt source (mol/m^3/s of electrode volume) in each axial cell.
std::vector<double> electrolyte_source(double current_a, const CellParameters& p,
                                       const AxialGrid& g);

/// d(c_e)/dt (mol/m^3/s) in each axial cell, zero-flux at both current collectors.
std::vector<double> electrolyte_diffusion_rhs(std::span<const double> c_e, double current_a,
                                              const CellParameters& p, const SpatialGrid& g);

/// One theta-method step with the diffusivity lagged at the old state, in place.
void electrolyte_diffusion_implicit(std::span<double> c_e, double current_a,
                                    const CellParameters& p, const SpatialGrid& g, double dt,
                                    double theta = 0.5);

/// Electrolyte concentration extrapolated to x = 0 and x = L.
struct BoundaryValues {
    double at_zero;
    double at_end;
};
BoundaryValues electrolyte_boundary_values(std::span<const double> c_e, const AxialGrid& g);

/// Mean electrolyte concentration over one region.
double region_average(std::span<const double> c_e, const AxialGrid& g, Region r);

/// Butler-Volmer overpotential for the whole applied current; negative for
/// the negative electrode while charging.
double reaction_overpotential(double current_a, Electrode e, double i0, const CellParameters& p);

/// i0 = k sqrt(c_e c_ss (c_max - c_ss)), A/m^2.
double exchange_current(double c_ss, double c_e, Electrode e, const CellParameters& p);

/// phi_e(L) - phi_e(0).
double electrolyte_potential_drop(std::span<const double> c_e, double current_a,
                                  const CellParameters& p, const SpatialGrid& g);

double open_circuit_potential(double stoichiometry, Electrode e, const CellParameters& p);

}  // namespace fastcharge
