#include "fastcharge/electrochem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fastcharge/errors.hpp"
#include "fastcharge/tridiagonal.hpp"

namespace fastcharge {

namespace {

double face_area(double r) { return 4.0 * std::numbers::pi * r * r; }

}  // namespace

double intercalation_flux(double current_a, Electrode e, const CellParameters& p)
{
    const auto& el = p.electrode(e);
    const double i = p.current_density(current_a);
    const double n = i / (p.constants.faraday * el.surface_area_density * el.thickness);
    return e == Electrode::negative ? n : -n;
}

std::vector<double> solid_diffusion_rhs(std::span<const double> c, const RadialGrid& g,
                                        double diffusivity, double surface_flux)
{
    const int n = g.size();
    std::vector<double> rate(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double flow = face_area(g.faces[i + 1]) * diffusivity * (c[i + 1] - c[i]) /
                            (g.centers[i + 1] - g.centers[i]);
        rate[i] += flow;
        rate[i + 1] -= flow;
    }
    rate[n - 1] += face_area(g.radius) * surface_flux;
    for (int i = 0; i < n; ++i) rate[i] /= g.volumes[i];
    return rate;
}

std::vector<double> solid_diffusion_rhs(std::span<const double> c, Electrode e, double current_a,
                                        const CellParameters& p, const SpatialGrid& g)
{
    return solid_diffusion_rhs(c, g.radial(e), p.electrode(e).solid_diffusivity,
                               intercalation_flux(current_a, e, p));
}

void solid_diffusion_implicit(std::span<double> c, const RadialGrid& g, double diffusivity,
                              double surface_flux, double dt, double theta)
{
    const int n = g.size();
    std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = g.volumes[i] / dt;
        rhs[i] = c[i] * g.volumes[i] / dt;
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double k =
            face_area(g.faces[i + 1]) * diffusivity / (g.centers[i + 1] - g.centers[i]);
        const double explicit_flow = (1.0 - theta) * k * (c[i + 1] - c[i]);
        rhs[i] += explicit_flow;
        rhs[i + 1] -= explicit_flow;
        diag[i] += theta * k;
        diag[i + 1] += theta * k;
        upper[i] = -theta * k;
        lower[i + 1] = -theta * k;
    }
    rhs[n - 1] += face_area(g.radius) * surface_flux;
    solve_tridiagonal(lower, diag, upper, rhs);
    std::copy(rhs.begin(), rhs.end(), c.begin());
}

double surface_concentration(std::span<const double> c, const RadialGrid& g, double diffusivity,
                             double surface_flux)
{
    // D dc/dr = flux at r = R, outer shell value sits half a width inside
    const int n = g.size();
    return c[n - 1] + surface_flux * 0.5 * g.widths[n - 1] / diffusivity;
}

double particle_average(std::span<const double> c, const RadialGrid& g)
{
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) total += c[i] * g.volumes[i];
    return total / g.particle_volume();
}

double effective_electrolyte_diffusivity(double c_e, double porosity, const CellParameters& p)
{
    return p.electrolyte_diffusivity(c_e) * std::pow(porosity, p.bruggeman_exponent);
}

std::vector<double> electrolyte_source(double current_a, const CellParameters& p,
                                       const AxialGrid& g)
{
    const double flux = (1.0 - p.transference_number) * p.current_density(current_a) /
                        p.constants.faraday;
    std::vector<double> s(g.size(), 0.0);
    for (int k = 0; k < g.size(); ++k) {
        if (g.region[k] == Region::negative)
            s[k] = -flux / p.negative.thickness;
        else if (g.region[k] == Region::positive)
            s[k] = flux / p.positive.thickness;
    }
    return s;
}

namespace {

// Conductance between neighbouring cells k and k+1 (m/s), series resistance
// of the two half cells.
std::vector<double> face_conductance(std::span<const double> c_e, const CellParameters& p,
                                     const AxialGrid& g)
{
    const int n = g.size();
    std::vector<double> d(n);
    for (int k = 0; k < n; ++k) d[k] = effective_electrolyte_diffusivity(c_e[k], g.porosity[k], p);
    std::vector<double> out(n - 1);
    for (int k = 0; k + 1 < n; ++k)
        out[k] = 1.0 / (0.5 * g.widths[k] / d[k] + 0.5 * g.widths[k + 1] / d[k + 1]);
    return out;
}

}  // namespace

std::vector<double> electrolyte_diffusion_rhs(std::span<const double> c_e, double current_a,
                                              const CellParameters& p, const SpatialGrid& grid)
{
    const auto& g = grid.x;
    const int n = g.size();
    const auto cond = face_conductance(c_e, p, g);
    auto rate = electrolyte_source(current_a, p, g);
    for (int k = 0; k < n; ++k) rate[k] *= g.widths[k];
    for (int k = 0; k + 1 < n; ++k) {
        const double flow = cond[k] * (c_e[k + 1] - c_e[k]);
        rate[k] += flow;
        rate[k + 1] -= flow;
    }
    for (int k = 0; k < n; ++k) rate[k] /= g.porosity[k] * g.widths[k];
    return rate;
}

void electrolyte_diffusion_implicit(std::span<double> c_e, double current_a,
                                    const CellParameters& p, const SpatialGrid& grid, double dt,
                                    double theta)
{
    const auto& g = grid.x;
    const int n = g.size();
    const auto cond = face_conductance(c_e, p, g);
    const auto src = electrolyte_source(current_a, p, g);
    std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
    for (int k = 0; k < n; ++k) {
        const double m = g.porosity[k] * g.widths[k] / dt;
        diag[k] = m;
        rhs[k] = m * c_e[k] + src[k] * g.widths[k];
    }
    for (int k = 0; k + 1 < n; ++k) {
        const double explicit_flow = (1.0 - theta) * cond[k] * (c_e[k + 1] - c_e[k]);
        rhs[k] += explicit_flow;
        rhs[k + 1] -= explicit_flow;
        diag[k] += theta * cond[k];
        diag[k + 1] += theta * cond[k];
        upper[k] = -theta * cond[k];
        lower[k + 1] = -theta * cond[k];
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    std::copy(rhs.begin(), rhs.end(), c_e.begin());
}

BoundaryValues electrolyte_boundary_values(std::span<const double> c_e, const AxialGrid& g)
{
    // quadratic with zero slope at the wall through the first two centres
    const int n = g.size();
    return {c_e[0] - (c_e[1] - c_e[0]) / 8.0, c_e[n - 1] - (c_e[n - 2] - c_e[n - 1]) / 8.0};
}

double region_average(std::span<const double> c_e, const AxialGrid& g, Region r)
{
    double sum = 0.0, width = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        if (g.region[k] != r) continue;
        sum += c_e[k] * g.widths[k];
        width += g.widths[k];
    }
    return sum / width;
}

double reaction_overpotential(double current_a, Electrode e, double i0, const CellParameters& p)
{
    if (!(i0 > 0)) throw NonPositiveExchangeCurrent("exchange current must be > 0");
    const auto& el = p.electrode(e);
    // anodic interfacial current density
    double j = p.current_density(current_a) / (el.surface_area_density * el.thickness);
    if (e == Electrode::negative) j = -j;
    return p.thermal_voltage() / p.transfer_coefficient * std::asinh(j / (2.0 * i0));
}

double exchange_current(double c_ss, double c_e, Electrode e, const CellParameters& p)
{
    const auto& el = p.electrode(e);
    if (!(c_ss > 0) || !(c_ss < el.max_concentration))
        throw BoundViolation("surface concentration outside (0, c_max)");
    if (!(c_e > 0)) throw BoundViolation("electrolyte concentration must be > 0");
    return el.rate_constant * std::sqrt(c_e * c_ss * (el.max_concentration - c_ss));
}

double electrolyte_potential_drop(std::span<const double> c_e, double current_a,
                                  const CellParameters& p, const SpatialGrid& g)
{
    const auto b = electrolyte_boundary_values(c_e, g.x);
    if (b.at_zero <= electrolyte_floor || b.at_end <= electrolyte_floor)
        throw ClampFloorHit("electrolyte concentration at a current collector reached the floor");
    const double ohmic = (p.negative.thickness + 2.0 * p.separator_thickness + p.positive.thickness) /
                         (2.0 * p.conductivity) * p.current_density(current_a);
    const double diffusion = 2.0 * p.thermal_voltage() * (1.0 - p.transference_number) *
                             p.activity_factor * (std::log(b.at_end) - std::log(b.at_zero));
    return ohmic + diffusion;
}

double open_circuit_potential(double stoichiometry, Electrode e, const CellParameters& p)
{
    return p.electrode(e).ocp(stoichiometry);
}

}  // namespace fastcharge
