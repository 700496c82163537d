#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fastcharge/interp.hpp"

namespace fastcharge {

enum class Electrode { negative, positive };

struct PhysicalConstants {
    double faraday{96485.33212};       // C/mol
    double gas_constant{8.314462618};  // J/(mol K)
};

struct ElectrodeParameters {
    double thickness{};             // m
    double particle_radius{};       // m
    double solid_diffusivity{};     // m^2/s
    double electrolyte_fraction{};  // -
    double active_fraction{};       // -
    double surface_area_density{};  // 1/m
    double max_concentration{};     // mol/m^3
    double rate_constant{};         // A/m^2 (m^3/mol)^1.5
    double film_resistance{};       // Ohm m^2
    MonotoneCubic ocp;              // V vs stoichiometry
};

struct StoichiometryWindow {
    double x_0{};    // negative electrode at 0 % SoC
    double x_100{};  // negative electrode at 100 % SoC
    double y_0{};    // positive electrode at 0 % SoC
    double y_100{};  // positive electrode at 100 % SoC
};

/// Electrochemical description of the cell. Current sign convention used
/// throughout the library: positive = charging.
struct CellParameters {
    PhysicalConstants constants;
    double temperature{298.15};         // K, held constant
    double transfer_coefficient{0.5};   // charge-transfer alpha

    ElectrodeParameters negative;
    ElectrodeParameters positive;
    double separator_thickness{};       // m
    double separator_fraction{};        // electrolyte volume fraction

    double initial_electrolyte_concentration{};  // mol/m^3
    double transference_number{};
    double conductivity{};              // effective electrolyte conductivity, S/m
    double activity_factor{1.0};
    double bruggeman_exponent{1.5};
    MonotoneCubic electrolyte_diffusivity;  // bulk D_e(c_e), m^2/s

    double electrode_area{};            // m^2
    double nominal_capacity{};          // Ah
    double min_voltage{};               // V
    double max_voltage{};               // V
    double initial_soc{1.0};
    StoichiometryWindow window;

    const ElectrodeParameters& electrode(Electrode e) const
    {
        return e == Electrode::negative ? negative : positive;
    }
    double total_thickness() const
    {
        return negative.thickness + separator_thickness + positive.thickness;
    }
    double thermal_voltage() const
    {
        return constants.gas_constant * temperature / constants.faraday;
    }
    /// Current density (A/m^2 of electrode) for an applied current in amperes.
    double current_density(double current_a) const { return current_a / electrode_area; }
    /// Solid volume fraction implied by a = 3 eps_s / R. Inventories use this
    /// rather than active_fraction so that surface fluxes and particle
    /// contents close exactly.
    double solid_fraction(Electrode e) const
    {
        const auto& el = electrode(e);
        return el.surface_area_density * el.particle_radius / 3.0;
    }
    /// Moles of lithium sites in an electrode's active material.
    double site_inventory(Electrode e) const
    {
        const auto& el = electrode(e);
        return el.max_concentration * solid_fraction(e) * el.thickness * electrode_area;
    }

    void validate() const;
};

enum class PlatingMode { reversible, irreversible };

struct DegradationParams {
    bool enabled{true};

    // two-layer diffusion-limited SEI
    double solvent_concentration{};      // mol/m^3
    double solvent_diffusivity{};        // m^2/s at reference temperature
    double solvent_activation_energy{};  // J/mol
    double reference_temperature{298.15};
    double sei_molar_volume{};           // m^3/mol
    double sei_resistivity{};            // Ohm m
    double sei_lithium_ratio{2.0};       // mol Li consumed per mol SEI
    double inner_thickness{};            // m, initial
    double outer_thickness{};            // m, initial

    // lithium plating
    double plating_rate_constant{};      // m/s
    double plating_alpha_anodic{};
    double plating_alpha_cathodic{};
    double dead_lithium_decay{};         // 1/s at the initial SEI thickness
    PlatingMode plating_mode{PlatingMode::irreversible};
    double side_reaction_potential{0.0};  // V, zero for lithium metal

    double initial_sei_thickness() const { return inner_thickness + outer_thickness; }
    double solvent_diffusivity_at(double temperature, double gas_constant) const;
    /// Plated-to-dead lithium conversion rate; linear in total SEI thickness.
    double dead_lithium_rate(double sei_total) const;

    void validate() const;
};

struct ParameterSet {
    CellParameters cell;
    DegradationParams degradation;
};

/// Multiplies the SEI solvent diffusivity and the plating rate constant.
DegradationParams accelerated(DegradationParams params, double factor);

ParameterSet parse_parameter_text(std::string_view text, std::string_view origin = "<text>");
ParameterSet load_parameter_file(const std::filesystem::path& path);

/// The bundled LG M50-class parameter file.
std::filesystem::path default_parameter_path();
ParameterSet default_parameters();

}  // namespace fastcharge
