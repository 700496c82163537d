#include <gtest/gtest.h>

#include <cmath>

#include "fastcharge/cell.hpp"
#include "fastcharge/degradation.hpp"
#include "fastcharge/electrochem.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/lifecycle.hpp"
#include "fastcharge/parameters.hpp"

using namespace fastcharge;

namespace {

double thermal_voltage(const CellParameters& p)
{
    return p.constants.gas_constant * p.temperature / p.constants.faraday;
}

}  // namespace

TEST(Kinetics, OverpotentialVanishesAtZeroCurrent)
{
    const auto& p = default_parameters().cell;
    for (Electrode e : {Electrode::negative, Electrode::positive})
        EXPECT_EQ(reaction_overpotential(0.0, e, 1.3, p), 0.0);
}

TEST(Kinetics, OverpotentialIsOddInCurrent)
{
    const auto& p = default_parameters().cell;
    for (Electrode e : {Electrode::negative, Electrode::positive})
        for (double i : {0.01, 0.5, 5.0, 10.0, 50.0})
            EXPECT_NEAR(reaction_overpotential(-i, e, 0.7, p), -reaction_overpotential(i, e, 0.7, p), 1e-12);
}

TEST(Kinetics, OverpotentialMatchesSymmetricButlerVolmer)
{
    // Invert j = 2 i0 sinh(alpha F eta / RT) independently.
    const auto& p = default_parameters().cell;
    const double i0 = 0.9;
    for (double current : {-10.0, -1.0, 2.5, 10.0}) {
        const double i = current / p.electrode_area;
        const auto& n = p.negative;
        const double j = -i / (n.surface_area_density * n.thickness);
        const double eta = reaction_overpotential(current, Electrode::negative, i0, p);
        EXPECT_NEAR(2.0 * i0 * std::sinh(p.transfer_coefficient * eta / thermal_voltage(p)), j, 1e-9 * std::abs(j));
    }
}

TEST(Kinetics, ExchangeCurrentRejectsEmptyOrFullSurface)
{
    const auto& p = default_parameters().cell;
    const double cmax = p.negative.max_concentration;
    EXPECT_GT(exchange_current(0.5 * cmax, 1000.0, Electrode::negative, p), 0.0);
    EXPECT_THROW(exchange_current(0.0, 1000.0, Electrode::negative, p), BoundViolation);
    EXPECT_THROW(exchange_current(cmax, 1000.0, Electrode::negative, p), BoundViolation);
}

TEST(Kinetics, ExchangeCurrentSymmetricAboutHalfFilling)
{
    const auto& p = default_parameters().cell;
    const double cmax = p.positive.max_concentration;
    EXPECT_NEAR(exchange_current(0.3 * cmax, 1000.0, Electrode::positive, p),
                exchange_current(0.7 * cmax, 1000.0, Electrode::positive, p), 1e-12);
}

TEST(Kinetics, StrippingFluxZeroAtEquilibrium)
{
    const auto p = default_parameters();
    for (double c : {1.0, 500.0, 1000.0}) {
        const auto f = stripping_flux(c, c, 0.0, p.cell.temperature, p.degradation, p.cell.constants);
        EXPECT_NEAR(f.value, 0.0, 1e-12 * p.degradation.plating_rate_constant * c);
        EXPECT_FALSE(f.overflow_clamped);
    }
}

TEST(Kinetics, StrippingFluxMatchesButlerVolmer)
{
    const auto p = default_parameters();
    const auto& d = p.degradation;
    const double f = 1.0 / thermal_voltage(p.cell);
    for (double eta : {-0.1, -0.02, 0.03, 0.2}) {
        const double c_li = 40.0, c_e = 950.0;
        const double expect = d.plating_rate_constant *
                              (c_li * std::exp(d.plating_alpha_anodic * f * eta) -
                               c_e * std::exp(-d.plating_alpha_cathodic * f * eta));
        const auto got = stripping_flux(c_li, c_e, eta, p.cell.temperature, d, p.cell.constants);
        EXPECT_NEAR(got.value, expect, 1e-12 * std::abs(expect));
    }
}

TEST(Kinetics, ElectrolyteDropIsOhmicForUniformSalt)
{
    const auto p = default_parameters();
    const auto g = build_grid(p.cell, {});
    const std::vector<double> c(static_cast<std::size_t>(g.x.size()), p.cell.initial_electrolyte_concentration);
    EXPECT_NEAR(electrolyte_potential_drop(c, 0.0, p.cell, g), 0.0, 1e-15);
    // Uniform reaction: the ionic current ramps linearly across each electrode
    // and is constant in the separator.
    const double i = 5.0 / p.cell.electrode_area;
    const double ohmic = i / p.cell.conductivity *
                         (0.5 * p.cell.negative.thickness + p.cell.separator_thickness + 0.5 * p.cell.positive.thickness);
    EXPECT_NEAR(std::abs(electrolyte_potential_drop(c, 5.0, p.cell, g)), ohmic, 1e-12);
}

TEST(Kinetics, OpenCircuitPotentialsDecrease)
{
    const auto& p = default_parameters().cell;
    for (Electrode e : {Electrode::negative, Electrode::positive})
        for (double x = 0.05; x < 0.95; x += 0.05)
            EXPECT_GT(open_circuit_potential(x, e, p), open_circuit_potential(x + 0.05, e, p));
}

TEST(Sei, ClosedFormSolvesGrowthLaw)
{
    // d(L^2)/dt = 2k, so L(t)^2 - L0^2 is linear in t.
    const double k = 3e-21, l0 = 2.5e-9;
    for (double t : {1.0, 1e3, 1e6, 1e8}) {
        const double l = sei_thickness_after(l0, k, t);
        EXPECT_NEAR(l * l, l0 * l0 + 2 * k * t, 1e-12 * (l0 * l0 + 2 * k * t));
    }
    // composing two steps equals one step
    EXPECT_NEAR(sei_thickness_after(sei_thickness_after(l0, k, 400.0), k, 600.0), sei_thickness_after(l0, k, 1000.0),
                1e-24);
}

TEST(Sei, GrowthConstantFollowsArrhenius)
{
    const auto p = default_parameters();
    const auto& d = p.degradation;
    const double r = p.cell.constants.gas_constant;
    const double k_ref = sei_growth_constant(d.reference_temperature, d, r);
    EXPECT_NEAR(k_ref, d.solvent_concentration * d.solvent_diffusivity * d.sei_molar_volume / 4.0, 1e-12 * k_ref);
    const double t = 318.15;
    const double ratio = std::exp(-d.solvent_activation_energy / r * (1.0 / t - 1.0 / d.reference_temperature));
    EXPECT_NEAR(sei_growth_constant(t, d, r) / k_ref, ratio, 1e-12 * ratio);
}

TEST(Sei, ZeroThicknessIsRejected)
{
    const auto p = default_parameters();
    EXPECT_THROW(sei_growth_rate(0.0, 1e-9, 298.15, p.degradation, p.cell.constants.gas_constant), ZeroThickness);
}

TEST(Sei, CellFollowsSquareRootLawAtRest)
{
    const auto p = default_parameters();
    Cell cell(CellModel::make(p), 0.5);
    const double li = cell.state().sei_inner, lo = cell.state().sei_outer;
    const double k = sei_growth_constant(p.cell.temperature, p.degradation, p.cell.constants.gas_constant);
    cell.rest(1e6);
    const double inner = std::sqrt(li * li + 2 * k * 1e6);
    const double outer = std::sqrt(lo * lo + 2 * k * 1e6);
    EXPECT_NEAR(cell.state().sei_inner, inner, 1e-3 * inner);
    EXPECT_NEAR(cell.state().sei_outer, outer, 1e-3 * outer);
}

TEST(Sei, FilmOverpotentialIsOhmic)
{
    const auto p = default_parameters();
    const auto& d = p.degradation;
    const double a = p.cell.negative.surface_area_density;
    EXPECT_NEAR(sei_overpotential(2e-9, 3e-9, 1e4, d, a), d.sei_resistivity * 5e-9 * 1e4 / a, 1e-15);
    EXPECT_EQ(sei_overpotential(2e-9, 3e-9, 0.0, d, a), 0.0);
}

TEST(Plating, IrreversibleGuardBlocksStripping)
{
    EXPECT_EQ(irreversible_plating_guard(2.0, PlatingMode::irreversible), 0.0);
    EXPECT_EQ(irreversible_plating_guard(-2.0, PlatingMode::irreversible), -2.0);
    EXPECT_EQ(irreversible_plating_guard(2.0, PlatingMode::reversible), 2.0);
}

TEST(Plating, DeadLithiumRateScalesWithSei)
{
    const auto p = default_parameters();
    const auto& d = p.degradation;
    const double l0 = d.initial_sei_thickness();
    EXPECT_NEAR(d.dead_lithium_rate(l0), d.dead_lithium_decay, 1e-18);
    EXPECT_NEAR(d.dead_lithium_rate(2 * l0), 2 * d.dead_lithium_decay, 1e-18);
    const auto r = plating_rhs(10.0, 0.0, l0, -1e-9, d, 3e5);
    EXPECT_NEAR(r.dead, d.dead_lithium_decay * 10.0, 1e-18);
    EXPECT_NEAR(r.plated + r.dead, 3e5 * 1e-9, 1e-15);
}

TEST(Plating, AcceleratedScalesOnlyRateConstants)
{
    const auto d = default_parameters().degradation;
    const auto a = accelerated(d, 100.0);
    EXPECT_DOUBLE_EQ(a.solvent_diffusivity, 100.0 * d.solvent_diffusivity);
    EXPECT_DOUBLE_EQ(a.plating_rate_constant, 100.0 * d.plating_rate_constant);
    EXPECT_EQ(a.dead_lithium_decay, d.dead_lithium_decay);
    EXPECT_EQ(a.sei_resistivity, d.sei_resistivity);
    EXPECT_THROW(accelerated(d, 0.0), ConfigError);
}

TEST(Ledger, LossesLowerTheLatestCapacity)
{
    SohLedger l;
    l.calibrate(5.0);
    l.update_losses(0.1, 0.05);
    EXPECT_NEAR(l.q_latest, 4.85, 1e-12);
    EXPECT_NEAR(state_of_health(l), 0.97, 1e-12);
    l.calibrate(4.8);
    EXPECT_NEAR(l.q_latest, 4.8, 1e-12);
    l.update_losses(0.2, 0.05);
    EXPECT_NEAR(l.q_latest, 4.7, 1e-12);
    l.calibrate(5.2);  // never above the fresh value
    EXPECT_NEAR(state_of_health(l), 1.0, 1e-12);
}

TEST(Ledger, MolesToAh)
{
    const auto& k = default_parameters().cell.constants;
    EXPECT_NEAR(moles_to_ah(1.0, k), k.faraday / 3600.0, 1e-12);
}

TEST(Parameters, RejectsUnknownDuplicateAndMissingKeys)
{
    EXPECT_THROW(parse_parameter_text("bogus = 1\n"), ConfigError);
    try {
        parse_parameter_text("faraday = 1\nfaraday = 2\n", "t.params");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("t.params:2"), std::string::npos);
    }
    EXPECT_THROW(parse_parameter_text("faraday = 96485\n"), ConfigError);
}

TEST(Cell, InitialStateHitsRequestedSoc)
{
    const auto p = default_parameters();
    for (double soc : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        Cell c(CellModel::make(p), soc);
        EXPECT_NEAR(c.outputs().soc, soc, 1e-9);
        EXPECT_NEAR(c.outputs().soh, 1.0, 1e-12);
    }
}

TEST(Cell, RestingVoltageRisesWithSoc)
{
    const auto p = default_parameters();
    double prev = 0.0;
    for (double soc = 0.05; soc <= 0.951; soc += 0.1) {
        Cell c(CellModel::make(p), soc);
        EXPECT_GT(c.outputs().voltage, prev);
        prev = c.outputs().voltage;
    }
}

TEST(Cell, ChargingFillsAnodeSurfaceAndEnrichesCathodeSideSalt)
{
    auto p = default_parameters();
    p.degradation.enabled = false;
    Cell c(CellModel::make(p), 0.3);
    const double surf0 = c.outputs().c_ss_neg;
    c.step(5.0, 60.0);
    EXPECT_GT(c.outputs().c_ss_neg, surf0);
    const auto& ce = c.state().c_e;
    EXPECT_GT(ce.back(), ce.front());
    EXPECT_GT(c.outputs().voltage, c.outputs().ocv);
    EXPECT_LT(c.outputs().eta_neg, 0.0);
}

TEST(Cell, PreviewLeavesStateUntouched)
{
    const auto p = default_parameters();
    Cell c(CellModel::make(p), 0.4);
    const auto before = c.state();
    const auto o = c.preview(8.0, 20.0);
    EXPECT_EQ(c.state().c_s_neg, before.c_s_neg);
    EXPECT_EQ(c.state().time, before.time);
    Cell d = c;
    EXPECT_EQ(d.step(8.0, 20.0).voltage, o.voltage);
}

TEST(Capacity, FreshCellNearNominalAndParameterWindow)
{
    const auto p = default_parameters();
    Cell c(CellModel::make(p), 0.5);
    const ProtocolConfig pc;
    // coulometric window from the electrode balance
    const double cn = moles_to_ah(p.cell.site_inventory(Electrode::negative), p.cell.constants);
    const double window = cn * (p.cell.window.x_100 - p.cell.window.x_0);
    const double q = measure_capacity(c, pc);
    EXPECT_NEAR(q, p.cell.nominal_capacity, 0.03 * p.cell.nominal_capacity);
    EXPECT_LE(q, window);
    EXPECT_GT(q, 0.9 * window);
    const double q2 = measure_capacity(c, pc);
    EXPECT_NEAR(q2, q, 1e-3 * q);
}

TEST(Capacity, LostLithiumLowersMeasuredCapacity)
{
    auto p = default_parameters();
    p.degradation.enabled = false;
    const ProtocolConfig pc;
    Cell fresh(CellModel::make(p), 0.5);
    const double q0 = measure_capacity(fresh, pc);

    // Move 0.2 Ah of lithium from the anode solid into dead lithium.
    const double x_ah = 0.2;
    Cell aged(CellModel::make(p), 0.5);
    CellState s = aged.state();
    const auto& n = p.cell.negative;
    const double moles = x_ah * 3600.0 / p.cell.constants.faraday;
    const double solid_volume = p.cell.solid_fraction(Electrode::negative) * n.thickness * p.cell.electrode_area;
    for (double& c : s.c_s_neg) c -= moles / solid_volume;
    s.dead_li += moles / (n.thickness * p.cell.electrode_area);
    aged.set_state(s);
    EXPECT_NEAR(plating_capacity_loss(s.dead_li, p.cell), x_ah, 1e-12);
    const double q1 = measure_capacity(aged, pc);
    EXPECT_NEAR(q0 - q1, x_ah, 0.1 * x_ah);
}
