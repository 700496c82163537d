#pragma once

#include <vector>

#include "fastcharge/degradation.hpp"
#include "fastcharge/grid.hpp"
#include "fastcharge/parameters.hpp"

namespace fastcharge {

struct StepConfig {
    double dt{1.0};        // internal substep while current flows, s
    double rest_dt{10.0};  // internal substep at zero current, s
    int max_substeps{1'000'000};
    double newton_tol{1e-10};
    int max_newton_iters{50};
};

struct CellState {
    std::vector<double> c_s_neg;  // mol/m^3, one value per shell
    std::vector<double> c_s_pos;
    std::vector<double> c_e;      // mol/m^3, negative | separator | positive
    double sei_inner{};           // m
    double sei_outer{};           // m
    double plated_li{};           // mol/m^3 of negative electrode
    double dead_li{};             // mol/m^3 of negative electrode
    // intercalation flux into the negative particle from the last substep,
    // needed to reconstruct the surface concentration
    double surface_flux_neg{};    // mol/m^2/s
    double ah_throughput{};
    double ah_charged{};
    double ah_discharged{};
    double time{};                // s
    SohLedger ledger;
};

struct CellOutputs {
    double current{};   // A, positive = charge
    double voltage{};   // V
    double ocv{};       // V at the present surface stoichiometries
    double soc{};
    double soh{};
    double eta_side{};  // V, phi_s,n - phi_e,n
    double eta_sei{};   // V
    double eta_neg{};   // V, intercalation overpotential
    double eta_pos{};   // V
    double c_ss_neg{};  // mol/m^3
    double c_ss_pos{};
    double phi_sn{};    // V, grounded
    double phi_en{};    // V
    bool plating_flux_clamped{};
};

/// Moles of cyclable lithium in each pool.
struct LithiumInventory {
    double neg_solid{};
    double pos_solid{};
    double electrolyte{};  // dissolved salt
    double plated{};
    double dead{};
    double sei{};          // consumed since the initial film

    double negative_side() const { return neg_solid + plated + dead + sei; }
    double total() const { return negative_side() + pos_solid + electrolyte; }
};

struct CellModel {
    ParameterSet params;
    SpatialGrid grid;
    StepConfig step;

    static CellModel make(ParameterSet params, const GridResolution& resolution = {},
                          const StepConfig& step = {});
};

/// Equilibrium state at the given SoC with a fresh SEI and no plated lithium.
CellState initial_state(const ParameterSet& params, const SpatialGrid& grid, double soc);

/// Negative-electrode stoichiometry the cell would reach with the positive
/// electrode at its 100 % stoichiometry. Equals x_100 for a fresh cell and
/// falls as cyclable lithium is lost.
double full_charge_stoichiometry(const CellState& s, const CellParameters& p, const SpatialGrid& g);
double mean_stoichiometry(const CellState& s, Electrode e, const CellParameters& p,
                          const SpatialGrid& g);
double state_of_charge(const CellState& s, const CellParameters& p, const SpatialGrid& g);
/// Ah between 0 % and 100 % SoC at the present lithium inventory.
double window_capacity(const CellState& s, const CellParameters& p, const SpatialGrid& g);

LithiumInventory lithium_inventory(const CellState& s, const ParameterSet& p, const SpatialGrid& g);

/// Conservation defect in moles: negative side must gain and positive side
/// lose Q/F, and the dissolved salt must not change.
double check_mass_balance(const CellState& before, const CellState& after, double current,
                          double dt, const ParameterSet& p, const SpatialGrid& g);

/// Algebraic outputs for the state under the given current.
CellOutputs evaluate_outputs(const CellState& s, double current, const ParameterSet& p,
                             const SpatialGrid& g, const StepConfig& cfg = {});
double terminal_voltage(const CellState& s, double current, const ParameterSet& p,
                        const SpatialGrid& g);

struct StepResult {
    CellState state;
    CellOutputs outputs;
};

StepResult step(const CellState& s, double current, double dt, const ParameterSet& p,
                const SpatialGrid& g, const StepConfig& cfg);

/// A simulated cell: model plus evolving state.
class Cell {
public:
    Cell(CellModel model, double soc);

    const CellModel& model() const { return model_; }
    const ParameterSet& params() const { return model_.params; }
    const CellState& state() const { return state_; }
    const CellOutputs& outputs() const { return outputs_; }

    const CellOutputs& step(double current, double dt);
    /// Outputs after a hypothetical step; the cell is left untouched.
    CellOutputs preview(double current, double dt) const;
    void rest(double seconds) { step(0.0, seconds); }

    void set_state(CellState s);
    /// Recalibrates the capacity ledger with a measured value.
    void calibrate_capacity(double measured_ah);
    /// Makes a measured value the fresh-cell reference (SoH = 1).
    void reset_capacity_reference(double measured_ah);

private:
    CellModel model_;
    CellState state_;
    CellOutputs outputs_;
};

}  // namespace fastcharge
