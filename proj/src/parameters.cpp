#include "fastcharge/parameters.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

namespace {

struct Table {
    std::vector<double> x;
    std::vector<double> y;
};

using Setter = std::function<void(ParameterSet&, std::string_view value, const std::string& where)>;

Setter number(double ElectrodeParameters::*field, bool negative)
{
    return [field, negative](ParameterSet& p, std::string_view v, const std::string& where) {
        (negative ? p.cell.negative : p.cell.positive).*field = parse_double(v, where);
    };
}

template <class F>
Setter cell_number(F field)
{
    return [field](ParameterSet& p, std::string_view v, const std::string& where) {
        field(p.cell) = parse_double(v, where);
    };
}

template <class F>
Setter degradation_number(F field)
{
    return [field](ParameterSet& p, std::string_view v, const std::string& where) {
        field(p.degradation) = parse_double(v, where);
    };
}

const std::map<std::string, Setter>& scalar_keys()
{
    static const std::map<std::string, Setter> keys = [] {
        std::map<std::string, Setter> k;
        k["faraday"] = cell_number([](CellParameters& c) -> double& { return c.constants.faraday; });
        k["gas_constant"] =
            cell_number([](CellParameters& c) -> double& { return c.constants.gas_constant; });
        k["temperature"] = cell_number([](CellParameters& c) -> double& { return c.temperature; });
        k["transfer_coefficient"] =
            cell_number([](CellParameters& c) -> double& { return c.transfer_coefficient; });

        const std::pair<const char*, double ElectrodeParameters::*> electrode_fields[] = {
            {"thickness", &ElectrodeParameters::thickness},
            {"particle_radius", &ElectrodeParameters::particle_radius},
            {"solid_diffusivity", &ElectrodeParameters::solid_diffusivity},
            {"electrolyte_fraction", &ElectrodeParameters::electrolyte_fraction},
            {"active_fraction", &ElectrodeParameters::active_fraction},
            {"surface_area_density", &ElectrodeParameters::surface_area_density},
            {"max_concentration", &ElectrodeParameters::max_concentration},
            {"rate_constant", &ElectrodeParameters::rate_constant},
            {"film_resistance", &ElectrodeParameters::film_resistance},
        };
        for (const auto& [name, field] : electrode_fields) {
            k[std::string("negative.") + name] = number(field, true);
            k[std::string("positive.") + name] = number(field, false);
        }

        k["separator.thickness"] =
            cell_number([](CellParameters& c) -> double& { return c.separator_thickness; });
        k["separator.electrolyte_fraction"] =
            cell_number([](CellParameters& c) -> double& { return c.separator_fraction; });
        k["electrolyte.initial_concentration"] = cell_number(
            [](CellParameters& c) -> double& { return c.initial_electrolyte_concentration; });
        k["electrolyte.transference_number"] =
            cell_number([](CellParameters& c) -> double& { return c.transference_number; });
        k["electrolyte.conductivity"] =
            cell_number([](CellParameters& c) -> double& { return c.conductivity; });
        k["electrolyte.activity_factor"] =
            cell_number([](CellParameters& c) -> double& { return c.activity_factor; });
        k["electrolyte.bruggeman_exponent"] =
            cell_number([](CellParameters& c) -> double& { return c.bruggeman_exponent; });
        k["cell.electrode_area"] =
            cell_number([](CellParameters& c) -> double& { return c.electrode_area; });
        k["cell.nominal_capacity"] =
            cell_number([](CellParameters& c) -> double& { return c.nominal_capacity; });
        k["cell.min_voltage"] = cell_number([](CellParameters& c) -> double& { return c.min_voltage; });
        k["cell.max_voltage"] = cell_number([](CellParameters& c) -> double& { return c.max_voltage; });
        k["cell.initial_soc"] = cell_number([](CellParameters& c) -> double& { return c.initial_soc; });
        k["window.x_0"] = cell_number([](CellParameters& c) -> double& { return c.window.x_0; });
        k["window.x_100"] = cell_number([](CellParameters& c) -> double& { return c.window.x_100; });
        k["window.y_0"] = cell_number([](CellParameters& c) -> double& { return c.window.y_0; });
        k["window.y_100"] = cell_number([](CellParameters& c) -> double& { return c.window.y_100; });

        k["degradation.enabled"] = [](ParameterSet& p, std::string_view v, const std::string& where) {
            p.degradation.enabled = parse_bool(v, where);
        };
        k["degradation.plating_mode"] = [](ParameterSet& p, std::string_view v, const std::string& where) {
            if (v == "reversible")
                p.degradation.plating_mode = PlatingMode::reversible;
            else if (v == "irreversible")
                p.degradation.plating_mode = PlatingMode::irreversible;
            else
                throw ConfigError(where + ": expected 'reversible' or 'irreversible', got '" +
                                  std::string(v) + "'");
        };
        const std::pair<const char*, double DegradationParams::*> degradation_fields[] = {
            {"solvent_concentration", &DegradationParams::solvent_concentration},
            {"solvent_diffusivity", &DegradationParams::solvent_diffusivity},
            {"solvent_activation_energy", &DegradationParams::solvent_activation_energy},
            {"reference_temperature", &DegradationParams::reference_temperature},
            {"sei_molar_volume", &DegradationParams::sei_molar_volume},
            {"sei_resistivity", &DegradationParams::sei_resistivity},
            {"sei_lithium_ratio", &DegradationParams::sei_lithium_ratio},
            {"inner_thickness", &DegradationParams::inner_thickness},
            {"outer_thickness", &DegradationParams::outer_thickness},
            {"plating_rate_constant", &DegradationParams::plating_rate_constant},
            {"plating_alpha_anodic", &DegradationParams::plating_alpha_anodic},
            {"plating_alpha_cathodic", &DegradationParams::plating_alpha_cathodic},
            {"dead_lithium_decay", &DegradationParams::dead_lithium_decay},
            {"side_reaction_potential", &DegradationParams::side_reaction_potential},
        };
        for (const auto& [name, field] : degradation_fields)
            k[std::string("degradation.") + name] =
                degradation_number([field](DegradationParams& d) -> double& { return d.*field; });
        return k;
    }();
    return keys;
}

const std::set<std::string>& table_sections()
{
    static const std::set<std::string> s{"ocp_negative", "ocp_positive", "electrolyte_diffusivity"};
    return s;
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) throw ConfigError("parameter '" + key + "': " + what);
}

}  // namespace

void CellParameters::validate() const
{
    for (auto [name, el] : {std::pair{"negative", &negative}, std::pair{"positive", &positive}}) {
        const std::string p = name;
        require(el->thickness > 0, p + ".thickness", "must be > 0");
        require(el->particle_radius > 0, p + ".particle_radius", "must be > 0");
        require(el->solid_diffusivity > 0, p + ".solid_diffusivity", "must be > 0");
        require(el->electrolyte_fraction > 0 && el->electrolyte_fraction < 1,
                p + ".electrolyte_fraction", "must lie in (0, 1)");
        require(el->active_fraction > 0 && el->active_fraction < 1, p + ".active_fraction",
                "must lie in (0, 1)");
        require(el->surface_area_density > 0, p + ".surface_area_density", "must be > 0");
        require(el->max_concentration > 0, p + ".max_concentration", "must be > 0");
        require(el->rate_constant > 0, p + ".rate_constant", "must be > 0");
        require(el->film_resistance >= 0, p + ".film_resistance", "must be >= 0");
        require(!el->ocp.empty(), "ocp_" + p, "table missing");
        const double implied = 3.0 * el->active_fraction / el->particle_radius;
        require(std::abs(implied - el->surface_area_density) <= 1e-3 * implied,
                p + ".surface_area_density", "must equal 3*active_fraction/particle_radius within 0.1%");
    }
    require(separator_thickness > 0, "separator.thickness", "must be > 0");
    require(separator_fraction > 0 && separator_fraction < 1, "separator.electrolyte_fraction",
            "must lie in (0, 1)");
    require(initial_electrolyte_concentration > 0, "electrolyte.initial_concentration", "must be > 0");
    require(transference_number > 0 && transference_number < 1, "electrolyte.transference_number",
            "must lie in (0, 1)");
    require(conductivity > 0, "electrolyte.conductivity", "must be > 0");
    require(activity_factor > 0, "electrolyte.activity_factor", "must be > 0");
    require(!electrolyte_diffusivity.empty(), "electrolyte_diffusivity", "table missing");
    require(constants.faraday > 0, "faraday", "must be > 0");
    require(constants.gas_constant > 0, "gas_constant", "must be > 0");
    require(temperature > 0, "temperature", "must be > 0");
    require(transfer_coefficient > 0 && transfer_coefficient < 1, "transfer_coefficient",
            "must lie in (0, 1)");
    require(electrode_area > 0, "cell.electrode_area", "must be > 0");
    require(nominal_capacity > 0, "cell.nominal_capacity", "must be > 0");
    require(min_voltage > 0 && min_voltage < max_voltage, "cell.min_voltage",
            "must be > 0 and below cell.max_voltage");
    require(initial_soc >= 0 && initial_soc <= 1, "cell.initial_soc", "must lie in [0, 1]");
    require(window.x_0 > 0 && window.x_0 < window.x_100 && window.x_100 < 1, "window.x_0",
            "need 0 < x_0 < x_100 < 1");
    require(window.y_100 > 0 && window.y_100 < window.y_0 && window.y_0 < 1, "window.y_100",
            "need 0 < y_100 < y_0 < 1");
    // y_0 is implied by the x window and the electrode balance.
    const double implied_y0 = window.y_100 + (window.x_100 - window.x_0) *
                                                 site_inventory(Electrode::negative) /
                                                 site_inventory(Electrode::positive);
    require(std::abs(implied_y0 - window.y_0) < 0.01, "window.y_0",
            "inconsistent with x window and electrode balance (implied " +
                std::to_string(implied_y0) + ")");
}

double DegradationParams::solvent_diffusivity_at(double temperature, double gas_constant) const
{
    return solvent_diffusivity *
           std::exp(-solvent_activation_energy / gas_constant *
                    (1.0 / temperature - 1.0 / reference_temperature));
}

double DegradationParams::dead_lithium_rate(double sei_total) const
{
    return dead_lithium_decay * sei_total / initial_sei_thickness();
}

void DegradationParams::validate() const
{
    require(solvent_concentration > 0, "degradation.solvent_concentration", "must be > 0");
    require(solvent_diffusivity > 0, "degradation.solvent_diffusivity", "must be > 0");
    require(solvent_activation_energy >= 0, "degradation.solvent_activation_energy", "must be >= 0");
    require(reference_temperature > 0, "degradation.reference_temperature", "must be > 0");
    require(sei_molar_volume > 0, "degradation.sei_molar_volume", "must be > 0");
    require(sei_resistivity > 0, "degradation.sei_resistivity", "must be > 0");
    require(sei_lithium_ratio > 0, "degradation.sei_lithium_ratio", "must be > 0");
    require(inner_thickness > 0, "degradation.inner_thickness", "must be > 0");
    require(outer_thickness > 0, "degradation.outer_thickness", "must be > 0");
    require(plating_rate_constant > 0, "degradation.plating_rate_constant", "must be > 0");
    require(plating_alpha_anodic > 0 && plating_alpha_anodic < 1, "degradation.plating_alpha_anodic",
            "must lie in (0, 1)");
    require(plating_alpha_cathodic > 0 && plating_alpha_cathodic < 1,
            "degradation.plating_alpha_cathodic", "must lie in (0, 1)");
    require(dead_lithium_decay > 0, "degradation.dead_lithium_decay", "must be > 0");
    require(side_reaction_potential == 0.0, "degradation.side_reaction_potential",
            "must be 0 for lithium metal deposition");
}

DegradationParams accelerated(DegradationParams params, double factor)
{
    if (!(factor > 0)) throw ConfigError("accelerated-aging factor must be > 0");
    params.solvent_diffusivity *= factor;
    params.plating_rate_constant *= factor;
    return params;
}

ParameterSet parse_parameter_text(std::string_view text, std::string_view origin)
{
    ParameterSet out;
    std::set<std::string> seen;
    std::map<std::string, Table> tables;
    std::string section;
    const std::string src(origin);

    std::size_t line_no = 0;
    for (std::string_view line : split_lines(text)) {
        ++line_no;
        line = strip_comment(line);
        if (line.empty()) continue;
        const std::string where = src + ":" + std::to_string(line_no);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!table_sections().contains(section))
                throw ConfigError(where + ": unknown section [" + section + "]");
            if (tables.contains(section))
                throw ConfigError(where + ": duplicate section [" + section + "]");
            tables[section];
            continue;
        }
        if (!section.empty()) {
            const auto cols = split_whitespace(line);
            if (cols.size() != 2)
                throw ConfigError(where + ": table rows need exactly two columns in [" + section + "]");
            tables[section].x.push_back(parse_double(cols[0], where));
            tables[section].y.push_back(parse_double(cols[1], where));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = scalar_keys().find(key);
        if (it == scalar_keys().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        it->second(out, value, where + " '" + key + "'");
    }

    for (const auto& [key, setter] : scalar_keys())
        if (!seen.contains(key)) throw ConfigError(src + ": missing key '" + key + "'");
    for (const auto& name : table_sections())
        if (!tables.contains(name)) throw ConfigError(src + ": missing section [" + name + "]");

    out.cell.negative.ocp = MonotoneCubic(tables["ocp_negative"].x, tables["ocp_negative"].y);
    out.cell.positive.ocp = MonotoneCubic(tables["ocp_positive"].x, tables["ocp_positive"].y);
    out.cell.electrolyte_diffusivity =
        MonotoneCubic(tables["electrolyte_diffusivity"].x, tables["electrolyte_diffusivity"].y);
    if (!out.cell.negative.ocp.is_monotone())
        throw ConfigError(src + ": [ocp_negative] must be strictly monotone");
    if (!out.cell.positive.ocp.is_monotone())
        throw ConfigError(src + ": [ocp_positive] must be strictly monotone");

    out.cell.validate();
    out.degradation.validate();
    return out;
}

ParameterSet load_parameter_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open parameter file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_parameter_text(buf.str(), path.string());
}

std::filesystem::path default_parameter_path()
{
    return std::filesystem::path(FASTCHARGE_DATA_DIR) / "lg_m50.params";
}

ParameterSet default_parameters()
{
    static const ParameterSet cached = load_parameter_file(default_parameter_path());
    return cached;
}

}  // namespace fastcharge
