#include "fastcharge/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "fastcharge/errors.hpp"
#include "fastcharge/parameters.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

namespace {

struct Range {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;

    bool contains(double v) const
    {
        return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    }
    std::string describe() const
    {
        return format("%c%g, %g%c", lo_open ? '(' : '[', lo, hi, hi_open ? ')' : ']');
    }
};

constexpr double inf = std::numeric_limits<double>::infinity();

struct Field {
    std::string key;
    std::function<std::string(RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view, const std::string&)> set;
    /// Range check of the current value; empty string when fine.
    std::function<std::string(RunConfig&)> check;
};

template <class Access>
Field real(std::string key, Access access, Range r)
{
    Field f;
    f.key = key;
    f.get = [access](RunConfig& c) { return round_trip(access(c)); };
    f.set = [access](RunConfig& c, std::string_view v, const std::string& where) {
        access(c) = parse_double(v, where);
    };
    f.check = [access, r, key](RunConfig& c) -> std::string {
        const double v = access(c);
        if (r.contains(v)) return {};
        return format("%s = %g is outside the allowed range %s", key.c_str(), v, r.describe().c_str());
    };
    return f;
}

template <class T, class Access>
Field integer(std::string key, Access access, double lo, double hi)
{
    Field f;
    f.key = key;
    f.get = [access](RunConfig& c) { return std::to_string(access(c)); };
    f.set = [access](RunConfig& c, std::string_view v, const std::string& where) {
        const long long x = parse_int(v, where);
        if (x < 0 && !std::is_signed_v<T>) throw ConfigError(where + ": value must be non-negative");
        access(c) = static_cast<T>(x);
    };
    f.check = [access, lo, hi, key](RunConfig& c) -> std::string {
        const double v = static_cast<double>(access(c));
        if (v >= lo && v <= hi) return {};
        return format("%s = %g is outside the allowed range [%g, %g]", key.c_str(), v, lo, hi);
    };
    return f;
}

#define REAL(key, member, ...) real(key, [](RunConfig& c) -> double& { return c.member; }, Range{__VA_ARGS__})
#define INT(T, key, member, lo, hi) integer<T>(key, [](RunConfig& c) -> T& { return c.member; }, lo, hi)

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        Field pf;
        pf.key = "parameter_file";
        pf.get = [](RunConfig& c) { return c.parameter_file.string(); };
        pf.set = [](RunConfig& c, std::string_view v, const std::string&) { c.parameter_file = std::string(v); };
        pf.check = [](RunConfig&) { return std::string(); };
        t.push_back(pf);
        Field od;
        od.key = "output_dir";
        od.get = [](RunConfig& c) { return c.output_dir.string(); };
        od.set = [](RunConfig& c, std::string_view v, const std::string&) { c.output_dir = std::string(v); };
        od.check = [](RunConfig& c) { return c.output_dir.empty() ? std::string("output_dir must not be empty") : std::string(); };
        t.push_back(od);
        t.push_back(INT(unsigned long long, "seed", seed, 0, 9e15));
        t.push_back(REAL("accel", accel, 0.0, 1e6, true, false));
        Field am;
        am.key = "aging_mode";
        am.get = [](RunConfig& c) { return std::string(c.aging_mode == AgingMode::fresh ? "fresh" : "persistent"); };
        am.set = [](RunConfig& c, std::string_view v, const std::string& where) {
            if (v == "persistent") c.aging_mode = AgingMode::persistent;
            else if (v == "fresh") c.aging_mode = AgingMode::fresh;
            else throw ConfigError(where + ": aging_mode must be 'persistent' or 'fresh'");
        };
        am.check = [](RunConfig&) { return std::string(); };
        t.push_back(am);

        t.push_back(INT(int, "grid.n_r_neg", grid.n_r_neg, 3, 2000));
        t.push_back(INT(int, "grid.n_r_pos", grid.n_r_pos, 3, 2000));
        t.push_back(INT(int, "grid.n_x_neg", grid.n_x_neg, 3, 2000));
        t.push_back(INT(int, "grid.n_x_sep", grid.n_x_sep, 3, 2000));
        t.push_back(INT(int, "grid.n_x_pos", grid.n_x_pos, 3, 2000));

        t.push_back(REAL("step.dt", step.dt, 0.0, 3600.0, true, false));
        t.push_back(REAL("step.rest_dt", step.rest_dt, 0.0, 36000.0, true, false));
        t.push_back(INT(int, "step.max_substeps", step.max_substeps, 1, 1e9));
        t.push_back(REAL("step.newton_tol", step.newton_tol, 0.0, 1e-3, true, false));
        t.push_back(INT(int, "step.max_newton_iters", step.max_newton_iters, 1, 1000));

        t.push_back(REAL("protocol.soc_precharge", protocol.soc_precharge, 0.0, 1.0, true, true));
        t.push_back(REAL("protocol.soc_target", protocol.soc_target, 0.0, 1.0, true, false));
        t.push_back(REAL("protocol.rest_seconds", protocol.rest_seconds, 0.0, 1e6, false, false));
        t.push_back(REAL("protocol.soh_end", protocol.soh_end, 0.0, 1.0, true, true));
        t.push_back(REAL("protocol.sample_seconds", protocol.sample_seconds, 0.0, 3600.0, true, false));
        t.push_back(REAL("protocol.precharge_current", protocol.precharge_current, 0.0, 100.0, true, false));
        t.push_back(REAL("protocol.discharge_current", protocol.discharge_current, 0.0, 100.0, true, false));
        t.push_back(REAL("protocol.capacity_charge_current", protocol.capacity_charge_current, 0.0, 100.0, true, false));
        t.push_back(REAL("protocol.capacity_taper_current", protocol.capacity_taper_current, 0.0, 100.0, true, false));
        t.push_back(REAL("protocol.capacity_voltage", protocol.capacity_voltage, 3.0, 5.0, false, false));
        t.push_back(INT(int, "protocol.max_cycles", protocol.max_cycles, 1, 1e7));
        t.push_back(REAL("protocol.charge_timeout_minutes", protocol.charge_timeout_minutes, 0.0, 1e5, true, false));

        t.push_back(REAL("i_max", cccv.i_max, 0.0, 100.0, true, false));
        t.push_back(REAL("cccv.i_cc", cccv.i_cc, 0.0, 100.0, true, false));
        t.push_back(REAL("cccv.v_cut", cccv.v_cut, 3.0, 5.0, false, false));
        t.push_back(REAL("cccv.i_taper_min", cccv.i_taper_min, 0.0, 100.0, true, false));
        t.push_back(REAL("cccv.voltage_tol", cccv.voltage_tol, 0.0, 0.1, true, false));
        t.push_back(REAL("cop.kp", cop_slow.kp, 0.0, 1e5, false, false));
        t.push_back(REAL("cop.ki", cop_slow.ki, 0.0, 1e5, false, false));
        t.push_back(REAL("cop_slow.eta_ref", cop_slow.eta_ref, -0.5, 0.5, false, false));
        t.push_back(REAL("cop_fast.eta_ref", cop_fast.eta_ref, -0.5, 0.5, false, false));

        t.push_back(REAL("map.bin_width", map.bin_width, 0.0, 0.2, true, false));
        t.push_back(REAL("map.v_low", map.v_low, 3.0, 5.0, false, false));
        t.push_back(REAL("map.v_high", map.v_high, 3.0, 5.0, false, false));

        t.push_back(REAL("td3.lr_actor", td3.lr_actor, 0.0, 1.0, true, false));
        t.push_back(REAL("td3.lr_critic", td3.lr_critic, 0.0, 1.0, true, false));
        t.push_back(REAL("td3.gamma", td3.gamma, 0.0, 1.0, true, true));
        t.push_back(INT(std::size_t, "td3.buffer_capacity", td3.buffer_capacity, 1, 1e8));
        t.push_back(INT(std::size_t, "td3.minibatch", td3.minibatch, 1, 1e6));
        t.push_back(REAL("td3.tau", td3.tau, 0.0, 1.0, true, false));
        t.push_back(INT(int, "td3.policy_delay", td3.policy_delay, 1, 1000));
        t.push_back(INT(int, "td3.hidden", td3.hidden, 1, 4096));
        t.push_back(REAL("td3.sigma_explore_start", td3.sigma_explore_start, 0.0, 100.0, false, false));
        t.push_back(REAL("td3.sigma_explore_end", td3.sigma_explore_end, 0.0, 100.0, false, false));
        t.push_back(INT(int, "td3.sigma_decay_episodes", td3.sigma_decay_episodes, 0, 1e7));
        t.push_back(INT(long, "td3.warmup_steps", td3.warmup_steps, 0, 1e9));
        t.push_back(REAL("td3.sigma_target", td3.sigma_target, 0.0, 100.0, false, false));
        t.push_back(REAL("td3.target_clip", td3.target_clip, 0.0, 100.0, false, false));
        t.push_back(REAL("td3.actor_final_scale", td3.actor_final_scale, 0.0, 1.0, true, false));

        t.push_back(REAL("reward.lambda_soc", reward.lambda_soc, -1e6, 0.0, false, false));
        t.push_back(REAL("reward.lambda_vol", reward.lambda_vol, -1e6, 0.0, false, false));
        t.push_back(REAL("reward.lambda_smooth", reward.lambda_smooth, -1e6, 0.0, false, false));
        t.push_back(REAL("reward.timeout_penalty", reward.timeout_penalty, -1e9, 0.0, false, false));

        t.push_back(INT(int, "train.episodes", train.episodes, 0, 1e8));
        t.push_back(INT(int, "train.eval_every", train.eval_every, 1, 1e6));
        t.push_back(INT(int, "train.eval_episodes", train.eval_episodes, 1, 1e4));

        t.push_back(REAL("objective.w_soc", objective.w_soc, 0.0, 1e6, false, false));
        t.push_back(REAL("objective.w_side", objective.w_side, 0.0, 1e6, false, false));
        t.push_back(REAL("objective.eta_min", objective.eta_min, -1.0, 1.0, false, false));
        return t;
    }();
    return table;
}

#undef REAL
#undef INT

/// Copies shared settings (current limit, SoC target, timeout, seed, gains)
/// into every sub-config that consumes them.
void propagate(RunConfig& c)
{
    const double i_max = c.cccv.i_max;
    const double soc = c.protocol.soc_target;
    for (ControllerConfig* k : {&c.cccv, &c.cop_slow, &c.cop_fast}) {
        k->i_max = i_max;
        k->soc_target = soc;
    }
    c.cop_fast.kp = c.cop_slow.kp;
    c.cop_fast.ki = c.cop_slow.ki;
    c.cop_slow.i_cc = c.cop_fast.i_cc = i_max;
    c.td3.action_low = 0.0;
    c.td3.action_high = i_max;
    c.td3.seed = c.seed;
    c.train.eval_seed = c.seed + 7919;
    c.reward.soc_target = soc;
    c.reward.timeout_minutes = c.protocol.charge_timeout_minutes;
    c.objective.soc_target = soc;
}

}  // namespace

RunConfig::RunConfig() : parameter_file(default_parameter_path())
{
    cop_slow.eta_ref = 0.01;
    cop_fast.eta_ref = -0.05;
    propagate(*this);
}

void RunConfig::validate() const
{
    RunConfig c = *this;
    for (const auto& f : fields()) {
        const std::string err = f.check(c);
        if (!err.empty()) throw ConfigError(err);
    }
    if (c.cccv.i_cc > c.cccv.i_max)
        throw ConfigError(format("cccv.i_cc = %g exceeds i_max = %g", c.cccv.i_cc, c.cccv.i_max));
    if (!(c.map.v_low < c.map.v_high)) throw ConfigError("map.v_low must be below map.v_high");
    if (c.td3.minibatch > c.td3.buffer_capacity)
        throw ConfigError("td3.minibatch must not exceed td3.buffer_capacity");
    if (!std::filesystem::exists(c.parameter_file))
        throw ConfigError("parameter_file: no such file: " + c.parameter_file.string());
    c.protocol.validate();
    c.cccv.validate();
    c.cop_slow.validate();
    c.cop_fast.validate();
    c.td3.validate();
    c.reward.validate();
    c.train.validate();
}

RunConfig parse_config_text(std::string_view text, std::string_view origin)
{
    std::map<std::string, const Field*> by_key;
    for (const auto& f : fields()) by_key[f.key] = &f;
    RunConfig c;
    std::set<std::string> seen;
    int n = 0;
    for (auto raw : split_lines(text)) {
        ++n;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string where = format("%.*s:%d", int(origin.size()), origin.data(), n);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        auto it = by_key.find(key);
        if (it == by_key.end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        it->second->set(c, value, where + " (" + key + ")");
    }
    propagate(c);
    c.validate();
    return c;
}

std::filesystem::path resolve_config_path(const std::filesystem::path& path)
{
    if (std::filesystem::exists(path)) return path;
    if (!path.has_parent_path() && !path.has_extension()) {
        const std::filesystem::path bundled =
            std::filesystem::path(FASTCHARGE_CONFIG_DIR) / (path.string() + ".cfg");
        if (std::filesystem::exists(bundled)) return bundled;
    }
    throw IoError("config file not found: " + path.string());
}

RunConfig parse_config(const std::filesystem::path& path)
{
    const auto resolved = resolve_config_path(path);
    std::ifstream in(resolved);
    if (!in) throw IoError("cannot read " + resolved.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), resolved.string());
}

std::string dump_config(const RunConfig& cfg)
{
    RunConfig c = cfg;
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(c) + "\n";
    return out;
}

void write_resolved_config(const RunConfig& cfg, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / "resolved_config.cfg";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << dump_config(cfg);
    if (!out) throw IoError("write failed: " + path.string());
}

std::filesystem::path effective_output_dir(const RunConfig& cfg)
{
    if (const char* env = std::getenv("FASTCHARGE_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

PlantFactory make_plant_factory(const RunConfig& cfg)
{
    ParameterSet p = load_parameter_file(cfg.parameter_file);
    p.degradation = accelerated(p.degradation, cfg.accel);
    const CellModel model = CellModel::make(p, cfg.grid, cfg.step);
    return [model] { return Cell(model, 0.0); };
}

}  // namespace fastcharge
