#include "fastcharge/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "fastcharge/checkpoint.hpp"
#include "fastcharge/compare.hpp"
#include "fastcharge/config.hpp"
#include "fastcharge/csv.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/svg_plot.hpp"
#include "fastcharge/text_util.hpp"
#include "fastcharge/trainer.hpp"

namespace fastcharge {

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<double> accel;
    std::optional<unsigned long long> seed;
    std::string output;
};

RunConfig load(const GlobalOptions& g)
{
    RunConfig c = g.config.empty() ? parse_config_text("") : parse_config(g.config);
    if (g.accel) c.accel = *g.accel;
    if (g.seed) {
        c.seed = *g.seed;
        c.td3.seed = c.seed;
        c.train.eval_seed = c.seed + 7919;
    }
    if (!g.output.empty()) c.output_dir = g.output;
    c.validate();
    return c;
}

std::filesystem::path prepare_output(const RunConfig& c)
{
    const auto dir = effective_output_dir(c);
    std::filesystem::create_directories(dir);
    write_resolved_config(c, dir);
    return dir;
}

VoltageSohMap obtain_map(const RunConfig& c, const std::string& map_path, std::ostream& out)
{
    if (!map_path.empty()) return read_map(map_path);
    out << "building voltage-SoH map under CC-COP (eta_ref " << c.cop_slow.eta_ref << " V)\n";
    return build_voltage_soh_map(make_plant_factory(c), c.cop_slow, c.protocol, c.map);
}

std::unique_ptr<ChargingStrategy> make_strategy(const RunConfig& c, const std::string& name,
                                                const std::string& map_path, const std::string& policy,
                                                std::ostream& out)
{
    if (name == "cccv") return make_cc_cv(c.cccv);
    if (name == "cccv-v") return make_cc_cv_v(c.cccv, obtain_map(c, map_path, out));
    if (name == "cop-slow") return make_cc_cop(c.cop_slow, "CC-COP-slow");
    if (name == "cop-fast") return make_cc_cop(c.cop_fast, "CC-COP-fast");
    if (name == "proposed") {
        if (policy.empty()) throw ConfigError("strategy 'proposed' needs --policy <checkpoint>");
        return make_policy_strategy(load_actor(policy));
    }
    throw ConfigError("unknown strategy '" + name + "' (cccv, cccv-v, cop-slow, cop-fast, proposed)");
}

/// Fresh cell discharged, precharged and rested as in the cycling protocol.
Cell precharged_cell(const RunConfig& c)
{
    Cell cell = make_plant_factory(c)();
    const auto& p = c.protocol;
    discharge_to_empty(cell, p.discharge_current, p.sample_seconds);
    charge_to_soc(cell, p.precharge_current, p.soc_precharge, p.sample_seconds);
    cell.rest(p.rest_seconds);
    return cell;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Health-aware fast-charging simulator and controllers"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("-c,--config", g.config, "config file or bundled profile name (e.g. paper_defaults)");
    app.add_option("--accel", g.accel, "accelerated-aging factor");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("-o,--output", g.output, "output directory");

    std::string strategy = "cccv", map_path, policy_path, plot_target;
    std::optional<int> episodes;
    std::vector<std::string> strategies;

    auto* sim = app.add_subcommand("simulate", "one 20%->80% charge of a fresh cell under a strategy");
    sim->add_option("-s,--strategy", strategy, "cccv | cccv-v | cop-slow | cop-fast | proposed");
    sim->add_option("--map", map_path, "voltage-SoH map CSV (cccv-v)");
    sim->add_option("--policy", policy_path, "TD3 checkpoint (proposed)");

    auto* map = app.add_subcommand("map", "build the charge cut-off voltage vs SoH map");

    auto* trn = app.add_subcommand("train", "train the TD3 charging agent");
    trn->add_option("--map", map_path, "voltage-SoH map CSV; built when omitted");
    trn->add_option("--episodes", episodes, "override train.episodes");

    auto* ev = app.add_subcommand("evaluate", "deterministic rollout of a trained policy");
    ev->add_option("--policy", policy_path, "TD3 checkpoint")->required();
    ev->add_option("--map", map_path, "voltage-SoH map CSV; built when omitted");

    auto* cmp = app.add_subcommand("compare", "life-cycle comparison of charging strategies");
    cmp->add_option("--map", map_path, "voltage-SoH map CSV; built when omitted");
    cmp->add_option("--policy", policy_path, "TD3 checkpoint; adds the proposed strategy");
    cmp->add_option("--strategies", strategies, "subset of cccv, cccv-v, cop-slow, cop-fast, proposed");

    auto* plt = app.add_subcommand("plot", "render CSV outputs to SVG charts");
    plt->add_option("path", plot_target, "CSV file or directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (plt->parsed()) {
            const auto files = std::filesystem::is_directory(plot_target) ? plot_directory(plot_target)
                                                                          : plot_file(plot_target);
            for (const auto& f : files) out << f.string() << '\n';
            if (files.empty()) {
                err << "no recognised CSV in " << plot_target << '\n';
                return 1;
            }
            return 0;
        }

        const RunConfig c = load(g);
        if (sim->parsed()) {
            const auto dir = prepare_output(c);
            auto s = make_strategy(c, strategy, map_path, policy_path, out);
            Cell cell = precharged_cell(c);
            const auto r = run_charge(cell, *s, c.protocol.soc_target, c.protocol.sample_seconds,
                                      c.protocol.charge_timeout_minutes, true);
            write_trace(r.trace, dir / "trace.csv");
            out << format("%s: %.2f min, max V %.4f, min eta_side %.4f V%s\n", s->name().c_str(), r.minutes,
                          r.max_voltage, r.min_eta_side, r.timed_out ? " (timed out)" : "");
        } else if (map->parsed()) {
            const auto dir = prepare_output(c);
            ProtocolResult run;
            const auto m = build_voltage_soh_map(make_plant_factory(c), c.cop_slow, c.protocol, c.map, &run);
            write_map(m, dir / "v_soh_map.csv");
            out << format("map: %zu knots over %zu cycles, %.4f V at SoH %.3f to %.4f V at SoH %.3f\n",
                          m.points.size(), run.cycles.size(), m.points.front().second, m.points.front().first,
                          m.points.back().second, m.points.back().first);
        } else if (trn->parsed()) {
            RunConfig tc = c;
            if (episodes) tc.train.episodes = *episodes;
            tc.validate();
            const auto dir = prepare_output(tc);
            const VoltageSohMap m = obtain_map(tc, map_path, out);
            if (map_path.empty()) write_map(m, dir / "v_soh_map.csv");
            BatteryEnvConfig bc{tc.protocol, tc.reward, tc.aging_mode, tc.cccv.i_max};
            BatteryEnv env(make_plant_factory(tc), m, bc);
            Td3Agent agent(env.state_dim(), tc.td3);
            TrainerConfig trc = tc.train;
            trc.log_csv = dir / "training_log.csv";
            trc.checkpoint = dir / "policy.ckpt";
            install_interrupt_handler();
            TrainerHooks hooks;
            hooks.on_eval = [&out](const EvalRecord& e) {
                out << format("episode %d: reward %.2f, max V %.4f, min eta_side %.4f V, %.2f min\n", e.episode,
                              e.reward, e.max_voltage, e.min_eta_side, e.charge_minutes);
            };
            const auto r = train(env, agent, trc, hooks);
            save_checkpoint(agent, dir / "final.ckpt");
            out << format("best evaluation reward %.2f at episode %d%s\n", r.best_reward, r.best_episode,
                          r.interrupted ? " (interrupted)" : "");
        } else if (ev->parsed()) {
            const auto dir = prepare_output(c);
            const VoltageSohMap m = obtain_map(c, map_path, out);
            BatteryEnvConfig bc{c.protocol, c.reward, AgingMode::fresh, c.cccv.i_max};
            BatteryEnv env(make_plant_factory(c), m, bc);
            const Mlp actor = load_actor(policy_path);
            auto s = make_policy_strategy(actor);
            Rng rng(c.seed);
            const EpisodeSummary sum = rollout(env, actor, rng);
            Cell cell = precharged_cell(c);
            const auto r = run_charge(cell, *s, c.protocol.soc_target, c.protocol.sample_seconds,
                                      c.protocol.charge_timeout_minutes, true);
            write_trace(r.trace, dir / "trace.csv");
            out << format("reward %.2f, %.2f min, max V %.4f, min eta_side %.4f V%s\n", sum.total_reward,
                          sum.charge_minutes, sum.max_voltage, sum.min_eta_side, sum.timed_out ? " (timed out)" : "");
        } else if (cmp->parsed()) {
            const auto dir = prepare_output(c);
            if (strategies.empty()) {
                strategies = {"cccv", "cccv-v", "cop-slow", "cop-fast"};
                if (!policy_path.empty()) strategies.push_back("proposed");
            }
            std::optional<VoltageSohMap> m;
            std::vector<std::unique_ptr<ChargingStrategy>> set;
            for (const auto& name : strategies) {
                if (name == "cccv-v" && !m) {
                    m = obtain_map(c, map_path, out);
                    write_map(*m, dir / "v_soh_map.csv");
                }
                if (name == "cccv-v") set.push_back(make_cc_cv_v(c.cccv, *m));
                else set.push_back(make_strategy(c, name, map_path, policy_path, out));
            }
            ProtocolOptions opt;
            opt.objective = c.objective;
            const auto report = compare_strategies(set, make_plant_factory(c), c.protocol, opt);
            write_report(report, dir);
            out << format("%-14s %10s %14s\n", "strategy", "max EFC", "avg charge min");
            for (const auto& o : report.outcomes) {
                if (o.ok)
                    out << format("%-14s %10.1f %14.2f\n", o.name.c_str(), o.result.final_efc(),
                                  o.result.average_charge_minutes());
                else
                    out << format("%-14s failed: %s\n", o.name.c_str(), o.error.c_str());
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace fastcharge
