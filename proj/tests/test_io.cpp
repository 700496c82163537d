#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fastcharge/checkpoint.hpp"
#include "fastcharge/cli.hpp"
#include "fastcharge/config.hpp"
#include "fastcharge/csv.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/svg_plot.hpp"
#include "fastcharge/voltage_map.hpp"

using namespace fastcharge;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("fastcharge_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "fastcharge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::string expect_config_error(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no error for: " << text;
    return {};
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults)
{
    const RunConfig c = parse_config_text("");
    EXPECT_EQ(c.accel, 100.0);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.td3.tau, 0.005);
    EXPECT_EQ(c.protocol.sample_seconds, 20.0);
    EXPECT_EQ(c.cop_slow.eta_ref, 0.01);
    EXPECT_EQ(c.cop_fast.eta_ref, -0.05);
    EXPECT_EQ(c.aging_mode, AgingMode::persistent);
}

TEST(Config, RangeErrorsNameTheKey)
{
    EXPECT_NE(expect_config_error("td3.tau = 1.5\n").find("tau"), std::string::npos);
    EXPECT_NE(expect_config_error("td3.gamma = -0.1\n").find("gamma"), std::string::npos);
    EXPECT_NE(expect_config_error("bogus.key = 1\n").find("bogus.key"), std::string::npos);
    EXPECT_NE(expect_config_error("seed = 1\nseed = 2\n").find(":2"), std::string::npos);
    EXPECT_NE(expect_config_error("accel = fast\n").find("accel"), std::string::npos);
    EXPECT_NE(expect_config_error("aging_mode = sometimes\n").find("aging_mode"), std::string::npos);
}

TEST(Config, BundledProfileCarriesTableValues)
{
    const RunConfig c = parse_config("paper_defaults");
    EXPECT_EQ(c.td3.lr_actor, 1e-4);
    EXPECT_EQ(c.td3.lr_critic, 1e-4);
    EXPECT_EQ(c.td3.gamma, 0.99);
    EXPECT_EQ(c.td3.buffer_capacity, 1000000u);
    EXPECT_EQ(c.td3.minibatch, 256u);
    EXPECT_EQ(c.td3.tau, 0.005);
    EXPECT_EQ(c.td3.policy_delay, 1);
    EXPECT_EQ(c.reward.lambda_soc, -2.0);
    EXPECT_EQ(c.reward.lambda_vol, -10.0);
    EXPECT_EQ(c.reward.lambda_smooth, -0.5);
    EXPECT_EQ(c.cccv.i_max, 10.0);
    EXPECT_EQ(c.td3.action_high, 10.0);
    EXPECT_EQ(c.train.episodes, 2000);
}

TEST(Config, SharedKeysPropagate)
{
    const RunConfig c = parse_config_text("i_max = 8\nprotocol.soc_target = 0.7\ncccv.i_cc = 8\nseed = 5\n");
    EXPECT_EQ(c.cop_slow.i_max, 8.0);
    EXPECT_EQ(c.cop_fast.i_max, 8.0);
    EXPECT_EQ(c.td3.action_high, 8.0);
    EXPECT_EQ(c.cccv.soc_target, 0.7);
    EXPECT_EQ(c.reward.soc_target, 0.7);
    EXPECT_EQ(c.td3.seed, 5u);
}

TEST(Config, DumpRoundTrips)
{
    const RunConfig c = parse_config_text("td3.tau = 0.01\naccel = 30\ngrid.n_r_neg = 12\naging_mode = fresh\n");
    const std::string text = dump_config(c);
    EXPECT_EQ(dump_config(parse_config_text(text)), text);
    EXPECT_NE(text.find("td3.tau = 0.01"), std::string::npos);
}

TEST(Csv, TraceRoundTripAndHeader)
{
    const auto dir = scratch("trace");
    Trace t;
    for (int k = 0; k < 4; ++k) {
        TraceRow r;
        r.t_s = 20.0 * k;
        r.current = 10.0 - k;
        r.voltage = 3.7 + 0.1 * k;
        r.soc = 0.2 + 0.01 * k;
        r.soh = 0.95;
        r.eta_side = -0.01 * k;
        r.sei_thickness = 5e-9 + 1e-12 * k;
        r.dead_li = 1e-3 * k;
        t.push_back(r);
    }
    write_trace(t, dir / "trace.csv");
    const auto text = slurp(dir / "trace.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), trace_header);
    const Trace back = read_trace(dir / "trace.csv");
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        EXPECT_NEAR(back[k].current, t[k].current, 1e-6);
        EXPECT_NEAR(back[k].voltage, t[k].voltage, 1e-6);
        EXPECT_NEAR(back[k].sei_thickness, t[k].sei_thickness, 1e-6 * t[k].sei_thickness);
    }
    EXPECT_THROW(write_trace({}, dir / "empty.csv"), EmptySeries);
    fs::remove_all(dir);
}

TEST(Csv, GenericTableRoundTrip)
{
    const auto dir = scratch("table");
    CsvTable t{{"a", "b"}, {{"1", "x"}, {"2", "y"}}};
    write_csv(t, dir / "t.csv");
    const CsvTable r = read_csv(dir / "t.csv");
    EXPECT_EQ(r.header, t.header);
    EXPECT_EQ(r.rows, t.rows);
    EXPECT_THROW(write_csv(CsvTable{{"a"}, {}}, dir / "e.csv"), EmptySeries);
    fs::remove_all(dir);
}

TEST(Svg, TicksAndDocument)
{
    const auto ticks = nice_ticks(0.0, 1.0, 6);
    ASSERT_GE(ticks.size(), 3u);
    EXPECT_LE(ticks.front(), 0.0 + 1e-12);
    EXPECT_GE(ticks.back(), 1.0 - 1e-12);
    for (std::size_t k = 1; k < ticks.size(); ++k) EXPECT_GT(ticks[k], ticks[k - 1]);

    Chart c;
    c.title = "SoH <&> EFC";
    c.x_label = "EFC";
    c.y_label = "SoH";
    c.series.push_back({"CC-CV", {0, 1, 2}, {1.0, 0.9, 0.8}});
    const std::string svg = render_svg(c);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("&lt;&amp;&gt;"), std::string::npos);
    EXPECT_NE(svg.find("CC-CV"), std::string::npos);
}

TEST(Svg, PlotRecognisesMapFiles)
{
    const auto dir = scratch("plot");
    write_map(VoltageSohMap{{{1.0, 4.14}, {0.9, 4.155}, {0.8, 4.17}}}, dir / "v_soh_map.csv");
    const auto written = plot_file(dir / "v_soh_map.csv");
    ASSERT_EQ(written.size(), 1u);
    EXPECT_TRUE(fs::exists(written.front()));
    fs::remove_all(dir);
}

TEST(Cli, UsageErrorsReturnNonZero)
{
    std::string out, err;
    EXPECT_NE(run_cli({}, &out, &err), 0);
    EXPECT_NE(run_cli({"frobnicate"}, &out, &err), 0);
    EXPECT_NE(run_cli({"simulate", "-s", "nonsense"}, &out, &err), 0);
    EXPECT_NE(err.find("error"), std::string::npos);
    EXPECT_NE(run_cli({"evaluate"}, &out, &err), 0);
    EXPECT_EQ(run_cli({"--help"}, &out, &err), 0);
}

TEST(Cli, SimulateWritesTraceAndResolvedConfig)
{
    const auto dir = scratch("sim");
    ASSERT_EQ(run_cli({"-o", dir.string(), "simulate", "-s", "cccv"}), 0);
    const Trace t = read_trace(dir / "trace.csv");
    ASSERT_FALSE(t.empty());
    EXPECT_GE(t.back().soc, 0.8);
    EXPECT_TRUE(fs::exists(dir / "resolved_config.cfg"));
    EXPECT_NO_THROW(parse_config(dir / "resolved_config.cfg"));
    fs::remove_all(dir);
}

TEST(Cli, TrainIsReproducibleForAFixedSeed)
{
    const auto dir = scratch("train");
    spit(dir / "small.cfg",
         "td3.hidden = 8\ntd3.minibatch = 16\ntd3.warmup_steps = 40\n"
         "train.episodes = 3\ntrain.eval_every = 1\n");
    write_map(VoltageSohMap{{{1.0, 4.14}, {0.8, 4.17}}}, dir / "map.csv");
    auto train = [&](const std::string& sub) {
        return run_cli({"-c", (dir / "small.cfg").string(), "--seed", "7", "-o", (dir / sub).string(), "train",
                        "--map", (dir / "map.csv").string()});
    };
    ASSERT_EQ(train("a"), 0);
    ASSERT_EQ(train("b"), 0);
    const auto log = slurp(dir / "a" / "training_log.csv");
    EXPECT_EQ(log, slurp(dir / "b" / "training_log.csv"));
    EXPECT_EQ(read_training_log(dir / "a" / "training_log.csv").size(), 3u);
    EXPECT_EQ(slurp(dir / "a" / "policy.ckpt"), slurp(dir / "b" / "policy.ckpt"));

    // the saved policy evaluates and loads as a full agent
    EXPECT_EQ(run_cli({"-c", (dir / "small.cfg").string(), "-o", (dir / "e").string(), "evaluate", "--policy",
                       (dir / "a" / "policy.ckpt").string(), "--map", (dir / "map.csv").string()}),
              0);
    const Td3Agent agent = load_checkpoint(dir / "a" / "final.ckpt");
    EXPECT_EQ(agent.config().hidden, 8);
    EXPECT_EQ(agent.config().seed, 7u);
    fs::remove_all(dir);
}

TEST(Checkpoint, RoundTripIsExact)
{
    const auto dir = scratch("ckpt");
    Td3Config cfg;
    cfg.hidden = 6;
    Td3Agent a(2, cfg);
    save_checkpoint(a, dir / "x.ckpt");
    const Td3Agent b = load_checkpoint(dir / "x.ckpt");
    EXPECT_EQ(b.actor.params(), a.actor.params());
    EXPECT_EQ(b.critic2_target.params(), a.critic2_target.params());
    EXPECT_EQ(load_actor(dir / "x.ckpt").params(), a.actor.params());
    spit(dir / "bad.ckpt", "not a checkpoint\n");
    EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), Error);
    fs::remove_all(dir);
}
