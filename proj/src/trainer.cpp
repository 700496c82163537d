#include "fastcharge/trainer.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "fastcharge/checkpoint.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

void TrainerConfig::validate() const
{
    if (episodes < 0) throw ConfigError(format("episodes must be >= 0 (got %d)", episodes));
    if (eval_every < 1) throw ConfigError(format("eval_every must be >= 1 (got %d)", eval_every));
    if (eval_episodes < 1) throw ConfigError(format("eval_episodes must be >= 1 (got %d)", eval_episodes));
}

double exploration_sigma(const Td3Config& cfg, int episode)
{
    if (cfg.sigma_decay_episodes <= 0 || episode >= cfg.sigma_decay_episodes) return cfg.sigma_explore_end;
    const double f = double(episode) / double(cfg.sigma_decay_episodes);
    return cfg.sigma_explore_start + f * (cfg.sigma_explore_end - cfg.sigma_explore_start);
}

EvalRecord evaluate_policy(const Environment& env, const Mlp& actor, int episodes, unsigned long long seed)
{
    auto copy = env.clone();
    Rng rng(seed);
    EvalRecord e;
    for (int k = 0; k < episodes; ++k) {
        const EpisodeSummary s = rollout(*copy, actor, rng);
        e.reward += s.total_reward;
        e.max_voltage += s.max_voltage;
        e.min_eta_side += s.min_eta_side;
        e.charge_minutes += s.charge_minutes;
    }
    e.reward /= episodes;
    e.max_voltage /= episodes;
    e.min_eta_side /= episodes;
    e.charge_minutes /= episodes;
    return e;
}

std::atomic<bool>& interrupt_flag()
{
    static std::atomic<bool> flag{false};
    return flag;
}

namespace {

extern "C" void on_sigint(int) { interrupt_flag().store(true); }

}  // namespace

void install_interrupt_handler() { std::signal(SIGINT, on_sigint); }

TrainingResult train(Environment& env, Td3Agent& agent, const TrainerConfig& cfg, const TrainerHooks& hooks)
{
    cfg.validate();
    const Td3Config& tc = agent.config();
    if (env.state_dim() != agent.state_dim()) throw ConfigError("environment and agent state sizes differ");
    Rng rng(tc.seed + 1);
    ReplayBuffer buffer(tc.buffer_capacity, env.state_dim());
    TrainingResult result;
    result.best_actor = agent.actor;
    result.best_reward = -std::numeric_limits<double>::infinity();

    auto finish = [&] {
        if (!cfg.log_csv.empty()) write_training_log(result.evaluations, cfg.log_csv);
    };

    std::uniform_real_distribution<double> warmup(tc.action_low, tc.action_high);
    long steps = 0;
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        if (interrupt_flag().load()) {
            result.interrupted = true;
            if (!cfg.checkpoint.empty()) save_checkpoint(agent, cfg.checkpoint);
            break;
        }
        const double sigma = exploration_sigma(tc, ep);
        Eigen::VectorXd s = env.reset(rng);
        for (;;) {
            const double a = steps < tc.warmup_steps ? warmup(rng) : agent.select_action(s, sigma, rng);
            ++steps;
            const EnvStep st = env.step(a);
            buffer.push({s, a, st.reward, st.state, st.done});
            if (buffer.size() >= tc.minibatch) agent.train_step(buffer, rng);
            if (st.done) break;
            s = st.state;
        }
        result.episode_rewards.push_back(env.summary().total_reward);
        if (hooks.on_episode) hooks.on_episode(ep + 1, env.summary());

        if ((ep + 1) % cfg.eval_every == 0) {
            EvalRecord e = evaluate_policy(env, agent.actor, cfg.eval_episodes, cfg.eval_seed);
            e.episode = ep + 1;
            result.evaluations.push_back(e);
            if (e.reward > result.best_reward) {
                result.best_reward = e.reward;
                result.best_episode = e.episode;
                result.best_actor = agent.actor;
                if (!cfg.checkpoint.empty()) save_checkpoint(agent, cfg.checkpoint);
            }
            if (!cfg.log_csv.empty()) write_training_log(result.evaluations, cfg.log_csv);
            if (hooks.on_eval) hooks.on_eval(e);
        }
    }
    finish();
    return result;
}

void write_training_log(const std::vector<EvalRecord>& log, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "episode,reward,max_V,min_eta_side,charge_minutes\n";
    for (const auto& e : log)
        out << format("%d,%.6f,%.6f,%.6f,%.6f\n", e.episode, e.reward, e.max_voltage, e.min_eta_side,
                      e.charge_minutes);
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<EvalRecord> read_training_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "episode,reward,max_V,min_eta_side,charge_minutes")
        throw ConfigError(path.string() + ":1: unexpected training log header");
    std::vector<EvalRecord> log;
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        const std::string where = path.string() + ":" + std::to_string(n);
        if (f.size() != 5) throw ConfigError(where + ": expected 5 fields");
        log.push_back({static_cast<int>(parse_int(f[0], where)), parse_double(f[1], where),
                       parse_double(f[2], where), parse_double(f[3], where), parse_double(f[4], where)});
    }
    return log;
}

}  // namespace fastcharge
