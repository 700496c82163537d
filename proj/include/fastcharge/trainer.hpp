#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <vector>

#include "fastcharge/environments.hpp"
#include "fastcharge/td3.hpp"

namespace fastcharge {

struct TrainerConfig {
    int episodes{2000};
    int eval_every{20};
    int eval_episodes{1};
    unsigned long long eval_seed{12345};
    std::filesystem::path log_csv;     // empty: no log file
    std::filesystem::path checkpoint;  // empty: no checkpoint file

    void validate() const;
};

struct EvalRecord {
    int episode{};
    double reward{};
    double max_voltage{};
    double min_eta_side{};
    double charge_minutes{};
};

struct TrainingResult {
    std::vector<EvalRecord> evaluations;
    std::vector<double> episode_rewards;
    Mlp best_actor;
    double best_reward{};
    int best_episode{-1};
    bool interrupted{};
};

/// Exploration sigma for an episode: linear from start to end over the
/// decay horizon, then constant.
double exploration_sigma(const Td3Config& cfg, int episode);

/// Averages eval_episodes deterministic rollouts on a copy of env.
EvalRecord evaluate_policy(const Environment& env, const Mlp& actor, int episodes,
                           unsigned long long seed);

/// Set by the SIGINT handler; the trainer stops after the current episode
/// and checkpoints.
std::atomic<bool>& interrupt_flag();
void install_interrupt_handler();

/// Off-policy TD3 loop: one gradient step per environment step once the
/// buffer holds a minibatch. Evaluates every eval_every episodes, keeps the
/// best actor and writes the log/checkpoint files when configured.
struct TrainerHooks {
    std::function<void(int episode, const EpisodeSummary&)> on_episode;
    std::function<void(const EvalRecord&)> on_eval;
};

TrainingResult train(Environment& env, Td3Agent& agent, const TrainerConfig& cfg,
                     const TrainerHooks& hooks = {});

void write_training_log(const std::vector<EvalRecord>& log, const std::filesystem::path& path);
std::vector<EvalRecord> read_training_log(const std::filesystem::path& path);

}  // namespace fastcharge
