#pragma once

namespace fastcharge {

struct RewardConfig {
    double lambda_soc{-2.0};
    double lambda_vol{-10.0};
    double lambda_smooth{-0.5};  // per A
    double soc_target{0.8};
    double timeout_minutes{480.0};
    double timeout_penalty{-1000.0};

    void validate() const;
};

struct RewardTerms {
    double soc{};
    double voltage{};
    double smooth{};
    double timeout{};

    double total() const { return soc + voltage + smooth + timeout; }
};

/// Per-step shaping: SoC tracking, voltage above the SoH-dependent bound and
/// current change. The timeout term is left at zero; the environment adds
/// it once.
RewardTerms reward_terms(double soc, double voltage, double v_max, double current,
                         double previous_current, const RewardConfig& cfg);

}  // namespace fastcharge
