#include "fastcharge/reward.hpp"

#include <cmath>

#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

void RewardConfig::validate() const
{
    auto non_positive = [](double v, const char* key) {
        if (!(v <= 0.0)) throw ConfigError(format("%s must be <= 0 (got %g)", key, v));
    };
    non_positive(lambda_soc, "lambda_soc");
    non_positive(lambda_vol, "lambda_vol");
    non_positive(lambda_smooth, "lambda_smooth");
    non_positive(timeout_penalty, "timeout_penalty");
    if (!(soc_target > 0.0 && soc_target <= 1.0))
        throw ConfigError(format("soc_target must lie in (0, 1] (got %g)", soc_target));
    if (!(timeout_minutes > 0.0)) throw ConfigError(format("timeout_minutes must be > 0 (got %g)", timeout_minutes));
}

RewardTerms reward_terms(double soc, double voltage, double v_max, double current,
                         double previous_current, const RewardConfig& cfg)
{
    RewardTerms t;
    t.soc = cfg.lambda_soc * std::abs(cfg.soc_target - soc);
    t.voltage = voltage > v_max ? cfg.lambda_vol * (voltage - v_max) : 0.0;
    t.smooth = cfg.lambda_smooth * std::abs(current - previous_current);
    return t;
}

}  // namespace fastcharge
