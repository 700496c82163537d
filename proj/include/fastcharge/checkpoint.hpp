#pragma once

#include <filesystem>

#include "fastcharge/td3.hpp"

namespace fastcharge {

inline constexpr int checkpoint_version = 1;

/// Text checkpoint: version header, config echo, then every network as its
/// layer sizes followed by the flat parameter vector.
void save_checkpoint(const Td3Agent& agent, const std::filesystem::path& path);
Td3Agent load_checkpoint(const std::filesystem::path& path);

/// Actor-only checkpoint reader, accepting full checkpoints as well.
Mlp load_actor(const std::filesystem::path& path);

}  // namespace fastcharge
