#pragma once

#include <array>
#include <string>
#include <vector>

#include "dnnd/inference.hpp"

namespace dnnd::io {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  infer::ChainConfig config;
  HyperParams hp;
  ModelState state;
  std::size_t iteration = 0;
  std::string rng_token;
  std::array<infer::MoveStats, 6> moves{};
  std::string data_fingerprint;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// 64-bit FNV-1a over the edge bytes, as 16 hex digits.
std::string fingerprint(const std::vector<Edge>& edges);

Checkpoint capture(const infer::Sampler& sampler);

/// Rebuilds a sampler; throws CheckpointError if `edges` are not the data
/// the checkpoint was taken on.
infer::Sampler restore(const Checkpoint& ckpt, std::vector<Edge> edges);

std::string to_json(const Checkpoint& ckpt);
Checkpoint from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dnnd::io
