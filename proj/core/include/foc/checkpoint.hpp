#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foc/network.hpp"

namespace foc {

// Optimizer slot persisted for exact resume.
struct AdamState {
  std::vector<float> m, v;
  long t = 0;
};

// Self-describing container: JSON header (format version, architecture,
// normalization stats, training-phase marker) followed by raw float blobs.
struct Checkpoint {
  ModelConfig config;
  NormStats norm;
  std::string phase = "main";  // warm-up | head-finetune | main
  int epoch = 0;
  std::uint64_t seed = 0;
  std::uint64_t unlabeled_cursor = 0;
  std::string rng_state;  // serialized engine, empty if not resuming
  std::vector<float> parameters;
  std::optional<AdamState> adam_backbone, adam_normal, adam_over;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint snapshot_model(Model& model);
Model restore_model(const Checkpoint& ckpt);

// Short content hash used to tie reports to the checkpoint they came from.
std::string checkpoint_digest(const std::string& path);

}  // namespace foc
