#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "foc/augment.hpp"
#include "foc/losses.hpp"
#include "foc/network.hpp"
#include "foc/sampler.hpp"

namespace foc {

enum class TrainMode { Foc, FocLight, WarmupOnly };

struct PhaseEpochs {
  int warmup = 50;
  int finetune = 20;
  int main = 100;
};

struct PhaseLearningRates {
  double warmup = 1e-4;
  double finetune = 1e-3;
  double main = 1e-4;
};

struct TrainConfig {
  TrainMode mode = TrainMode::Foc;
  LossWeights weights;
  RatioConfig ratio;
  AugmentationPolicy augmentation;
  ModelConfig model;
  PhaseEpochs epochs;
  PhaseLearningRates lr;
  std::uint64_t seed = 0;
  bool include_labeled_pairs_in_mi = true;
  bool ce_inverse_on_unlabeled = true;
  bool alternate_per_epoch = false;  // default alternation is per batch

  // FOC-Light forces lambda_u=0, no warm-up, single heads, no repetitions.
  void apply_mode_constraints();
  void validate() const;
};

// Flat key=value document; '#' starts a comment. Unknown keys are an error so
// typos surface with the offending key named.
TrainConfig parse_run_config(const std::string& path);
TrainConfig parse_run_config_text(const std::string& text);
void write_run_config(const std::string& path, const TrainConfig& cfg);

std::string mode_name(TrainMode mode);

}  // namespace foc
