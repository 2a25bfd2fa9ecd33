#pragma once

#include <memory>
#include <string>
#include <vector>

#include "foc/checkpoint.hpp"
#include "foc/evaluator.hpp"
#include "foc/losses.hpp"
#include "foc/network.hpp"
#include "foc/run_config.hpp"
#include "foc/sampler.hpp"

namespace foc {

enum class TrainPhase { Warmup, HeadFinetune, Main };
std::string phase_name(TrainPhase phase);

struct LossBreakdown {
  double supervised = 0.0;
  double unsupervised = 0.0;  // -MI (value minimized)
  double total = 0.0;
};

struct EpochMetrics {
  std::string phase;
  int epoch = 0;
  std::string head_type;
  double loss_s = 0.0;
  double loss_u = 0.0;
  double val_f1 = 0.0;   // NaN during warm-up (no label reads there)
  double val_acc = 0.0;
};

void append_metrics_csv(const std::string& path,
                        const std::vector<EpochMetrics>& rows);

class Trainer {
 public:
  // `out_dir` empty = in-memory run (no checkpoints or CSV).
  Trainer(const TrainConfig& cfg, const DatasetSplit& data,
          std::string out_dir = {});

  // Phase sequence per mode: foc = warm-up, head-finetune, main;
  // foc-light = main only; warm-up-only = warm-up only.
  std::vector<TrainPhase> phase_sequence() const;
  void run();

  // Resume from a state file written by a previous (interrupted) run.
  static std::unique_ptr<Trainer> resume(const std::string& state_path,
                                         const TrainConfig& cfg,
                                         const DatasetSplit& data,
                                         std::string out_dir = {});

  void run_phase(TrainPhase phase);

  // One optimizer update on one head type. Exposed for tests.
  LossBreakdown train_step(const std::vector<TripleItem>& batch, HeadType type,
                           TrainPhase phase);

  // even batch index -> normal heads, odd -> overclustering heads
  HeadType alternate_schedule(long batch_index) const;

  Model& model() { return *model_; }
  const std::vector<EpochMetrics>& history() const { return history_; }
  double best_val_f1() const { return best_val_f1_; }
  std::uint64_t unlabeled_cursor() const { return unlabeled_cursor_; }

  void save_state(const std::string& path);

 private:
  void run_epochs(TrainPhase phase, int start_epoch);
  double validation_f1(double* accuracy_out);
  void check_finite(double value, const char* term) const;

  TrainConfig cfg_;
  const DatasetSplit* data_;
  std::string out_dir_;
  std::unique_ptr<Model> model_;
  std::unique_ptr<Adam> adam_backbone_, adam_normal_, adam_over_;
  std::vector<EpochMetrics> history_;
  std::uint64_t unlabeled_cursor_ = 0;
  double best_val_f1_ = -1.0;
  TrainPhase resume_phase_ = TrainPhase::Warmup;
  int resume_epoch_ = 0;
  bool resuming_ = false;
  long step_index_ = 0;  // batch counter within the current epoch
};

}  // namespace foc
