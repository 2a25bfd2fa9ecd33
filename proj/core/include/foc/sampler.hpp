#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "foc/augment.hpp"
#include "foc/dataset.hpp"
#include "foc/rng.hpp"

namespace foc {

// Three augmented inputs per item: anchor view, second view (supervised
// augmentation for labeled items), inverse example.
struct TripleItem {
  Image x1, x2, x3;
  std::optional<int> label;  // hard class index, present iff labeled
  bool labeled = false;
  int source_index = -1;     // index into labeled/unlabeled pool
  int x2_source = -1;        // pool index behind x2 (labeled branch)
  int x3_source = -1;
};

struct RatioConfig {
  double r = 0.5;        // unlabeled fraction upper bound per batch
  int batch_size = 32;
  int repetitions = 3;   // per-batch image repetition count
};

// Precomputed hard labels avoid re-reading label distributions in the hot
// path (and keep warm-up label-audit clean: labels are read here only when
// supervised augmentations are on).
class TripleComposer {
 public:
  TripleComposer(const DatasetSplit& split, const AugmentationPolicy& policy,
                 bool supervised_augmentations);

  // Labeled branch: x1=g1(x), x2=g2(same-class other image), x3=g3(image of a
  // different class). Unlabeled branch: x1=g1(x), x2=g2(x), x3=g3(random).
  TripleItem compose(bool from_labeled_pool, int index, Rng& rng) const;

  int labeled_size() const { return static_cast<int>(split_->labeled.size()); }
  int unlabeled_size() const { return static_cast<int>(split_->unlabeled.size()); }

 private:
  const DatasetSplit* split_;
  AugmentationPolicy policy_;
  bool supervised_aug_;
  std::vector<int> hard_labels_;               // labeled pool only
  std::vector<std::vector<int>> by_class_;     // labeled indices per class
};

struct BatchPlanStats {
  int labeled_per_batch = 0;
  int unlabeled_per_batch = 0;
  int batches_per_epoch = 0;
};

BatchPlanStats batch_plan(const DatasetSplit& split, const RatioConfig& cfg);

// Produces the batches of one epoch. The unlabeled cursor advances round-robin
// across epochs so every unlabeled sample is eventually seen; callers persist
// it between epochs. Each underlying item appears `repetitions` times with
// fresh augmentation draws.
class BatchSampler {
 public:
  BatchSampler(const DatasetSplit& split, const RatioConfig& cfg,
               const AugmentationPolicy& policy, std::uint64_t seed,
               bool supervised_augmentations = true);

  std::vector<std::vector<TripleItem>> epoch_batches(int epoch_index,
                                                     std::uint64_t& unlabeled_cursor) const;

  const BatchPlanStats& plan() const { return plan_; }

 private:
  const DatasetSplit* split_;
  RatioConfig cfg_;
  std::uint64_t seed_;
  TripleComposer composer_;
  BatchPlanStats plan_;
};

}  // namespace foc
