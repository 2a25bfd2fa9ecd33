#include "foc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "foc/errors.hpp"

namespace foc {

TripleComposer::TripleComposer(const DatasetSplit& split,
                               const AugmentationPolicy& policy,
                               bool supervised_augmentations)
    : split_(&split), policy_(policy), supervised_aug_(supervised_augmentations) {
  if (supervised_aug_) {
    int k_gt = 0;
    hard_labels_.reserve(split.labeled.size());
    for (const auto& s : split.labeled) {
      int y = hard_label(s.label());
      hard_labels_.push_back(y);
      k_gt = std::max(k_gt, y + 1);
    }
    by_class_.resize(k_gt);
    for (std::size_t i = 0; i < hard_labels_.size(); ++i)
      by_class_[hard_labels_[i]].push_back(static_cast<int>(i));
  }
}

TripleItem TripleComposer::compose(bool from_labeled_pool, int index,
                                   Rng& rng) const {
  const auto& pool = from_labeled_pool ? split_->labeled : split_->unlabeled;
  const Sample& x = pool[index];
  TripleItem item;
  item.source_index = index;
  item.labeled = from_labeled_pool && supervised_aug_;

  if (item.labeled) {
    int y = hard_labels_[index];
    item.label = y;
    item.x1 = augment(x.image, policy_, rng);

    // supervised augmentation: a different image with the same class
    const auto& same = by_class_[y];
    if (same.size() >= 2) {
      int pick;
      do {
        pick = same[uniform_int(rng, 0, static_cast<int>(same.size()) - 1)];
      } while (pick == index);
      item.x2_source = pick;
      item.x2 = augment(split_->labeled[pick].image, policy_, rng);
    } else {
      static bool warned = false;
      if (!warned) {
        std::fprintf(stderr,
                     "warning: class %d has a single exemplar; using the "
                     "anchor image for x2\n", y);
        warned = true;
      }
      item.x2_source = index;
      item.x2 = augment(x.image, policy_, rng);
    }

    // inverse example: uniform over labeled samples of other classes
    int n_other = static_cast<int>(split_->labeled.size() - same.size());
    if (n_other < 1)
      throw ConfigError("compose_triple: no labeled sample with a different class");
    int pick;
    do {
      pick = uniform_int(rng, 0, static_cast<int>(split_->labeled.size()) - 1);
    } while (hard_labels_[pick] == y);
    item.x3_source = pick;
    item.x3 = augment(split_->labeled[pick].image, policy_, rng);
  } else {
    item.x1 = augment(x.image, policy_, rng);
    item.x2 = augment(x.image, policy_, rng);
    // random image from the full pool (labeled + unlabeled)
    int total = labeled_size() + unlabeled_size();
    int pick = uniform_int(rng, 0, total - 1);
    item.x3_source = pick;
    const Image& src = pick < labeled_size()
                           ? split_->labeled[pick].image
                           : split_->unlabeled[pick - labeled_size()].image;
    item.x3 = augment(src, policy_, rng);
  }
  return item;
}

BatchPlanStats batch_plan(const DatasetSplit& split, const RatioConfig& cfg) {
  if (cfg.batch_size < 1 || cfg.repetitions < 1 || cfg.r < 0.0 || cfg.r > 1.0)
    throw ConfigError("batch_plan: invalid ratio config");
  BatchPlanStats p;
  p.unlabeled_per_batch = static_cast<int>(std::floor(cfg.r * cfg.batch_size));
  p.labeled_per_batch = cfg.batch_size - p.unlabeled_per_batch;
  if (p.labeled_per_batch < 1)
    throw ConfigError("batch_plan: r leaves no room for labeled samples");
  if (split.labeled.empty())
    throw ConfigError("batch_plan: empty labeled pool");
  if (p.unlabeled_per_batch > 0 && split.unlabeled.empty())
    throw ConfigError("batch_plan: r > 0 but the unlabeled pool is empty");
  p.batches_per_epoch = std::max<int>(
      1, static_cast<int>(split.labeled.size()) / p.labeled_per_batch);
  return p;
}

BatchSampler::BatchSampler(const DatasetSplit& split, const RatioConfig& cfg,
                           const AugmentationPolicy& policy, std::uint64_t seed,
                           bool supervised_augmentations)
    : split_(&split), cfg_(cfg), seed_(seed),
      composer_(split, policy, supervised_augmentations),
      plan_(batch_plan(split, cfg)) {}

std::vector<std::vector<TripleItem>> BatchSampler::epoch_batches(
    int epoch_index, std::uint64_t& unlabeled_cursor) const {
  const int n_lab = static_cast<int>(split_->labeled.size());
  const int n_unlab = static_cast<int>(split_->unlabeled.size());

  // one pass over the labeled pool per epoch
  std::vector<int> lab_order(n_lab);
  for (int i = 0; i < n_lab; ++i) lab_order[i] = i;
  Rng shuffle_rng(derive_seed(seed_, 101, epoch_index));
  std::shuffle(lab_order.begin(), lab_order.end(), shuffle_rng);

  // unlabeled round-robin over a fixed seeded permutation
  std::vector<int> unlab_order(n_unlab);
  for (int i = 0; i < n_unlab; ++i) unlab_order[i] = i;
  Rng perm_rng(derive_seed(seed_, 102));
  std::shuffle(unlab_order.begin(), unlab_order.end(), perm_rng);

  std::vector<std::vector<TripleItem>> batches;
  batches.reserve(plan_.batches_per_epoch);
  int lab_pos = 0;
  for (int b = 0; b < plan_.batches_per_epoch; ++b) {
    Rng rng(derive_seed(seed_, 103, epoch_index, b));
    std::vector<TripleItem> batch;
    batch.reserve(static_cast<std::size_t>(cfg_.batch_size) * cfg_.repetitions);
    std::vector<std::pair<bool, int>> members;
    for (int i = 0; i < plan_.labeled_per_batch; ++i) {
      members.emplace_back(true, lab_order[lab_pos % n_lab]);
      ++lab_pos;
    }
    for (int i = 0; i < plan_.unlabeled_per_batch; ++i) {
      members.emplace_back(false, unlab_order[unlabeled_cursor % n_unlab]);
      ++unlabeled_cursor;
    }
    for (int rep = 0; rep < cfg_.repetitions; ++rep)
      for (const auto& [labeled, idx] : members)
        batch.push_back(composer_.compose(labeled, idx, rng));
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace foc
