#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foc/image.hpp"
#include "foc/label.hpp"

namespace foc {

enum class SplitTag { Auto, Train, Val, Unlabeled };

// One image with an optional fuzzy label. Label access is audited; use
// has_label()/label() rather than touching the optional directly.
class Sample {
 public:
  Image image;
  std::string path;  // identity within a dataset
  bool certain = false;
  SplitTag split_tag = SplitTag::Auto;

  void set_label(LabelDistribution l) { label_ = std::move(l); }
  void clear_label() { label_.reset(); }
  bool has_label() const { return label_.has_value(); }
  const LabelDistribution& label() const {
    count_label_read();
    return *label_;
  }

 private:
  std::optional<LabelDistribution> label_;
};

struct DatasetSplit {
  std::vector<Sample> labeled;    // all certain, hard labels
  std::vector<Sample> unlabeled;  // label optional, scoring only
  std::vector<Sample> validation;
};

struct PartitionOptions {
  double val_fraction = 0.2;  // used only for SplitTag::Auto samples
  std::uint64_t seed = 0;
};

// Certain samples go to the labeled pool, fuzzy or label-free samples to the
// unlabeled pool. Samples tagged Val land in validation; Auto-tagged certain
// samples are split off to validation by a seeded stratified fraction.
DatasetSplit partition_dataset(std::vector<Sample> samples,
                               const PartitionOptions& opts = {});

struct ManifestOptions {
  PartitionOptions partition;
  bool load_images = true;
};

// Manifest CSV: header `path,split,vote_0,...,vote_{k-1}`, split in
// {train,val,unlabeled,auto}, paths relative to `directory`. All-zero votes
// mean "no label". Images are PNG, scaled to [0,1] on load.
DatasetSplit load_manifest(const std::string& directory,
                           const std::string& manifest_path,
                           const ManifestOptions& opts = {});

// Parsed rows without partitioning (used by tooling and tests).
std::vector<Sample> read_manifest_rows(const std::string& directory,
                                       const std::string& manifest_path,
                                       bool load_images);

}  // namespace foc
