#pragma once

#include <cstdint>
#include <vector>

namespace foc {

// Soft probability distribution over the ground-truth classes. Components are
// non-negative and sum to 1 within 1e-6.
class LabelDistribution {
 public:
  LabelDistribution() = default;
  explicit LabelDistribution(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t c) const { return probs_[c]; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

// Per-class annotator vote counts for one image. Requires at least one vote.
struct AnnotationSet {
  std::vector<std::int64_t> votes;
};

// Mean over all annotations: probs[c] = votes[c] / sum(votes).
LabelDistribution aggregate_annotations(const AnnotationSet& votes);

// True iff the max component equals 1 within 1e-6 (all annotators agree).
bool is_certain(const LabelDistribution& l);

// Index of the maximum component; ties broken by lowest index.
int hard_label(const LabelDistribution& l);

// Label-read audit. Sample::label() bumps this counter; a pure warm-up run
// must leave it untouched.
std::uint64_t label_read_count();
void reset_label_read_count();
void count_label_read();

}  // namespace foc
