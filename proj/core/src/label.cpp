#include "foc/label.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "foc/errors.hpp"

namespace foc {

namespace {
constexpr double kCertainTol = 1e-6;
std::atomic<std::uint64_t> g_label_reads{0};
}  // namespace

LabelDistribution::LabelDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw DataError("LabelDistribution: empty vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw DataError("LabelDistribution: negative component");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kCertainTol)
    throw DataError("LabelDistribution: components sum to " +
                    std::to_string(sum) + ", expected 1");
}

LabelDistribution aggregate_annotations(const AnnotationSet& votes) {
  std::int64_t total = 0;
  for (std::int64_t v : votes.votes) {
    if (v < 0) throw DataError("aggregate_annotations: negative vote count");
    total += v;
  }
  if (total < 1) throw DataError("aggregate_annotations: all-zero vote vector");
  std::vector<double> probs(votes.votes.size());
  for (std::size_t c = 0; c < probs.size(); ++c)
    probs[c] = static_cast<double>(votes.votes[c]) / static_cast<double>(total);
  return LabelDistribution(std::move(probs));
}

bool is_certain(const LabelDistribution& l) {
  double mx = *std::max_element(l.probs().begin(), l.probs().end());
  return mx >= 1.0 - kCertainTol;
}

int hard_label(const LabelDistribution& l) {
  // max_element keeps the first maximum, which is the lowest-index tie-break
  return static_cast<int>(std::distance(
      l.probs().begin(),
      std::max_element(l.probs().begin(), l.probs().end())));
}

std::uint64_t label_read_count() { return g_label_reads.load(); }
void reset_label_read_count() { g_label_reads.store(0); }
void count_label_read() { g_label_reads.fetch_add(1, std::memory_order_relaxed); }

}  // namespace foc
