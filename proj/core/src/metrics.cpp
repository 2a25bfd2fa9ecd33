#include "foc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "foc/errors.hpp"

namespace foc {

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& truths) {
  if (predictions.size() != truths.size())
    throw DataError("accuracy: length mismatch");
  if (predictions.empty()) throw DataError("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& truths, int k_gt) {
  if (predictions.size() != truths.size())
    throw DataError("macro_f1: length mismatch");
  if (predictions.empty()) throw DataError("macro_f1: empty input");
  std::vector<long> tp(k_gt, 0), fp(k_gt, 0), fn(k_gt, 0);
  std::set<int> truth_classes;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    int p = predictions[i], t = truths[i];
    if (p < 0 || p >= k_gt || t < 0 || t >= k_gt)
      throw DataError("macro_f1: class id out of range");
    truth_classes.insert(t);
    if (p == t) ++tp[t];
    else { ++fp[p]; ++fn[t]; }
  }
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < k_gt; ++c) {
    bool in_truth = truth_classes.count(c) > 0;
    bool in_pred = tp[c] + fp[c] > 0;
    if (!in_truth && !in_pred) continue;   // class entirely absent
    if (!in_truth) continue;               // predicted-only classes excluded too
    double denom = 2.0 * tp[c] + fp[c] + fn[c];
    sum += denom > 0 ? 2.0 * tp[c] / denom : 0.0;
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

std::vector<double> per_class_f1(const std::vector<int>& predictions,
                                 const std::vector<int>& truths, int k_gt) {
  if (predictions.size() != truths.size())
    throw DataError("per_class_f1: length mismatch");
  std::vector<long> tp(k_gt, 0), fp(k_gt, 0), fn(k_gt, 0);
  std::set<int> truth_classes;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    truth_classes.insert(truths[i]);
    if (predictions[i] == truths[i]) ++tp[truths[i]];
    else { ++fp[predictions[i]]; ++fn[truths[i]]; }
  }
  std::vector<double> out(k_gt);
  for (int c = 0; c < k_gt; ++c) {
    if (!truth_classes.count(c)) {
      out[c] = std::nan("");
      continue;
    }
    double denom = 2.0 * tp[c] + fp[c] + fn[c];
    out[c] = denom > 0 ? 2.0 * tp[c] / denom : 0.0;
  }
  return out;
}

ClusterMapping cluster_mapping(const std::vector<int>& cluster_assignments,
                               const std::vector<int>& truths, int k,
                               int k_gt) {
  if (cluster_assignments.size() != truths.size())
    throw DataError("cluster_mapping: length mismatch");
  std::vector<std::vector<long>> counts(k, std::vector<long>(k_gt, 0));
  std::vector<long> global(k_gt, 0);
  for (std::size_t i = 0; i < cluster_assignments.size(); ++i) {
    int cl = cluster_assignments[i], t = truths[i];
    if (cl < 0 || cl >= k) throw DataError("cluster_mapping: cluster id out of range");
    if (t < 0 || t >= k_gt) throw DataError("cluster_mapping: class id out of range");
    ++counts[cl][t];
    ++global[t];
  }
  auto argmax_lowest = [](const std::vector<long>& v) {
    return static_cast<int>(std::distance(
        v.begin(), std::max_element(v.begin(), v.end())));
  };
  const int global_major = argmax_lowest(global);
  ClusterMapping m;
  m.assignment.resize(k);
  for (int cl = 0; cl < k; ++cl) {
    long total = 0;
    for (long c : counts[cl]) total += c;
    m.assignment[cl] = total > 0 ? argmax_lowest(counts[cl]) : global_major;
  }
  return m;
}

std::vector<int> apply_mapping(const ClusterMapping& mapping,
                               const std::vector<int>& cluster_assignments) {
  std::vector<int> out;
  out.reserve(cluster_assignments.size());
  for (int cl : cluster_assignments) out.push_back(mapping.assignment.at(cl));
  return out;
}

}  // namespace foc
