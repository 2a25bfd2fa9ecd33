#pragma once

#include <map>
#include <string>
#include <vector>

namespace foc {

// Micro-averaged accuracy = correct / total.
double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& truths);

// Unweighted mean over classes of 2TP/(2TP+FP+FN). Classes absent from the
// truth set entirely are excluded from the mean; classes present in truths
// but never predicted correctly score normally (possibly 0).
double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& truths, int k_gt);

// Majority-vote map from cluster id to class id. Ties break to the lowest
// class index; empty clusters map to the globally most frequent class.
struct ClusterMapping {
  std::vector<int> assignment;  // size k, cluster id -> class id
  std::string source_split;
};

ClusterMapping cluster_mapping(const std::vector<int>& cluster_assignments,
                               const std::vector<int>& truths, int k, int k_gt);

std::vector<int> apply_mapping(const ClusterMapping& mapping,
                               const std::vector<int>& cluster_assignments);

// Per-class F1 values (classes absent from truths get NaN).
std::vector<double> per_class_f1(const std::vector<int>& predictions,
                                 const std::vector<int>& truths, int k_gt);

}  // namespace foc
