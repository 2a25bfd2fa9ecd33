#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "foc/dataset.hpp"
#include "foc/metrics.hpp"
#include "foc/network.hpp"

namespace foc {

struct ConsistencyReport {
  double overall = 0.0;
  struct PerCluster {
    int cluster = 0;
    int size = 0;
    double consistent_fraction = 0.0;
  };
  std::vector<PerCluster> per_cluster;
  double mean = 0.0;    // over per-cluster fractions
  double stddev = 0.0;  // population std over per-cluster fractions
};

// judgments[i]: image i matches the visual majority of its cluster. Clusters
// with zero members are excluded from the per-cluster statistics.
ConsistencyReport consistency_score(const std::vector<int>& assignments,
                                    const std::vector<bool>& judgments);

// Default proxy judgment: an image is consistent iff its hard label equals
// its cluster's majority label (cluster purity against ground truth).
std::vector<bool> proxy_judgments(const std::vector<int>& assignments,
                                  const std::vector<int>& truths);

// Expert-judgment CSV: header `path,cluster,consistent`.
std::vector<bool> load_expert_judgments(const std::string& path,
                                        const std::vector<std::string>& order,
                                        std::vector<int>* clusters_out = nullptr);

struct HeadScores {
  std::vector<double> accuracy, f1;  // per head copy
  int best_head = 0;                 // selected on the validation split
};

struct EvaluationReport {
  HeadScores normal, overcluster;
  ClusterMapping mapping;            // for the best overclustering head
  ConsistencyReport consistency;
  std::vector<double> per_class_f1;  // best normal head on the target split
  int n_target = 0;
  std::string target_split, mapping_split;
};

// Argmax class/cluster predictions of one head over a sample list.
std::vector<int> predict_head(Model& model, HeadType type, int head,
                              const std::vector<Sample>& samples,
                              int batch_size = 256);

// Hard ground truth of a sample list (fuzzy labels reduced via hard_label).
std::vector<int> hard_truths(const std::vector<Sample>& samples);

// Scores every head on `target`; overclustering heads are mapped through the
// majority mapping computed on `mapping_source`. Best heads per type are
// selected on `validation`. The consistency report uses proxy judgments.
EvaluationReport evaluate_model(Model& model,
                                const std::vector<Sample>& target,
                                const std::vector<Sample>& mapping_source,
                                const std::vector<Sample>& validation);

void write_report_json(const std::string& path, const EvaluationReport& report,
                       const std::string& checkpoint_digest);

}  // namespace foc
