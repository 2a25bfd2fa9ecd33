#include "foc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "foc/errors.hpp"

namespace foc {

ConsistencyReport consistency_score(const std::vector<int>& assignments,
                                    const std::vector<bool>& judgments) {
  if (assignments.size() != judgments.size())
    throw DataError("consistency_score: length mismatch");
  std::map<int, std::pair<int, int>> per;  // cluster -> (size, consistent)
  long consistent_total = 0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto& [size, cons] = per[assignments[i]];
    ++size;
    if (judgments[i]) { ++cons; ++consistent_total; }
  }
  ConsistencyReport r;
  r.overall = assignments.empty()
                  ? 0.0
                  : static_cast<double>(consistent_total) / assignments.size();
  double sum = 0.0, sumsq = 0.0;
  for (const auto& [cluster, sc] : per) {
    double frac = static_cast<double>(sc.second) / sc.first;
    r.per_cluster.push_back({cluster, sc.first, frac});
    sum += frac;
    sumsq += frac * frac;
  }
  if (!r.per_cluster.empty()) {
    const double n = static_cast<double>(r.per_cluster.size());
    r.mean = sum / n;
    r.stddev = std::sqrt(std::max(0.0, sumsq / n - r.mean * r.mean));
  }
  return r;
}

std::vector<bool> proxy_judgments(const std::vector<int>& assignments,
                                  const std::vector<int>& truths) {
  if (assignments.size() != truths.size())
    throw DataError("proxy_judgments: length mismatch");
  int k = assignments.empty()
              ? 0
              : *std::max_element(assignments.begin(), assignments.end()) + 1;
  int k_gt = truths.empty()
                 ? 1
                 : *std::max_element(truths.begin(), truths.end()) + 1;
  ClusterMapping m = cluster_mapping(assignments, truths, k, k_gt);
  std::vector<bool> out(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i)
    out[i] = m.assignment[assignments[i]] == truths[i];
  return out;
}

std::vector<bool> load_expert_judgments(const std::string& path,
                                        const std::vector<std::string>& order,
                                        std::vector<int>* clusters_out) {
  std::ifstream in(path);
  if (!in) throw DataError("expert judgments: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("path,cluster,consistent", 0) != 0)
    throw DataError("expert judgments: bad header in " + path);
  std::map<std::string, std::pair<int, bool>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string p, cl, cons;
    if (!std::getline(ss, p, ',') || !std::getline(ss, cl, ',') ||
        !std::getline(ss, cons, ','))
      throw DataError("expert judgments: malformed row '" + line + "'");
    rows[p] = {std::stoi(cl), cons == "1" || cons == "true"};
  }
  std::vector<bool> out;
  if (clusters_out) clusters_out->clear();
  for (const auto& p : order) {
    auto it = rows.find(p);
    if (it == rows.end())
      throw DataError("expert judgments: missing row for " + p);
    out.push_back(it->second.second);
    if (clusters_out) clusters_out->push_back(it->second.first);
  }
  return out;
}

std::vector<int> predict_head(Model& model, HeadType type, int head,
                              const std::vector<Sample>& samples,
                              int batch_size) {
  std::vector<int> preds;
  preds.reserve(samples.size());
  for (std::size_t start = 0; start < samples.size();
       start += static_cast<std::size_t>(batch_size)) {
    std::vector<const Image*> batch;
    for (std::size_t i = start;
         i < std::min(samples.size(), start + batch_size); ++i)
      batch.push_back(&samples[i].image);
    Eigen::MatrixXf feats = model.forward_backbone(batch);
    Eigen::MatrixXf probs = model.forward_head(type, head, feats);
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      Eigen::Index arg = 0;
      probs.col(j).maxCoeff(&arg);
      preds.push_back(static_cast<int>(arg));
    }
  }
  return preds;
}

std::vector<int> hard_truths(const std::vector<Sample>& samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.has_label())
      throw DataError("hard_truths: sample without label: " + s.path);
    out.push_back(hard_label(s.label()));
  }
  return out;
}

EvaluationReport evaluate_model(Model& model,
                                const std::vector<Sample>& target,
                                const std::vector<Sample>& mapping_source,
                                const std::vector<Sample>& validation) {
  if (target.empty()) throw DataError("evaluate_model: empty target split");
  const int k_gt = model.config().k_gt;
  const int k = model.config().k;
  EvaluationReport rep;
  rep.n_target = static_cast<int>(target.size());

  const auto truths = hard_truths(target);
  const auto map_truths = hard_truths(mapping_source);
  const auto val_truths = hard_truths(validation);

  double best_val_normal = -1.0, best_val_over = -1.0;
  std::vector<int> best_over_clusters;
  for (int h = 0; h < model.heads_per_type(); ++h) {
    // normal heads score directly
    auto preds = predict_head(model, HeadType::Normal, h, target);
    rep.normal.accuracy.push_back(accuracy(preds, truths));
    rep.normal.f1.push_back(macro_f1(preds, truths, k_gt));
    auto val_preds = predict_head(model, HeadType::Normal, h, validation);
    double val_f1 = macro_f1(val_preds, val_truths, k_gt);
    if (val_f1 > best_val_normal) {
      best_val_normal = val_f1;
      rep.normal.best_head = h;
    }

    // overclustering heads score through the majority mapping
    auto map_clusters = predict_head(model, HeadType::Overcluster, h, mapping_source);
    ClusterMapping mapping = cluster_mapping(map_clusters, map_truths, k, k_gt);
    auto clusters = predict_head(model, HeadType::Overcluster, h, target);
    auto mapped = apply_mapping(mapping, clusters);
    rep.overcluster.accuracy.push_back(accuracy(mapped, truths));
    rep.overcluster.f1.push_back(macro_f1(mapped, truths, k_gt));
    auto val_clusters = predict_head(model, HeadType::Overcluster, h, validation);
    auto val_mapped = apply_mapping(mapping, val_clusters);
    double val_over_f1 = macro_f1(val_mapped, val_truths, k_gt);
    if (val_over_f1 > best_val_over) {
      best_val_over = val_over_f1;
      rep.overcluster.best_head = h;
      rep.mapping = mapping;
      best_over_clusters = clusters;
    }
  }

  rep.consistency = consistency_score(
      best_over_clusters, proxy_judgments(best_over_clusters, truths));
  rep.per_class_f1 = per_class_f1(
      predict_head(model, HeadType::Normal, rep.normal.best_head, target),
      truths, k_gt);
  return rep;
}

void write_report_json(const std::string& path, const EvaluationReport& report,
                       const std::string& checkpoint_digest) {
  nlohmann::json j;
  j["checkpoint"] = checkpoint_digest;
  j["target_split"] = report.target_split;
  j["mapping_split"] = report.mapping_split;
  j["n_target"] = report.n_target;
  auto heads = [](const HeadScores& s) {
    nlohmann::json h;
    h["accuracy"] = s.accuracy;
    h["macro_f1"] = s.f1;
    h["best_head"] = s.best_head;
    h["best_accuracy"] = s.accuracy[s.best_head];
    h["best_macro_f1"] = s.f1[s.best_head];
    return h;
  };
  j["normal_head"] = heads(report.normal);
  j["overclustering_head"] = heads(report.overcluster);
  j["cluster_mapping"] = report.mapping.assignment;
  for (double f : report.per_class_f1)
    j["per_class_f1"].push_back(std::isnan(f) ? -1.0 : f);
  nlohmann::json cons;
  cons["overall"] = report.consistency.overall;
  cons["mean"] = report.consistency.mean;
  cons["stddev"] = report.consistency.stddev;
  for (const auto& pc : report.consistency.per_cluster)
    cons["per_cluster"].push_back(
        {{"cluster", pc.cluster}, {"size", pc.size},
         {"consistent_fraction", pc.consistent_fraction}});
  j["consistency"] = cons;
  std::ofstream out(path);
  if (!out) throw DataError("write_report_json: cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace foc
