// foc: dataset generation, training, evaluation and figure emission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foc/checkpoint.hpp"
#include "foc/dataset.hpp"
#include "foc/errors.hpp"
#include "foc/evaluator.hpp"
#include "foc/plot.hpp"
#include "foc/run_config.hpp"
#include "foc/synce.hpp"
#include "foc/trainer.hpp"

namespace fs = std::filesystem;
using namespace foc;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

std::string resolve_manifest(const std::string& data_dir,
                             const std::string& subset,
                             const std::string& manifest_flag) {
  if (!manifest_flag.empty()) return manifest_flag;
  SynSubsetKind kind;
  if (subset == "ideal") kind = SynSubsetKind::Ideal;
  else if (subset == "real") kind = SynSubsetKind::Real;
  else if (subset == "fuzzy") kind = SynSubsetKind::Fuzzy;
  else throw ConfigError("unknown subset '" + subset + "'");
  return data_dir + "/" + synce_manifest_name(kind);
}

const std::vector<Sample>& pick_split(const DatasetSplit& data,
                                      const std::string& name) {
  if (name == "labeled") return data.labeled;
  if (name == "unlabeled") return data.unlabeled;
  if (name == "val" || name == "validation") return data.validation;
  throw ConfigError("unknown split '" + name + "'");
}

struct CommonData {
  std::string data_dir, subset = "fuzzy", manifest;
  void add_flags(CLI::App* cmd) {
    cmd->add_option("--data", data_dir,
                    "dataset directory (or FOC_DATA_ROOT)");
    cmd->add_option("--subset", subset, "ideal|real|fuzzy")
        ->check(CLI::IsMember({"ideal", "real", "fuzzy"}));
    cmd->add_option("--manifest", manifest,
                    "explicit manifest path (overrides --subset)");
  }
  DatasetSplit load(std::uint64_t seed) const {
    std::string dir = data_dir.empty() ? env_or("FOC_DATA_ROOT", "") : data_dir;
    if (dir.empty() && manifest.empty())
      throw ConfigError("no dataset: pass --data or set FOC_DATA_ROOT");
    if (dir.empty()) dir = fs::path(manifest).parent_path().string();
    ManifestOptions opts;
    opts.partition.seed = seed;
    return load_manifest(dir, resolve_manifest(dir, subset, manifest), opts);
  }
};

int run_gen_synce(const SynceConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  build_synce(cfg, out_dir);
  std::cout << "wrote SYN-CE to " << out_dir << ": " << cfg.certain_count
            << " certain + " << cfg.fuzzy_count
            << " fuzzy images per split, size " << cfg.image_size << "x"
            << cfg.image_size << "\n";
  return 0;
}

int run_train(const std::string& config_path, const CommonData& data_flags,
              const std::string& out_dir, bool resume, bool seed_set,
              std::uint64_t seed_flag) {
  TrainConfig cfg = parse_run_config(config_path);
  if (seed_set) {
    cfg.seed = seed_flag;
  } else if (const char* env = std::getenv("FOC_SEED")) {
    cfg.seed = std::stoull(env);
  }
  DatasetSplit data = data_flags.load(cfg.seed);
  fs::create_directories(out_dir);
  write_run_config(out_dir + "/config.foc", cfg);

  const std::string state = out_dir + "/state.ckpt";
  if (resume && fs::exists(state)) {
    Trainer::resume(state, cfg, data, out_dir)->run();
  } else {
    Trainer(cfg, data, out_dir).run();
  }
  std::cout << "training finished; artifacts in " << out_dir << "\n";
  return 0;
}

int run_eval(const std::string& ckpt_path, const CommonData& data_flags,
             const std::string& target_name, const std::string& mapping_name,
             const std::string& report_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model = restore_model(ckpt);
  DatasetSplit data = data_flags.load(ckpt.seed);
  EvaluationReport rep =
      evaluate_model(model, pick_split(data, target_name),
                     pick_split(data, mapping_name), data.validation);
  rep.target_split = target_name;
  rep.mapping_split = mapping_name;
  write_report_json(report_path, rep, checkpoint_digest(ckpt_path));
  std::cout << "normal head best macro-F1 "
            << rep.normal.f1[rep.normal.best_head]
            << ", mapped overclustering best macro-F1 "
            << rep.overcluster.f1[rep.overcluster.best_head] << "\n"
            << "report written to " << report_path << "\n";
  return 0;
}

int run_consistency(const std::string& ckpt_path, const CommonData& data_flags,
                    const std::string& target_name,
                    const std::string& judgments_path,
                    const std::string& report_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model = restore_model(ckpt);
  DatasetSplit data = data_flags.load(ckpt.seed);
  const auto& target = pick_split(data, target_name);

  EvaluationReport rep = evaluate_model(model, target, target, data.validation);
  ConsistencyReport cons;
  std::string source;
  if (judgments_path.empty()) {
    cons = rep.consistency;
    source = "proxy";
  } else {
    std::vector<std::string> order;
    for (const auto& s : target) order.push_back(s.path);
    std::vector<int> clusters;
    auto judged = load_expert_judgments(judgments_path, order, &clusters);
    cons = consistency_score(clusters, judged);
    source = "expert";
  }

  nlohmann::json j;
  j["checkpoint"] = checkpoint_digest(ckpt_path);
  j["target_split"] = target_name;
  j["judgment_source"] = source;
  j["overall"] = cons.overall;
  j["mean"] = cons.mean;
  j["stddev"] = cons.stddev;
  for (const auto& pc : cons.per_cluster)
    j["per_cluster"].push_back({{"cluster", pc.cluster},
                                {"size", pc.size},
                                {"consistent_fraction", pc.consistent_fraction}});
  std::ofstream out(report_path);
  if (!out) throw DataError("cannot write " + report_path);
  out << j.dump(2) << '\n';
  std::cout << "consistency " << cons.overall << " (mean " << cons.mean
            << " +- " << cons.stddev << "), report written to " << report_path
            << "\n";
  return 0;
}

int run_plot(const std::string& metrics_path, const std::string& report_path,
             const CommonData& data_flags, const std::string& ckpt_path,
             const std::string& target_name, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (!metrics_path.empty()) plot_metrics_csv(metrics_path, out_dir);
  if (!report_path.empty()) plot_report_json(report_path, out_dir);
  if (!ckpt_path.empty()) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    Model model = restore_model(ckpt);
    DatasetSplit data = data_flags.load(ckpt.seed);
    const auto& target = pick_split(data, target_name);
    auto clusters = predict_head(model, HeadType::Overcluster, 0, target);
    std::vector<std::vector<const Image*>> rows(model.config().k);
    for (std::size_t i = 0; i < target.size(); ++i)
      rows[clusters[i]].push_back(&target[i].image);
    save_png(out_dir + "/clusters.png", render_cluster_grid(rows));
  }
  std::cout << "figures written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy overclustering toolkit"};
  app.require_subcommand(1);

  // gen-synce
  SynceConfig syn_cfg;
  std::string syn_out = "synce";
  auto* gen = app.add_subcommand("gen-synce", "generate the SYN-CE dataset");
  gen->add_option("--out", syn_out, "output directory");
  gen->add_option("--seed", syn_cfg.seed, "generator seed");
  gen->add_option("--certain", syn_cfg.certain_count, "certain images per split");
  gen->add_option("--fuzzy", syn_cfg.fuzzy_count, "fuzzy images per split");
  gen->add_option("--size", syn_cfg.image_size, "image side length");

  // train
  std::string train_config, train_out = "run";
  CommonData train_data;
  bool resume = false;
  std::uint64_t seed_flag = 0;
  auto* train = app.add_subcommand("train", "run the training schedule");
  train->add_option("--config", train_config, "run config file")->required();
  train_data.add_flags(train);
  train->add_option("--out", train_out, "run directory");
  auto* seed_opt =
      train->add_option("--seed", seed_flag, "seed override (or FOC_SEED)");
  train->add_flag("--resume", resume, "continue from state.ckpt if present");

  // eval
  std::string eval_ckpt, eval_report = "report.json";
  std::string eval_split = "unlabeled", eval_map_split = "unlabeled";
  CommonData eval_data;
  auto* eval = app.add_subcommand("eval", "score a checkpoint");
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval_data.add_flags(eval);
  eval->add_option("--split", eval_split, "target split: labeled|unlabeled|val");
  eval->add_option("--mapping-split", eval_map_split,
                   "split used for the cluster-to-class mapping");
  eval->add_option("--report", eval_report, "output report path");

  // consistency
  std::string cons_ckpt, cons_judgments, cons_report = "consistency.json";
  std::string cons_split = "unlabeled";
  CommonData cons_data;
  auto* cons = app.add_subcommand("consistency", "cluster consistency score");
  cons->add_option("--checkpoint", cons_ckpt, "checkpoint file")->required();
  cons_data.add_flags(cons);
  cons->add_option("--split", cons_split, "target split");
  cons->add_option("--judgments", cons_judgments,
                   "expert judgment CSV (default: proxy judgments)");
  cons->add_option("--report", cons_report, "output report path");

  // plot
  std::string plot_metrics, plot_report, plot_ckpt, plot_out = "figures";
  std::string plot_split = "unlabeled";
  CommonData plot_data;
  auto* plot = app.add_subcommand("plot", "emit static figures");
  plot->add_option("--metrics", plot_metrics, "trainer metrics CSV");
  plot->add_option("--report", plot_report, "evaluation report JSON");
  plot->add_option("--checkpoint", plot_ckpt,
                   "checkpoint for the cluster grid figure");
  plot_data.add_flags(plot);
  plot->add_option("--split", plot_split, "split for the cluster grid");
  plot->add_option("--out", plot_out, "figure directory");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return run_gen_synce(syn_cfg, syn_out);
    if (train->parsed())
      return run_train(train_config, train_data, train_out, resume,
                       seed_opt->count() > 0, seed_flag);
    if (eval->parsed())
      return run_eval(eval_ckpt, eval_data, eval_split, eval_map_split,
                      eval_report);
    if (cons->parsed())
      return run_consistency(cons_ckpt, cons_data, cons_split, cons_judgments,
                             cons_report);
    if (plot->parsed())
      return run_plot(plot_metrics, plot_report, plot_data, plot_ckpt,
                      plot_split, plot_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
