#include "foc/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "foc/errors.hpp"

namespace foc {

std::string phase_name(TrainPhase phase) {
  switch (phase) {
    case TrainPhase::Warmup: return "warm-up";
    case TrainPhase::HeadFinetune: return "head-finetune";
    case TrainPhase::Main: return "main";
  }
  return {};
}

void append_metrics_csv(const std::string& path,
                        const std::vector<EpochMetrics>& rows) {
  bool exists = std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("metrics: cannot write " + path);
  if (!exists) out << "phase,epoch,head_type,loss_s,loss_u,val_f1,val_acc\n";
  for (const auto& r : rows)
    out << r.phase << ',' << r.epoch << ',' << r.head_type << ',' << r.loss_s
        << ',' << r.loss_u << ',' << r.val_f1 << ',' << r.val_acc << '\n';
}

namespace {

int phase_index(TrainPhase p) { return static_cast<int>(p); }

Eigen::VectorXd col_as_double(const Eigen::MatrixXf& m, Eigen::Index j) {
  return m.col(j).cast<double>();
}

}  // namespace

Trainer::Trainer(const TrainConfig& cfg, const DatasetSplit& data,
                 std::string out_dir)
    : cfg_(cfg), data_(&data), out_dir_(std::move(out_dir)) {
  cfg_.validate();
  model_ = std::make_unique<Model>(cfg_.model, cfg_.seed);
  model_->norm_stats() =
      compute_norm_stats(data.labeled, cfg_.model.input_channels);
  adam_backbone_ = std::make_unique<Adam>(model_->backbone_params());
  adam_normal_ = std::make_unique<Adam>(model_->head_params(HeadType::Normal));
  adam_over_ = std::make_unique<Adam>(model_->head_params(HeadType::Overcluster));
  if (!out_dir_.empty()) std::filesystem::create_directories(out_dir_);
}

std::vector<TrainPhase> Trainer::phase_sequence() const {
  switch (cfg_.mode) {
    case TrainMode::Foc:
      return {TrainPhase::Warmup, TrainPhase::HeadFinetune, TrainPhase::Main};
    case TrainMode::FocLight:
      return {TrainPhase::Main};
    case TrainMode::WarmupOnly:
      return {TrainPhase::Warmup};
  }
  return {};
}

HeadType Trainer::alternate_schedule(long batch_index) const {
  return batch_index % 2 == 0 ? HeadType::Normal : HeadType::Overcluster;
}

void Trainer::check_finite(double value, const char* term) const {
  if (!std::isfinite(value))
    throw DivergenceError(std::string("training diverged: non-finite ") + term);
}

LossBreakdown Trainer::train_step(const std::vector<TripleItem>& batch,
                                  HeadType type, TrainPhase phase) {
  const bool warmup = phase == TrainPhase::Warmup;
  const double lambda_s = warmup ? 0.0 : cfg_.weights.lambda_s;
  const double lambda_u =
      warmup ? (cfg_.weights.lambda_u > 0.0 ? cfg_.weights.lambda_u : 1.0)
             : cfg_.weights.lambda_u;
  const bool need_x3 = type == HeadType::Overcluster && lambda_s > 0.0;
  const int b = static_cast<int>(batch.size());
  const int views = need_x3 ? 3 : 2;

  std::vector<const Image*> images;
  images.reserve(static_cast<std::size_t>(views) * b);
  for (const auto& it : batch) images.push_back(&it.x1);
  for (const auto& it : batch) images.push_back(&it.x2);
  if (need_x3)
    for (const auto& it : batch) images.push_back(&it.x3);

  Eigen::MatrixXf features = model_->forward_backbone(images);
  const int n_heads = model_->heads_per_type();
  Eigen::MatrixXf d_features =
      Eigen::MatrixXf::Zero(features.rows(), features.cols());

  double sup_sum = 0.0, mi_sum = 0.0;
  for (int h = 0; h < n_heads; ++h) {
    Eigen::MatrixXf probs = model_->forward_head(type, h, features);
    if (!probs.allFinite())
      throw DivergenceError("training diverged: non-finite head output");
    Eigen::MatrixXf d_probs = Eigen::MatrixXf::Zero(probs.rows(), probs.cols());

    // supervised term
    double sup = 0.0;
    int contributing = 0;
    if (lambda_s > 0.0) {
      if (type == HeadType::Normal) {
        // CE of both augmented views against the hard label
        for (int i = 0; i < b; ++i) {
          if (!batch[i].labeled) continue;
          Eigen::VectorXd target = Eigen::VectorXd::Zero(probs.rows());
          target[*batch[i].label] = 1.0;
          for (int v = 0; v < 2; ++v) {
            Eigen::Index col = static_cast<Eigen::Index>(v) * b + i;
            Eigen::VectorXd p = col_as_double(probs, col);
            sup += cross_entropy(p, target);
            d_probs.col(col) += cross_entropy_grad(p, target).cast<float>();
            ++contributing;
          }
        }
      } else {
        for (int i = 0; i < b; ++i) {
          if (!batch[i].labeled && !cfg_.ce_inverse_on_unlabeled) continue;
          Eigen::Index c1 = i, c2 = b + i, c3 = 2 * b + i;
          Eigen::VectorXd p1 = col_as_double(probs, c1);
          Eigen::VectorXd p2 = col_as_double(probs, c2);
          Eigen::VectorXd p3 = col_as_double(probs, c3);
          sup += ce_inverse_loss(p1, p2, p3);
          auto g = ce_inverse_loss_grad(p1, p2, p3);
          d_probs.col(c1) += g.d_out1.cast<float>();
          d_probs.col(c2) += g.d_out2.cast<float>();
          d_probs.col(c3) += g.d_out3.cast<float>();
          ++contributing;
        }
        // CE^-1 already pairs both views per item
        contributing = contributing > 0 ? contributing : 0;
      }
    }
    const double sup_mean = contributing > 0 ? sup / contributing : 0.0;
    if (contributing > 0) {
      // rescale accumulated grads from sum to weighted mean
      const float scale =
          static_cast<float>(lambda_s / (contributing * n_heads));
      d_probs *= scale;
    }

    // unsupervised term: MI over the (x1, x2) pairs
    std::vector<ProbPair> pairs;
    std::vector<int> pair_items;
    for (int i = 0; i < b; ++i) {
      if (batch[i].labeled && !cfg_.include_labeled_pairs_in_mi) continue;
      pairs.emplace_back(col_as_double(probs, i), col_as_double(probs, b + i));
      pair_items.push_back(i);
    }
    double mi = 0.0;
    if (!pairs.empty()) {
      mi = mutual_information(joint_matrix(pairs));
      if (lambda_u > 0.0) {
        auto grads = mi_pair_grads(pairs);
        const float scale = static_cast<float>(-lambda_u / n_heads);
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
          int i = pair_items[pi];
          d_probs.col(i) += scale * grads[pi].first.cast<float>();
          d_probs.col(b + i) += scale * grads[pi].second.cast<float>();
        }
      }
    }

    sup_sum += sup_mean;
    mi_sum += mi;
    d_features.noalias() += model_->backward_head(type, h, d_probs);
  }

  LossBreakdown out;
  out.supervised = sup_sum / n_heads;
  out.unsupervised = -mi_sum / n_heads;
  out.total = total_loss(out.supervised, out.unsupervised,
                         {lambda_s, lambda_u});
  check_finite(out.supervised, "supervised loss");
  check_finite(out.unsupervised, "mutual-information loss");

  const bool freeze_backbone = phase == TrainPhase::HeadFinetune;
  const double lr = phase == TrainPhase::Warmup ? cfg_.lr.warmup
                    : phase == TrainPhase::HeadFinetune ? cfg_.lr.finetune
                                                        : cfg_.lr.main;
  if (!freeze_backbone) model_->backward_backbone(d_features);

  auto head_group = type == HeadType::Normal ? adam_normal_.get()
                                             : adam_over_.get();
  head_group->step(lr);
  if (!freeze_backbone) adam_backbone_->step(lr);

  zero_grads(model_->all_params());
  return out;
}

double Trainer::validation_f1(double* accuracy_out) {
  const auto& val = data_->validation;
  if (val.empty()) {
    if (accuracy_out) *accuracy_out = std::nan("");
    return std::nan("");
  }
  auto truths = hard_truths(val);
  double best = -1.0, best_acc = 0.0;
  for (int h = 0; h < model_->heads_per_type(); ++h) {
    auto preds = predict_head(*model_, HeadType::Normal, h, val);
    double f1 = macro_f1(preds, truths, cfg_.model.k_gt);
    if (f1 > best) {
      best = f1;
      best_acc = accuracy(preds, truths);
    }
  }
  if (accuracy_out) *accuracy_out = best_acc;
  return best;
}

void Trainer::run_epochs(TrainPhase phase, int start_epoch) {
  const bool warmup = phase == TrainPhase::Warmup;
  const int n_epochs = phase == TrainPhase::Warmup ? cfg_.epochs.warmup
                       : phase == TrainPhase::HeadFinetune ? cfg_.epochs.finetune
                                                           : cfg_.epochs.main;
  if (start_epoch >= n_epochs) return;

  RatioConfig ratio = cfg_.ratio;
  if (data_->unlabeled.empty()) ratio.r = 0.0;
  BatchSampler sampler(*data_, ratio, cfg_.augmentation,
                       derive_seed(cfg_.seed, 11, phase_index(phase)),
                       /*supervised_augmentations=*/!warmup);

  for (int epoch = start_epoch; epoch < n_epochs; ++epoch) {
    auto batches = sampler.epoch_batches(epoch, unlabeled_cursor_);
    double sums[2][2] = {{0, 0}, {0, 0}};  // [head][loss term]
    int counts[2] = {0, 0};
    step_index_ = 0;
    for (const auto& batch : batches) {
      HeadType type = cfg_.alternate_per_epoch
                          ? alternate_schedule(epoch)
                          : alternate_schedule(step_index_);
      LossBreakdown lb = train_step(batch, type, phase);
      int ti = type == HeadType::Normal ? 0 : 1;
      sums[ti][0] += lb.supervised;
      sums[ti][1] += lb.unsupervised;
      ++counts[ti];
      ++step_index_;
    }

    double val_f1 = std::nan(""), val_acc = std::nan("");
    if (!warmup) val_f1 = validation_f1(&val_acc);

    std::vector<EpochMetrics> rows;
    const char* names[2] = {"normal", "overcluster"};
    for (int ti = 0; ti < 2; ++ti) {
      if (counts[ti] == 0) continue;
      rows.push_back({phase_name(phase), epoch, names[ti],
                      sums[ti][0] / counts[ti], sums[ti][1] / counts[ti],
                      val_f1, val_acc});
    }
    history_.insert(history_.end(), rows.begin(), rows.end());

    if (!out_dir_.empty()) {
      append_metrics_csv(out_dir_ + "/metrics.csv", rows);
      resume_phase_ = phase;
      resume_epoch_ = epoch + 1;
      save_state(out_dir_ + "/state.ckpt");
      if (!warmup && !std::isnan(val_f1) && val_f1 > best_val_f1_) {
        best_val_f1_ = val_f1;
        Checkpoint ckpt = snapshot_model(*model_);
        ckpt.phase = phase_name(phase);
        ckpt.epoch = epoch;
        ckpt.seed = cfg_.seed;
        save_checkpoint(out_dir_ + "/best.ckpt", ckpt);
      }
    } else {
      resume_phase_ = phase;
      resume_epoch_ = epoch + 1;
    }
  }
}

void Trainer::run_phase(TrainPhase phase) {
  int start = 0;
  if (resuming_ && phase == resume_phase_) {
    start = resume_epoch_;
    resuming_ = false;
  } else if (resuming_) {
    // phases before the resume point are already complete
    auto seq = phase_sequence();
    auto pos = std::find(seq.begin(), seq.end(), resume_phase_);
    if (pos != seq.end() &&
        std::find(seq.begin(), pos, phase) != pos) {
      return;
    }
  }
  run_epochs(phase, start);
}

void Trainer::run() {
  for (TrainPhase phase : phase_sequence()) run_phase(phase);
  if (!out_dir_.empty() && best_val_f1_ < 0.0) {
    // warm-up-only runs still leave a usable model behind
    Checkpoint ckpt = snapshot_model(*model_);
    ckpt.phase = phase_name(phase_sequence().back());
    ckpt.seed = cfg_.seed;
    save_checkpoint(out_dir_ + "/best.ckpt", ckpt);
  }
}

void Trainer::save_state(const std::string& path) {
  Checkpoint ckpt = snapshot_model(*model_);
  ckpt.phase = phase_name(resume_phase_);
  ckpt.epoch = resume_epoch_;
  ckpt.seed = cfg_.seed;
  ckpt.unlabeled_cursor = unlabeled_cursor_;
  auto pack = [](Adam& a) {
    AdamState s;
    s.m = a.m();
    s.v = a.v();
    s.t = a.t();
    return s;
  };
  ckpt.adam_backbone = pack(*adam_backbone_);
  ckpt.adam_normal = pack(*adam_normal_);
  ckpt.adam_over = pack(*adam_over_);
  save_checkpoint(path, ckpt);
}

std::unique_ptr<Trainer> Trainer::resume(const std::string& state_path,
                                         const TrainConfig& cfg,
                                         const DatasetSplit& data,
                                         std::string out_dir) {
  Checkpoint ckpt = load_checkpoint(state_path);
  auto t = std::make_unique<Trainer>(cfg, data, std::move(out_dir));
  t->model_->set_parameters_flat(ckpt.parameters);
  t->model_->norm_stats() = ckpt.norm;
  auto unpack = [](Adam& a, const std::optional<AdamState>& s) {
    if (!s) return;
    a.m() = s->m;
    a.v() = s->v;
    a.t() = s->t;
  };
  unpack(*t->adam_backbone_, ckpt.adam_backbone);
  unpack(*t->adam_normal_, ckpt.adam_normal);
  unpack(*t->adam_over_, ckpt.adam_over);
  t->unlabeled_cursor_ = ckpt.unlabeled_cursor;
  for (TrainPhase p : {TrainPhase::Warmup, TrainPhase::HeadFinetune,
                       TrainPhase::Main}) {
    if (phase_name(p) == ckpt.phase) t->resume_phase_ = p;
  }
  t->resume_epoch_ = ckpt.epoch;
  t->resuming_ = true;
  return t;
}

}  // namespace foc
