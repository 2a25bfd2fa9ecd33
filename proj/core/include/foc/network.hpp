#pragma once

#include <memory>
#include <string>
#include <vector>

#include "foc/dataset.hpp"
#include "foc/layers.hpp"

namespace foc {

enum class BackboneKind { TinyConv, Residual };
enum class HeadType { Normal, Overcluster };

struct ModelConfig {
  BackboneKind backbone = BackboneKind::TinyConv;
  int input_channels = 3;  // 2 for sobel, 1 for grayscale
  int image_size = 32;
  int k_gt = 6;
  int k = 36;  // overclustering width, must exceed k_gt
  int heads_per_type = 5;
};

// Per-channel normalization applied before the backbone, computed from the
// labeled training pool and persisted in checkpoints.
struct NormStats {
  std::vector<float> mean, stddev;
};

NormStats compute_norm_stats(const std::vector<Sample>& labeled,
                             int channels);

// Residual downsampling block: conv-norm-relu-conv-norm plus a strided 1x1
// projection on the skip path.
class ResidualBlock : public Layer {
 public:
  ResidualBlock(int cin, int cout, Rng& rng);
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;
  std::vector<ParamView> params() override;

 private:
  Conv2d conv1_, conv2_, proj_;
  InstanceNorm norm1_, norm2_;
  ReLU relu1_, relu_out_;
};

// Backbone plus n normal heads (width k_gt) and n overclustering heads
// (width k), each a single linear layer with soft-max.
class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  int feature_dim() const { return feature_dim_; }

  NormStats& norm_stats() { return norm_; }
  const NormStats& norm_stats() const { return norm_; }

  // Assembles, normalizes and runs a batch of images; features are F x N.
  // Activations are cached until backward_backbone.
  Eigen::MatrixXf forward_backbone(const std::vector<const Image*>& images);
  void backward_backbone(const Eigen::MatrixXf& d_features);

  // Head pass on a feature matrix; returns soft-max probabilities width x N.
  Eigen::MatrixXf forward_head(HeadType type, int head,
                               const Eigen::MatrixXf& features);
  // Backward through soft-max and the linear layer; returns d_features.
  Eigen::MatrixXf backward_head(HeadType type, int head,
                                const Eigen::MatrixXf& d_probs);

  int heads_per_type() const { return cfg_.heads_per_type; }

  std::vector<ParamView> backbone_params();
  std::vector<ParamView> head_params(HeadType type);
  std::vector<ParamView> all_params();

  // Raw parameter copy in registration order (for checkpoints and tests).
  std::vector<float> parameters_flat();
  void set_parameters_flat(const std::vector<float>& flat);

 private:
  ModelConfig cfg_;
  int feature_dim_ = 0;
  NormStats norm_;
  std::vector<std::unique_ptr<Layer>> backbone_;
  std::vector<std::unique_ptr<Linear>> normal_heads_, over_heads_;
  std::vector<Eigen::MatrixXf> head_probs_cache_[2];
  std::vector<FeatureMap> acts_;  // backbone activation stack
};

// cfg.k must exceed cfg.k_gt; throws ConfigError otherwise.
Model build_network(const ModelConfig& cfg, std::uint64_t seed);

}  // namespace foc
