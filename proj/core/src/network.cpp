#include "foc/network.hpp"

#include <cmath>

#include "foc/errors.hpp"

namespace foc {

NormStats compute_norm_stats(const std::vector<Sample>& labeled, int channels) {
  NormStats st;
  st.mean.assign(channels, 0.0f);
  st.stddev.assign(channels, 1.0f);
  if (labeled.empty()) return st;
  std::vector<double> sum(channels, 0.0), sumsq(channels, 0.0);
  std::vector<std::size_t> count(channels, 0);
  for (const auto& s : labeled) {
    const auto& img = s.image;
    for (int c = 0; c < std::min(channels, img.channels); ++c) {
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          double v = img.at(c, y, x);
          sum[c] += v;
          sumsq[c] += v * v;
          ++count[c];
        }
      }
    }
  }
  for (int c = 0; c < channels; ++c) {
    if (count[c] == 0) continue;
    double mean = sum[c] / count[c];
    double var = sumsq[c] / count[c] - mean * mean;
    st.mean[c] = static_cast<float>(mean);
    st.stddev[c] = static_cast<float>(std::sqrt(std::max(var, 1e-8)));
  }
  return st;
}

ResidualBlock::ResidualBlock(int cin, int cout, Rng& rng)
    : conv1_(cin, cout, 3, 2, rng), conv2_(cout, cout, 3, 1, rng),
      proj_(cin, cout, 1, 2, rng), norm1_(cout), norm2_(cout) {}

FeatureMap ResidualBlock::forward(const FeatureMap& in) {
  FeatureMap main = relu1_.forward(norm1_.forward(conv1_.forward(in)));
  main = norm2_.forward(conv2_.forward(main));
  FeatureMap skip = proj_.forward(in);
  main.m += skip.m;
  return relu_out_.forward(main);
}

FeatureMap ResidualBlock::backward(const FeatureMap& dout) {
  FeatureMap d = relu_out_.backward(dout);
  FeatureMap dskip = proj_.backward(d);
  FeatureMap dmain = conv2_.backward(norm2_.backward(d));
  dmain = conv1_.backward(norm1_.backward(relu1_.backward(dmain)));
  dmain.m += dskip.m;
  return dmain;
}

std::vector<ParamView> ResidualBlock::params() {
  std::vector<ParamView> out;
  for (Layer* l : {static_cast<Layer*>(&conv1_), static_cast<Layer*>(&norm1_),
                   static_cast<Layer*>(&conv2_), static_cast<Layer*>(&norm2_),
                   static_cast<Layer*>(&proj_)}) {
    auto p = l->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.k <= cfg.k_gt)
    throw ConfigError("build_network: k must exceed k_gt");
  if (cfg.heads_per_type < 1)
    throw ConfigError("build_network: heads_per_type must be >= 1");

  Rng rng(derive_seed(seed, 7001));
  if (cfg.backbone == BackboneKind::TinyConv) {
    // 4 stride-2 conv blocks: in -> 32 -> 64 -> 128 -> 128, then GAP
    const int chans[5] = {cfg.input_channels, 32, 64, 128, 128};
    for (int i = 0; i < 4; ++i) {
      backbone_.push_back(std::make_unique<Conv2d>(chans[i], chans[i + 1], 3, 2, rng));
      backbone_.push_back(std::make_unique<InstanceNorm>(chans[i + 1]));
      backbone_.push_back(std::make_unique<ReLU>());
    }
    feature_dim_ = 128;
  } else {
    backbone_.push_back(std::make_unique<Conv2d>(cfg.input_channels, 32, 3, 1, rng));
    backbone_.push_back(std::make_unique<InstanceNorm>(32));
    backbone_.push_back(std::make_unique<ReLU>());
    backbone_.push_back(std::make_unique<ResidualBlock>(32, 64, rng));
    backbone_.push_back(std::make_unique<ResidualBlock>(64, 128, rng));
    backbone_.push_back(std::make_unique<ResidualBlock>(128, 128, rng));
    feature_dim_ = 128;
  }
  backbone_.push_back(std::make_unique<GlobalAvgPool>());

  // independently seeded head copies
  for (int i = 0; i < cfg.heads_per_type; ++i) {
    Rng hr(derive_seed(seed, 7100, i));
    normal_heads_.push_back(std::make_unique<Linear>(feature_dim_, cfg.k_gt, hr));
  }
  for (int i = 0; i < cfg.heads_per_type; ++i) {
    Rng hr(derive_seed(seed, 7200, i));
    over_heads_.push_back(std::make_unique<Linear>(feature_dim_, cfg.k, hr));
  }
  head_probs_cache_[0].resize(cfg.heads_per_type);
  head_probs_cache_[1].resize(cfg.heads_per_type);

  norm_.mean.assign(cfg.input_channels, 0.0f);
  norm_.stddev.assign(cfg.input_channels, 1.0f);
}

Eigen::MatrixXf Model::forward_backbone(const std::vector<const Image*>& images) {
  const int n = static_cast<int>(images.size());
  if (n == 0) throw DataError("forward_backbone: empty batch");
  const int h = cfg_.image_size, w = cfg_.image_size, c = cfg_.input_channels;
  FeatureMap in(n, c, h, w);
  for (int i = 0; i < n; ++i) {
    const Image& img = *images[i];
    if (img.height != h || img.width != w || img.channels != c)
      throw DataError("forward_backbone: image shape mismatch");
    const Eigen::Index base = static_cast<Eigen::Index>(i) * h * w;
    for (int ch = 0; ch < c; ++ch) {
      const float mu = norm_.mean[ch];
      const float sd = norm_.stddev[ch];
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          in.m(ch, base + static_cast<Eigen::Index>(y) * w + x) =
              (img.at(ch, y, x) - mu) / sd;
    }
  }

  acts_.clear();
  FeatureMap cur = std::move(in);
  for (auto& layer : backbone_) cur = layer->forward(cur);
  return cur.m;  // F x N
}

void Model::backward_backbone(const Eigen::MatrixXf& d_features) {
  FeatureMap d(static_cast<int>(d_features.cols()), feature_dim_, 1, 1);
  d.m = d_features;
  for (auto it = backbone_.rbegin(); it != backbone_.rend(); ++it)
    d = (*it)->backward(d);
}

Eigen::MatrixXf Model::forward_head(HeadType type, int head,
                                    const Eigen::MatrixXf& features) {
  auto& heads = type == HeadType::Normal ? normal_heads_ : over_heads_;
  FeatureMap f(static_cast<int>(features.cols()), feature_dim_, 1, 1);
  f.m = features;
  FeatureMap logits = heads[head]->forward(f);
  Eigen::MatrixXf probs = softmax_columns(logits.m);
  head_probs_cache_[type == HeadType::Normal ? 0 : 1][head] = probs;
  return probs;
}

Eigen::MatrixXf Model::backward_head(HeadType type, int head,
                                     const Eigen::MatrixXf& d_probs) {
  auto& heads = type == HeadType::Normal ? normal_heads_ : over_heads_;
  const auto& probs = head_probs_cache_[type == HeadType::Normal ? 0 : 1][head];
  Eigen::MatrixXf dlogits = softmax_backward(probs, d_probs);
  FeatureMap d(static_cast<int>(dlogits.cols()),
               static_cast<int>(dlogits.rows()), 1, 1);
  d.m = dlogits;
  return heads[head]->backward(d).m;
}

std::vector<ParamView> Model::backbone_params() {
  std::vector<ParamView> out;
  for (auto& l : backbone_) {
    auto p = l->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<ParamView> Model::head_params(HeadType type) {
  std::vector<ParamView> out;
  auto& heads = type == HeadType::Normal ? normal_heads_ : over_heads_;
  for (auto& h : heads) {
    auto p = h->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<ParamView> Model::all_params() {
  auto out = backbone_params();
  auto n = head_params(HeadType::Normal);
  auto o = head_params(HeadType::Overcluster);
  out.insert(out.end(), n.begin(), n.end());
  out.insert(out.end(), o.begin(), o.end());
  return out;
}

std::vector<float> Model::parameters_flat() {
  std::vector<float> flat;
  for (const auto& p : all_params())
    flat.insert(flat.end(), p.value, p.value + p.size);
  return flat;
}

void Model::set_parameters_flat(const std::vector<float>& flat) {
  std::size_t off = 0;
  auto params = all_params();
  if (flat.size() != param_count(params))
    throw DataError("set_parameters_flat: size mismatch");
  for (const auto& p : params) {
    std::copy(flat.begin() + off, flat.begin() + off + p.size, p.value);
    off += p.size;
  }
}

Model build_network(const ModelConfig& cfg, std::uint64_t seed) {
  return Model(cfg, seed);
}

}  // namespace foc
