#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "foc/rng.hpp"

namespace foc {

// Batch activation tensor: rows are channels, columns are pixels laid out as
// image-major then row-major, i.e. col = n*(h*w) + y*w + x.
struct FeatureMap {
  int n = 0, c = 0, h = 0, w = 0;
  Eigen::MatrixXf m;

  FeatureMap() = default;
  FeatureMap(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        m(Eigen::MatrixXf::Zero(c_, static_cast<Eigen::Index>(n_) * h_ * w_)) {}
};

struct ParamView {
  float* value = nullptr;
  float* grad = nullptr;
  std::size_t size = 0;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual FeatureMap forward(const FeatureMap& in) = 0;
  virtual FeatureMap backward(const FeatureMap& dout) = 0;
  virtual std::vector<ParamView> params() { return {}; }
  void zero_grad();
};

// kxk convolution via im2col + GEMM. pad = k/2.
class Conv2d : public Layer {
 public:
  Conv2d(int in_channels, int out_channels, int ksize, int stride, Rng& rng);
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;
  std::vector<ParamView> params() override;

  Eigen::MatrixXf weight;  // out_channels x (k*k*in_channels)
  Eigen::VectorXf bias;
  Eigen::MatrixXf d_weight;
  Eigen::VectorXf d_bias;

 private:
  int cin_, cout_, k_, stride_;
  Eigen::MatrixXf cols_;  // im2col cache
  int in_h_ = 0, in_w_ = 0, in_n_ = 0;
};

// Per-image per-channel normalization over the spatial extent, with a
// per-channel affine. No batch coupling, so inference needs no running stats.
class InstanceNorm : public Layer {
 public:
  explicit InstanceNorm(int channels);
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;
  std::vector<ParamView> params() override;

  Eigen::VectorXf gamma, beta, d_gamma, d_beta;

 private:
  int c_;
  FeatureMap xhat_;
  Eigen::MatrixXf inv_std_;  // c x n
};

class ReLU : public Layer {
 public:
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;

 private:
  FeatureMap mask_;
};

// c x (n*h*w) -> features c x n
class GlobalAvgPool : public Layer {
 public:
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;

 private:
  int h_ = 0, w_ = 0;
};

// Fully connected on feature columns: out = W x + b per column.
class Linear : public Layer {
 public:
  Linear(int in_features, int out_features, Rng& rng);
  FeatureMap forward(const FeatureMap& in) override;
  FeatureMap backward(const FeatureMap& dout) override;
  std::vector<ParamView> params() override;

  Eigen::MatrixXf weight, d_weight;
  Eigen::VectorXf bias, d_bias;

 private:
  Eigen::MatrixXf input_;
};

// Column-wise softmax probabilities; backward expects d(probs).
Eigen::MatrixXf softmax_columns(const Eigen::MatrixXf& logits);
Eigen::MatrixXf softmax_backward(const Eigen::MatrixXf& probs,
                                 const Eigen::MatrixXf& dprobs);

class Adam {
 public:
  explicit Adam(std::vector<ParamView> params, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void step(double lr);

  long step_count() const { return t_; }
  // serialization hooks
  std::vector<float>& m() { return m_; }
  std::vector<float>& v() { return v_; }
  long& t() { return t_; }
  std::size_t size() const { return total_; }

 private:
  std::vector<ParamView> params_;
  std::vector<float> m_, v_;
  long t_ = 0;
  double beta1_, beta2_, eps_;
  std::size_t total_ = 0;
};

void zero_grads(const std::vector<ParamView>& params);
std::size_t param_count(const std::vector<ParamView>& params);

}  // namespace foc
