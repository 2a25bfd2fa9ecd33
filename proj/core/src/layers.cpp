#include "foc/layers.hpp"

#include <cmath>

#include "foc/errors.hpp"

namespace foc {

void Layer::zero_grad() {
  for (auto& p : params())
    std::fill(p.grad, p.grad + p.size, 0.0f);
}

namespace {

float he_std(int fan_in) { return std::sqrt(2.0f / static_cast<float>(fan_in)); }

void fill_normal(Eigen::MatrixXf& m, float stddev, Rng& rng) {
  std::normal_distribution<float> dist(0.0f, stddev);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

}  // namespace

Conv2d::Conv2d(int in_channels, int out_channels, int ksize, int stride,
               Rng& rng)
    : cin_(in_channels), cout_(out_channels), k_(ksize), stride_(stride) {
  weight.resize(cout_, k_ * k_ * cin_);
  fill_normal(weight, he_std(k_ * k_ * cin_), rng);
  bias = Eigen::VectorXf::Zero(cout_);
  d_weight = Eigen::MatrixXf::Zero(weight.rows(), weight.cols());
  d_bias = Eigen::VectorXf::Zero(cout_);
}

FeatureMap Conv2d::forward(const FeatureMap& in) {
  if (in.c != cin_) throw DataError("Conv2d: channel mismatch");
  const int pad = k_ / 2;
  const int ho = (in.h + 2 * pad - k_) / stride_ + 1;
  const int wo = (in.w + 2 * pad - k_) / stride_ + 1;
  in_h_ = in.h; in_w_ = in.w; in_n_ = in.n;

  cols_.resize(k_ * k_ * cin_, static_cast<Eigen::Index>(in.n) * ho * wo);
  cols_.setZero();
  // im2col: row index = (dy*k + dx)*cin + c
  for (int n = 0; n < in.n; ++n) {
    const Eigen::Index in_base = static_cast<Eigen::Index>(n) * in.h * in.w;
    const Eigen::Index out_base = static_cast<Eigen::Index>(n) * ho * wo;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        const Eigen::Index col = out_base + static_cast<Eigen::Index>(oy) * wo + ox;
        for (int dy = 0; dy < k_; ++dy) {
          const int iy = oy * stride_ - pad + dy;
          if (iy < 0 || iy >= in.h) continue;
          for (int dx = 0; dx < k_; ++dx) {
            const int ix = ox * stride_ - pad + dx;
            if (ix < 0 || ix >= in.w) continue;
            const Eigen::Index src = in_base + static_cast<Eigen::Index>(iy) * in.w + ix;
            const int row0 = (dy * k_ + dx) * cin_;
            for (int c = 0; c < cin_; ++c)
              cols_(row0 + c, col) = in.m(c, src);
          }
        }
      }
    }
  }

  FeatureMap out(in.n, cout_, ho, wo);
  out.m.noalias() = weight * cols_;
  out.m.colwise() += bias;
  return out;
}

FeatureMap Conv2d::backward(const FeatureMap& dout) {
  d_weight.noalias() += dout.m * cols_.transpose();
  d_bias.noalias() += dout.m.rowwise().sum();

  Eigen::MatrixXf dcols = weight.transpose() * dout.m;

  const int pad = k_ / 2;
  FeatureMap din(in_n_, cin_, in_h_, in_w_);
  for (int n = 0; n < in_n_; ++n) {
    const Eigen::Index in_base = static_cast<Eigen::Index>(n) * in_h_ * in_w_;
    const Eigen::Index out_base = static_cast<Eigen::Index>(n) * dout.h * dout.w;
    for (int oy = 0; oy < dout.h; ++oy) {
      for (int ox = 0; ox < dout.w; ++ox) {
        const Eigen::Index col = out_base + static_cast<Eigen::Index>(oy) * dout.w + ox;
        for (int dy = 0; dy < k_; ++dy) {
          const int iy = oy * stride_ - pad + dy;
          if (iy < 0 || iy >= in_h_) continue;
          for (int dx = 0; dx < k_; ++dx) {
            const int ix = ox * stride_ - pad + dx;
            if (ix < 0 || ix >= in_w_) continue;
            const Eigen::Index dst = in_base + static_cast<Eigen::Index>(iy) * in_w_ + ix;
            const int row0 = (dy * k_ + dx) * cin_;
            for (int c = 0; c < cin_; ++c)
              din.m(c, dst) += dcols(row0 + c, col);
          }
        }
      }
    }
  }
  return din;
}

std::vector<ParamView> Conv2d::params() {
  return {{weight.data(), d_weight.data(), static_cast<std::size_t>(weight.size())},
          {bias.data(), d_bias.data(), static_cast<std::size_t>(bias.size())}};
}

InstanceNorm::InstanceNorm(int channels) : c_(channels) {
  gamma = Eigen::VectorXf::Ones(c_);
  beta = Eigen::VectorXf::Zero(c_);
  d_gamma = Eigen::VectorXf::Zero(c_);
  d_beta = Eigen::VectorXf::Zero(c_);
}

FeatureMap InstanceNorm::forward(const FeatureMap& in) {
  constexpr float kEps = 1e-5f;
  const Eigen::Index hw = static_cast<Eigen::Index>(in.h) * in.w;
  xhat_ = FeatureMap(in.n, in.c, in.h, in.w);
  inv_std_.resize(in.c, in.n);
  FeatureMap out(in.n, in.c, in.h, in.w);
  for (int n = 0; n < in.n; ++n) {
    auto seg = in.m.middleCols(n * hw, hw);
    auto xh = xhat_.m.middleCols(n * hw, hw);
    auto o = out.m.middleCols(n * hw, hw);
    for (int c = 0; c < in.c; ++c) {
      const float mean = seg.row(c).mean();
      const float var = (seg.row(c).array() - mean).square().mean();
      const float istd = 1.0f / std::sqrt(var + kEps);
      inv_std_(c, n) = istd;
      xh.row(c) = (seg.row(c).array() - mean) * istd;
      o.row(c) = xh.row(c).array() * gamma[c] + beta[c];
    }
  }
  return out;
}

FeatureMap InstanceNorm::backward(const FeatureMap& dout) {
  const Eigen::Index hw = static_cast<Eigen::Index>(dout.h) * dout.w;
  const float inv_m = 1.0f / static_cast<float>(hw);
  FeatureMap din(dout.n, dout.c, dout.h, dout.w);
  for (int n = 0; n < dout.n; ++n) {
    auto dy = dout.m.middleCols(n * hw, hw);
    auto xh = xhat_.m.middleCols(n * hw, hw);
    auto dx = din.m.middleCols(n * hw, hw);
    for (int c = 0; c < dout.c; ++c) {
      d_gamma[c] += (dy.row(c).array() * xh.row(c).array()).sum();
      d_beta[c] += dy.row(c).sum();
      const float g = gamma[c];
      const float sum_dy = dy.row(c).sum();
      const float sum_dy_xh = (dy.row(c).array() * xh.row(c).array()).sum();
      dx.row(c) = g * inv_std_(c, n) * inv_m *
                  (static_cast<float>(hw) * dy.row(c).array() - sum_dy -
                   xh.row(c).array() * sum_dy_xh);
    }
  }
  return din;
}

std::vector<ParamView> InstanceNorm::params() {
  return {{gamma.data(), d_gamma.data(), static_cast<std::size_t>(gamma.size())},
          {beta.data(), d_beta.data(), static_cast<std::size_t>(beta.size())}};
}

FeatureMap ReLU::forward(const FeatureMap& in) {
  mask_ = in;
  FeatureMap out = in;
  out.m = out.m.cwiseMax(0.0f);
  mask_.m = (in.m.array() > 0.0f).cast<float>();
  return out;
}

FeatureMap ReLU::backward(const FeatureMap& dout) {
  FeatureMap din = dout;
  din.m.array() *= mask_.m.array();
  return din;
}

FeatureMap GlobalAvgPool::forward(const FeatureMap& in) {
  h_ = in.h; w_ = in.w;
  const Eigen::Index hw = static_cast<Eigen::Index>(in.h) * in.w;
  FeatureMap out(in.n, in.c, 1, 1);
  for (int n = 0; n < in.n; ++n)
    out.m.col(n) = in.m.middleCols(n * hw, hw).rowwise().mean();
  return out;
}

FeatureMap GlobalAvgPool::backward(const FeatureMap& dout) {
  const Eigen::Index hw = static_cast<Eigen::Index>(h_) * w_;
  const float inv = 1.0f / static_cast<float>(hw);
  FeatureMap din(dout.n, dout.c, h_, w_);
  for (int n = 0; n < dout.n; ++n)
    din.m.middleCols(n * hw, hw).colwise() = (dout.m.col(n) * inv).eval();
  return din;
}

Linear::Linear(int in_features, int out_features, Rng& rng) {
  weight.resize(out_features, in_features);
  fill_normal(weight, he_std(in_features), rng);
  bias = Eigen::VectorXf::Zero(out_features);
  d_weight = Eigen::MatrixXf::Zero(out_features, in_features);
  d_bias = Eigen::VectorXf::Zero(out_features);
}

FeatureMap Linear::forward(const FeatureMap& in) {
  input_ = in.m;
  FeatureMap out(in.n, static_cast<int>(weight.rows()), 1, 1);
  out.m.noalias() = weight * in.m;
  out.m.colwise() += bias;
  return out;
}

FeatureMap Linear::backward(const FeatureMap& dout) {
  d_weight.noalias() += dout.m * input_.transpose();
  d_bias.noalias() += dout.m.rowwise().sum();
  FeatureMap din(dout.n, static_cast<int>(weight.cols()), 1, 1);
  din.m.noalias() = weight.transpose() * dout.m;
  return din;
}

std::vector<ParamView> Linear::params() {
  return {{weight.data(), d_weight.data(), static_cast<std::size_t>(weight.size())},
          {bias.data(), d_bias.data(), static_cast<std::size_t>(bias.size())}};
}

Eigen::MatrixXf softmax_columns(const Eigen::MatrixXf& logits) {
  Eigen::MatrixXf p = logits;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    auto col = p.col(j);
    col.array() -= col.maxCoeff();
    col = col.array().exp();
    col /= col.sum();
  }
  return p;
}

Eigen::MatrixXf softmax_backward(const Eigen::MatrixXf& probs,
                                 const Eigen::MatrixXf& dprobs) {
  // dlogits = p .* (dp - <p, dp>)
  Eigen::MatrixXf dlogits(probs.rows(), probs.cols());
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    const float dot = probs.col(j).dot(dprobs.col(j));
    dlogits.col(j) = probs.col(j).array() * (dprobs.col(j).array() - dot);
  }
  return dlogits;
}

Adam::Adam(std::vector<ParamView> params, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  total_ = param_count(params_);
  m_.assign(total_, 0.0f);
  v_.assign(total_, 0.0f);
}

void Adam::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  std::size_t off = 0;
  for (const auto& p : params_) {
    for (std::size_t i = 0; i < p.size; ++i) {
      const double g = p.grad[i];
      float m_new = static_cast<float>(beta1_ * m_[off + i] + (1.0 - beta1_) * g);
      float v_new = static_cast<float>(beta2_ * v_[off + i] + (1.0 - beta2_) * g * g);
      m_[off + i] = m_new;
      v_[off + i] = v_new;
      const double mhat = m_new / bc1;
      const double vhat = v_new / bc2;
      p.value[i] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps_));
    }
    off += p.size;
  }
}

void zero_grads(const std::vector<ParamView>& params) {
  for (const auto& p : params) std::fill(p.grad, p.grad + p.size, 0.0f);
}

std::size_t param_count(const std::vector<ParamView>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size;
  return n;
}

}  // namespace foc
