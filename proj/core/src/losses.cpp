#include "foc/losses.hpp"

#include <cmath>

#include "foc/errors.hpp"

namespace foc {

JointMatrix::JointMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw DataError("JointMatrix: not square");
  if ((entries_.array() < 0.0).any())
    throw DataError("JointMatrix: negative entry");
  if (!entries_.isApprox(entries_.transpose(), 0.0))
    throw DataError("JointMatrix: not symmetric");
  if (std::abs(entries_.sum() - 1.0) > 1e-6)
    throw DataError("JointMatrix: entries do not sum to 1");
}

double cross_entropy(const Eigen::VectorXd& prediction,
                     const Eigen::VectorXd& target) {
  if (prediction.size() != target.size())
    throw DataError("cross_entropy: length mismatch");
  double loss = 0.0;
  for (Eigen::Index c = 0; c < prediction.size(); ++c)
    loss -= target[c] * std::log(std::max(prediction[c], kCeEps));
  return loss;
}

Eigen::VectorXd cross_entropy_grad(const Eigen::VectorXd& prediction,
                                   const Eigen::VectorXd& target) {
  if (prediction.size() != target.size())
    throw DataError("cross_entropy: length mismatch");
  Eigen::VectorXd g(prediction.size());
  for (Eigen::Index c = 0; c < prediction.size(); ++c)
    g[c] = prediction[c] > kCeEps ? -target[c] / prediction[c] : 0.0;
  return g;
}

double ce_inverse(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                  double epsilon) {
  if (p.size() != q.size()) throw DataError("ce_inverse: length mismatch");
  double loss = 0.0;
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    if (p[c] == 0.0) continue;  // exact zero contribution regardless of q
    loss -= p[c] * std::log(std::max(1.0 - q[c], epsilon));
  }
  return loss;
}

Eigen::VectorXd ce_inverse_grad_p(const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& q, double epsilon) {
  if (p.size() != q.size()) throw DataError("ce_inverse: length mismatch");
  Eigen::VectorXd g(p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c)
    g[c] = -std::log(std::max(1.0 - q[c], epsilon));
  return g;
}

Eigen::VectorXd ce_inverse_grad_q(const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& q, double epsilon) {
  if (p.size() != q.size()) throw DataError("ce_inverse: length mismatch");
  Eigen::VectorXd g(p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c)
    g[c] = 1.0 - q[c] > epsilon ? p[c] / (1.0 - q[c]) : 0.0;
  return g;
}

double ce_inverse_loss(const Eigen::VectorXd& out1, const Eigen::VectorXd& out2,
                       const Eigen::VectorXd& out3, double epsilon) {
  return 0.5 * ce_inverse(out1, out3, epsilon) +
         0.5 * ce_inverse(out2, out3, epsilon);
}

CeInverseLossGrads ce_inverse_loss_grad(const Eigen::VectorXd& out1,
                                        const Eigen::VectorXd& out2,
                                        const Eigen::VectorXd& out3,
                                        double epsilon) {
  CeInverseLossGrads g;
  g.d_out1 = 0.5 * ce_inverse_grad_p(out1, out3, epsilon);
  g.d_out2 = 0.5 * ce_inverse_grad_p(out2, out3, epsilon);
  g.d_out3 = 0.5 * ce_inverse_grad_q(out1, out3, epsilon) +
             0.5 * ce_inverse_grad_q(out2, out3, epsilon);
  return g;
}

JointMatrix joint_matrix(const std::vector<ProbPair>& pairs) {
  if (pairs.empty()) throw DataError("joint_matrix: empty pair list");
  const Eigen::Index k = pairs.front().first.size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [a, b] : pairs) {
    if (a.size() != k || b.size() != k)
      throw DataError("joint_matrix: inconsistent vector width");
    q.noalias() += a * b.transpose();
  }
  q /= static_cast<double>(pairs.size());
  Eigen::MatrixXd p = 0.5 * (q + q.transpose());
  return JointMatrix(std::move(p));
}

double mutual_information(const JointMatrix& P, double epsilon) {
  const auto& m = P.entries();
  Eigen::VectorXd marg = m.rowwise().sum();  // symmetric: rows == cols
  double mi = 0.0;
  for (Eigen::Index c = 0; c < m.rows(); ++c) {
    for (Eigen::Index d = 0; d < m.cols(); ++d) {
      double pcd = m(c, d);
      if (pcd <= 0.0) continue;  // 0 ln 0 = 0
      mi += pcd * (std::log(std::max(pcd, epsilon)) -
                   std::log(std::max(marg[c], epsilon)) -
                   std::log(std::max(marg[d], epsilon)));
    }
  }
  return mi;
}

Eigen::MatrixXd mutual_information_grad(const JointMatrix& P, double epsilon) {
  // I = sum P_ab (ln P_ab - ln P_a - ln P_b); dI/dP_xy = ln(P_xy/(P_x P_y)) - 1
  const auto& m = P.entries();
  Eigen::VectorXd marg = m.rowwise().sum();
  Eigen::MatrixXd g(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    for (Eigen::Index d = 0; d < m.cols(); ++d)
      g(c, d) = std::log(std::max(m(c, d), epsilon)) -
                std::log(std::max(marg[c], epsilon)) -
                std::log(std::max(marg[d], epsilon)) - 1.0;
  return g;
}

std::vector<ProbPair> mi_pair_grads(const std::vector<ProbPair>& pairs,
                                    double epsilon) {
  JointMatrix P = joint_matrix(pairs);
  Eigen::MatrixXd dP = mutual_information_grad(P, epsilon);
  // P = (Q + Q^T)/2 so dI/dQ = (dP + dP^T)/2; dP is already symmetric for a
  // symmetric P but we fold the chain in explicitly
  Eigen::MatrixXd dQ = 0.5 * (dP + dP.transpose());
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  std::vector<ProbPair> grads;
  grads.reserve(pairs.size());
  for (const auto& [a, b] : pairs)
    grads.emplace_back(inv_n * (dQ * b), inv_n * (dQ.transpose() * a));
  return grads;
}

double total_loss(double supervised, double unsupervised,
                  const LossWeights& w) {
  return w.lambda_s * supervised + w.lambda_u * unsupervised;
}

}  // namespace foc
