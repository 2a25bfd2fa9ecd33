#pragma once

#include <Eigen/Core>
#include <vector>

namespace foc {

struct LossWeights {
  double lambda_s = 1.0;
  double lambda_u = 1.0;
};

// Symmetric joint distribution over cluster pairs, estimated from a batch.
// entries are non-negative, symmetric and sum to 1.
class JointMatrix {
 public:
  explicit JointMatrix(Eigen::MatrixXd entries);
  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::Index k() const { return entries_.rows(); }

 private:
  Eigen::MatrixXd entries_;
};

constexpr double kCeEps = 1e-12;      // clamp inside CE and MI logs
constexpr double kCeInvEps = 1e-6;    // clamp inside ln(1-q)

// -sum_c target[c] * ln(max(pred[c], eps))
double cross_entropy(const Eigen::VectorXd& prediction,
                     const Eigen::VectorXd& target);
// gradient with respect to the prediction
Eigen::VectorXd cross_entropy_grad(const Eigen::VectorXd& prediction,
                                   const Eigen::VectorXd& target);

// -sum_c p[c] * ln(max(1-q[c], eps)); p[c]=0 terms contribute exactly 0
double ce_inverse(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                  double epsilon = kCeInvEps);
Eigen::VectorXd ce_inverse_grad_p(const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& q,
                                  double epsilon = kCeInvEps);
Eigen::VectorXd ce_inverse_grad_q(const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& q,
                                  double epsilon = kCeInvEps);

// 0.5 * CE^-1(out1, out3) + 0.5 * CE^-1(out2, out3)
double ce_inverse_loss(const Eigen::VectorXd& out1, const Eigen::VectorXd& out2,
                       const Eigen::VectorXd& out3,
                       double epsilon = kCeInvEps);
struct CeInverseLossGrads {
  Eigen::VectorXd d_out1, d_out2, d_out3;
};
CeInverseLossGrads ce_inverse_loss_grad(const Eigen::VectorXd& out1,
                                        const Eigen::VectorXd& out2,
                                        const Eigen::VectorXd& out3,
                                        double epsilon = kCeInvEps);

using ProbPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

// P = (Q + Q^T)/2 with Q = (1/n) sum_i outer(a_i, b_i)
JointMatrix joint_matrix(const std::vector<ProbPair>& pairs);

// sum_cc' P_cc' ln(P_cc' / (P_c P_c')); value to maximize, in [0, ln k]
double mutual_information(const JointMatrix& P, double epsilon = kCeEps);

// d(MI)/dP, with the chain through symmetrization folded in when applied to Q
Eigen::MatrixXd mutual_information_grad(const JointMatrix& P,
                                        double epsilon = kCeEps);

// gradients of mutual_information(joint_matrix(pairs)) wrt every pair element
std::vector<ProbPair> mi_pair_grads(const std::vector<ProbPair>& pairs,
                                    double epsilon = kCeEps);

// lambda_s * supervised + lambda_u * unsupervised
double total_loss(double supervised, double unsupervised,
                  const LossWeights& w);

}  // namespace foc
