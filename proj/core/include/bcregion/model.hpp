#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bcregion {

/// One broadcast problem: power budget P, per-component source variance
/// sigma2, source correlation rho, and the two channel noise variances.
/// Receiver 1 is the strong user (N1 <= N2).
struct ProblemInstance {
  double P;
  double sigma2;
  double rho;
  double N1;
  double N2;
};

/// Validates raw scalars and returns a ProblemInstance. Throws
/// std::invalid_argument naming the violated constraint: all parameters
/// finite, P/sigma2/N1/N2 > 0, 0 <= rho < 1, N1 <= N2.
ProblemInstance make_instance(double P, double sigma2, double rho, double N1, double N2);

/// Per-receiver linear estimator weights: estimate = a*Xd + b*Wk, where Wk
/// is the analog residual alpha_t*S1 + beta_t*S2 + Zk left after stripping
/// the decoded digital component from Yk.
struct EstimatorCoeffs {
  double a = 0.0;
  double b = 0.0;
};

/// A labeled zero-mean jointly Gaussian vector, held as a dense covariance
/// matrix. This is the workhorse behind the MMSE and mutual-information
/// kernels; dimensions stay tiny (<= 8) so everything is dense.
class GaussianVector {
 public:
  GaussianVector(std::vector<std::string> labels, Eigen::MatrixXd cov);

  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index dim() const { return cov_.rows(); }

  Eigen::Index index_of(std::string_view label) const;
  double variance(std::string_view label) const;
  double covariance(std::string_view a, std::string_view b) const;

  /// Returns a copy extended with one component defined as a linear
  /// combination of existing components, e.g. W1 = Y1 - Xd.
  GaussianVector with_combination(
      const std::string& new_label,
      const std::vector<std::pair<std::string, double>>& terms) const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd cov_;
};

struct MmseResult {
  Eigen::VectorXd coeffs;  // one weight per observed component, in order
  double mmse;             // residual variance, >= 0
};

/// Linear MMSE estimate of `target` from the observed components. Singular
/// observation covariances (e.g. a zero-variance digital component) are
/// handled by a spectral pseudo-inverse with eigenvalue cutoff
/// 1e-12 * lambda_max; zero-variance observations get weight 0.
MmseResult mmse_estimate(const GaussianVector& joint, std::string_view target,
                         const std::vector<std::string>& observed);

/// I(A;B) in nats via 0.5*(logdet Sigma_A + logdet Sigma_B - logdet Sigma_AB),
/// using log-pseudo-determinants so degenerate components contribute no
/// information. Groups must be nonempty and disjoint; throws on a
/// non-positive-semidefinite covariance.
double gaussian_mi(const GaussianVector& joint, const std::vector<std::string>& group_a,
                   const std::vector<std::string>& group_b);

/// Joint law of (S1, S2, Xd, X, Y1, Y2) under
///   Xd = gamma_t*(S2 + U),  X = alpha_t*S1 + beta_t*S2 + Xd,  Yk = X + Zk,
/// with U ~ N(0, Q) independent of everything else. Built from the base
/// variables (S1, S2, U, Z1, Z2), so the result is PSD by construction.
GaussianVector hybrid_joint_law(const ProblemInstance& inst, double alpha_t, double beta_t,
                                double gamma_t, double Q);

}  // namespace bcregion
