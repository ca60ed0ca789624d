#include "bcregion/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bcregion {

namespace {

constexpr double kEigCutoffRel = 1e-12;  // pseudo-inverse / pseudo-det cutoff

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

void require_finite(const char* name, double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("make_instance: ") + name + " must be finite");
  }
}

}  // namespace

ProblemInstance make_instance(double P, double sigma2, double rho, double N1, double N2) {
  require_finite("P", P);
  require_finite("sigma2", sigma2);
  require_finite("rho", rho);
  require_finite("N1", N1);
  require_finite("N2", N2);
  if (P <= 0.0) throw std::invalid_argument(describe("make_instance: P > 0 violated (P=%g)", P));
  if (sigma2 <= 0.0) {
    throw std::invalid_argument(describe("make_instance: sigma2 > 0 violated (sigma2=%g)", sigma2));
  }
  if (N1 <= 0.0) throw std::invalid_argument(describe("make_instance: N1 > 0 violated (N1=%g)", N1));
  if (N2 <= 0.0) throw std::invalid_argument(describe("make_instance: N2 > 0 violated (N2=%g)", N2));
  if (rho < 0.0 || rho >= 1.0) {
    throw std::invalid_argument(describe("make_instance: 0 <= rho < 1 violated (rho=%g)", rho));
  }
  if (N1 > N2) {
    throw std::invalid_argument(
        describe("make_instance: N1 <= N2 violated (N1=%g, N2=%g); receiver 1 is the strong user",
                 N1, N2));
  }
  return ProblemInstance{P, sigma2, rho, N1, N2};
}

GaussianVector::GaussianVector(std::vector<std::string> labels, Eigen::MatrixXd cov)
    : labels_(std::move(labels)), cov_(std::move(cov)) {
  const auto d = cov_.rows();
  if (cov_.cols() != d) throw std::invalid_argument("GaussianVector: covariance must be square");
  if (static_cast<Eigen::Index>(labels_.size()) != d) {
    throw std::invalid_argument("GaussianVector: label count must match covariance dimension");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j]) {
        throw std::invalid_argument("GaussianVector: duplicate label '" + labels_[i] + "'");
      }
    }
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if (!cov_.allFinite()) throw std::invalid_argument("GaussianVector: covariance must be finite");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussianVector: covariance must be symmetric");
  }
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
  // Cheap necessary conditions: every 1x1 and 2x2 principal minor >= 0.
  for (Eigen::Index i = 0; i < d; ++i) {
    if (cov_(i, i) < -1e-12 * scale) {
      throw std::invalid_argument("GaussianVector: negative variance for '" + labels_[i] + "'");
    }
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double minor = cov_(i, i) * cov_(j, j) - cov_(i, j) * cov_(i, j);
      if (minor < -1e-10 * scale * scale) {
        throw std::invalid_argument("GaussianVector: 2x2 principal minor (" + labels_[i] + "," +
                                    labels_[j] + ") is negative");
      }
    }
  }
}

Eigen::Index GaussianVector::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<Eigen::Index>(i);
  }
  throw std::invalid_argument("GaussianVector: unknown label '" + std::string(label) + "'");
}

double GaussianVector::variance(std::string_view label) const {
  const auto i = index_of(label);
  return cov_(i, i);
}

double GaussianVector::covariance(std::string_view a, std::string_view b) const {
  return cov_(index_of(a), index_of(b));
}

GaussianVector GaussianVector::with_combination(
    const std::string& new_label,
    const std::vector<std::pair<std::string, double>>& terms) const {
  const auto d = dim();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (const auto& [label, coeff] : terms) w[index_of(label)] += coeff;

  Eigen::MatrixXd ext(d + 1, d + 1);
  ext.topLeftCorner(d, d) = cov_;
  const Eigen::VectorXd cross = cov_ * w;
  ext.topRightCorner(d, 1) = cross;
  ext.bottomLeftCorner(1, d) = cross.transpose();
  ext(d, d) = w.dot(cross);

  auto labels = labels_;
  labels.push_back(new_label);
  return GaussianVector(std::move(labels), std::move(ext));
}

namespace {

Eigen::MatrixXd submatrix(const GaussianVector& joint, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = joint.cov()(idx[i], idx[j]);
  }
  return out;
}

std::vector<Eigen::Index> resolve(const GaussianVector& joint,
                                  const std::vector<std::string>& labels) {
  std::vector<Eigen::Index> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(joint.index_of(l));
  return idx;
}

/// Sum of log eigenvalues above the relative cutoff; throws if the matrix is
/// meaningfully indefinite.
double log_pseudo_det(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -1e-9 * std::max(lmax, 1.0)) {
    throw std::domain_error(std::string(what) + ": non-PSD covariance");
  }
  const double cutoff = kEigCutoffRel * std::max(lmax, 1e-300);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) sum += std::log(ev[i]);
  }
  return sum;
}

}  // namespace

MmseResult mmse_estimate(const GaussianVector& joint, std::string_view target,
                         const std::vector<std::string>& observed) {
  if (observed.empty()) throw std::invalid_argument("mmse_estimate: no observations");
  const auto t = joint.index_of(target);
  const auto idx = resolve(joint, observed);

  const Eigen::MatrixXd sigma_obs = submatrix(joint, idx);
  Eigen::VectorXd cross(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) cross[i] = joint.cov()(idx[i], t);

  // Spectral pseudo-inverse: zero-variance observations carry no information
  // and get weight zero instead of blowing up the solve.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_obs);
  const auto& ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -1e-9 * std::max(lmax, 1.0)) {
    throw std::domain_error("mmse_estimate: non-PSD observation covariance");
  }
  const double cutoff = kEigCutoffRel * std::max(lmax, 1e-300);
  Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) inv_ev[i] = 1.0 / ev[i];
  }
  const Eigen::VectorXd coeffs =
      es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose() * cross;

  const double mmse = std::max(0.0, joint.cov()(t, t) - coeffs.dot(cross));
  return MmseResult{coeffs, mmse};
}

double gaussian_mi(const GaussianVector& joint, const std::vector<std::string>& group_a,
                   const std::vector<std::string>& group_b) {
  if (group_a.empty() || group_b.empty()) {
    throw std::invalid_argument("gaussian_mi: groups must be nonempty");
  }
  auto ia = resolve(joint, group_a);
  auto ib = resolve(joint, group_b);
  for (auto a : ia) {
    for (auto b : ib) {
      if (a == b) throw std::invalid_argument("gaussian_mi: groups must be disjoint");
    }
  }
  std::vector<Eigen::Index> iab = ia;
  iab.insert(iab.end(), ib.begin(), ib.end());

  const double lda = log_pseudo_det(submatrix(joint, ia), "gaussian_mi");
  const double ldb = log_pseudo_det(submatrix(joint, ib), "gaussian_mi");
  const double ldab = log_pseudo_det(submatrix(joint, iab), "gaussian_mi");
  return std::max(0.0, 0.5 * (lda + ldb - ldab));
}

GaussianVector hybrid_joint_law(const ProblemInstance& inst, double alpha_t, double beta_t,
                                double gamma_t, double Q) {
  if (!(std::isfinite(alpha_t) && alpha_t >= 0.0) || !(std::isfinite(beta_t) && beta_t >= 0.0) ||
      !(std::isfinite(gamma_t) && gamma_t >= 0.0)) {
    throw std::invalid_argument("hybrid_joint_law: alpha_t, beta_t, gamma_t must be >= 0");
  }
  if (!(std::isfinite(Q)) || Q <= 0.0) {
    throw std::invalid_argument("hybrid_joint_law: Q must be positive");
  }

  // Base variables (S1, S2, U, Z1, Z2); components are linear images of them.
  Eigen::Matrix<double, 5, 5> base = Eigen::Matrix<double, 5, 5>::Zero();
  base(0, 0) = inst.sigma2;
  base(1, 1) = inst.sigma2;
  base(0, 1) = base(1, 0) = inst.rho * inst.sigma2;
  base(2, 2) = Q;
  base(3, 3) = inst.N1;
  base(4, 4) = inst.N2;

  Eigen::Matrix<double, 6, 5> map = Eigen::Matrix<double, 6, 5>::Zero();
  map(0, 0) = 1.0;                                      // S1
  map(1, 1) = 1.0;                                      // S2
  map(2, 1) = gamma_t;                                  // Xd = gamma*(S2 + U)
  map(2, 2) = gamma_t;
  map(3, 0) = alpha_t;                                  // X = alpha*S1 + beta*S2 + Xd
  map(3, 1) = beta_t + gamma_t;
  map(3, 2) = gamma_t;
  map.row(4) = map.row(3);                              // Y1 = X + Z1
  map(4, 3) = 1.0;
  map.row(5) = map.row(3);                              // Y2 = X + Z2
  map(5, 4) = 1.0;

  Eigen::MatrixXd cov = map * base * map.transpose();
  return GaussianVector({"S1", "S2", "Xd", "X", "Y1", "Y2"}, std::move(cov));
}

}  // namespace bcregion
