#include "bcregion/analytic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bcregion {

namespace {

// Relative slack for domain checks, so values equal to an endpoint up to
// rounding (e.g. a d1 produced by an equivalent formula) stay in-domain.
constexpr double kDomainSlack = 1e-12;

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

double trivial_d2(const ProblemInstance& inst) {
  return inst.sigma2 * inst.N2 / (inst.P + inst.N2);
}

}  // namespace

double d1_min(const ProblemInstance& inst) { return inst.N1 * inst.sigma2 / (inst.P + inst.N1); }

double d1_max(const ProblemInstance& inst) {
  const double r2 = 1.0 - inst.rho * inst.rho;
  return inst.sigma2 * (r2 * inst.P + inst.N1) / (inst.P + inst.N1);
}

RegimeReport classify_regime(const ProblemInstance& inst) {
  RegimeReport report{};
  report.d1_min = d1_min(inst);
  report.d1_max = d1_max(inst);

  const double threshold = 2.0 * inst.rho * inst.N1 / (1.0 - inst.rho);
  if (inst.P <= threshold) {
    report.regime = Regime::UncodedEverywhere;
    return report;
  }

  report.regime = Regime::HybridWindow;
  const double r2 = 1.0 - inst.rho * inst.rho;
  const double p2n = inst.P + 2.0 * inst.N1;
  double disc = (inst.P * inst.P - p2n * p2n * inst.rho * inst.rho) * r2;
  // In this regime the discriminant is nonnegative; clamp rounding noise at
  // the boundary so the square root stays real.
  if (disc < 0.0) disc = 0.0;
  const double root = std::sqrt(disc);
  const double denom = 2.0 * (inst.P + inst.N1);
  report.d1_minus = inst.sigma2 * (p2n * r2 - root) / denom;
  report.d1_plus = inst.sigma2 * (p2n * r2 + root) / denom;
  return report;
}

double d2_uncoded_frontier(const ProblemInstance& inst, double d1) {
  if (!std::isfinite(d1)) throw std::domain_error("d2_uncoded_frontier: d1 must be finite");
  const double lo = d1_min(inst);
  const double hi = d1_max(inst);
  if (d1 < lo * (1.0 - kDomainSlack) || d1 > hi * (1.0 + kDomainSlack)) {
    throw std::domain_error(
        describe("d2_uncoded_frontier: d1 outside [d1_min, d1_max] = [%g, %g]", lo, hi));
  }
  const double r2 = 1.0 - inst.rho * inst.rho;
  // t sweeps [0, 1-rho^2] as d1 sweeps the domain; clamp endpoint rounding.
  double t = (inst.P + inst.N1) * d1 / (inst.P * inst.sigma2) - inst.N1 / inst.P;
  if (t < 0.0) t = 0.0;
  if (t > r2) t = r2;
  const double a = std::sqrt(1.0 - t);
  const double b = std::sqrt(inst.rho * inst.rho / r2 * t);
  const double diff = a - b;
  return inst.sigma2 *
         (diff * diff * r2 * inst.P / (inst.P + inst.N2) + inst.N2 / (inst.P + inst.N2));
}

double d2_hybrid_frontier(const ProblemInstance& inst, double d1) {
  if (!(d1 > 0.0) || !std::isfinite(d1)) {
    throw std::domain_error("d2_hybrid_frontier: d1 must be positive");
  }
  const double r2 = 1.0 - inst.rho * inst.rho;
  return inst.sigma2 / (inst.P + inst.N2) *
         (inst.N1 * r2 * inst.sigma2 / d1 + inst.N2 - inst.N1);
}

double d2_star(const ProblemInstance& inst, double d1) {
  if (!std::isfinite(d1)) throw std::domain_error("d2_star: d1 must be finite");
  const double lo = d1_min(inst);
  if (d1 < lo * (1.0 - kDomainSlack)) {
    throw std::domain_error(describe("d2_star: d1=%g infeasible (below d1_min=%g)", d1, lo));
  }
  if (d1 > d1_max(inst)) return trivial_d2(inst);

  const RegimeReport report = classify_regime(inst);
  if (report.regime == Regime::HybridWindow && d1 >= *report.d1_minus &&
      d1 <= *report.d1_plus) {
    return d2_hybrid_frontier(inst, d1);
  }
  return d2_uncoded_frontier(inst, d1);
}

double gamma_threshold(double d1, double sigma2, double rho) {
  if (!(d1 > 0.0)) throw std::invalid_argument("gamma_threshold: d1 must be positive");
  if (!(sigma2 > 0.0) || rho < 0.0 || rho >= 1.0) {
    throw std::invalid_argument("gamma_threshold: need sigma2 > 0 and rho in [0, 1)");
  }
  const double s = sigma2 * (1.0 - rho * rho);
  if (d1 >= s) return std::numeric_limits<double>::infinity();
  return (sigma2 * s - 2.0 * d1 * s + d1 * d1) / (d1 * (s - d1));
}

GeniePoint genie_region(const ProblemInstance& inst, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(describe("genie_region: alpha=%g outside [0, 1]", alpha));
  }
  const double r2 = 1.0 - inst.rho * inst.rho;
  GeniePoint point{};
  point.d1_given_2 = inst.sigma2 * r2 / (1.0 + alpha * inst.P / inst.N1);
  point.d2 = inst.sigma2 / (1.0 + (1.0 - alpha) * inst.P / (alpha * inst.P + inst.N2));
  return point;
}

}  // namespace bcregion
