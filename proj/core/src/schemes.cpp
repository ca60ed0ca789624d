#include "bcregion/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bcregion/version.hpp"

namespace bcregion {

namespace {

// Analog power within this relative distance of P counts as saturating: the
// digital layer gets no power and the scheme degenerates to pure analog.
constexpr double kPowerSlack = 1e-12;

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

void require_weights(const char* who, double alpha_t, double beta_t) {
  if (!(std::isfinite(alpha_t) && alpha_t >= 0.0) || !(std::isfinite(beta_t) && beta_t >= 0.0)) {
    throw std::invalid_argument(std::string(who) + ": alpha_t and beta_t must be >= 0");
  }
}

RateWindow rate_window_of(const ProblemInstance& inst, double alpha_t, double beta_t,
                          double gamma_t, double Q) {
  const auto law = hybrid_joint_law(inst, alpha_t, beta_t, gamma_t, Q);
  return RateWindow{gaussian_mi(law, {"S2"}, {"Xd"}), gaussian_mi(law, {"Xd"}, {"Y2"})};
}

}  // namespace

UncodedParams make_uncoded_params(double alpha) {
  if (!(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(describe("make_uncoded_params: alpha=%g outside [0, 1]", alpha));
  }
  return UncodedParams{alpha, 1.0 - alpha};
}

double analog_power(const ProblemInstance& inst, double alpha_t, double beta_t) {
  return inst.sigma2 *
         (alpha_t * alpha_t + beta_t * beta_t + 2.0 * inst.rho * alpha_t * beta_t);
}

SchemeDistortions uncoded_distortions(const ProblemInstance& inst, const UncodedParams& up) {
  if (!(std::isfinite(up.alpha) && std::isfinite(up.beta)) || up.alpha < 0.0 || up.beta < 0.0) {
    throw std::invalid_argument("uncoded_distortions: weights must be >= 0");
  }
  if (std::abs(up.alpha + up.beta - 1.0) > 1e-12) {
    throw std::invalid_argument("uncoded_distortions: alpha + beta = 1 violated");
  }
  const double q = up.alpha * up.alpha + 2.0 * up.alpha * up.beta * inst.rho + up.beta * up.beta;
  if (q <= 0.0) throw std::invalid_argument("uncoded_distortions: alpha = beta = 0");

  const double r2 = 1.0 - inst.rho * inst.rho;
  SchemeDistortions out{};
  out.d1 = inst.sigma2 *
           (inst.P * up.beta * up.beta * r2 / ((inst.P + inst.N1) * q) + inst.N1 / (inst.P + inst.N1));
  out.d2 = inst.sigma2 *
           (inst.P * up.alpha * up.alpha * r2 / ((inst.P + inst.N2) * q) + inst.N2 / (inst.P + inst.N2));

  // Scalar MMSE weights E[Sk|Yk]; there is no digital component to weight.
  const double scale = std::sqrt(inst.P / (inst.sigma2 * q));
  const double cov1 = scale * inst.sigma2 * (up.alpha + up.beta * inst.rho);
  const double cov2 = scale * inst.sigma2 * (up.alpha * inst.rho + up.beta);
  out.coeffs[0] = EstimatorCoeffs{0.0, cov1 / (inst.P + inst.N1)};
  out.coeffs[1] = EstimatorCoeffs{0.0, cov2 / (inst.P + inst.N2)};
  return out;
}

double q_star(const ProblemInstance& inst, double alpha_t, double beta_t) {
  require_weights("q_star", alpha_t, beta_t);
  const double analog = analog_power(inst, alpha_t, beta_t);
  if (analog > inst.P * (1.0 + kPowerSlack)) {
    throw std::invalid_argument(
        describe("q_star: analog power %g exceeds the budget P=%g", analog, inst.P));
  }
  const double slack = inst.P - analog;
  if (slack <= inst.P * kPowerSlack) {
    throw pure_analog_error("q_star: degenerate: pure analog (analog layer consumes all power)");
  }
  const double r2 = 1.0 - inst.rho * inst.rho;
  return inst.sigma2 * (r2 * alpha_t * alpha_t * inst.sigma2 + inst.N2) / slack;
}

double solve_gamma(const ProblemInstance& inst, double alpha_t, double beta_t, double Q) {
  require_weights("solve_gamma", alpha_t, beta_t);
  if (!(Q > 0.0) || !std::isfinite(Q)) {
    throw std::invalid_argument("solve_gamma: Q must be positive");
  }
  const double analog = analog_power(inst, alpha_t, beta_t);
  if (analog > inst.P * (1.0 + kPowerSlack)) {
    throw std::invalid_argument(
        describe("solve_gamma: analog power %g exceeds the budget P=%g", analog, inst.P));
  }
  const double budget = std::max(0.0, inst.P - analog);
  if (budget == 0.0) return 0.0;
  // gamma^2*(sigma2+Q) + 2*gamma*sigma2*(alpha*rho+beta) - budget = 0; the
  // root below avoids cancellation for any coefficient magnitudes.
  const double a = inst.sigma2 + Q;
  const double b = 2.0 * inst.sigma2 * (alpha_t * inst.rho + beta_t);
  return 2.0 * budget / (b + std::sqrt(b * b + 4.0 * a * budget));
}

HybridParams make_hybrid_params(const ProblemInstance& inst, double alpha_t, double beta_t) {
  require_weights("make_hybrid_params", alpha_t, beta_t);
  const double analog = analog_power(inst, alpha_t, beta_t);
  if (analog > inst.P * (1.0 + kPowerSlack)) {
    throw std::invalid_argument(
        describe("make_hybrid_params: analog power %g exceeds the budget P=%g", analog, inst.P));
  }
  HybridParams hp{};
  hp.alpha_t = alpha_t;
  hp.beta_t = beta_t;
  if (inst.P - analog <= inst.P * kPowerSlack) {
    // Pure-analog limit: no digital layer, zero-rate window. Q is inert.
    hp.gamma_t = 0.0;
    hp.Q = 1.0;
  } else {
    hp.Q = q_star(inst, alpha_t, beta_t);
    hp.gamma_t = solve_gamma(inst, alpha_t, beta_t, hp.Q);
  }
  hp.rate_window = rate_window_of(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q);
  return hp;
}

HybridParams make_hybrid_params(const ProblemInstance& inst, double alpha_t, double beta_t,
                                double Q) {
  require_weights("make_hybrid_params", alpha_t, beta_t);
  if (!(Q > 0.0) || !std::isfinite(Q)) {
    throw std::invalid_argument("make_hybrid_params: Q must be positive");
  }
  HybridParams hp{};
  hp.alpha_t = alpha_t;
  hp.beta_t = beta_t;
  hp.Q = Q;
  hp.gamma_t = solve_gamma(inst, alpha_t, beta_t, Q);
  hp.rate_window = rate_window_of(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q);
  return hp;
}

SchemeDistortions hybrid_distortions(const ProblemInstance& inst, const HybridParams& hp) {
  if (!rate_feasible(hp)) {
    throw std::invalid_argument(describe(
        "hybrid_distortions: rate window infeasible (I(S2;Xd)=%g > I(Xd;Y2)=%g)",
        hp.rate_window.lower, hp.rate_window.upper));
  }
  auto law = hybrid_joint_law(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q);
  const double var_x = law.variance("X");
  if (var_x > inst.P * (1.0 + 1e-9)) {
    throw std::invalid_argument(
        describe("hybrid_distortions: channel power %g exceeds the budget P=%g", var_x, inst.P));
  }
  law = law.with_combination("W1", {{"Y1", 1.0}, {"Xd", -1.0}})
            .with_combination("W2", {{"Y2", 1.0}, {"Xd", -1.0}});
  const auto r1 = mmse_estimate(law, "S1", {"Xd", "W1"});
  const auto r2 = mmse_estimate(law, "S2", {"Xd", "W2"});

  SchemeDistortions out{};
  out.d1 = r1.mmse;
  out.d2 = r2.mmse;
  out.coeffs[0] = EstimatorCoeffs{r1.coeffs[0], r1.coeffs[1]};
  out.coeffs[1] = EstimatorCoeffs{r2.coeffs[0], r2.coeffs[1]};
  return out;
}

SchemeDistortions hybrid_distortions_closed_form(const ProblemInstance& inst,
                                                 const HybridParams& hp) {
  const double at = hp.alpha_t;
  const double bt = hp.beta_t;
  const double s2 = inst.sigma2;
  const double r2 = 1.0 - inst.rho * inst.rho;
  const double mix = at * at + bt * bt + 2.0 * at * bt * inst.rho;

  SchemeDistortions out{};
  const double num = r2 * (inst.N1 * inst.P - (bt * bt + 2.0 * at * bt * inst.rho) * inst.N1 * s2 +
                           bt * bt * inst.N2 * s2 + r2 * at * at * bt * bt * s2 * s2) +
                     inst.N1 * inst.N2;
  const double den = r2 * at * at * (inst.P + inst.N1) * s2 + inst.P * inst.N1 +
                     inst.N1 * inst.N2 + mix * (inst.N2 - inst.N1) * s2;
  out.d1 = s2 * num / den;
  out.d2 = s2 * (at * at * r2 * s2 + inst.N2) / (inst.P + inst.N2);
  return out;
}

HybridParams optimal_hybrid_params(const ProblemInstance& inst, double d1) {
  if (!(d1 > 0.0) || !std::isfinite(d1)) {
    throw std::invalid_argument("optimal_hybrid_params: d1 must be positive");
  }
  const RegimeReport report = classify_regime(inst);
  if (report.regime != Regime::HybridWindow) {
    throw std::domain_error(
        "optimal_hybrid_params: instance has no hybrid window (uncoded is optimal everywhere)");
  }
  const double s2 = inst.sigma2;
  const double r2 = 1.0 - inst.rho * inst.rho;

  const double radicand = inst.N1 / d1 - inst.N1 / (s2 * r2);
  const double alpha_sq = std::max(0.0, radicand);

  // Admissible alpha_t^2 window; violated exactly when d1 leaves
  // [d1_minus, d1_plus].
  const double p2n = inst.P + 2.0 * inst.N1;
  const double root = std::sqrt(std::max(0.0, (inst.P * inst.P - p2n * p2n * inst.rho * inst.rho) * r2));
  const double w_lo = (r2 * inst.P - 2.0 * inst.rho * inst.rho * inst.N1 - root) / (2.0 * r2 * s2);
  const double w_hi = (r2 * inst.P - 2.0 * inst.rho * inst.rho * inst.N1 + root) / (2.0 * r2 * s2);
  const double tol = 1e-9 * std::max(w_hi, 1e-30) + 1e-15 * inst.P / s2;
  if (alpha_sq < w_lo - tol || alpha_sq > w_hi + tol) {
    throw std::domain_error(describe(
        "optimal_hybrid_params: alpha_t^2 window violated: need %g <= alpha_t^2 <= %g "
        "(d1 outside [d1_minus, d1_plus])",
        w_lo, w_hi));
  }

  const double alpha_t = std::sqrt(alpha_sq);
  double beta_t = 0.0;
  if (inst.rho > 0.0) {
    if (alpha_t <= 0.0) {
      throw std::domain_error(
          "optimal_hybrid_params: alpha_t = 0 with rho > 0 (d1 at the degenerate edge)");
    }
    beta_t = inst.N1 * inst.rho / (alpha_t * r2 * s2);
  }
  return make_hybrid_params(inst, alpha_t, beta_t);
}

SchemeDistortions separation_baseline(const ProblemInstance& inst, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument(
        describe("separation_baseline: lambda=%g outside [0, 1]", lambda));
  }
  const double rate2 = 0.5 * std::log1p((1.0 - lambda) * inst.P / (lambda * inst.P + inst.N2));
  const double rate1 = 0.5 * std::log1p(lambda * inst.P / inst.N1);
  SchemeDistortions out{};
  out.d2 = inst.sigma2 * std::exp(-2.0 * rate2);
  const double cond_var = inst.sigma2 * (1.0 - inst.rho * inst.rho * (1.0 - out.d2 / inst.sigma2));
  out.d1 = cond_var * std::exp(-2.0 * rate1);
  return out;
}

double beta_max(const ProblemInstance& inst, double alpha_t) {
  if (!(std::isfinite(alpha_t)) || alpha_t < 0.0) {
    throw std::invalid_argument("beta_max: alpha_t must be >= 0");
  }
  const double cap = inst.P / inst.sigma2;
  const double r2 = 1.0 - inst.rho * inst.rho;
  const double rad = cap - alpha_t * alpha_t * r2;
  if (rad < 0.0) {
    throw std::domain_error(describe(
        "beta_max: alpha_t=%g analog-infeasible (needs alpha_t <= sqrt(P/sigma2) = %g)", alpha_t,
        std::sqrt(cap)));
  }
  return std::max(0.0, std::sqrt(rad) - inst.rho * alpha_t);
}

RegionCurve hybrid_sweep(const ProblemInstance& inst, double alpha_t, int n_beta) {
  if (n_beta < 2) throw std::invalid_argument("hybrid_sweep: n_beta must be >= 2");
  const double bmax = beta_max(inst, alpha_t);  // throws when alpha_t infeasible

  RegionCurve curve;
  curve.meta.instance = inst;
  curve.meta.scheme = describe("hybrid-sweep alpha_t=%.6g", alpha_t);
  curve.meta.grid = describe("beta_t:%g", static_cast<double>(n_beta));
  curve.meta.version = std::string(kVersion);
  curve.points.reserve(static_cast<std::size_t>(n_beta));
  for (int j = 0; j < n_beta; ++j) {
    const double bt = bmax * static_cast<double>(j) / static_cast<double>(n_beta - 1);
    HybridParams hp{};
    hp.alpha_t = alpha_t;
    hp.beta_t = bt;
    const auto d = hybrid_distortions_closed_form(inst, hp);
    curve.points.push_back(DistortionPoint{d.d1, d.d2, SourceTag::Hybrid, bt});
  }
  sort_by_d1(curve);
  return curve;
}

double uncoded_alpha_for_d1(const ProblemInstance& inst, double d1) {
  const double lo_d = d1_min(inst);
  const double hi_d = d1_max(inst);
  if (!(d1 >= lo_d * (1.0 - 1e-12) && d1 <= hi_d * (1.0 + 1e-12))) {
    throw std::domain_error(
        describe("uncoded_alpha_for_d1: d1 outside [d1_min, d1_max] = [%g, %g]", lo_d, hi_d));
  }
  // D1 is continuous and monotone decreasing in alpha: bisect.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (uncoded_distortions(inst, make_uncoded_params(mid)).d1 > d1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bcregion
