#pragma once

#include <array>
#include <stdexcept>

#include "bcregion/analytic.hpp"
#include "bcregion/model.hpp"
#include "bcregion/region.hpp"

namespace bcregion {

/// Thrown when the analog layer already consumes the whole power budget, so
/// no digital layer can be added (the quantization-noise formula degenerates).
class pure_analog_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Uncoded scheme weights: X is a power-normalized scaling of
/// alpha*S1 + beta*S2 with alpha in [0,1], beta = 1 - alpha.
struct UncodedParams {
  double alpha;
  double beta;
};

UncodedParams make_uncoded_params(double alpha);

/// Feasible rate interval [I(S2;Xd), I(Xd;Y2)] in nats. Any digital rate in
/// this interval is decodable at both receivers; the pair coincides when the
/// quantization noise is exactly Q*.
struct RateWindow {
  double lower = 0.0;
  double upper = 0.0;
};

/// Hybrid scheme knobs: analog weights alpha_t/beta_t, digital scale gamma_t,
/// quantization-noise variance Q, plus the derived rate window. Build through
/// make_hybrid_params so that gamma_t saturates the power constraint.
struct HybridParams {
  double alpha_t = 0.0;
  double beta_t = 0.0;
  double gamma_t = 0.0;
  double Q = 1.0;
  RateWindow rate_window;
};

inline bool rate_feasible(const HybridParams& hp) {
  return hp.rate_window.lower <= hp.rate_window.upper + 1e-12;
}

/// Distortion pair achieved by a scheme together with the per-receiver
/// estimator weights (zeros where a receiver applies no single-letter
/// estimator, e.g. the separation baseline).
struct SchemeDistortions {
  double d1 = 0.0;
  double d2 = 0.0;
  std::array<EstimatorCoeffs, 2> coeffs{};
};

/// Power consumed by the analog layer: sigma2*(a^2 + b^2 + 2*rho*a*b).
double analog_power(const ProblemInstance& inst, double alpha_t, double beta_t);

/// Closed-form distortions of the uncoded scheme; coeffs hold the scalar
/// MMSE weights of E[Sk|Yk].
SchemeDistortions uncoded_distortions(const ProblemInstance& inst, const UncodedParams& up);

/// Quantization-noise variance making the digital layer exactly decodable at
/// the weak receiver. Requires strict analog-power slack; throws
/// pure_analog_error when the analog layer exhausts P.
double q_star(const ProblemInstance& inst, double alpha_t, double beta_t);

/// Unique gamma_t >= 0 that spends the remaining power exactly:
/// gamma^2*(sigma2+Q) + 2*gamma*sigma2*(alpha_t*rho+beta_t) + analog - P = 0.
double solve_gamma(const ProblemInstance& inst, double alpha_t, double beta_t, double Q);

/// Canonical constructor: Q = Q*, gamma_t from solve_gamma, rate window from
/// the induced joint law. When the analog layer saturates P (within 1e-12
/// relative) the scheme degenerates to pure analog: gamma_t = 0 and an empty
/// rate window.
HybridParams make_hybrid_params(const ProblemInstance& inst, double alpha_t, double beta_t);

/// Same, with an explicit quantization-noise variance Q > 0. The rate window
/// is nonempty iff Q >= Q*.
HybridParams make_hybrid_params(const ProblemInstance& inst, double alpha_t, double beta_t,
                                double Q);

/// Distortions of the hybrid scheme, computed as the linear MMSE of Sk from
/// (Xd, alpha_t*S1 + beta_t*S2 + Zk) on the induced joint law. This is the
/// defining semantics; hybrid_distortions_closed_form is the algebraic
/// shortcut it must agree with.
SchemeDistortions hybrid_distortions(const ProblemInstance& inst, const HybridParams& hp);

/// Closed-form hybrid distortions (valid for canonically built params, i.e.
/// Q = Q* with gamma_t saturating the power constraint). Depends only on
/// alpha_t and beta_t; coeffs are not populated.
SchemeDistortions hybrid_distortions_closed_form(const ProblemInstance& inst,
                                                 const HybridParams& hp);

/// Hybrid parameters matching the frontier at first-user distortion d1:
/// alpha_t = sqrt(N1/d1 - N1/(sigma2*(1-rho^2))), beta_t chosen so the inner
/// bound meets the genie outer bound, Q = Q*, gamma_t saturating power.
/// Requires the HybridWindow regime and d1 in [d1_minus, d1_plus]; outside,
/// the admissible alpha_t^2 window is violated and a std::domain_error says so.
HybridParams optimal_hybrid_params(const ProblemInstance& inst, double d1);

/// Separation baseline: superposition broadcast coding with power split
/// lambda (common layer carries S2, private layer carries S1 conditioned on
/// the S2 reconstruction). Strictly inside the frontier except at endpoints.
SchemeDistortions separation_baseline(const ProblemInstance& inst, double lambda);

/// Largest beta_t keeping the analog layer within power at fixed alpha_t
/// (at that endpoint gamma_t = 0 and the scheme reduces to uncoded).
double beta_max(const ProblemInstance& inst, double alpha_t);

/// Sweeps beta_t over [0, beta_max] at fixed alpha_t, n_beta points. The d2
/// coordinate is constant along the sweep (it depends only on alpha_t).
RegionCurve hybrid_sweep(const ProblemInstance& inst, double alpha_t, int n_beta);

/// Inverts the uncoded map: the alpha whose D1 equals the target (monotone
/// bisection over [0, 1], tolerance 1e-12). Target must lie in
/// [d1_min, d1_max].
double uncoded_alpha_for_d1(const ProblemInstance& inst, double d1);

}  // namespace bcregion
