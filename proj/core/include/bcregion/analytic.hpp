#pragma once

#include <optional>

#include "bcregion/model.hpp"

namespace bcregion {

enum class Regime {
  UncodedEverywhere,  // P <= 2*rho*N1/(1-rho): uncoded optimal on the whole range
  HybridWindow,       // P >  2*rho*N1/(1-rho): hybrid optimal on [d1_minus, d1_plus]
};

struct RegimeReport {
  Regime regime;
  double d1_min;
  double d1_max;
  std::optional<double> d1_minus;  // present only for HybridWindow
  std::optional<double> d1_plus;
};

/// Smallest achievable D1 (receiver 2 ignored): N1*sigma2/(P+N1).
double d1_min(const ProblemInstance& inst);

/// D1 beyond which the trivial analog-S2 point dominates:
/// sigma2*((1-rho^2)*P + N1)/(P + N1).
double d1_max(const ProblemInstance& inst);

/// Classifies the instance and, in the HybridWindow regime, computes the
/// window endpoints d1_minus/d1_plus. A discriminant within -1e-12 relative
/// of zero is clamped to zero so the regime boundary evaluates cleanly.
RegimeReport classify_regime(const ProblemInstance& inst);

/// Best D2 of the uncoded (purely analog) family at first-user distortion
/// d1. Domain: [d1_min, d1_max]; throws std::domain_error outside.
double d2_uncoded_frontier(const ProblemInstance& inst, double d1);

/// The hybrid-scheme bound sigma2/(P+N2) * (N1*(1-rho^2)*sigma2/d1 + N2 - N1);
/// valid for any d1 > 0.
double d2_hybrid_frontier(const ProblemInstance& inst, double d1);

/// The optimal frontier: minimum achievable D2 at first-user distortion d1.
/// Piecewise: trivial floor sigma2*N2/(P+N2) beyond d1_max, hybrid branch on
/// the closed window [d1_minus, d1_plus], uncoded branch elsewhere.
/// Throws std::domain_error for d1 below d1_min (infeasible).
double d2_star(const ProblemInstance& inst, double d1);

/// SNR threshold Gamma(d1, sigma2, rho) controlling uncoded optimality:
/// P/N1 <= Gamma  iff  d1 lies outside the open hybrid window. Returns
/// +infinity for d1 >= sigma2*(1-rho^2).
double gamma_threshold(double d1, double sigma2, double rho);

struct GeniePoint {
  double d1_given_2;  // distortion for S1 when S2 is revealed to receiver 1
  double d2;
};

/// Boundary of the genie-aided outer-bound region, parameterized by the
/// power split alpha in [0, 1] between the private and common layers.
GeniePoint genie_region(const ProblemInstance& inst, double alpha);

}  // namespace bcregion
