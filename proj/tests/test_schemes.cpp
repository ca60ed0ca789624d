#include <doctest.h>

#include <cmath>
#include <random>

#include "bcregion/analytic.hpp"
#include "bcregion/schemes.hpp"
#include "bcregion/verify.hpp"
#include "test_support.hpp"

using namespace bcregion;
using test::rel_err;

namespace {

// Frozen from a 50-digit evaluation of the optimal-parameter closed forms at
// d1 = 0.5 on the rho = 0.4 reference instance.
constexpr double kAlphaT = 0.49280538030458115;
constexpr double kAlphaSq = 0.24285714285714286;  // = 17/70
constexpr double kBetaT = 0.28988551782622420;
constexpr double kQStar = 2.1545263157894737;
constexpr double kGammaStar = 0.29392872323938416;
constexpr double kD1Minus = 0.24606644767160843;
constexpr double kD1Plus = 0.78777970617454541;
constexpr double kAlphaSqWindowLo = 0.023674264253679719;
constexpr double kAlphaSqWindowHi = 0.86204002146060600;

double hybrid_d1_at_matched_beta(const ProblemInstance& inst, double alpha_t) {
  // Simplified first-user distortion when beta_t takes its matched value.
  const double r2 = 1.0 - inst.rho * inst.rho;
  return inst.sigma2 * r2 * inst.N1 / (r2 * alpha_t * alpha_t * inst.sigma2 + inst.N1);
}

}  // namespace

TEST_CASE("uncoded endpoints") {
  const auto inst = test::weak_corr_instance();
  const double r2 = 1.0 - inst.rho * inst.rho;

  const auto only_s1 = uncoded_distortions(inst, make_uncoded_params(1.0));
  CHECK(rel_err(only_s1.d1, d1_min(inst)) < 1e-14);
  CHECK(rel_err(only_s1.d2, inst.sigma2 * (inst.P * r2 + inst.N2) / (inst.P + inst.N2)) < 1e-14);

  const auto only_s2 = uncoded_distortions(inst, make_uncoded_params(0.0));
  CHECK(rel_err(only_s2.d1, d1_max(inst)) < 1e-14);
  CHECK(rel_err(only_s2.d2, inst.sigma2 * inst.N2 / (inst.P + inst.N2)) < 1e-14);
}

TEST_CASE("uncoded validation") {
  CHECK_THROWS_AS(make_uncoded_params(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_uncoded_params(1.1), std::invalid_argument);
  CHECK_THROWS_AS(uncoded_distortions(test::weak_corr_instance(), UncodedParams{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(uncoded_distortions(test::weak_corr_instance(), UncodedParams{0.5, 0.6}),
                  std::invalid_argument);
}

TEST_CASE("uncoded agrees with the MMSE kernel on the strong-correlation instance") {
  const auto inst = test::strong_corr_instance();
  const auto up = make_uncoded_params(0.5);
  const auto closed = uncoded_distortions(inst, up);
  const double q = up.alpha * up.alpha + 2.0 * up.alpha * up.beta * inst.rho + up.beta * up.beta;
  const double scale = std::sqrt(inst.P / (inst.sigma2 * q));
  const auto law = hybrid_joint_law(inst, scale * up.alpha, scale * up.beta, 0.0, 1.0);
  CHECK(rel_err(mmse_estimate(law, "S1", {"Y1"}).mmse, closed.d1) < 1e-12);
  CHECK(rel_err(mmse_estimate(law, "S2", {"Y2"}).mmse, closed.d2) < 1e-12);

  // The reported coefficient is the scalar MMSE weight.
  CHECK(rel_err(closed.coeffs[0].b, mmse_estimate(law, "S1", {"Y1"}).coeffs[0]) < 1e-12);
}

TEST_CASE("q_star values and degeneracy") {
  const auto inst = test::weak_corr_instance();
  CHECK(rel_err(q_star(inst, 0.0, 0.0), inst.sigma2 * inst.N2 / inst.P) < 1e-14);
  CHECK(rel_err(q_star(inst, kAlphaT, kBetaT), kQStar) < 1e-12);

  // Q* grows without bound as the analog layer approaches the budget.
  const double bmax = beta_max(inst, 0.5);
  double prev = 0.0;
  for (double f : {0.9, 0.99, 0.999}) {
    const double q = q_star(inst, 0.5, f * bmax);
    CHECK(q > prev);
    prev = q;
  }

  CHECK_THROWS_AS(q_star(inst, 0.5, beta_max(inst, 0.5)), pure_analog_error);
  CHECK_THROWS_AS(q_star(inst, 2.0, 2.0), std::invalid_argument);
}

TEST_CASE("solve_gamma roots") {
  const auto uncorr = make_instance(1.0, 1.0, 0.0, 0.3, 1.0);
  CHECK(rel_err(solve_gamma(uncorr, 0.0, 0.0, 1.0), 1.0 / std::sqrt(2.0)) < 1e-14);

  const auto inst = test::weak_corr_instance();
  CHECK(solve_gamma(inst, 0.5, beta_max(inst, 0.5), 1.0) == 0.0);
  CHECK(rel_err(solve_gamma(inst, kAlphaT, kBetaT, kQStar), kGammaStar) < 1e-12);
  CHECK_THROWS_AS(solve_gamma(inst, 2.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_gamma(inst, 0.1, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("make_hybrid_params saturates power exactly") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& inst : random_instances(77, 30)) {
    const double cap = std::sqrt(inst.P / inst.sigma2);
    double at, bt;
    do {
      at = unit(rng) * cap;
      bt = unit(rng) * cap;
    } while (analog_power(inst, at, bt) >= 0.95 * inst.P);
    const auto hp = make_hybrid_params(inst, at, bt);
    const double var_x = hybrid_joint_law(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q)
                             .variance("X");
    CHECK(rel_err(var_x, inst.P) < 1e-12);

    // Rate window closes at Q = Q*, via two independent routes.
    CHECK(std::abs(hp.rate_window.upper - hp.rate_window.lower) < 1e-10);
    CHECK(std::abs(hp.rate_window.lower - 0.5 * std::log((inst.sigma2 + hp.Q) / hp.Q)) < 1e-10);

    // Degradedness: the strong receiver can always decode the digital layer.
    const auto law = hybrid_joint_law(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q);
    CHECK(gaussian_mi(law, {"S2"}, {"Xd"}) <= gaussian_mi(law, {"Xd"}, {"Y1"}) + 1e-10);
  }
}

TEST_CASE("make_hybrid_params with explicit Q") {
  const auto inst = test::weak_corr_instance();
  const auto loose = make_hybrid_params(inst, kAlphaT, kBetaT, 2.0 * kQStar);
  CHECK(loose.rate_window.lower < loose.rate_window.upper);
  CHECK(rate_feasible(loose));

  const auto tight = make_hybrid_params(inst, kAlphaT, kBetaT, 0.5 * kQStar);
  CHECK_FALSE(rate_feasible(tight));
  CHECK_THROWS_AS(hybrid_distortions(inst, tight), std::invalid_argument);
}

TEST_CASE("hybrid closed forms match the MMSE route") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& inst : random_instances(78, 40)) {
    const double cap = std::sqrt(inst.P / inst.sigma2);
    double at, bt;
    do {
      at = unit(rng) * cap;
      bt = unit(rng) * cap;
    } while (analog_power(inst, at, bt) >= 0.98 * inst.P);
    const auto hp = make_hybrid_params(inst, at, bt);
    const auto via_mmse = hybrid_distortions(inst, hp);
    const auto closed = hybrid_distortions_closed_form(inst, hp);
    CHECK(rel_err(via_mmse.d1, closed.d1) < 1e-9);
    CHECK(rel_err(via_mmse.d2, closed.d2) < 1e-9);
    CHECK(via_mmse.d1 > 0.0);
    CHECK(via_mmse.d1 <= inst.sigma2 * (1.0 + 1e-12));
    CHECK(via_mmse.d2 <= inst.sigma2 * (1.0 + 1e-12));
  }
}

TEST_CASE("matched beta simplifies the first-user distortion") {
  for (const auto& inst : random_instances(79, 20, InstanceFilter::HybridWindowOnly)) {
    const auto report = classify_regime(inst);
    const double d1 = 0.5 * (*report.d1_minus + *report.d1_plus);
    const auto hp = optimal_hybrid_params(inst, d1);
    const auto closed = hybrid_distortions_closed_form(inst, hp);
    CHECK(rel_err(closed.d1, hybrid_d1_at_matched_beta(inst, hp.alpha_t)) < 1e-12);
  }
}

TEST_CASE("optimal_hybrid_params on the reference instance") {
  const auto inst = test::weak_corr_instance();
  const auto hp = optimal_hybrid_params(inst, 0.5);
  CHECK(rel_err(hp.alpha_t * hp.alpha_t, kAlphaSq) < 1e-12);
  CHECK(rel_err(hp.alpha_t, kAlphaT) < 1e-12);
  CHECK(rel_err(hp.beta_t, kBetaT) < 1e-12);
  CHECK(rel_err(hp.Q, kQStar) < 1e-12);
  CHECK(rel_err(hp.gamma_t, kGammaStar) < 1e-12);

  const auto dist = hybrid_distortions(inst, hp);
  CHECK(rel_err(dist.d1, 0.5) < 1e-9);
  CHECK(rel_err(dist.d2, 0.602) < 1e-9);
  CHECK(rel_err(dist.d2, d2_hybrid_frontier(inst, 0.5)) < 1e-9);
}

TEST_CASE("optimal_hybrid_params at the window endpoints") {
  const auto inst = test::weak_corr_instance();

  // At the endpoints alpha_t^2 hits the admissible window boundary and the
  // scheme degenerates to pure analog.
  const auto at_minus = optimal_hybrid_params(inst, kD1Minus);
  CHECK(rel_err(at_minus.alpha_t * at_minus.alpha_t, kAlphaSqWindowHi) < 1e-9);
  CHECK(at_minus.gamma_t == 0.0);
  const auto dist_minus = hybrid_distortions(inst, at_minus);
  CHECK(rel_err(dist_minus.d1, kD1Minus) < 1e-9);
  CHECK(rel_err(dist_minus.d2, d2_hybrid_frontier(inst, kD1Minus)) < 1e-9);

  const auto at_plus = optimal_hybrid_params(inst, kD1Plus);
  CHECK(rel_err(at_plus.alpha_t * at_plus.alpha_t, kAlphaSqWindowLo) < 1e-9);
  const auto dist_plus = hybrid_distortions(inst, at_plus);
  CHECK(rel_err(dist_plus.d1, kD1Plus) < 1e-9);
  CHECK(rel_err(dist_plus.d2, d2_hybrid_frontier(inst, kD1Plus)) < 1e-9);
}

TEST_CASE("optimal_hybrid_params domain errors") {
  const auto inst = test::weak_corr_instance();
  CHECK_THROWS_WITH_AS(optimal_hybrid_params(inst, 0.9 * kD1Minus),
                       doctest::Contains("window"), std::domain_error);
  CHECK_THROWS_WITH_AS(optimal_hybrid_params(inst, 1.1 * kD1Plus),
                       doctest::Contains("window"), std::domain_error);
  CHECK_THROWS_AS(optimal_hybrid_params(test::strong_corr_instance(), 0.4), std::domain_error);
  CHECK_THROWS_AS(optimal_hybrid_params(inst, 0.0), std::invalid_argument);
}

TEST_CASE("optimal_hybrid_params with uncorrelated sources") {
  // rho = 0: the window spans [d1_min, sigma2] and beta_t stays zero.
  const auto inst = make_instance(1.0, 1.0, 0.0, 0.3, 1.0);
  const auto report = classify_regime(inst);
  REQUIRE(report.regime == Regime::HybridWindow);
  CHECK(*report.d1_minus == doctest::Approx(d1_min(inst)));
  CHECK(*report.d1_plus == doctest::Approx(inst.sigma2));

  const auto hp = optimal_hybrid_params(inst, inst.sigma2);  // upper endpoint
  CHECK(hp.alpha_t == doctest::Approx(0.0));
  CHECK(hp.beta_t == 0.0);
  const auto dist = hybrid_distortions(inst, hp);
  CHECK(rel_err(dist.d1, inst.sigma2) < 1e-9);
  CHECK(rel_err(dist.d2, inst.sigma2 * inst.N2 / (inst.P + inst.N2)) < 1e-9);
}

TEST_CASE("pure-analog hybrid reproduces the uncoded scheme") {
  const auto inst = test::weak_corr_instance();
  const auto up = make_uncoded_params(0.3);
  const double q = up.alpha * up.alpha + 2.0 * up.alpha * up.beta * inst.rho + up.beta * up.beta;
  const double scale = std::sqrt(inst.P / (inst.sigma2 * q));
  const auto hp = make_hybrid_params(inst, scale * up.alpha, scale * up.beta);
  CHECK(hp.gamma_t == 0.0);
  CHECK(hp.rate_window.lower == 0.0);
  CHECK(hp.rate_window.upper == 0.0);

  const auto hybrid = hybrid_distortions(inst, hp);
  const auto uncoded = uncoded_distortions(inst, up);
  CHECK(rel_err(hybrid.d1, uncoded.d1) < 1e-12);
  CHECK(rel_err(hybrid.d2, uncoded.d2) < 1e-12);
}

TEST_CASE("separation endpoints") {
  const auto inst = test::weak_corr_instance();
  const auto s1_only = separation_baseline(inst, 1.0);
  CHECK(rel_err(s1_only.d1, d1_min(inst)) < 1e-12);
  CHECK(s1_only.d2 == doctest::Approx(inst.sigma2));

  const auto s2_only = separation_baseline(inst, 0.0);
  const double d2_floor = inst.sigma2 * inst.N2 / (inst.P + inst.N2);
  CHECK(rel_err(s2_only.d2, d2_floor) < 1e-12);
  CHECK(rel_err(s2_only.d1,
                inst.sigma2 * (1.0 - inst.rho * inst.rho * (1.0 - d2_floor / inst.sigma2))) <
        1e-12);

  CHECK_THROWS_AS(separation_baseline(inst, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(separation_baseline(inst, -0.5), std::invalid_argument);
}

TEST_CASE("separation never beats the frontier") {
  for (const auto inst : {test::weak_corr_instance(), test::strong_corr_instance()}) {
    for (int i = 0; i <= 100; ++i) {
      const auto sep = separation_baseline(inst, static_cast<double>(i) / 100.0);
      CHECK(sep.d2 >= d2_star(inst, sep.d1) - 1e-9);
    }
  }
}

TEST_CASE("hybrid_sweep properties") {
  const auto inst = test::weak_corr_instance();
  const double alpha_t = kAlphaT;
  const auto curve = hybrid_sweep(inst, alpha_t, 2001);
  REQUIRE(curve.points.size() == 2001);

  // d2 depends only on alpha_t: constant along the sweep.
  const double d2 = curve.points.front().d2;
  double min_d1 = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.points) {
    CHECK(std::abs(p.d2 - d2) < 1e-12);
    min_d1 = std::min(min_d1, p.d1);
  }

  // The sweep minimum of d1 sits at the matched beta_t (interior here).
  const double matched = hybrid_d1_at_matched_beta(inst, alpha_t);
  CHECK(min_d1 >= matched - 1e-9);
  CHECK(min_d1 - matched < 1e-6);

  // beta_t = 0 endpoint: hybrid without analog S2.
  HybridParams no_s2{};
  no_s2.alpha_t = alpha_t;
  const auto first = hybrid_distortions_closed_form(inst, no_s2);
  bool found = false;
  for (const auto& p : curve.points) {
    if (p.param == 0.0) {
      CHECK(p.d1 == doctest::Approx(first.d1));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("hybrid_sweep endpoint reduces to the uncoded scheme") {
  const auto inst = test::weak_corr_instance();
  const double alpha_t = 0.6;
  const double bmax = beta_max(inst, alpha_t);
  HybridParams endpoint{};
  endpoint.alpha_t = alpha_t;
  endpoint.beta_t = bmax;
  const auto closed = hybrid_distortions_closed_form(inst, endpoint);
  const auto uncoded = uncoded_distortions(inst, make_uncoded_params(alpha_t / (alpha_t + bmax)));
  CHECK(rel_err(closed.d1, uncoded.d1) < 1e-12);
  CHECK(rel_err(closed.d2, uncoded.d2) < 1e-12);
}

TEST_CASE("hybrid_sweep rejects infeasible alpha_t") {
  const auto inst = test::weak_corr_instance();
  CHECK_THROWS_AS(hybrid_sweep(inst, 1.5, 10), std::domain_error);
  CHECK_THROWS_AS(hybrid_sweep(inst, 0.5, 1), std::invalid_argument);
  CHECK_NOTHROW(hybrid_sweep(inst, 0.0, 5));
}

TEST_CASE("uncoded_alpha_for_d1 inverts the distortion map") {
  const auto inst = test::weak_corr_instance();
  for (double target : {0.25, 0.3, 0.5, 0.8}) {
    const double alpha = uncoded_alpha_for_d1(inst, target);
    CHECK(std::abs(uncoded_distortions(inst, make_uncoded_params(alpha)).d1 - target) < 1e-9);
  }
  CHECK_THROWS_AS(uncoded_alpha_for_d1(inst, 0.1), std::domain_error);
  CHECK_THROWS_AS(uncoded_alpha_for_d1(inst, 0.95), std::domain_error);
}
