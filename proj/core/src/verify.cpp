#include "bcregion/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "bcregion/schemes.hpp"

namespace bcregion {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::vector<ProblemInstance> random_instances(std::uint64_t seed, int count,
                                              InstanceFilter filter) {
  std::mt19937_64 rng(seed ^ 0xB5C95D1EULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ProblemInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const double P = std::exp(std::log(0.1) + unit(rng) * (std::log(10.0) - std::log(0.1)));
    const double sigma2 = 0.25 + unit(rng) * 3.75;
    const double rho = unit(rng) * 0.95;
    const double N1 = 0.05 + unit(rng) * 4.95;
    const double N2 = N1 * (1.0 + unit(rng) * 3.0);
    if (filter == InstanceFilter::HybridWindowOnly) {
      // Keep a 5% margin above the regime threshold so the window endpoints
      // are well separated and the checks are not probing the degenerate
      // boundary.
      if (P <= 1.05 * 2.0 * rho * N1 / (1.0 - rho)) continue;
    }
    out.push_back(make_instance(P, sigma2, rho, N1, N2));
  }
  return out;
}

namespace {

struct Sizes {
  int prop1_grid;
  int prop2_sweep;
  int prop3_d1;
  int mmse_pairs_total;
  int frontier_grid;
};

Sizes sizes_for(VerifyProfile profile) {
  if (profile == VerifyProfile::Fast) return Sizes{1000, 10000, 10, 100, 200};
  return Sizes{10000, 100000, 50, 1000, 1000};
}

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

class Suite {
 public:
  Suite(std::vector<ProblemInstance> instances, const VerifyOptions& options)
      : instances_(std::move(instances)), sizes_(sizes_for(options.profile)) {
    frontier_ = options.frontier_override
                    ? options.frontier_override
                    : [](const ProblemInstance& inst, double d1) { return d2_star(inst, d1); };
    window_instances_.reserve(instances_.size());
    for (const auto& inst : instances_) {
      if (classify_regime(inst).regime == Regime::HybridWindow) window_instances_.push_back(inst);
    }
  }

  VerifyReport run() {
    frontier_composition();
    branch_continuity();
    prop1_threshold_equivalence();
    prop2_genie_elimination();
    prop3_matching();
    formula_vs_mmse();
    return std::move(report_);
  }

 private:
  void add(std::string name, double margin, double tolerance, std::string detail) {
    report_.checks.push_back(
        CheckResult{std::move(name), margin <= tolerance, margin, tolerance, std::move(detail)});
  }

  // The frontier function must coincide with the piecewise composition of
  // its branches; this is also the hook point for the corruption self-test.
  void frontier_composition() {
    double worst = 0.0;
    for (const auto& inst : instances_) {
      const auto report = classify_regime(inst);
      const double lo = report.d1_min;
      const double hi = 1.2 * report.d1_max;
      for (int i = 0; i <= sizes_.frontier_grid; ++i) {
        const double d1 = lo + (hi - lo) * static_cast<double>(i) / sizes_.frontier_grid;
        double expected;
        if (d1 > report.d1_max) {
          expected = inst.sigma2 * inst.N2 / (inst.P + inst.N2);
        } else if (report.regime == Regime::HybridWindow && d1 >= *report.d1_minus &&
                   d1 <= *report.d1_plus) {
          expected = d2_hybrid_frontier(inst, d1);
        } else {
          expected = d2_uncoded_frontier(inst, d1);
        }
        worst = std::max(worst, std::abs(frontier_(inst, d1) - expected) / inst.sigma2);
      }
    }
    add("frontier-composition", worst, 1e-12,
        "piecewise recomposition of the frontier over the d1 grid");
  }

  void branch_continuity() {
    double worst = 0.0;
    for (const auto& inst : window_instances_) {
      const auto report = classify_regime(inst);
      for (const double d1 : {*report.d1_minus, *report.d1_plus}) {
        worst = std::max(
            worst, std::abs(d2_uncoded_frontier(inst, d1) - d2_hybrid_frontier(inst, d1)) /
                       inst.sigma2);
      }
    }
    add("branch-continuity", worst, 1e-9,
        describe("|D2u - D2h| / sigma2 at the window endpoints of %g instances",
                 static_cast<double>(window_instances_.size())));
  }

  void prop1_threshold_equivalence() {
    std::int64_t violations = 0;
    for (const auto& inst : instances_) {
      const auto report = classify_regime(inst);
      const double lo = report.d1_min;
      const double hi = report.d1_max;
      for (int i = 0; i <= sizes_.prop1_grid; ++i) {
        const double d1 = lo + (hi - lo) * static_cast<double>(i) / sizes_.prop1_grid;
        if (report.regime == Regime::HybridWindow &&
            (std::abs(d1 - *report.d1_minus) <= 1e-9 || std::abs(d1 - *report.d1_plus) <= 1e-9)) {
          continue;  // boundary points excluded
        }
        const bool uncoded_ok = inst.P / inst.N1 <= gamma_threshold(d1, inst.sigma2, inst.rho);
        const bool inside = report.regime == Regime::HybridWindow &&
                            d1 > *report.d1_minus && d1 < *report.d1_plus;
        if (uncoded_ok != !inside) ++violations;
      }
    }
    add("prop1-threshold-equivalence", static_cast<double>(violations), 0.0,
        "grid points where P/N1 <= Gamma(d1) disagrees with d1 outside the window");
  }

  void prop2_genie_elimination() {
    double worst = 0.0;
    for (const auto& inst : instances_) {
      for (int i = 0; i <= sizes_.prop2_sweep; ++i) {
        const double alpha = static_cast<double>(i) / sizes_.prop2_sweep;
        const auto point = genie_region(inst, alpha);
        worst = std::max(
            worst, std::abs(point.d2 - d2_hybrid_frontier(inst, point.d1_given_2)) / inst.sigma2);
      }
    }
    add("prop2-genie-elimination", worst, 1e-6,
        "alpha-sweep of the genie bound against the hybrid frontier");
  }

  void prop3_matching() {
    double worst_match = 0.0;
    double worst_power = 0.0;
    double worst_rate = 0.0;
    for (const auto& inst : window_instances_) {
      const auto report = classify_regime(inst);
      for (int i = 0; i < sizes_.prop3_d1; ++i) {
        const double t = static_cast<double>(i) / (sizes_.prop3_d1 - 1);
        const double d1 = *report.d1_minus + t * (*report.d1_plus - *report.d1_minus);
        const auto hp = optimal_hybrid_params(inst, d1);
        const auto dist = hybrid_distortions(inst, hp);
        worst_match = std::max(worst_match, std::abs(dist.d1 - d1) / d1);
        worst_match = std::max(worst_match, std::abs(dist.d2 - d2_hybrid_frontier(inst, d1)) /
                                                d2_hybrid_frontier(inst, d1));
        const double var_x =
            hybrid_joint_law(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q).variance("X");
        worst_power = std::max(worst_power, std::abs(var_x - inst.P) / inst.P);
        worst_rate = std::max(worst_rate, std::abs(hp.rate_window.upper - hp.rate_window.lower));
      }
    }
    add("prop3-matching", worst_match, 1e-9,
        "optimal hybrid parameters landing on (d1, D2h(d1))");
    add("power-tightness", worst_power, 1e-12, "Var(X) = P for solve_gamma constructions");
    add("rate-tightness", worst_rate, 1e-10, "I(S2;Xd) = I(Xd;Y2) at Q = Q*");
  }

  void formula_vs_mmse() {
    std::mt19937_64 rng(0x5EEDF00DULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    if (instances_.empty()) {
      add("formula-vs-mmse", 0.0, 1e-9, "no instances");
      return;
    }
    for (int i = 0; i < sizes_.mmse_pairs_total; ++i) {
      const auto& inst = instances_[i % instances_.size()];
      const double cap = std::sqrt(inst.P / inst.sigma2);
      double at, bt;
      do {
        at = unit(rng) * cap;
        bt = unit(rng) * cap;
      } while (analog_power(inst, at, bt) >= 0.98 * inst.P);
      const auto hp = make_hybrid_params(inst, at, bt);
      const auto via_mmse = hybrid_distortions(inst, hp);
      const auto closed = hybrid_distortions_closed_form(inst, hp);
      worst = std::max(worst, std::abs(via_mmse.d1 - closed.d1) / closed.d1);
      worst = std::max(worst, std::abs(via_mmse.d2 - closed.d2) / closed.d2);
    }
    add("formula-vs-mmse", worst, 1e-9,
        describe("closed forms vs MMSE on the joint law, %g random feasible parameter sets",
                 static_cast<double>(sizes_.mmse_pairs_total)));
  }

  std::vector<ProblemInstance> instances_;
  std::vector<ProblemInstance> window_instances_;
  Sizes sizes_;
  std::function<double(const ProblemInstance&, double)> frontier_;
  VerifyReport report_;
};

}  // namespace

VerifyReport run_verification(const std::optional<ProblemInstance>& inst,
                              const VerifyOptions& options) {
  std::vector<ProblemInstance> instances;
  if (inst) instances.push_back(*inst);
  if (options.randomized_instances > 0) {
    auto extra = random_instances(options.seed, options.randomized_instances);
    instances.insert(instances.end(), extra.begin(), extra.end());
  }
  if (instances.empty()) {
    throw std::invalid_argument("run_verification: need an instance or randomized_instances > 0");
  }
  return Suite(std::move(instances), options).run();
}

}  // namespace bcregion
