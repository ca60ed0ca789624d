#include "bcregion/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "bcregion/analytic.hpp"
#include "bcregion/region.hpp"
#include "bcregion/schemes.hpp"
#include "bcregion/version.hpp"

namespace bcregion {

namespace {

using nlohmann::json;

json instance_json(const ProblemInstance& inst) {
  return json{{"P", inst.P},
              {"sigma2", inst.sigma2},
              {"rho", inst.rho},
              {"N1", inst.N1},
              {"N2", inst.N2}};
}

json regime_json(const RegimeReport& report) {
  json j{{"regime", report.regime == Regime::HybridWindow ? "hybrid-window"
                                                          : "uncoded-everywhere"},
         {"d1_min", report.d1_min},
         {"d1_max", report.d1_max}};
  if (report.d1_minus) j["d1_minus"] = *report.d1_minus;
  if (report.d1_plus) j["d1_plus"] = *report.d1_plus;
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

/// Uniform d1 grid over [d1_min, d1_max] with the branch breakpoints
/// (d1_minus, d1_plus, (1-rho^2)*sigma2) inserted exactly.
std::vector<double> d1_grid(const ProblemInstance& inst, int n_grid) {
  const auto report = classify_regime(inst);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_grid) + 3);
  for (int i = 0; i < n_grid; ++i) {
    const double t = static_cast<double>(i) / (n_grid - 1);
    grid.push_back(report.d1_min + t * (report.d1_max - report.d1_min));
  }
  auto insert_breakpoint = [&](double v) {
    if (v > report.d1_min && v < report.d1_max) grid.push_back(v);
  };
  if (report.d1_minus) insert_breakpoint(*report.d1_minus);
  if (report.d1_plus) insert_breakpoint(*report.d1_plus);
  insert_breakpoint(inst.sigma2 * (1.0 - inst.rho * inst.rho));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CurveMeta meta_for(const ProblemInstance& inst, std::string scheme, std::string grid,
                   std::uint64_t seed) {
  CurveMeta meta;
  meta.instance = inst;
  meta.scheme = std::move(scheme);
  meta.grid = std::move(grid);
  meta.seed = seed;
  meta.version = std::string(kVersion);
  return meta;
}

}  // namespace

int cmd_region(const RegionOptions& options) {
  if (options.n_grid < 2) throw std::invalid_argument("region: --grid must be >= 2");
  const auto& inst = options.inst;
  const auto report = classify_regime(inst);
  const auto grid = d1_grid(inst, options.n_grid);
  const std::string grid_spec = "d1:" + std::to_string(grid.size());

  json manifest{{"instance", instance_json(inst)},
                {"regime_report", regime_json(report)},
                {"version", std::string(kVersion)},
                {"seed", options.seed},
                {"grid", options.n_grid},
                {"files", json::array()}};

  auto emit = [&](RegionCurve curve, const std::string& filename) {
    const auto n_points = curve.points.size();
    const std::string scheme = curve.meta.scheme;
    write_curve_csv(std::move(curve), options.out_dir / filename);
    manifest["files"].push_back(
        json{{"path", filename}, {"scheme", scheme}, {"points", n_points}});
  };

  RegionCurve frontier{{}, meta_for(inst, "frontier", grid_spec, options.seed)};
  RegionCurve uncoded{{}, meta_for(inst, "uncoded", grid_spec, options.seed)};
  RegionCurve hybrid{{}, meta_for(inst, "hybrid-outer", grid_spec, options.seed)};
  for (const double d1 : grid) {
    frontier.points.push_back({d1, d2_star(inst, d1), SourceTag::Frontier, d1});
    uncoded.points.push_back({d1, d2_uncoded_frontier(inst, d1), SourceTag::Uncoded, d1});
    hybrid.points.push_back({d1, d2_hybrid_frontier(inst, d1), SourceTag::Hybrid, d1});
  }
  emit(std::move(frontier), "frontier.csv");
  emit(std::move(uncoded), "uncoded.csv");
  emit(std::move(hybrid), "hybrid_outer.csv");

  RegionCurve genie{{}, meta_for(inst, "genie-outer", "alpha:" + std::to_string(options.n_grid),
                                 options.seed)};
  RegionCurve separation{
      {}, meta_for(inst, "separation", "lambda:" + std::to_string(options.n_grid), options.seed)};
  for (int i = 0; i < options.n_grid; ++i) {
    const double t = static_cast<double>(i) / (options.n_grid - 1);
    const auto gp = genie_region(inst, t);
    genie.points.push_back({gp.d1_given_2, gp.d2, SourceTag::GenieOuter, t});
    const auto sp = separation_baseline(inst, t);
    separation.points.push_back({sp.d1, sp.d2, SourceTag::Separation, t});
  }
  emit(std::move(genie), "genie.csv");
  emit(std::move(separation), "separation.csv");

  RegionCurve trivial{{}, meta_for(inst, "trivial-analog", "point:1", options.seed)};
  trivial.points.push_back({report.d1_max, inst.sigma2 * inst.N2 / (inst.P + inst.N2),
                            SourceTag::TrivialAnalog, 0.0});
  emit(std::move(trivial), "trivial_point.csv");

  write_json(options.out_dir / "manifest.json", manifest);
  std::cout << "region: wrote " << manifest["files"].size() << " curves to "
            << options.out_dir.string() << "\n";
  return kExitSuccess;
}

int cmd_sweep_hybrid(const SweepHybridOptions& options) {
  if (options.alpha_ts.empty()) {
    throw std::invalid_argument("sweep-hybrid: need at least one --alpha-t");
  }
  if (options.n_beta < 2) throw std::invalid_argument("sweep-hybrid: --nbeta must be >= 2");

  json manifest{{"instance", instance_json(options.inst)},
                {"regime_report", regime_json(classify_regime(options.inst))},
                {"version", std::string(kVersion)},
                {"seed", options.seed},
                {"files", json::array()},
                {"skipped", json::array()}};

  int emitted = 0;
  for (std::size_t i = 0; i < options.alpha_ts.size(); ++i) {
    const double at = options.alpha_ts[i];
    try {
      auto curve = hybrid_sweep(options.inst, at, options.n_beta);
      curve.meta.seed = options.seed;
      char name[64];
      std::snprintf(name, sizeof(name), "sweep_alpha_%02zu.csv", i);
      const std::string scheme = curve.meta.scheme;
      write_curve_csv(std::move(curve), options.out_dir / name);
      manifest["files"].push_back(json{{"path", name}, {"scheme", scheme}, {"alpha_t", at}});
      ++emitted;
    } catch (const std::exception& e) {
      std::cerr << "sweep-hybrid: skipping alpha_t=" << at << ": " << e.what() << "\n";
      manifest["skipped"].push_back(json{{"alpha_t", at}, {"error", e.what()}});
    }
  }
  write_json(options.out_dir / "manifest.json", manifest);
  std::cout << "sweep-hybrid: wrote " << emitted << " of " << options.alpha_ts.size()
            << " sweeps to " << options.out_dir.string() << "\n";
  return emitted > 0 ? kExitSuccess : kExitUsageError;
}

int cmd_verify(const VerifyCmdOptions& options) {
  VerifyOptions vo;
  vo.profile = options.profile;
  vo.seed = options.seed;
  vo.randomized_instances = options.randomized_instances;
  if (options.corrupt_frontier) {
    vo.frontier_override = [](const ProblemInstance& inst, double d1) {
      return d2_star(inst, d1) * (1.0 + 1e-6);
    };
  }
  const VerifyReport report = run_verification(options.inst, vo);

  json j{{"version", std::string(kVersion)},
         {"seed", options.seed},
         {"profile", options.profile == VerifyProfile::Fast ? "fast" : "full"},
         {"randomized_instances", options.randomized_instances},
         {"all_passed", report.all_passed()},
         {"checks", json::array()}};
  if (options.inst) j["instance"] = instance_json(*options.inst);

  for (const auto& check : report.checks) {
    std::printf("[%s] %-28s margin=%-12.3e tol=%-8.0e %s\n", check.passed ? "PASS" : "FAIL",
                check.name.c_str(), check.margin, check.tolerance, check.detail.c_str());
    j["checks"].push_back(json{{"name", check.name},
                               {"passed", check.passed},
                               {"margin", check.margin},
                               {"tolerance", check.tolerance},
                               {"detail", check.detail}});
  }
  if (options.out_dir) write_json(*options.out_dir / "verify_report.json", j);
  return report.all_passed() ? kExitSuccess : kExitVerificationFailure;
}

int cmd_simulate(const SimulateOptions& options) {
  if (options.n < 1) throw std::invalid_argument("simulate: --n must be >= 1");
  const auto& inst = options.inst;

  HybridParams hp;
  json scheme_json;
  switch (options.scheme) {
    case SimScheme::Uncoded: {
      double alpha;
      if (options.alpha) {
        alpha = *options.alpha;
      } else if (options.d1) {
        alpha = uncoded_alpha_for_d1(inst, *options.d1);
      } else {
        throw std::invalid_argument("simulate: uncoded scheme needs --alpha or --d1");
      }
      const auto up = make_uncoded_params(alpha);
      // Full-power analog direction; make_hybrid_params degenerates to
      // gamma_t = 0 with Q inert.
      const double q = up.alpha * up.alpha + 2.0 * up.alpha * up.beta * inst.rho +
                       up.beta * up.beta;
      const double scale = std::sqrt(inst.P / (inst.sigma2 * q));
      hp = make_hybrid_params(inst, scale * up.alpha, scale * up.beta);
      scheme_json = json{{"name", "uncoded"}, {"alpha", alpha}};
      break;
    }
    case SimScheme::HybridOptimal: {
      if (!options.d1) throw std::invalid_argument("simulate: hybrid scheme needs --d1");
      hp = optimal_hybrid_params(inst, *options.d1);
      scheme_json = json{{"name", "hybrid-optimal"}, {"d1", *options.d1}};
      break;
    }
    case SimScheme::HybridExplicit: {
      if (!options.alpha_t || !options.beta_t) {
        throw std::invalid_argument("simulate: explicit hybrid needs --alpha-t and --beta-t");
      }
      hp = make_hybrid_params(inst, *options.alpha_t, *options.beta_t);
      scheme_json = json{{"name", "hybrid"}, {"alpha_t", *options.alpha_t},
                         {"beta_t", *options.beta_t}};
      break;
    }
  }
  scheme_json["params"] = json{{"alpha_t", hp.alpha_t},
                               {"beta_t", hp.beta_t},
                               {"gamma_t", hp.gamma_t},
                               {"Q", hp.Q},
                               {"rate_window", {hp.rate_window.lower, hp.rate_window.upper}}};

  const auto analytic = hybrid_distortions(inst, hp);
  json j{{"version", std::string(kVersion)},
         {"instance", instance_json(inst)},
         {"scheme", scheme_json},
         {"family", std::string(to_string(options.family))},
         {"n", options.n},
         {"seed", options.seed},
         {"analytic", json{{"d1", analytic.d1}, {"d2", analytic.d2}}}};

  bool ok = true;
  EmpiricalDistortions emp;
  if (options.family == DistributionFamily::Gaussian || hp.gamma_t == 0.0) {
    const auto batch = sample_batch(inst, hp, options.family, options.n, options.seed,
                                    options.threads);
    emp = empirical_distortions(inst, hp, batch);
    ok = std::abs(emp.dist.d1 - analytic.d1) <= 3.0 * emp.se_d1 &&
         std::abs(emp.dist.d2 - analytic.d2) <= 3.0 * emp.se_d2;
  } else {
    const auto report = worst_case_check(inst, hp, options.family, options.n, options.k_nn,
                                         options.seed, options.threads);
    emp = report.empirical;
    ok = report.distortions_match && report.entropy_gap <= report.slack &&
         report.receiver[0].rate_feasible && report.receiver[1].rate_feasible;
    j["entropy"] = json{
        {"k_nn", report.k_nn},
        {"slack", report.slack},
        {"entropy_gap", report.entropy_gap},
        {"h_digital_noise", report.h_digital_noise},
        {"receivers", json::array()},
    };
    for (const auto& r : report.receiver) {
      j["entropy"]["receivers"].push_back(json{{"h_residual_est", r.h_residual_est},
                                               {"h_residual_ctrl", r.h_residual_ctrl},
                                               {"h_residual_gauss", r.h_residual_gauss},
                                               {"h_cond_joint_minus_marginal", r.h_cond_jm},
                                               {"margin", r.margin},
                                               {"rate_feasible", r.rate_feasible}});
    }
  }

  j["empirical"] = json{{"d1", emp.dist.d1},     {"se_d1", emp.se_d1}, {"d2", emp.dist.d2},
                        {"se_d2", emp.se_d2},    {"var_x", emp.var_x}, {"se_var_x", emp.se_var_x},
                        {"n", emp.n}};
  j["consistent"] = ok;

  std::printf("simulate: family=%s n=%lld  d1=%.6f (analytic %.6f, 3se=%.2e)  "
              "d2=%.6f (analytic %.6f, 3se=%.2e)  %s\n",
              std::string(to_string(options.family)).c_str(),
              static_cast<long long>(options.n), emp.dist.d1, analytic.d1, 3.0 * emp.se_d1,
              emp.dist.d2, analytic.d2, 3.0 * emp.se_d2, ok ? "OK" : "MISMATCH");

  if (options.out_dir) write_json(*options.out_dir / "simulate_report.json", j);
  return ok ? kExitSuccess : kExitVerificationFailure;
}

}  // namespace bcregion
