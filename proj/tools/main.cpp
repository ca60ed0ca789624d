// Command-line front end: region/curve generation, hybrid sweeps, the
// verification suite, and Monte Carlo simulation, all emitting CSV/JSON.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "bcregion/commands.hpp"
#include "bcregion/model.hpp"
#include "bcregion/version.hpp"

namespace {

struct InstanceFlags {
  double P = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  double N1 = 1.0;
  double N2 = 1.0;

  void attach(CLI::App* cmd, bool required) {
    auto* p = cmd->add_option("--P", P, "Transmit power");
    auto* s = cmd->add_option("--sigma2", sigma2, "Per-component source variance");
    auto* r = cmd->add_option("--rho", rho, "Source correlation coefficient in [0, 1)");
    auto* n1 = cmd->add_option("--N1", N1, "Noise variance at receiver 1 (strong user)");
    auto* n2 = cmd->add_option("--N2", N2, "Noise variance at receiver 2");
    if (required) {
      for (auto* opt : {p, s, r, n1, n2}) opt->required();
    }
  }

  bcregion::ProblemInstance build() const {
    return bcregion::make_instance(P, sigma2, rho, N1, N2);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Achievable distortion region toolkit for broadcasting a bivariate Gaussian "
               "source over a two-user Gaussian channel"};
  app.set_version_flag("--version", std::string(bcregion::kVersion));
  app.set_config("--config", "", "Read options from a key=value file (flags take precedence)");
  app.require_subcommand(1);

  // region
  auto* region = app.add_subcommand("region", "Emit the full curve set for one instance");
  InstanceFlags region_inst;
  region_inst.attach(region, true);
  std::string region_out;
  int region_grid = 400;
  std::uint64_t region_seed = 0;
  region->add_option("--out", region_out, "Output directory")->required();
  region->add_option("--grid", region_grid, "Grid points per curve")->check(CLI::Range(2, 1000000));
  region->add_option("--seed", region_seed, "Seed recorded in the manifest");

  // sweep-hybrid
  auto* sweep = app.add_subcommand("sweep-hybrid", "Fixed-alpha_t hybrid sweeps over beta_t");
  InstanceFlags sweep_inst;
  sweep_inst.attach(sweep, true);
  std::string sweep_out;
  std::vector<double> sweep_alphas;
  int sweep_nbeta = 200;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--alpha-t", sweep_alphas, "Analog S1 weights, one sweep each")->required();
  sweep->add_option("--nbeta", sweep_nbeta, "Points per sweep")->check(CLI::Range(2, 1000000));
  sweep->add_option("--seed", sweep_seed, "Seed recorded in the manifest");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the closed-form invariant suite");
  InstanceFlags verify_inst;
  verify_inst.attach(verify, false);
  bool verify_has_inst = false;
  verify->callback([&] {
    verify_has_inst = verify->count("--P") || verify->count("--sigma2") ||
                      verify->count("--rho") || verify->count("--N1") || verify->count("--N2");
  });
  int verify_randomized = 0;
  std::string verify_profile = "full";
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  bool verify_corrupt = false;
  verify->add_option("--randomized", verify_randomized, "Also draw N seeded random instances")
      ->check(CLI::Range(0, 100000));
  verify->add_option("--profile", verify_profile, "Check sizes: fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--seed", verify_seed, "Seed for the randomized instances");
  verify->add_option("--out", verify_out, "Directory for verify_report.json");
  verify
      ->add_flag("--selftest-corrupt-frontier", verify_corrupt,
                 "Corrupt the frontier to prove the suite can fail")
      ->group("");  // hidden

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo validation of one scheme");
  InstanceFlags sim_inst;
  sim_inst.attach(simulate, true);
  std::string sim_scheme = "hybrid";
  std::string sim_family = "gaussian";
  std::optional<double> sim_alpha, sim_d1, sim_alpha_t, sim_beta_t;
  std::int64_t sim_n = 100000;
  int sim_k = 5;
  int sim_threads = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  simulate->add_option("--scheme", sim_scheme, "uncoded | hybrid | hybrid-explicit")
      ->check(CLI::IsMember({"uncoded", "hybrid", "hybrid-explicit"}));
  simulate->add_option("--family", sim_family, "gaussian | uniform | laplace")
      ->check(CLI::IsMember({"gaussian", "uniform", "laplace"}));
  simulate->add_option("--alpha", sim_alpha, "Uncoded weight on S1");
  simulate->add_option("--d1", sim_d1, "Target first-user distortion");
  simulate->add_option("--alpha-t", sim_alpha_t, "Explicit hybrid analog weight on S1");
  simulate->add_option("--beta-t", sim_beta_t, "Explicit hybrid analog weight on S2");
  simulate->add_option("--n", sim_n, "Sample count")->check(CLI::Range(std::int64_t{1},
                                                                       std::int64_t{1} << 40));
  simulate->add_option("--k", sim_k, "kNN order for the entropy estimator")
      ->check(CLI::Range(1, 1000));
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--threads", sim_threads, "Worker threads (0 = auto)");
  simulate->add_option("--out", sim_out, "Directory for simulate_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bcregion::kExitUsageError;
  }

  try {
    if (region->parsed()) {
      bcregion::RegionOptions options;
      options.inst = region_inst.build();
      options.out_dir = region_out;
      options.n_grid = region_grid;
      options.seed = region_seed;
      return bcregion::cmd_region(options);
    }
    if (sweep->parsed()) {
      bcregion::SweepHybridOptions options;
      options.inst = sweep_inst.build();
      options.out_dir = sweep_out;
      options.alpha_ts = sweep_alphas;
      options.n_beta = sweep_nbeta;
      options.seed = sweep_seed;
      return bcregion::cmd_sweep_hybrid(options);
    }
    if (verify->parsed()) {
      bcregion::VerifyCmdOptions options;
      if (verify_has_inst) options.inst = verify_inst.build();
      if (!options.inst && verify_randomized == 0) {
        std::cerr << "verify: give an instance (--P ... --N2) and/or --randomized N\n";
        return bcregion::kExitUsageError;
      }
      options.randomized_instances = verify_randomized;
      options.profile = verify_profile == "fast" ? bcregion::VerifyProfile::Fast
                                                 : bcregion::VerifyProfile::Full;
      options.seed = verify_seed;
      if (!verify_out.empty()) options.out_dir = verify_out;
      options.corrupt_frontier = verify_corrupt;
      return bcregion::cmd_verify(options);
    }
    if (simulate->parsed()) {
      bcregion::SimulateOptions options;
      options.inst = sim_inst.build();
      if (sim_scheme == "uncoded") {
        options.scheme = bcregion::SimScheme::Uncoded;
      } else if (sim_scheme == "hybrid") {
        options.scheme = bcregion::SimScheme::HybridOptimal;
      } else {
        options.scheme = bcregion::SimScheme::HybridExplicit;
      }
      options.alpha = sim_alpha;
      options.d1 = sim_d1;
      options.alpha_t = sim_alpha_t;
      options.beta_t = sim_beta_t;
      if (sim_family == "gaussian") {
        options.family = bcregion::DistributionFamily::Gaussian;
      } else if (sim_family == "uniform") {
        options.family = bcregion::DistributionFamily::UniformLinear;
      } else {
        options.family = bcregion::DistributionFamily::LaplaceLinear;
      }
      options.n = sim_n;
      options.k_nn = sim_k;
      options.seed = sim_seed;
      options.threads = sim_threads;
      if (!sim_out.empty()) options.out_dir = sim_out;
      return bcregion::cmd_simulate(options);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bcregion::kExitUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bcregion::kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return bcregion::kExitUsageError;
}
