#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bcregion/model.hpp"
#include "bcregion/simulate.hpp"
#include "bcregion/verify.hpp"

namespace bcregion {

// Exit codes shared by every subcommand.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitUsageError = 2;

struct RegionOptions {
  ProblemInstance inst{};
  std::filesystem::path out_dir;
  int n_grid = 400;
  std::uint64_t seed = 0;
};

/// Emits one CSV per curve (optimal frontier, uncoded frontier, hybrid bound,
/// genie outer bound, separation baseline, trivial analog point) plus a
/// manifest JSON with the instance, regime report, file list and seed.
int cmd_region(const RegionOptions& options);

struct SweepHybridOptions {
  ProblemInstance inst{};
  std::filesystem::path out_dir;
  std::vector<double> alpha_ts;
  int n_beta = 200;
  std::uint64_t seed = 0;
};

/// One fixed-alpha_t sweep curve per requested alpha_t; infeasible values are
/// reported in the manifest and on stderr, the rest are still emitted.
int cmd_sweep_hybrid(const SweepHybridOptions& options);

struct VerifyCmdOptions {
  std::optional<ProblemInstance> inst;  // absent => randomized-only run
  int randomized_instances = 0;
  VerifyProfile profile = VerifyProfile::Full;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> out_dir;  // write verify_report.json here
  bool corrupt_frontier = false;                 // self-test hook
};

/// Runs the invariant suite; prints one line per check and returns 1 on any
/// failure. The JSON report carries the margins.
int cmd_verify(const VerifyCmdOptions& options);

enum class SimScheme { Uncoded, HybridOptimal, HybridExplicit };

struct SimulateOptions {
  ProblemInstance inst{};
  SimScheme scheme = SimScheme::HybridOptimal;
  std::optional<double> alpha;    // uncoded weight
  std::optional<double> d1;      // target distortion (uncoded or optimal hybrid)
  std::optional<double> alpha_t;  // explicit hybrid knobs
  std::optional<double> beta_t;
  DistributionFamily family = DistributionFamily::Gaussian;
  std::int64_t n = 100000;
  int k_nn = 5;
  std::uint64_t seed = 0;
  int threads = 0;
  std::optional<std::filesystem::path> out_dir;  // write simulate_report.json here
};

/// Empirical vs analytic distortions with standard errors; non-Gaussian
/// families additionally get the worst-case entropy report. Returns 1 when a
/// consistency verdict fails.
int cmd_simulate(const SimulateOptions& options);

}  // namespace bcregion
