#include "bcregion/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bcregion {

namespace {

// Fixed sub-batch partitioning: every block derives its own seed, so batches
// are bit-identical for a given seed independent of the thread count.
constexpr std::int64_t kBlock = 1 << 16;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (0xA511E9B3 + block)));
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 16u));
}

struct Welford {
  // Plain sums are fine at these sizes; kept per-column for one-pass stats.
  double sum = 0.0;
  double sumsq = 0.0;
  std::int64_t n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double se_of_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, sumsq / static_cast<double>(n) - m * m);
    return std::sqrt(var / static_cast<double>(n));
  }
};

}  // namespace

std::string_view to_string(DistributionFamily family) {
  switch (family) {
    case DistributionFamily::Gaussian: return "gaussian";
    case DistributionFamily::UniformLinear: return "uniform-linear";
    case DistributionFamily::LaplaceLinear: return "laplace-linear";
  }
  return "unknown";
}

SampleBatch sample_batch(const ProblemInstance& inst, const HybridParams& hp,
                         DistributionFamily family, std::int64_t n, std::uint64_t seed,
                         int threads) {
  if (n < 1) throw std::invalid_argument("sample_batch: n must be >= 1");

  SampleBatch batch;
  batch.n = n;
  batch.s1.resize(static_cast<std::size_t>(n));
  batch.s2.resize(static_cast<std::size_t>(n));
  batch.u.resize(static_cast<std::size_t>(n));
  batch.z1.resize(static_cast<std::size_t>(n));
  batch.z2.resize(static_cast<std::size_t>(n));

  // Cholesky factor of the 2x2 source covariance.
  const double l11 = std::sqrt(inst.sigma2);
  const double l21 = inst.rho * l11;
  const double l22 = std::sqrt(inst.sigma2 * (1.0 - inst.rho * inst.rho));
  const double sz1 = std::sqrt(inst.N1);
  const double sz2 = std::sqrt(inst.N2);
  const double su = std::sqrt(hp.Q);

  const std::int64_t n_blocks = (n + kBlock - 1) / kBlock;
  auto fill_blocks = [&](std::int64_t first, std::int64_t stride) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-std::numbers::sqrt3, std::numbers::sqrt3);
    std::uniform_real_distribution<double> centered(-0.5, 0.5);
    constexpr double laplace_scale = 0.7071067811865476;  // 1/sqrt(2): unit variance

    for (std::int64_t b = first; b < n_blocks; b += stride) {
      auto rng = block_rng(seed, static_cast<std::uint64_t>(b));
      normal.reset();
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(n, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        double g1, g2, e1, e2;
        switch (family) {
          case DistributionFamily::Gaussian:
            g1 = normal(rng);
            g2 = normal(rng);
            e1 = normal(rng);
            e2 = normal(rng);
            break;
          case DistributionFamily::UniformLinear:
            g1 = uniform(rng);
            g2 = uniform(rng);
            e1 = uniform(rng);
            e2 = uniform(rng);
            break;
          case DistributionFamily::LaplaceLinear: {
            auto laplace = [&]() {
              const double v = centered(rng);
              return -laplace_scale * (v < 0.0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(v));
            };
            g1 = laplace();
            g2 = laplace();
            e1 = laplace();
            e2 = laplace();
            break;
          }
          default:
            throw std::invalid_argument("sample_batch: unknown family");
        }
        const auto k = static_cast<std::size_t>(i);
        batch.s1[k] = l11 * g1;
        batch.s2[k] = l21 * g1 + l22 * g2;
        batch.z1[k] = sz1 * e1;
        batch.z2[k] = sz2 * e2;
        batch.u[k] = su * normal(rng);  // U stays Gaussian for every family
      }
    }
  };

  const int n_threads = std::min<std::int64_t>(resolve_threads(threads), n_blocks);
  if (n_threads <= 1) {
    fill_blocks(0, 1);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back(fill_blocks, t, n_threads);
    }
    for (auto& w : workers) w.join();
  }
  return batch;
}

EmpiricalDistortions empirical_distortions(const ProblemInstance& inst, const HybridParams& hp,
                                           const SampleBatch& batch) {
  if (batch.n < 1 || batch.s1.size() != static_cast<std::size_t>(batch.n)) {
    throw std::invalid_argument("empirical_distortions: empty or inconsistent batch");
  }
  const SchemeDistortions analytic = hybrid_distortions(inst, hp);
  const double a1 = analytic.coeffs[0].a, b1 = analytic.coeffs[0].b;
  const double a2 = analytic.coeffs[1].a, b2 = analytic.coeffs[1].b;

  Welford err1, err2, power;
  for (std::int64_t i = 0; i < batch.n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double analog = hp.alpha_t * batch.s1[k] + hp.beta_t * batch.s2[k];
    const double xd = hp.gamma_t * (batch.s2[k] + batch.u[k]);
    const double x = analog + xd;
    const double w1 = analog + batch.z1[k];
    const double w2 = analog + batch.z2[k];
    const double e1 = batch.s1[k] - (a1 * xd + b1 * w1);
    const double e2 = batch.s2[k] - (a2 * xd + b2 * w2);
    err1.add(e1 * e1);
    err2.add(e2 * e2);
    power.add(x * x);
  }

  EmpiricalDistortions out;
  out.dist = analytic;
  out.dist.d1 = err1.mean();
  out.dist.d2 = err2.mean();
  out.se_d1 = err1.se_of_mean();
  out.se_d2 = err2.se_of_mean();
  out.var_x = power.mean();
  out.se_var_x = power.se_of_mean();
  out.n = batch.n;
  return out;
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be positive");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return result + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double knn_entropy(std::span<const double> samples, int k) {
  const auto n = static_cast<std::int64_t>(samples.size());
  if (k < 1) throw std::invalid_argument("knn_entropy: k must be >= 1");
  if (n < k + 1) throw std::invalid_argument("knn_entropy: need more than k samples");

  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());

  double log_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    // k-th nearest neighbor in sorted order via two-pointer merge.
    std::int64_t l = i - 1, r = i + 1;
    double eps = 0.0;
    for (int taken = 0; taken < k; ++taken) {
      const double dl = l >= 0 ? xs[i] - xs[l] : std::numeric_limits<double>::infinity();
      const double dr = r < n ? xs[r] - xs[i] : std::numeric_limits<double>::infinity();
      if (dl <= dr) {
        eps = dl;
        --l;
      } else {
        eps = dr;
        ++r;
      }
    }
    log_sum += std::log(std::max(eps, 1e-300));
  }
  return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + std::log(2.0) +
         log_sum / static_cast<double>(n);
}

double knn_entropy_2d(std::span<const double> x, std::span<const double> y, int k) {
  const auto n = static_cast<std::int64_t>(x.size());
  if (y.size() != x.size()) throw std::invalid_argument("knn_entropy_2d: length mismatch");
  if (k < 1) throw std::invalid_argument("knn_entropy_2d: k must be >= 1");
  if (n < k + 1) throw std::invalid_argument("knn_entropy_2d: need more than k samples");

  std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = {x[static_cast<std::size_t>(i)],
                                        y[static_cast<std::size_t>(i)]};
  }
  std::sort(pts.begin(), pts.end());

  // Sweep sorted by the first coordinate, pruning once the x-gap alone
  // exceeds the current k-th best distance.
  std::vector<double> best(static_cast<std::size_t>(k));
  double log_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    int filled = 0;
    double worst = std::numeric_limits<double>::infinity();
    auto offer = [&](double d2) {
      if (filled < k) {
        best[static_cast<std::size_t>(filled++)] = d2;
        if (filled == k) worst = *std::max_element(best.begin(), best.end());
      } else if (d2 < worst) {
        auto it = std::max_element(best.begin(), best.end());
        *it = d2;
        worst = *std::max_element(best.begin(), best.end());
      }
    };
    std::int64_t l = i - 1, r = i + 1;
    while (l >= 0 || r < n) {
      const double dl = l >= 0 ? pts[static_cast<std::size_t>(i)].first -
                                     pts[static_cast<std::size_t>(l)].first
                               : std::numeric_limits<double>::infinity();
      const double dr = r < n ? pts[static_cast<std::size_t>(r)].first -
                                    pts[static_cast<std::size_t>(i)].first
                              : std::numeric_limits<double>::infinity();
      const double dx = std::min(dl, dr);
      if (filled == k && dx * dx >= worst) break;
      std::int64_t j;
      if (dl <= dr) {
        j = l--;
      } else {
        j = r++;
      }
      const double ddx = pts[static_cast<std::size_t>(i)].first -
                         pts[static_cast<std::size_t>(j)].first;
      const double ddy = pts[static_cast<std::size_t>(i)].second -
                         pts[static_cast<std::size_t>(j)].second;
      offer(ddx * ddx + ddy * ddy);
    }
    log_sum += std::log(std::max(std::sqrt(worst), 1e-300));
  }
  return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
         std::log(std::numbers::pi) + 2.0 * log_sum / static_cast<double>(n);
}

WorstCaseReport worst_case_check(const ProblemInstance& inst, const HybridParams& hp,
                                 DistributionFamily family, std::int64_t n, int k_nn,
                                 std::uint64_t seed, int threads, double slack) {
  if (k_nn < 1) throw std::invalid_argument("worst_case_check: k_nn must be >= 1");
  if (n < 10 * static_cast<std::int64_t>(k_nn)) {
    throw std::invalid_argument("worst_case_check: n too small for the entropy estimator");
  }
  if (!(hp.gamma_t > 0.0)) {
    throw std::invalid_argument("worst_case_check: scheme has no digital layer (gamma_t = 0)");
  }

  WorstCaseReport report;
  report.family = family;
  report.n = n;
  report.k_nn = k_nn;
  report.slack = slack;
  report.analytic = hybrid_distortions(inst, hp);
  report.h_digital_noise =
      0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * hp.gamma_t * hp.gamma_t * hp.Q);

  const SampleBatch star = sample_batch(inst, hp, family, n, seed, threads);
  report.empirical = empirical_distortions(inst, hp, star);
  report.distortions_match =
      std::abs(report.empirical.dist.d1 - report.analytic.d1) <= 3.0 * report.empirical.se_d1 &&
      std::abs(report.empirical.dist.d2 - report.analytic.d2) <= 3.0 * report.empirical.se_d2;

  const bool is_control = family == DistributionFamily::Gaussian;
  const SampleBatch control =
      is_control ? SampleBatch{}
                 : sample_batch(inst, hp, DistributionFamily::Gaussian, n, seed, threads);

  const auto law = hybrid_joint_law(inst, hp.alpha_t, hp.beta_t, hp.gamma_t, hp.Q);
  const double var_xd = law.variance("Xd");

  auto column_residuals = [&](const SampleBatch& b, double c, int recv) {
    std::vector<double> res(static_cast<std::size_t>(b.n));
    const auto& z = recv == 0 ? b.z1 : b.z2;
    for (std::size_t i = 0; i < res.size(); ++i) {
      const double xd = hp.gamma_t * (b.s2[i] + b.u[i]);
      const double yk = hp.alpha_t * b.s1[i] + hp.beta_t * b.s2[i] + xd + z[i];
      res[i] = xd - c * yk;
    }
    return res;
  };
  auto column_y = [&](const SampleBatch& b, int recv) {
    std::vector<double> ys(static_cast<std::size_t>(b.n));
    const auto& z = recv == 0 ? b.z1 : b.z2;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double xd = hp.gamma_t * (b.s2[i] + b.u[i]);
      ys[i] = hp.alpha_t * b.s1[i] + hp.beta_t * b.s2[i] + xd + z[i];
    }
    return ys;
  };
  auto column_xd = [&](const SampleBatch& b) {
    std::vector<double> xd(static_cast<std::size_t>(b.n));
    for (std::size_t i = 0; i < xd.size(); ++i) xd[i] = hp.gamma_t * (b.s2[i] + b.u[i]);
    return xd;
  };

  for (int recv = 0; recv < 2; ++recv) {
    const char* y_label = recv == 0 ? "Y1" : "Y2";
    const double c = law.covariance("Xd", y_label) / law.variance(y_label);
    const double v_res = std::max(var_xd - c * law.covariance("Xd", y_label), 1e-300);

    auto& check = report.receiver[static_cast<std::size_t>(recv)];
    check.h_residual_gauss = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * v_res);

    const auto res_star = column_residuals(star, c, recv);
    check.h_residual_est = knn_entropy(res_star, k_nn);
    check.h_residual_ctrl = is_control
                                ? check.h_residual_est
                                : knn_entropy(column_residuals(control, c, recv), k_nn);

    const auto xd_star = column_xd(star);
    const auto y_star = column_y(star, recv);
    check.h_cond_jm = knn_entropy_2d(xd_star, y_star, k_nn) - knn_entropy(y_star, k_nn);

    check.margin = check.h_residual_est - report.h_digital_noise;
    check.rate_feasible = check.margin <= slack;
  }
  report.entropy_gap = report.receiver[1].h_residual_est - report.receiver[1].h_residual_ctrl;
  return report;
}

}  // namespace bcregion
