#include "agebayes/fitcheck.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "agebayes/error.hpp"
#include "agebayes/normal.hpp"
#include "agebayes/optimize.hpp"

namespace agebayes {

double PredictedTable::total() const {
  double s = 0.0;
  for (double e : expected) s += e;
  return s;
}

PredictedTable predicted_table(std::span<const IndicatorParams> theta, const PopulationProfile& psi,
                               const AgeGrid& grid, std::int64_t total) {
  const auto r = cell_prob_table(theta, psi, grid);
  const std::size_t T = grid.size();
  PredictedTable table{theta.size(), std::vector<double>(r.size() / T, 0.0)};
  for (std::size_t i = 0; i < table.expected.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < T; ++j) s += r[i * T + j];
    table.expected[i] = static_cast<double>(total) * s;
  }
  return table;
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

MissingnessFit fit_missingness_mle(const ObservedTable& y, std::span<const IndicatorParams> theta,
                                   const PopulationProfile& psi, const AgeGrid& grid) {
  const std::size_t K = theta.size();
  if (K != y.indicators) throw UsageError("one parameter set per indicator required");
  const std::size_t T = grid.size();
  const std::size_t V = y.combinations();
  const double lo = grid.range().lo;
  const double hi = grid.range().hi;
  std::vector<double> t(T);
  for (std::size_t j = 0; j < T; ++j) t[j] = (grid[j] - lo) / (hi - lo);

  // Maturity curves stay fixed.
  std::vector<std::vector<double>> cdf(K, std::vector<double>(T));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < T; ++j) cdf[k][j] = normal_cdf((grid[j] - theta[k].location) / theta[k].scale);
  }
  std::vector<std::vector<IndicatorState>> combos;
  for (std::size_t i = 0; i < V; ++i) combos.push_back(decode_combination(i, K));

  // x = (u_lo, u_hi) per indicator; endpoint value = logistic(u).
  const Objective nll = [&](std::span<const double> x, std::span<double> grad) {
    std::vector<double> ends(2 * K);
    for (std::size_t c = 0; c < ends.size(); ++c) ends[c] = logistic(x[c]);
    // p[k][z][j] and dp/dm[k][z][j]
    std::vector<double> p(K * 3 * T);
    std::vector<double> dp(K * 3 * T);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < T; ++j) {
        const double m = ends[2 * k] + (ends[2 * k + 1] - ends[2 * k]) * t[j];
        const double phi = cdf[k][j];
        p[(k * 3 + 0) * T + j] = (1.0 - m) * (1.0 - phi);
        p[(k * 3 + 1) * T + j] = (1.0 - m) * phi;
        p[(k * 3 + 2) * T + j] = m;
        dp[(k * 3 + 0) * T + j] = -(1.0 - phi);
        dp[(k * 3 + 1) * T + j] = -phi;
        dp[(k * 3 + 2) * T + j] = 1.0;
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double value = 0.0;
    std::vector<double> dq(2 * K);
    for (std::size_t i = 0; i < V; ++i) {
      if (y.counts[i] == 0) continue;
      double q = 0.0;
      std::fill(dq.begin(), dq.end(), 0.0);
      for (std::size_t j = 0; j < T; ++j) {
        double prod = psi.weights[j];
        for (std::size_t k = 0; k < K; ++k) prod *= p[(k * 3 + static_cast<std::size_t>(combos[i][k])) * T + j];
        q += prod;
        for (std::size_t k = 0; k < K; ++k) {
          const std::size_t z = static_cast<std::size_t>(combos[i][k]);
          double others = psi.weights[j];
          for (std::size_t l = 0; l < K; ++l) {
            if (l != k) others *= p[(l * 3 + static_cast<std::size_t>(combos[i][l])) * T + j];
          }
          const double d = others * dp[(k * 3 + z) * T + j];
          dq[2 * k] += d * (1.0 - t[j]);
          dq[2 * k + 1] += d * t[j];
        }
      }
      if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
      const double n = static_cast<double>(y.counts[i]);
      value -= n * std::log(q);
      for (std::size_t c = 0; c < 2 * K; ++c) {
        grad[c] -= n * dq[c] / q * ends[c] * (1.0 - ends[c]);
      }
    }
    return value;
  };

  std::vector<double> x0(2 * K);
  const double total = static_cast<double>(y.total());
  for (std::size_t k = 0; k < K; ++k) {
    double missing = 0.0;
    for (std::size_t i = 0; i < V; ++i) {
      if (combos[i][k] == IndicatorState::Missing) missing += y.counts[i];
    }
    const double frac = std::clamp(total > 0.0 ? missing / total : 0.0, 1e-3, 1.0 - 1e-3);
    x0[2 * k] = x0[2 * k + 1] = logit(frac);
  }
  const auto res = minimize_bfgs(nll, x0, BfgsOptions{1e-6, 2000});

  MissingnessFit fit;
  fit.theta.assign(theta.begin(), theta.end());
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.log_likelihood = -res.value;
  for (std::size_t k = 0; k < K; ++k) {
    const double a = logistic(res.x[2 * k]);
    const double b = logistic(res.x[2 * k + 1]);
    const double slope = (b - a) / (hi - lo);
    fit.theta[k].missing_slope = slope;
    fit.theta[k].missing_at_20 = a + slope * (20.0 - lo);
    for (double e : {a, b}) {
      if (e < 1e-6 || e > 1.0 - 1e-6) fit.boundary = true;
    }
  }
  return fit;
}

double pearson_statistic(std::span<const std::int64_t> observed, std::span<const double> expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double o = static_cast<double>(observed[i]);
    const double e = expected[i];
    if (e <= 0.0) {
      if (o > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    stat += (o - e) * (o - e) / e;
  }
  return stat;
}

BootstrapResult bootstrap_pvalue(const ObservedTable& y, const PredictedTable& predicted, long replicates,
                                 Rng& rng, int jobs) {
  if (replicates < 1) throw UsageError("bootstrap needs at least one replicate");
  if (predicted.expected.size() != y.counts.size()) throw DataError("table sizes differ");
  const std::int64_t n = y.total();
  const double expected_total = predicted.total();
  if (!(expected_total > 0.0)) throw ModelError("predicted table is empty");

  // Expected counts rescaled to the observed total.
  std::vector<double> expected(predicted.expected);
  for (double& e : expected) e *= static_cast<double>(n) / expected_total;

  BootstrapResult result;
  result.replicates = replicates;
  result.statistic = pearson_statistic(y.counts, expected);
  if (std::isinf(result.statistic)) {
    result.p_value = 1.0 / (1.0 + static_cast<double>(replicates));
    return result;
  }

  constexpr long kBlocks = 64;
  std::vector<std::uint64_t> block_seeds(kBlocks);
  for (auto& s : block_seeds) s = rng.engine()();
  std::vector<long> exceed(kBlocks, 0);
  std::atomic<long> next{0};
  auto worker = [&] {
    std::vector<std::int64_t> sim(expected.size());
    for (long b; (b = next.fetch_add(1)) < kBlocks;) {
      Rng block_rng(block_seeds[static_cast<std::size_t>(b)]);
      const long begin = replicates * b / kBlocks;
      const long end = replicates * (b + 1) / kBlocks;
      for (long r = begin; r < end; ++r) {
        multinomial(block_rng, n, expected, sim);
        if (pearson_statistic(sim, expected) >= result.statistic) ++exceed[static_cast<std::size_t>(b)];
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(kBlocks));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (long e : exceed) result.at_least_as_large += e;
  result.p_value = (1.0 + static_cast<double>(result.at_least_as_large)) /
                   (1.0 + static_cast<double>(replicates));
  return result;
}

}  // namespace agebayes
