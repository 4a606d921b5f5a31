// Full sampler against brute-force enumeration on an instance small enough
// to integrate exactly: three grid ages, two binary indicators, six persons.
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "agebayes/inference.hpp"
#include "agebayes/normal.hpp"

using namespace agebayes;

namespace {

constexpr std::size_t kT = 3;
const std::vector<std::size_t> kRows{0, 1, 3, 4};  // (I,I), (M,I), (I,M), (M,M)

using TauKey = std::vector<std::int64_t>;  // cells of the four active rows, row-major

void enumerate_rows(const std::vector<std::int64_t>& y, std::size_t r, TauKey& cur, std::vector<TauKey>& out) {
  if (r == y.size()) {
    out.push_back(cur);
    return;
  }
  for (std::int64_t a = 0; a <= y[r]; ++a) {
    for (std::int64_t b = 0; a + b <= y[r]; ++b) {
      cur.insert(cur.end(), {a, b, y[r] - a - b});
      enumerate_rows(y, r + 1, cur, out);
      cur.resize(cur.size() - 3);
    }
  }
}

// log of the integral over (location, scale) of prior times
// prod_j Phi(z_j)^mature_j (1 - Phi(z_j))^immature_j, midpoint rule.
double log_theta_integral(const IndicatorPrior& prior, const std::vector<double>& ages,
                          const std::array<std::int64_t, 6>& counts) {
  constexpr int n = 320;
  const double lo_l = prior.location_mean - 7.0 * prior.location_sd;
  const double hi_l = prior.location_mean + 7.0 * prior.location_sd;
  const double hi_s = prior.scale_mean + 7.0 * prior.scale_sd;
  const double dl = (hi_l - lo_l) / n;
  const double ds = hi_s / n;
  double acc = 0.0;
  for (int a = 0; a < n; ++a) {
    const double loc = lo_l + (a + 0.5) * dl;
    const double wl = normal_pdf((loc - prior.location_mean) / prior.location_sd);
    for (int b = 0; b < n; ++b) {
      const double s = (b + 0.5) * ds;
      const double ws = normal_pdf((s - prior.scale_mean) / prior.scale_sd);
      double lik = 1.0;
      for (std::size_t j = 0; j < kT; ++j) {
        const double p = normal_cdf((ages[j] - loc) / s);
        lik *= std::pow(p, static_cast<double>(counts[2 * j])) * std::pow(1.0 - p, static_cast<double>(counts[2 * j + 1]));
      }
      acc += wl * ws * lik;
    }
  }
  return std::log(acc);
}

}  // namespace

TEST_CASE("sampler reproduces the exact latent-count posterior on a tiny instance") {
  const std::vector<double> ages{16.0, 18.0, 20.0};
  const std::vector<IndicatorPrior> priors{{18.0, 1.0, 1.5, 0.5, "teeth"}, {17.5, 1.0, 1.0, 0.5, "knee"}};
  const double alpha = 3.0;

  ObservedTable y = ObservedTable::zeros(2);
  const std::vector<std::int64_t> row_counts{2, 1, 1, 2};
  for (std::size_t r = 0; r < kRows.size(); ++r) y.counts[kRows[r]] = row_counts[r];

  // Exact posterior over tau.
  std::vector<TauKey> states;
  TauKey cur;
  enumerate_rows(row_counts, 0, cur, states);
  REQUIRE(states.size() == 6 * 3 * 3 * 6);

  std::map<std::array<std::int64_t, 6>, double> cache[2];
  std::vector<double> logw;
  for (const auto& tau : states) {
    double lw = 0.0;
    std::array<std::int64_t, kT> col{};
    std::array<std::array<std::int64_t, 6>, 2> marg{};
    for (std::size_t r = 0; r < kRows.size(); ++r) {
      const auto states_r = decode_combination(kRows[r], 2);
      for (std::size_t j = 0; j < kT; ++j) {
        const std::int64_t c = tau[r * kT + j];
        lw -= std::lgamma(static_cast<double>(c) + 1.0);
        col[j] += c;
        for (std::size_t k = 0; k < 2; ++k) {
          marg[k][2 * j + (states_r[k] == IndicatorState::Mature ? 0 : 1)] += c;
        }
      }
    }
    for (std::size_t j = 0; j < kT; ++j) lw += std::lgamma(static_cast<double>(col[j]) + alpha / kT);
    for (std::size_t k = 0; k < 2; ++k) {
      auto it = cache[k].find(marg[k]);
      if (it == cache[k].end()) it = cache[k].emplace(marg[k], log_theta_integral(priors[k], ages, marg[k])).first;
      lw += it->second;
    }
    logw.push_back(lw);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double& w : logw) z += (w = std::exp(w - top));
  std::map<TauKey, double> exact;
  for (std::size_t s = 0; s < states.size(); ++s) exact[states[s]] = logw[s] / z;

  // Sampler with missingness held at zero.
  ChainConfig config;
  config.cycles = 4'000'000;
  config.burn_in = 1000;
  config.adapt = false;
  config.seed = 20240607;
  config.priors = priors;
  config.profile_prior = {alpha, AgeGrid::from_ages(ages)};
  config.proposal_sds.assign(2, {0.8, 0.5, 0.0, 0.0});
  config.initial_theta = std::vector<IndicatorParams>{priors[0].center(), priors[1].center()};
  Sampler sampler(y, config);
  for (long c = 0; c < config.burn_in; ++c) sampler.cycle();
  std::map<TauKey, double> freq;
  TauKey key(kRows.size() * kT);
  bool missingness_fixed = true;
  for (long c = config.burn_in; c < config.cycles; ++c) {
    sampler.cycle();
    const auto& tau = sampler.state().tau;
    for (std::size_t r = 0; r < kRows.size(); ++r)
      for (std::size_t j = 0; j < kT; ++j) key[r * kT + j] = tau(kRows[r], j);
    freq[key] += 1.0;
    for (const auto& p : sampler.state().theta) missingness_fixed = missingness_fixed && p.missing_at_20 == 0.0;
  }
  const double n = static_cast<double>(config.cycles - config.burn_in);
  double tv = 0.0;
  for (const auto& [k, p] : exact) {
    const auto it = freq.find(k);
    tv += std::abs(p - (it == freq.end() ? 0.0 : it->second / n));
  }
  tv *= 0.5;
  MESSAGE("total variation distance " << tv);
  CHECK(missingness_fixed);
  CHECK(freq.size() <= exact.size());
  CHECK(tv <= 0.02);
}
