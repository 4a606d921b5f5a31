#include "agebayes/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agebayes {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Marsaglia-Tsang for shape >= 1, returning the log of the variate.
double log_gamma_ge1(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return std::log(d) + std::log(v);
    }
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
  engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  return Rng(splitmix64(s));
}

double Rng::uniform() {
  // 53 random bits mapped to (0, 1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

double Rng::log_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  if (shape >= 1.0) return log_gamma_ge1(*this, shape);
  // G(a) = G(a + 1) * U^(1/a)
  const double lg = log_gamma_ge1(*this, shape + 1.0);
  return lg + std::log(uniform()) / shape;
}

std::int64_t Rng::binomial(std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(engine_);
}

void multinomial(Rng& rng, std::int64_t trials, std::span<const double> weights,
                 std::span<std::int64_t> out) {
  if (out.size() != weights.size()) throw std::invalid_argument("multinomial: size mismatch");
  std::fill(out.begin(), out.end(), 0);
  if (trials <= 0) return;
  // Suffix sums avoid the drift of repeatedly subtracting from the total.
  std::vector<double> tail(weights.size() + 1, 0.0);
  for (std::size_t j = weights.size(); j-- > 0;) tail[j] = tail[j + 1] + weights[j];
  if (!(tail[0] > 0.0)) throw std::invalid_argument("multinomial: weights sum to zero");
  std::int64_t remaining = trials;
  for (std::size_t j = 0; j < weights.size() && remaining > 0; ++j) {
    if (weights[j] <= 0.0) continue;
    if (!(tail[j + 1] > 0.0)) {
      out[j] = remaining;
      remaining = 0;
      break;
    }
    const double p = std::clamp(weights[j] / tail[j], 0.0, 1.0);
    const std::int64_t k = rng.binomial(remaining, p);
    out[j] = k;
    remaining -= k;
  }
}

std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha) {
  std::vector<double> logs(alpha.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    logs[j] = rng.log_gamma(alpha[j]);
    top = std::max(top, logs[j]);
  }
  double total = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logs) l /= total;
  return logs;
}

}  // namespace agebayes
