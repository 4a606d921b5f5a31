#ifndef AGEBAYES_RANDOM_HPP
#define AGEBAYES_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace agebayes {

/// Seeded random stream. All samplers take one of these explicitly so that
/// callers control stream splitting; a given seed reproduces every draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived deterministically from (seed, stream).
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Logarithm of a Gamma(shape, 1) variate. Stays finite for tiny shapes,
  /// where the variate itself underflows.
  double log_gamma(double shape);
  std::int64_t binomial(std::int64_t trials, double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draw counts summing to `trials` with probabilities proportional to
/// `weights` (conditional-binomial method). Weights need not be normalized
/// but must be nonnegative with a positive sum when trials > 0.
void multinomial(Rng& rng, std::int64_t trials, std::span<const double> weights,
                 std::span<std::int64_t> out);

/// Dirichlet draw with the given concentration parameters.
std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha);

}  // namespace agebayes

#endif
