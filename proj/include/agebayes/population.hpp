#ifndef AGEBAYES_POPULATION_HPP
#define AGEBAYES_POPULATION_HPP

#include <span>
#include <string>
#include <vector>

#include "agebayes/indicator_model.hpp"
#include "agebayes/random.hpp"

namespace agebayes {

/// Gamma(shape, rate) shifted by `shift` and truncated to [lower, upper].
struct TruncatedGammaSpec {
  double shape = 4.0;
  double rate = 1.0;
  double shift = 15.0;
  double lower = 15.0;
  double upper = 30.0;

  double cdf(double age) const;
  bool operator==(const TruncatedGammaSpec&) const = default;
};

/// Ages x_1 < ... < x_T at equal quantile spacing of a target distribution.
class AgeGrid {
 public:
  /// x_i solves F(x_i) = i / T by bisection; x_T is the upper bound.
  static AgeGrid build(const TruncatedGammaSpec& target, int points);
  /// Grid from explicit ages (strictly increasing); no target distribution.
  static AgeGrid from_ages(std::vector<double> ages);

  std::span<const double> ages() const { return ages_; }
  double operator[](std::size_t j) const { return ages_[j]; }
  std::size_t size() const { return ages_.size(); }
  AgeRange range() const { return {ages_.front(), ages_.back()}; }

  /// Descriptor of the target distribution, or "explicit".
  std::string description() const;
  bool has_target() const { return has_target_; }
  const TruncatedGammaSpec& target() const { return target_; }

  /// Same grid with every age moved by `offset` years.
  AgeGrid shifted(double offset) const;

  bool operator==(const AgeGrid&) const = default;

 private:
  std::vector<double> ages_;
  TruncatedGammaSpec target_{};
  bool has_target_ = false;
};

/// Probability vector over the grid ages.
struct PopulationProfile {
  std::vector<double> weights;

  static PopulationProfile uniform(std::size_t points);
  /// Mass on grid ages <= age.
  double cumulative_at(const AgeGrid& grid, double age) const;
  /// Running sums psi_1, psi_1 + psi_2, ...
  std::vector<double> cumulative() const;
  bool operator==(const PopulationProfile&) const = default;
};

/// Symmetric Dirichlet(alpha / T, ..., alpha / T) prior over profiles.
struct ProfilePrior {
  double alpha = 3.0;
  AgeGrid grid;

  double cell_concentration() const { return alpha / static_cast<double>(grid.size()); }
};

PopulationProfile sample_prior_profile(const ProfilePrior& prior, Rng& rng);

/// Pointwise quantiles across samples of the cumulative profile curve.
struct ProfileBands {
  std::vector<double> ages;
  std::vector<double> probs;                // requested probabilities
  std::vector<std::vector<double>> bands;   // bands[age][prob]
  std::vector<double> median;               // per age
};

ProfileBands profile_quantile_bands(std::span<const PopulationProfile> samples, const AgeGrid& grid,
                                    std::span<const double> probs);

}  // namespace agebayes

#endif
