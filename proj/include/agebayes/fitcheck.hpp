#ifndef AGEBAYES_FITCHECK_HPP
#define AGEBAYES_FITCHECK_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "agebayes/indicator_model.hpp"
#include "agebayes/inference.hpp"
#include "agebayes/population.hpp"
#include "agebayes/random.hpp"

namespace agebayes {

/// Expected counts per combination under fixed parameters.
struct PredictedTable {
  std::size_t indicators = 2;
  std::vector<double> expected;

  double total() const;
};

PredictedTable predicted_table(std::span<const IndicatorParams> theta, const PopulationProfile& psi,
                               const AgeGrid& grid, std::int64_t total);

struct MissingnessFit {
  std::vector<IndicatorParams> theta;  // input maturity parameters with fitted missingness
  double log_likelihood = 0.0;         // multinomial, up to a constant
  bool converged = false;
  bool boundary = false;               // some missingness line touches 0 or 1 on the grid
  int iterations = 0;
};

/// Maximizes the multinomial likelihood of `y` over every indicator's
/// missingness line, holding maturity parameters and psi fixed. Lines are
/// parameterized by their values at the two ends of the grid, which keeps
/// them inside [0, 1] across the grid.
MissingnessFit fit_missingness_mle(const ObservedTable& y, std::span<const IndicatorParams> theta,
                                   const PopulationProfile& psi, const AgeGrid& grid);

/// Pearson chi-square sum (obs - exp)^2 / exp over combinations. A cell with
/// zero expectation contributes +inf if observed, nothing otherwise.
double pearson_statistic(std::span<const std::int64_t> observed, std::span<const double> expected);

struct BootstrapResult {
  double statistic = 0.0;
  long replicates = 0;
  long at_least_as_large = 0;
  double p_value = 1.0;
};

/// Parametric bootstrap: multinomial tables of the observed size drawn from
/// the predicted cell fractions; p = (1 + #{sim >= obs}) / (1 + replicates).
/// Replicates are split into fixed blocks with their own streams, so the
/// result does not depend on `jobs`.
BootstrapResult bootstrap_pvalue(const ObservedTable& y, const PredictedTable& predicted, long replicates,
                                 Rng& rng, int jobs = 1);

}  // namespace agebayes

#endif
