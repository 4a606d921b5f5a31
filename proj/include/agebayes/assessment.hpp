#ifndef AGEBAYES_ASSESSMENT_HPP
#define AGEBAYES_ASSESSMENT_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agebayes/indicator_model.hpp"
#include "agebayes/inference.hpp"
#include "agebayes/population.hpp"

namespace agebayes {

enum class Verdict { Over18, Under18 };

std::string_view to_string(Verdict v);

/// Mapping from each two-indicator combination (teeth, knee) to a verdict.
/// An empty entry means the combination is not classified.
struct ClassificationRule {
  std::string id;
  std::vector<std::optional<Verdict>> verdicts;  // indexed by combination

  /// Over 18 iff teeth or knee is mature. The double-missing cell is
  /// classified under 18 unless `exclude_double_missing`.
  static ClassificationRule rmv(bool exclude_double_missing = false);

  std::optional<Verdict> classify(std::size_t combination) const;
};

std::optional<Verdict> classify(IndicatorState teeth, IndicatorState knee, const ClassificationRule& rule);

/// "K+, T-" style label: knee first, + mature, - immature, 0 missing.
std::string combination_label(std::size_t combination);

/// Rao-Blackwellized P(age >= threshold | combination) under the state's
/// theta and psi. Empty when the combination has zero probability.
std::optional<double> prob_over_threshold(const ChainState& state, const AgeGrid& grid,
                                          std::size_t combination, double threshold);

/// Same for every combination at once.
std::vector<std::optional<double>> prob_over_threshold_all(std::span<const IndicatorParams> theta,
                                                           const PopulationProfile& psi,
                                                           const AgeGrid& grid, double threshold);

/// Equal-tailed interval from type-7 empirical quantiles at (1 - level)/2
/// and (1 + level)/2.
std::pair<double, double> credibility_interval(std::span<const double> samples, double level);

enum class Estimator { RaoBlackwell, LatentCounts };

struct ErrorRateRow {
  std::size_t combination = 0;
  std::string label;
  std::int64_t observed = 0;
  Verdict verdict = Verdict::Under18;
  std::size_t samples_used = 0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  int mean_percent() const;
  int lower_percent() const;
  int upper_percent() const;
};

struct ErrorRateTable {
  double threshold = 18.0;
  double level = 0.95;
  Estimator estimator = Estimator::RaoBlackwell;
  std::vector<ErrorRateRow> rows;  // over-18 cells first, then under-18
};

/// Per classified combination: per-sample error = P(under threshold) when
/// classified Over18, P(at or over threshold) otherwise; summarized by the
/// posterior mean and the equal-tailed interval over the pooled samples.
ErrorRateTable error_rate_table(std::span<const ChainOutput> chains, const ClassificationRule& rule,
                                double threshold, Estimator estimator = Estimator::RaoBlackwell,
                                double level = 0.95);

}  // namespace agebayes

#endif
