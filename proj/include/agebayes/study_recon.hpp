#ifndef AGEBAYES_STUDY_RECON_HPP
#define AGEBAYES_STUDY_RECON_HPP

#include <string>
#include <string_view>
#include <vector>

namespace agebayes {

/// Half-open age interval [lo, hi) with the number examined and the number
/// found mature.
struct AgeBin {
  double lo = 0.0;
  double hi = 0.0;
  int n_total = 0;
  int n_mature = 0;
};

/// Study published as counts per age bin.
struct BinnedStudy {
  std::string name;
  std::vector<AgeBin> bins;
};

struct FiveNumberSummary {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

/// One indicator stage of a study that reports age quantiles per stage.
/// `reassigned_mature` counts members re-flagged as mature from the top of
/// the group's age range (only meaningful when `mature` is false).
struct StageGroup {
  std::string stage;
  int n = 0;
  FiveNumberSummary quantiles;
  bool mature = false;
  int reassigned_mature = 0;
};

struct QuantileStudy {
  std::string name;
  std::vector<StageGroup> groups;
  double age_floor = 0.0;
  double age_ceiling = 0.0;
};

struct CohortRecord {
  double age = 0.0;
  bool mature = false;
};

/// Individual-level (age, maturity) records.
struct RawCohort {
  std::vector<CohortRecord> records;
};

/// Every bin contributes n_total records at its midpoint, n_mature mature.
RawCohort reconstruct_binned(const BinnedStudy& study);

/// Per group of size n: normal scores at probabilities (r - 0.5)/n pushed
/// through the piecewise-linear map that sends the normal quantiles at
/// (0.5/n, 0.25, 0.5, 0.75, 1 - 0.5/n) to (min, q25, median, q75, max),
/// then clipped to [age_floor, age_ceiling]. Records within a group come
/// out in ascending age.
RawCohort reconstruct_quantiles(const QuantileStudy& study);

/// Re-flag round(fraction * n) members of `stage` as mature, taking them from
/// the top of the group's reconstructed age range.
QuantileStudy reassign_stage_fraction(const QuantileStudy& study, std::string_view stage,
                                      double fraction);

struct ProbitFit {
  double location = 0.0;
  double scale = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Maximum-likelihood fit of P(mature | age) = Phi((age - location) / scale).
/// Optimizes over (location, log scale) from (mean age, sd of age) and
/// requires the gradient norm to drop below 1e-8. Throws DataError for
/// one-class cohorts and ModelError on perfect separation or non-convergence.
ProbitFit fit_probit_mle(const RawCohort& cohort);

}  // namespace agebayes

#endif
