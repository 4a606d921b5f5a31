#ifndef AGEBAYES_INDICATOR_MODEL_HPP
#define AGEBAYES_INDICATOR_MODEL_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agebayes {

/// Observable state of one age indicator.
enum class IndicatorState : int { Immature = 0, Mature = 1, Missing = 2 };

inline constexpr std::size_t kStatesPerIndicator = 3;
inline constexpr std::array<IndicatorState, 3> kAllStates{
    IndicatorState::Immature, IndicatorState::Mature, IndicatorState::Missing};

std::string_view to_string(IndicatorState s);

/// Closed age interval over which a missingness line must stay a probability.
struct AgeRange {
  double lo;
  double hi;
};

/// Parameters of one indicator: probit maturity curve plus a linear-in-age
/// probability of the indicator not being assessable.
struct IndicatorParams {
  double location = 0.0;        // age at which half of assessable cases are mature
  double scale = 1.0;           // probit spread, years
  double missing_at_20 = 0.0;   // P(missing) at age 20
  double missing_slope = 0.0;   // change in P(missing) per year

  static constexpr std::size_t kDim = 4;
  std::array<double, kDim> to_array() const {
    return {location, scale, missing_at_20, missing_slope};
  }
  static IndicatorParams from_array(const std::array<double, kDim>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
  bool operator==(const IndicatorParams&) const = default;
};

/// True when scale > 0 and the missingness line lies in [0, 1] on `range`.
bool is_valid(const IndicatorParams& params, AgeRange range);

/// Throws ModelError unless is_valid(params, range).
void require_valid(const IndicatorParams& params, AgeRange range);

/// Normal priors on location and scale, truncated to scale > 0; flat in the
/// missingness coordinates.
struct IndicatorPrior {
  double location_mean = 0.0;
  double location_sd = 1.0;
  double scale_mean = 1.0;
  double scale_sd = 1.0;
  std::string label;

  IndicatorParams center() const { return {location_mean, scale_mean, 0.0, 0.0}; }
  bool operator==(const IndicatorPrior&) const = default;
};

double prob_missing(const IndicatorParams& params, double age);
double prob_state(const IndicatorParams& params, double age, IndicatorState state);

/// All three state probabilities at once; entries indexed by IndicatorState.
std::array<double, 3> state_probs(const IndicatorParams& params, double age);

/// Probability of a full combination of states given age, assuming the
/// indicators are conditionally independent given age.
double prob_vector(std::span<const IndicatorParams> params, double age,
                   std::span<const IndicatorState> states);

/// Unnormalized log prior density; -infinity when scale <= 0.
double prior_logdensity(const IndicatorPrior& prior, const IndicatorParams& params);

/// Built-in priors: Lucas, Mincer, WideTeeth, Ottow, WideKnees, OttowIIIc.
const std::vector<IndicatorPrior>& builtin_priors();

/// Lookup by label (case-insensitive). Throws UsageError if unknown.
IndicatorPrior builtin_prior(std::string_view label);

// Combination helpers. A combination of K indicator states is indexed as
// sum_k state_k * 3^k, so indicator 0 varies fastest.
std::size_t combination_count(std::size_t indicators);
std::vector<IndicatorState> decode_combination(std::size_t index, std::size_t indicators);
std::size_t encode_combination(std::span<const IndicatorState> states);

}  // namespace agebayes

#endif
