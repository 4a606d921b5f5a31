#include "agebayes/indicator_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "agebayes/error.hpp"
#include "agebayes/normal.hpp"

namespace agebayes {

std::string_view to_string(IndicatorState s) {
  switch (s) {
    case IndicatorState::Immature: return "immature";
    case IndicatorState::Mature: return "mature";
    case IndicatorState::Missing: return "missing";
  }
  return "?";
}

bool is_valid(const IndicatorParams& p, AgeRange range) {
  if (!(p.scale > 0.0) || !std::isfinite(p.location) || !std::isfinite(p.scale)) return false;
  // Linear in age, so checking the two ends covers the whole range.
  const double a = prob_missing(p, range.lo);
  const double b = prob_missing(p, range.hi);
  return a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0;
}

void require_valid(const IndicatorParams& p, AgeRange range) {
  if (is_valid(p, range)) return;
  std::ostringstream os;
  os << "invalid indicator parameters (" << p.location << ", " << p.scale << ", "
     << p.missing_at_20 << ", " << p.missing_slope << ") on ages [" << range.lo << ", "
     << range.hi << "]";
  throw ModelError(os.str());
}

double prob_missing(const IndicatorParams& p, double age) {
  return p.missing_at_20 + p.missing_slope * (age - 20.0);
}

std::array<double, 3> state_probs(const IndicatorParams& p, double age) {
  const double missing = prob_missing(p, age);
  const double z = (age - p.location) / p.scale;
  const double present = 1.0 - missing;
  const double mature = present * normal_cdf(z);
  // Immature is the remainder so the three values sum to one exactly.
  return {present - mature, mature, missing};
}

double prob_state(const IndicatorParams& p, double age, IndicatorState state) {
  return state_probs(p, age)[static_cast<std::size_t>(state)];
}

double prob_vector(std::span<const IndicatorParams> params, double age,
                   std::span<const IndicatorState> states) {
  if (params.size() != states.size()) {
    throw std::invalid_argument("prob_vector: one state per indicator required");
  }
  double prob = 1.0;
  for (std::size_t k = 0; k < params.size(); ++k) prob *= prob_state(params[k], age, states[k]);
  return prob;
}

double prior_logdensity(const IndicatorPrior& prior, const IndicatorParams& p) {
  if (!(p.scale > 0.0)) return -std::numeric_limits<double>::infinity();
  return normal_logpdf(p.location, prior.location_mean, prior.location_sd) +
         normal_logpdf(p.scale, prior.scale_mean, prior.scale_sd);
}

const std::vector<IndicatorPrior>& builtin_priors() {
  // Narrow priors use sd 0.2; wide ones four times that.
  static const std::vector<IndicatorPrior> priors{
      {18.6, 0.2, 0.7, 0.2, "Lucas"},
      {20.0, 0.2, 3.2, 0.2, "Mincer"},
      {19.3, 0.8, 2.0, 0.8, "WideTeeth"},
      {18.5, 0.2, 1.5, 0.2, "Ottow"},
      {18.5, 0.8, 1.5, 0.8, "WideKnees"},
      {17.8, 0.2, 1.7, 0.2, "OttowIIIc"},
  };
  return priors;
}

namespace {
bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}
}  // namespace

IndicatorPrior builtin_prior(std::string_view label) {
  for (const auto& p : builtin_priors()) {
    if (iequals(p.label, label)) return p;
  }
  throw UsageError("unknown prior label: " + std::string(label));
}

std::size_t combination_count(std::size_t indicators) {
  std::size_t v = 1;
  for (std::size_t k = 0; k < indicators; ++k) v *= kStatesPerIndicator;
  return v;
}

std::vector<IndicatorState> decode_combination(std::size_t index, std::size_t indicators) {
  std::vector<IndicatorState> states(indicators);
  for (std::size_t k = 0; k < indicators; ++k) {
    states[k] = static_cast<IndicatorState>(index % kStatesPerIndicator);
    index /= kStatesPerIndicator;
  }
  return states;
}

std::size_t encode_combination(std::span<const IndicatorState> states) {
  std::size_t index = 0;
  for (std::size_t k = states.size(); k-- > 0;) {
    index = index * kStatesPerIndicator + static_cast<std::size_t>(states[k]);
  }
  return index;
}

}  // namespace agebayes
