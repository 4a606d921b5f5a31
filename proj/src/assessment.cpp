#include "agebayes/assessment.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "agebayes/error.hpp"
#include "agebayes/stats.hpp"

namespace agebayes {

std::string_view to_string(Verdict v) { return v == Verdict::Over18 ? "over18" : "under18"; }

ClassificationRule ClassificationRule::rmv(bool exclude_double_missing) {
  ClassificationRule rule;
  rule.id = exclude_double_missing ? "rmv-exclude-double-missing" : "rmv";
  rule.verdicts.resize(combination_count(2));
  for (std::size_t i = 0; i < rule.verdicts.size(); ++i) {
    const auto s = decode_combination(i, 2);
    const bool any_mature = s[0] == IndicatorState::Mature || s[1] == IndicatorState::Mature;
    const bool both_missing = s[0] == IndicatorState::Missing && s[1] == IndicatorState::Missing;
    if (any_mature) {
      rule.verdicts[i] = Verdict::Over18;
    } else if (!(both_missing && exclude_double_missing)) {
      rule.verdicts[i] = Verdict::Under18;
    }
  }
  return rule;
}

std::optional<Verdict> ClassificationRule::classify(std::size_t combination) const {
  return verdicts.at(combination);
}

std::optional<Verdict> classify(IndicatorState teeth, IndicatorState knee, const ClassificationRule& rule) {
  const std::array<IndicatorState, 2> s{teeth, knee};
  return rule.classify(encode_combination(s));
}

std::string combination_label(std::size_t combination) {
  const auto s = decode_combination(combination, 2);
  auto sym = [](IndicatorState st) {
    switch (st) {
      case IndicatorState::Mature: return '+';
      case IndicatorState::Immature: return '-';
      case IndicatorState::Missing: return '0';
    }
    return '?';
  };
  return std::string("K") + sym(s[1]) + ", T" + sym(s[0]);
}

std::vector<std::optional<double>> prob_over_threshold_all(std::span<const IndicatorParams> theta,
                                                           const PopulationProfile& psi,
                                                           const AgeGrid& grid, double threshold) {
  const auto r = cell_prob_table(theta, psi, grid);
  const std::size_t T = grid.size();
  const std::size_t V = r.size() / T;
  std::vector<std::optional<double>> out(V);
  for (std::size_t i = 0; i < V; ++i) {
    double over = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
      total += r[i * T + j];
      if (grid[j] >= threshold) over += r[i * T + j];
    }
    if (total > 0.0) out[i] = over / total;
  }
  return out;
}

std::optional<double> prob_over_threshold(const ChainState& state, const AgeGrid& grid,
                                          std::size_t combination, double threshold) {
  return prob_over_threshold_all(state.theta, state.psi, grid, threshold).at(combination);
}

std::pair<double, double> credibility_interval(std::span<const double> samples, double level) {
  if (samples.empty()) throw DataError("credibility interval of an empty sample");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("credibility level must lie in (0, 1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

namespace {
int to_percent(double v) { return static_cast<int>(std::lround(100.0 * v)); }
}  // namespace

int ErrorRateRow::mean_percent() const { return to_percent(mean); }
int ErrorRateRow::lower_percent() const { return to_percent(lower); }
int ErrorRateRow::upper_percent() const { return to_percent(upper); }

ErrorRateTable error_rate_table(std::span<const ChainOutput> chains, const ClassificationRule& rule,
                                double threshold, Estimator estimator, double level) {
  if (chains.empty()) throw DataError("no chain output to summarize");
  const ObservedTable& y = chains.front().observed;
  if (y.indicators != 2) throw UsageError("error-rate tables need exactly two indicators");
  const std::size_t V = y.combinations();
  std::vector<std::vector<double>> errors(V);
  std::size_t total_samples = 0;
  for (const auto& chain : chains) {
    const AgeGrid& grid = chain.config.profile_prior.grid;
    const std::size_t T = grid.size();
    for (const auto& s : chain.samples) {
      ++total_samples;
      std::vector<std::optional<double>> over(V);
      if (estimator == Estimator::RaoBlackwell) {
        over = prob_over_threshold_all(s.theta, s.psi, grid, threshold);
      } else {
        if (s.tau.size() != V * T) throw DataError("chain output has no latent counts");
        for (std::size_t i = 0; i < V; ++i) {
          double n_over = 0.0;
          double n = 0.0;
          for (std::size_t j = 0; j < T; ++j) {
            n += static_cast<double>(s.tau[i * T + j]);
            if (grid[j] >= threshold) n_over += static_cast<double>(s.tau[i * T + j]);
          }
          if (n > 0.0) over[i] = n_over / n;
        }
      }
      for (std::size_t i = 0; i < V; ++i) {
        const auto verdict = rule.classify(i);
        if (!verdict || !over[i]) continue;
        errors[i].push_back(*verdict == Verdict::Over18 ? 1.0 - *over[i] : *over[i]);
      }
    }
  }
  if (total_samples == 0) throw DataError("chain output has no retained samples");

  ErrorRateTable table;
  table.threshold = threshold;
  table.level = level;
  table.estimator = estimator;
  // Order: over-18 cells first, each group following the conventional layout.
  static const std::array<std::pair<IndicatorState, IndicatorState>, 9> layout{{
      // (knee, teeth)
      {IndicatorState::Mature, IndicatorState::Mature},
      {IndicatorState::Mature, IndicatorState::Immature},
      {IndicatorState::Mature, IndicatorState::Missing},
      {IndicatorState::Immature, IndicatorState::Mature},
      {IndicatorState::Missing, IndicatorState::Mature},
      {IndicatorState::Immature, IndicatorState::Immature},
      {IndicatorState::Immature, IndicatorState::Missing},
      {IndicatorState::Missing, IndicatorState::Immature},
      {IndicatorState::Missing, IndicatorState::Missing},
  }};
  std::vector<std::size_t> order;
  for (Verdict group : {Verdict::Over18, Verdict::Under18}) {
    for (const auto& [knee, teeth] : layout) {
      const std::array<IndicatorState, 2> s{teeth, knee};
      const std::size_t i = encode_combination(s);
      if (rule.classify(i) == group) order.push_back(i);
    }
  }
  for (std::size_t i : order) {
    ErrorRateRow row;
    row.combination = i;
    row.label = combination_label(i);
    row.observed = y.counts[i];
    row.verdict = *rule.classify(i);
    row.samples_used = errors[i].size();
    if (!errors[i].empty()) {
      row.mean = mean(errors[i]);
      std::tie(row.lower, row.upper) = credibility_interval(errors[i], level);
    } else {
      row.mean = row.lower = row.upper = NAN;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace agebayes
