#include "agebayes/study_recon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include <boost/math/distributions/normal.hpp>

#include "agebayes/error.hpp"
#include "agebayes/normal.hpp"
#include "agebayes/optimize.hpp"

namespace agebayes {

namespace {

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Piecewise-linear map from normal scores to ages through the five anchors.
double map_score(double z, const std::array<double, 5>& knots, const std::array<double, 5>& ages) {
  if (z <= knots[0]) return ages[0];
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    if (z <= knots[s + 1]) {
      const double width = knots[s + 1] - knots[s];
      if (width <= 0.0) return ages[s + 1];
      return ages[s] + (z - knots[s]) / width * (ages[s + 1] - ages[s]);
    }
  }
  return ages[4];
}

}  // namespace

RawCohort reconstruct_binned(const BinnedStudy& study) {
  if (study.bins.empty()) throw DataError("binned study '" + study.name + "' has no bins");
  RawCohort cohort;
  for (const auto& bin : study.bins) {
    if (bin.n_total < 0 || bin.n_mature < 0 || bin.n_mature > bin.n_total) {
      throw DataError("binned study '" + study.name + "': invalid counts in bin");
    }
    const double mid = 0.5 * (bin.lo + bin.hi);
    for (int r = 0; r < bin.n_total; ++r) cohort.records.push_back({mid, r < bin.n_mature});
  }
  return cohort;
}

RawCohort reconstruct_quantiles(const QuantileStudy& study) {
  if (study.groups.empty()) throw DataError("quantile study '" + study.name + "' has no groups");
  RawCohort cohort;
  for (const auto& g : study.groups) {
    if (g.n <= 0) throw DataError("stage " + g.stage + ": group size must be positive");
    const std::array<double, 5> ages{g.quantiles.min, g.quantiles.q25, g.quantiles.median,
                                     g.quantiles.q75, g.quantiles.max};
    if (!std::is_sorted(ages.begin(), ages.end())) {
      throw DataError("stage " + g.stage + ": quantiles must be nondecreasing");
    }
    const double n = g.n;
    const double edge = 0.5 / n;
    const std::array<double, 5> knots{normal_quantile(edge), normal_quantile(0.25), 0.0,
                                      normal_quantile(0.75), normal_quantile(1.0 - edge)};
    const int mature_from = g.mature ? 0 : g.n - std::clamp(g.reassigned_mature, 0, g.n);
    for (int r = 1; r <= g.n; ++r) {
      double age = g.n == 1 ? g.quantiles.median
                            : map_score(normal_quantile((r - 0.5) / n), knots, ages);
      age = std::clamp(age, study.age_floor, study.age_ceiling);
      cohort.records.push_back({age, r - 1 >= mature_from});
    }
  }
  return cohort;
}

QuantileStudy reassign_stage_fraction(const QuantileStudy& study, std::string_view stage,
                                      double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw UsageError("fraction must lie in [0, 1]");
  QuantileStudy out = study;
  auto it = std::find_if(out.groups.begin(), out.groups.end(),
                         [&](const StageGroup& g) { return g.stage == stage; });
  if (it == out.groups.end()) {
    throw DataError("study '" + study.name + "' has no stage " + std::string(stage));
  }
  if (!it->mature) {
    const int k = static_cast<int>(std::lround(fraction * it->n));
    it->reassigned_mature = std::min(it->n, it->reassigned_mature + k);
    if (it->reassigned_mature == it->n) {
      it->mature = true;
      it->reassigned_mature = 0;
    }
  }
  return out;
}

ProbitFit fit_probit_mle(const RawCohort& cohort) {
  // Collapse to distinct (age, maturity) cells.
  std::map<std::pair<double, bool>, double> cells;
  double max_immature = -INFINITY;
  double min_mature = INFINITY;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& r : cohort.records) {
    cells[{r.age, r.mature}] += 1.0;
    sum += r.age;
    sum_sq += r.age * r.age;
    if (r.mature) {
      min_mature = std::min(min_mature, r.age);
    } else {
      max_immature = std::max(max_immature, r.age);
    }
  }
  if (!std::isfinite(max_immature) || !std::isfinite(min_mature)) {
    throw DataError("probit fit needs both mature and immature records");
  }
  if (max_immature <= min_mature) {
    throw ModelError("probit fit did not converge: ages separate mature from immature records");
  }
  std::vector<std::array<double, 3>> data;  // age, sign, weight
  for (const auto& [key, w] : cells) data.push_back({key.first, key.second ? 1.0 : -1.0, w});

  const double n = static_cast<double>(cohort.records.size());
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(sum_sq / n - mean * mean, 1e-12));

  const Objective nll = [&](std::span<const double> x, std::span<double> grad) {
    const double loc = x[0];
    const double scale = std::exp(x[1]);
    double value = 0.0;
    grad[0] = 0.0;
    grad[1] = 0.0;
    for (const auto& [age, sign, w] : data) {
      const double z = (age - loc) / scale;
      const double cdf = normal_cdf(sign * z);
      if (!(cdf > 0.0)) return std::numeric_limits<double>::infinity();
      value -= w * std::log(cdf);
      const double dz = w * sign * normal_pdf(z) / cdf;  // d loglik / dz
      grad[0] += dz / scale;
      grad[1] += dz * z;
    }
    return value;
  };
  const auto result = minimize_bfgs(nll, {mean, std::log(sd)});
  if (!result.converged) {
    throw ModelError("probit fit did not converge (gradient norm " +
                     std::to_string(result.gradient_norm) + ")");
  }
  return {result.x[0], std::exp(result.x[1]), result.gradient_norm, result.iterations};
}

}  // namespace agebayes
