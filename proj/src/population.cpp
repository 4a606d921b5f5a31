#include "agebayes/population.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "agebayes/error.hpp"
#include "agebayes/stats.hpp"

namespace agebayes {

double TruncatedGammaSpec::cdf(double age) const {
  if (age <= lower) return 0.0;
  if (age >= upper) return 1.0;
  auto g = [&](double x) {
    const double t = (x - shift) * rate;
    return t <= 0.0 ? 0.0 : boost::math::gamma_p(shape, t);
  };
  const double g_lo = g(lower);
  return (g(age) - g_lo) / (g(upper) - g_lo);
}

AgeGrid AgeGrid::build(const TruncatedGammaSpec& target, int points) {
  if (points < 2) throw UsageError("age grid needs at least two points");
  if (!(target.shape > 0.0) || !(target.rate > 0.0) || !(target.upper > target.lower) ||
      !std::isfinite(target.lower) || !std::isfinite(target.upper)) {
    throw UsageError("invalid target distribution for the age grid");
  }
  if (!(target.cdf(target.upper - 1e-9) > target.cdf(target.lower + 1e-9))) {
    throw UsageError("target distribution has no mass inside the truncation bounds");
  }
  AgeGrid grid;
  grid.target_ = target;
  grid.has_target_ = true;
  grid.ages_.resize(static_cast<std::size_t>(points));
  for (int i = 1; i < points; ++i) {
    const double goal = static_cast<double>(i) / points;
    double lo = target.lower;
    double hi = target.upper;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double f = target.cdf(mid);
      if (std::abs(f - goal) < 1e-12) {
        lo = hi = mid;
        break;
      }
      (f < goal ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    if (!std::isfinite(x)) throw ModelError("age grid root is not finite");
    grid.ages_[static_cast<std::size_t>(i - 1)] = x;
  }
  grid.ages_.back() = target.upper;
  for (std::size_t j = 1; j < grid.ages_.size(); ++j) {
    if (!(grid.ages_[j] > grid.ages_[j - 1])) throw ModelError("age grid is not strictly increasing");
  }
  return grid;
}

AgeGrid AgeGrid::from_ages(std::vector<double> ages) {
  if (ages.size() < 2) throw UsageError("age grid needs at least two points");
  for (std::size_t j = 0; j < ages.size(); ++j) {
    if (!std::isfinite(ages[j]) || (j > 0 && !(ages[j] > ages[j - 1]))) {
      throw UsageError("explicit grid ages must be finite and strictly increasing");
    }
  }
  AgeGrid grid;
  grid.ages_ = std::move(ages);
  return grid;
}

std::string AgeGrid::description() const {
  if (!has_target_) return "explicit";
  std::ostringstream os;
  os << "gamma(shape=" << target_.shape << ",rate=" << target_.rate << ")+" << target_.shift
     << " truncated [" << target_.lower << "," << target_.upper << "]";
  return os.str();
}

AgeGrid AgeGrid::shifted(double offset) const {
  std::vector<double> moved(ages_);
  for (double& a : moved) a += offset;
  return from_ages(std::move(moved));
}

PopulationProfile PopulationProfile::uniform(std::size_t points) {
  return {std::vector<double>(points, 1.0 / static_cast<double>(points))};
}

double PopulationProfile::cumulative_at(const AgeGrid& grid, double age) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size() && grid[j] <= age; ++j) acc += weights[j];
  return acc;
}

std::vector<double> PopulationProfile::cumulative() const {
  std::vector<double> out(weights.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) out[j] = (acc += weights[j]);
  return out;
}

PopulationProfile sample_prior_profile(const ProfilePrior& prior, Rng& rng) {
  if (!(prior.alpha > 0.0)) throw UsageError("profile prior alpha must be positive");
  const std::vector<double> conc(prior.grid.size(), prior.cell_concentration());
  return {dirichlet(rng, conc)};
}

ProfileBands profile_quantile_bands(std::span<const PopulationProfile> samples, const AgeGrid& grid,
                                    std::span<const double> probs) {
  if (samples.empty()) throw DataError("no profile samples to summarize");
  ProfileBands out;
  out.ages.assign(grid.ages().begin(), grid.ages().end());
  out.probs.assign(probs.begin(), probs.end());
  std::vector<std::vector<double>> curves;
  curves.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.weights.size() != grid.size()) throw DataError("profile length does not match grid");
    curves.push_back(s.cumulative());
  }
  std::vector<double> column(samples.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t s = 0; s < curves.size(); ++s) column[s] = curves[s][j];
    std::sort(column.begin(), column.end());
    std::vector<double> row;
    for (double p : probs) row.push_back(quantile_sorted(column, p));
    out.bands.push_back(std::move(row));
    out.median.push_back(quantile_sorted(column, 0.5));
  }
  return out;
}

}  // namespace agebayes
