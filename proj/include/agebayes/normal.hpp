#ifndef AGEBAYES_NORMAL_HPP
#define AGEBAYES_NORMAL_HPP

#include <cmath>
#include <numbers>

namespace agebayes {

/// Standard normal CDF through erfc, accurate in both tails.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// 1 - normal_cdf(z), without cancellation for large z.
inline double normal_sf(double z) {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Log of the normal density with the given mean and standard deviation.
inline double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace agebayes

#endif
