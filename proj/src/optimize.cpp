#include "agebayes/optimize.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agebayes {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options) {
  const std::size_t n = x0.size();
  MinimizeResult result;
  std::vector<double> x = std::move(x0);
  std::vector<double> g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw std::invalid_argument("minimize_bfgs: infeasible starting point");

  // Inverse Hessian approximation, row-major.
  std::vector<double> h(n * n, 0.0);
  auto reset_h = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  };
  reset_h();

  std::vector<double> dir(n), x_new(n), g_new(n), s(n), y(n), hy(n);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (norm2(g) < options.gradient_tolerance) break;

    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= h[i * n + j] * g[j];
      dir[i] = acc;
    }
    double slope = dot(dir, g);
    if (!(slope < 0.0)) {
      reset_h();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
      slope = dot(dir, g);
    }

    double step = 1.0;
    double f_new = 0.0;
    bool found = false;
    for (int tries = 0; tries < 80; ++tries) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = f(x_new, g_new);
      if (!std::isfinite(f_new)) {
        step *= 0.5;
        continue;
      }
      // Near the optimum the decrease drops below rounding noise in f; accept a step
      // that stays within that noise while shrinking the gradient.
      const bool within_noise = std::abs(f_new - fx) <= 1e-14 * (1.0 + std::abs(fx)) && norm2(g_new) < norm2(g);
      if (f_new <= fx + 1e-4 * step * slope || within_noise) {
        found = true;
        break;
      }
      step *= 0.5;
    }
    if (!found) {
      // No progress along the quasi-Newton direction; retry once with steepest descent.
      bool identity = true;
      for (std::size_t i = 0; i < n && identity; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (h[i * n + j] != (i == j ? 1.0 : 0.0)) identity = false;
      if (identity) break;
      reset_h();
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-300) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  }

  result.gradient_norm = norm2(g);
  result.converged = result.gradient_norm < options.gradient_tolerance;
  result.iterations = iter;
  result.value = fx;
  result.x = std::move(x);
  return result;
}

}  // namespace agebayes
