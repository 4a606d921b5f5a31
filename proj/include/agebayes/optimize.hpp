#ifndef AGEBAYES_OPTIMIZE_HPP
#define AGEBAYES_OPTIMIZE_HPP

#include <functional>
#include <span>
#include <vector>

namespace agebayes {

/// Objective returning f(x) and writing its gradient. Returning a non-finite
/// value marks x as infeasible; the line search then backs off.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 1000;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Quasi-Newton minimization (BFGS, inverse-Hessian form, backtracking
/// Armijo line search). Converged means the gradient's Euclidean norm fell
/// below options.gradient_tolerance.
MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                             const BfgsOptions& options = {});

}  // namespace agebayes

#endif
