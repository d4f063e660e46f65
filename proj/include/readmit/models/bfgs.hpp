#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace readmit {

/// Returns f(x) and writes the gradient into `grad` (same size as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BfgsOptions {
  std::size_t max_iterations = 200;
  /// Stop when the gradient's Euclidean norm falls below this.
  double gradient_tolerance = 1e-6;
  /// Armijo sufficient-decrease constant.
  double armijo = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;
};

enum class BfgsStop { kConverged, kIterationLimit, kLineSearchFailed };

struct BfgsResult {
  std::vector<double> x;
  double value = 0;
  double gradient_norm = 0;
  std::size_t iterations = 0;
  /// Times the inverse-Hessian approximation was reset because y's < = 0.
  std::size_t hessian_resets = 0;
  /// f at the start point followed by f after every accepted step.
  std::vector<double> accepted_values;
  BfgsStop stop = BfgsStop::kIterationLimit;
};

/// Dense BFGS with a backtracking Armijo line search. Throws NumericalError naming
/// the iteration if the objective or gradient becomes non-finite.
BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

}  // namespace readmit
