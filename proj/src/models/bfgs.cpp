#include "readmit/models/bfgs.hpp"

#include <cmath>
#include <string>

#include "readmit/error.hpp"

namespace readmit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(std::span<const double> v) {
  for (const double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_finite(double value, std::span<const double> grad, std::size_t iteration) {
  if (!std::isfinite(value) || !all_finite(grad)) {
    throw NumericalError("BFGS: non-finite objective or gradient at iteration " + std::to_string(iteration));
  }
}

void set_identity(std::vector<double>& h, std::size_t n, double scale) {
  std::fill(h.begin(), h.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& options) {
  const std::size_t n = x0.size();
  BfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n), next_grad(n), next_x(n), direction(n), s(n), y(n), hy(n);
  std::vector<double> h(n * n);
  set_identity(h, n, 1.0);

  result.value = f(result.x, grad);
  check_finite(result.value, grad, 0);
  result.accepted_values.push_back(result.value);
  bool scale_next = true;

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    result.gradient_norm = std::sqrt(dot(grad, grad));
    if (result.gradient_norm < options.gradient_tolerance) {
      result.stop = BfgsStop::kConverged;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0;
      for (std::size_t j = 0; j < n; ++j) d -= h[i * n + j] * grad[j];
      direction[i] = d;
    }
    double slope = dot(direction, grad);
    if (!(slope < 0)) {
      // Not a descent direction; fall back to steepest descent.
      set_identity(h, n, 1.0);
      ++result.hessian_resets;
      scale_next = true;
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      slope = -result.gradient_norm * result.gradient_norm;
    }

    double step = 1.0;
    double next_value = 0;
    bool accepted = false;
    bool last_trial_finite = true;
    for (std::size_t k = 0; k <= options.max_backtracks; ++k) {
      for (std::size_t i = 0; i < n; ++i) next_x[i] = result.x[i] + step * direction[i];
      next_value = f(next_x, next_grad);
      last_trial_finite = std::isfinite(next_value);
      // A non-finite trial point is treated like insufficient decrease.
      if (std::isfinite(next_value) && next_value <= result.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    result.iterations = iter;
    if (!accepted) {
      if (!last_trial_finite) check_finite(next_value, next_grad, iter);
      result.stop = BfgsStop::kLineSearchFailed;
      return result;
    }
    check_finite(next_value, next_grad, iter);

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = next_x[i] - result.x[i];
      y[i] = next_grad[i] - grad[i];
    }
    result.x.swap(next_x);
    grad.swap(next_grad);
    result.value = next_value;
    result.accepted_values.push_back(next_value);

    const double ys = dot(y, s);
    if (!(ys > 1e-12 * std::sqrt(dot(y, y) * dot(s, s)))) {
      set_identity(h, n, 1.0);
      ++result.hessian_resets;
      scale_next = true;
      continue;
    }
    if (scale_next) {
      set_identity(h, n, ys / dot(y, y));
      scale_next = false;
    }
    // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
    const double rho = 1.0 / ys;
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0;
      for (std::size_t j = 0; j < n; ++j) v += h[i * n + j] * y[j];
      hy[i] = v;
    }
    const double yhy = dot(y, hy);
    const double coef = rho * rho * yhy + rho;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
      }
    }
  }
  result.gradient_norm = std::sqrt(dot(grad, grad));
  if (result.gradient_norm < options.gradient_tolerance) result.stop = BfgsStop::kConverged;
  return result;
}

}  // namespace readmit
