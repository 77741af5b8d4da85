#pragma once

#include <functional>
#include <span>
#include <vector>

namespace psl {

struct MinimizeOptions {
  int max_iters = 1000;
  double grad_tol = 1e-6;  // stop when the max-norm of the gradient drops below
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.1;
  int restart_interval = 0;  // 0 = restart every n_vars iterations
  int max_line_search_steps = 40;
};

enum class MinimizeStatus { converged, max_iters, line_search_failed };

struct MinimizeResult {
  std::vector<double> x_star;
  double f_star = 0.0;
  int iterations = 0;
  MinimizeStatus status = MinimizeStatus::max_iters;
  double grad_inf_norm = 0.0;
  std::vector<double> f_history;  // f at x0 and after every accepted step
};

// Objective callback: writes the gradient into `grad` (same length as x)
// and returns the value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Nonlinear conjugate gradient with the Hager-Zhang direction update, a
// strong-Wolfe line search, and a steepest-descent fallback whenever the CG
// direction stops being a descent direction. Every accepted step strictly
// decreases f. Deterministic.
MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const MinimizeOptions& opts = {});

// Central finite differences (f(x+h e_k) - f(x-h e_k)) / 2h.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h);

}  // namespace psl
