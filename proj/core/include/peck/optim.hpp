#pragma once

#include <functional>
#include <vector>

namespace peck {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct OptimOptions {
  int max_iter = 500;
  double grad_tol = 1e-6;    // max-norm of the gradient
  double f_rel_tol = 1e-10;  // relative change of the objective
  double fd_rel_step = 1e-6; // relative step for central differences
};

struct OptimResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> grad;
  double grad_max_norm = 0.0;
  int iterations = 0;
  int n_feval = 0;
  bool converged = false;
};

// Central-difference gradient with per-coordinate relative step.
std::vector<double> central_difference_gradient(const ObjectiveFn& f,
                                                const std::vector<double>& x,
                                                double rel_step = 1e-6);

// Dense BFGS minimizer with Armijo backtracking line search.
// Deterministic: no randomness, fixed evaluation order.
OptimResult bfgs_minimize(const ObjectiveFn& f, const std::vector<double>& x0,
                          const OptimOptions& opts = {});

}  // namespace peck
