#include "peck/optim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace peck {

std::vector<double> central_difference_gradient(const ObjectiveFn& f,
                                                const std::vector<double>& x,
                                                double rel_step) {
  const std::size_t n = x.size();
  std::vector<double> grad(n, 0.0);
  std::vector<double> xp = x;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = rel_step * std::max(1.0, std::fabs(x[i]));
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

namespace {

double max_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

OptimResult bfgs_minimize(const ObjectiveFn& f, const std::vector<double>& x0,
                          const OptimOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw std::invalid_argument("bfgs_minimize: empty start point");

  OptimResult result;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  int n_feval = 0;

  auto eval = [&](const Eigen::VectorXd& v) {
    ++n_feval;
    return f(std::vector<double>(v.data(), v.data() + n));
  };
  auto eval_grad = [&](const Eigen::VectorXd& v) {
    n_feval += 2 * n;
    std::vector<double> g = central_difference_gradient(
        f, std::vector<double>(v.data(), v.data() + n), opts.fd_rel_step);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), n));
  };

  double fx = eval(x);
  Eigen::VectorXd grad = eval_grad(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);

  bool converged = max_norm(grad) < opts.grad_tol;
  int iter = 0;
  bool first_update = true;

  while (!converged && iter < opts.max_iter) {
    ++iter;
    Eigen::VectorXd dir = -(hinv * grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      // Not a descent direction; reset to steepest descent.
      hinv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
      first_update = true;
    }

    // Armijo backtracking.
    const double c1 = 1e-4;
    double step = 1.0;
    double f_new = fx;
    Eigen::VectorXd x_new = x;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * dir;
      f_new = eval(x_new);
      if (std::isfinite(f_new) && f_new <= fx + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no progress possible along this direction

    Eigen::VectorXd grad_new = eval_grad(x_new);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);

    const double f_change = std::fabs(fx - f_new);
    x = x_new;
    fx = f_new;
    grad = grad_new;

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_update) {
        hinv *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      Eigen::MatrixXd outer = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      hinv = outer * hinv * outer.transpose() + rho * s * s.transpose();
    }

    if (max_norm(grad) < opts.grad_tol &&
        f_change <= opts.f_rel_tol * std::max(1.0, std::fabs(fx))) {
      converged = true;
    }
  }

  result.x.assign(x.data(), x.data() + n);
  result.f = fx;
  result.grad.assign(grad.data(), grad.data() + n);
  result.grad_max_norm = max_norm(grad);
  result.iterations = iter;
  result.n_feval = n_feval;
  result.converged = converged || max_norm(grad) < opts.grad_tol;
  return result;
}

}  // namespace peck
