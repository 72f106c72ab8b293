#include "peck/gauss_hermite.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace peck {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = std::sqrt(std::numbers::pi);
    return rule;
  }
  // Jacobi matrix for the (physicists') Hermite recurrence: zero diagonal,
  // off-diagonal b_k = sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const double mu0 = std::sqrt(std::numbers::pi);  // integral of exp(-z^2)
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  // Enforce exact symmetry: average mirrored node pairs.
  for (int k = 0; k < n / 2; ++k) {
    const int j = n - 1 - k;
    const double mag = 0.5 * (std::fabs(rule.nodes[k]) + std::fabs(rule.nodes[j]));
    rule.nodes[k] = -mag;
    rule.nodes[j] = mag;
    const double w = 0.5 * (rule.weights[k] + rule.weights[j]);
    rule.weights[k] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace peck
