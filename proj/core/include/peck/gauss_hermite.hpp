#pragma once

#include <vector>

namespace peck {

// Gauss-Hermite rule for integrals of the form
//   integral f(z) exp(-z^2) dz  ~=  sum_k weight[k] * f(node[k]).
// Exact for polynomials f of degree <= 2n-1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes/weights via the Golub-Welsch eigendecomposition of the Jacobi matrix.
// n >= 1; nodes come out in ascending order. Odd n places a node at 0.
GaussHermiteRule gauss_hermite(int n);

}  // namespace peck
