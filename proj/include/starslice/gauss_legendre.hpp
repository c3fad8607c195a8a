#pragma once

#include <Eigen/Core>

namespace starslice {

// Gauss-Legendre rule on [-1, 1]: nodes and weights, computed once per count
// via the Golub-Welsch eigendecomposition of the Jacobi matrix.
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const GaussLegendreRule& gauss_legendre(int count);

// Integral of f over [0, upper] using `count` Gauss-Legendre nodes.
template <typename F>
double integrate_radial(int count, double upper, F&& f) {
  const GaussLegendreRule& rule = gauss_legendre(count);
  double half = 0.5 * upper;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    double t = half * (rule.nodes[i] + 1.0);
    acc += rule.weights[i] * f(t);
  }
  return acc * half;
}

}  // namespace starslice
