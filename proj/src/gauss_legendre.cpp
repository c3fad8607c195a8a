#include "starslice/gauss_legendre.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace starslice {

namespace {

GaussLegendreRule build_rule(int count) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussLegendreRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int count) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: count must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(count);
  if (it == cache.end()) it = cache.emplace(count, build_rule(count)).first;
  return it->second;
}

}  // namespace starslice
