#include <cmath>
#include <stdexcept>

#include "hsq/quad_lab.hpp"

namespace hsq {

GaussLegendre gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order >= 1 required");
  GaussLegendre rule;
  rule.nodes.resize(std::size_t(order));
  rule.weights.resize(std::size_t(order));
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_n via the three-term recurrence.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p_prev = 1.0, p_cur = x;
      for (int k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p_cur - (k - 1.0) * p_prev) / k;
        p_prev = p_cur;
        p_cur = p_next;
      }
      deriv = n * (x * p_cur - p_prev) / (x * x - 1.0);
      const double dx = p_cur / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.nodes[std::size_t(i)] = x;
    rule.weights[std::size_t(i)] = w;
    rule.nodes[std::size_t(n - 1 - i)] = -x;
    rule.weights[std::size_t(n - 1 - i)] = w;
  }
  // map from [-1, 1] to [a, b]
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[std::size_t(i)] = mid - half * rule.nodes[std::size_t(i)];
    rule.weights[std::size_t(i)] *= half;
  }
  return rule;
}

Complex pairwise_sum(std::vector<Complex>& terms) {
  if (terms.empty()) return 0.0;
  std::size_t n = terms.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) terms[i] += terms[i + half];
    n = half;
  }
  return terms[0];
}

}  // namespace hsq
