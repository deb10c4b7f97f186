#include "hdgns/quadrature.hpp"

#include <cmath>

namespace hdgns {

void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights) {
  points.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev estimate
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // recompute both values at the converged node
    p0 = 1.0;
    p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    points[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

EdgeQuadratureRule edge_quadrature(int exactness) {
  if (exactness < 0 || exactness > kMaxQuadratureExactness)
    throw Error("edge_quadrature: exactness " + std::to_string(exactness) +
                " out of supported range");
  const int n = (exactness + 2) / 2;  // ceil((d+1)/2)
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  EdgeQuadratureRule rule;
  rule.exactness = exactness;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

QuadratureRule triangle_quadrature(int exactness) {
  if (exactness < 0 || exactness > kMaxQuadratureExactness)
    throw Error("triangle_quadrature: exactness " + std::to_string(exactness) +
                " out of supported range");
  QuadratureRule rule;
  rule.exactness = exactness;
  if (exactness <= 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
    return rule;
  }
  // Duffy transform of a tensor Gauss rule: x = s(1-t), y = t, jacobian (1-t).
  // Degree d in (x,y) needs degree d in s and d+1 in t.
  const int ns = (exactness + 2) / 2;
  const int nt = (exactness + 3) / 2;
  std::vector<double> xs, ws, xt, wt;
  gauss_legendre(ns, xs, ws);
  gauss_legendre(nt, xt, wt);
  for (int j = 0; j < nt; ++j) {
    const double t = 0.5 * (xt[j] + 1.0);
    for (int i = 0; i < ns; ++i) {
      const double s = 0.5 * (xs[i] + 1.0);
      rule.points.push_back({s * (1.0 - t), t});
      rule.weights.push_back(0.25 * ws[i] * wt[j] * (1.0 - t));
    }
  }
  return rule;
}

}  // namespace hdgns
