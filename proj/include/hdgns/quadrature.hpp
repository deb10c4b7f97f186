#ifndef HDGNS_QUADRATURE_HPP
#define HDGNS_QUADRATURE_HPP

#include <vector>

#include "hdgns/types.hpp"

namespace hdgns {

/// Quadrature on the reference triangle (0,0)-(1,0)-(0,1); weights sum to 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness = 0;
};

/// Quadrature on the reference edge [0,1]; weights sum to 1.
struct EdgeQuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness = 0;
};

constexpr int kMaxQuadratureExactness = 30;

/// Rule integrating all polynomials up to the given total degree exactly.
/// Throws if exactness exceeds kMaxQuadratureExactness.
QuadratureRule triangle_quadrature(int exactness);
EdgeQuadratureRule edge_quadrature(int exactness);

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace hdgns

#endif
