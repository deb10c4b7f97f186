// Orthonormal modal bases: Dubiner-type on the reference triangle (better
// conditioned than a monomial or nodal basis at moderate degree) and shifted
// Legendre on the reference edge [0,1].

#ifndef HDGNS_BASIS_HPP
#define HDGNS_BASIS_HPP

#include <vector>

#include "hdgns/types.hpp"

namespace hdgns {

constexpr int kMaxDegree = 4;

/// dim P_k on a triangle.
constexpr int cell_basis_size(int k) { return (k + 1) * (k + 2) / 2; }
/// dim P_k on an edge.
constexpr int edge_basis_size(int k) { return k + 1; }

/// Values of the (k+1)(k+2)/2 cell basis functions at a reference point.
/// Functions are ordered by total degree, so the first dim P_{k-1} entries
/// form a basis of P_{k-1}. Orthonormal for the reference-triangle L2 inner
/// product. The point must satisfy y < 1 (all quadrature points do).
void eval_cell_basis(int k, Vec2 p, std::vector<double>& values);

/// Values and reference gradients of the cell basis.
void eval_cell_basis_grad(int k, Vec2 p, std::vector<double>& values,
                          std::vector<Vec2>& grads);

/// Values of the k+1 edge basis functions at s in [0,1]; orthonormal on [0,1].
void eval_edge_basis(int k, double s, std::vector<double>& values);

/// Jacobi polynomial P_n^(a,b) and its derivative (used by the cell basis;
/// exposed for tests).
double jacobi(int n, int a, int b, double x);
double jacobi_derivative(int n, int a, int b, double x);

}  // namespace hdgns

#endif
