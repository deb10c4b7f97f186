#include "hdgns/basis.hpp"

#include <cmath>

namespace hdgns {

double jacobi(int n, int a, int b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2) * x;
  for (int m = 2; m <= n; ++m) {
    const double c = 2 * m + a + b;
    const double a1 = 2.0 * m * (m + a + b) * (c - 2);
    const double a2 = (c - 1) * (double(a) * a - double(b) * b);
    const double a3 = (c - 1) * c * (c - 2);
    const double a4 = 2.0 * (m + a - 1) * (m + b - 1) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double jacobi_derivative(int n, int a, int b, double x) {
  if (n == 0) return 0.0;
  return 0.5 * (n + a + b + 1) * jacobi(n - 1, a + 1, b + 1, x);
}

namespace {

void check_degree(int k) {
  if (k < 0 || k > kMaxDegree)
    throw Error("basis degree " + std::to_string(k) + " not supported (max " +
                std::to_string(kMaxDegree) + ")");
}

inline double norm_const(int i, int j) {
  return std::sqrt(double(2 * i + 1) * double(2 * i + 2 * j + 2));
}

}  // namespace

void eval_cell_basis(int k, Vec2 p, std::vector<double>& values) {
  check_degree(k);
  values.resize(cell_basis_size(k));
  const double omy = 1.0 - p.y;
  const double a = 2.0 * p.x / omy - 1.0;
  const double b = 2.0 * p.y - 1.0;
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int i = 0; i <= d; ++i) {
      const int j = d - i;
      values[idx++] = norm_const(i, j) * jacobi(i, 0, 0, a) *
                      std::pow(omy, i) * jacobi(j, 2 * i + 1, 0, b);
    }
  }
}

void eval_cell_basis_grad(int k, Vec2 p, std::vector<double>& values,
                          std::vector<Vec2>& grads) {
  check_degree(k);
  const int m = cell_basis_size(k);
  values.resize(m);
  grads.resize(m);
  const double omy = 1.0 - p.y;
  const double a = 2.0 * p.x / omy - 1.0;
  const double b = 2.0 * p.y - 1.0;
  int idx = 0;
  for (int d = 0; d <= k; ++d) {
    for (int i = 0; i <= d; ++i) {
      const int j = d - i;
      const double c = norm_const(i, j);
      const double pi = jacobi(i, 0, 0, a);
      const double pj = jacobi(j, 2 * i + 1, 0, b);
      const double dpi = jacobi_derivative(i, 0, 0, a);
      const double dpj = jacobi_derivative(j, 2 * i + 1, 0, b);
      const double omy_i = std::pow(omy, i);
      values[idx] = c * pi * omy_i * pj;
      if (i == 0) {
        grads[idx] = {0.0, c * 2.0 * dpj};
      } else {
        const double omy_im1 = std::pow(omy, i - 1);
        const double gx = c * 2.0 * dpi * omy_im1 * pj;
        const double gy = c * ((a + 1.0) * dpi * omy_im1 * pj -
                               i * pi * omy_im1 * pj + 2.0 * pi * omy_i * dpj);
        grads[idx] = {gx, gy};
      }
      ++idx;
    }
  }
}

void eval_edge_basis(int k, double s, std::vector<double>& values) {
  check_degree(k);
  values.resize(k + 1);
  const double x = 2.0 * s - 1.0;
  for (int j = 0; j <= k; ++j)
    values[j] = std::sqrt(2.0 * j + 1.0) * jacobi(j, 0, 0, x);
}

}  // namespace hdgns
