#include "hdgns/fields.hpp"

#include "hdgns/basis.hpp"
#include "hdgns/quadrature.hpp"

namespace hdgns {

Vec2 map_to_physical(const Mesh& mesh, int cell, Vec2 r) {
  const auto& cv = mesh.cell(cell);
  const Vec2 v0 = mesh.vertex(cv[0]);
  const Vec2 e1 = mesh.vertex(cv[1]) - v0;
  const Vec2 e2 = mesh.vertex(cv[2]) - v0;
  return v0 + r.x * e1 + r.y * e2;
}

void project_cell_velocity(const Mesh& mesh, const SpaceLayout& layout,
                           const VectorField& u, StateVector& state) {
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const auto rule = triangle_quadrature(std::min(2 * k + 8, kMaxQuadratureExactness));
  std::vector<double> phi;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < m; ++i) {
      state.data[layout.u_dof(c, 0, i)] = 0.0;
      state.data[layout.u_dof(c, 1, i)] = 0.0;
    }
    // orthonormal basis on the reference element: coefficients are plain
    // reference-domain integrals
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = map_to_physical(mesh, c, rule.points[q]);
      const Vec2 v = u(x);
      eval_cell_basis(k, rule.points[q], phi);
      for (int i = 0; i < m; ++i) {
        state.data[layout.u_dof(c, 0, i)] += rule.weights[q] * v.x * phi[i];
        state.data[layout.u_dof(c, 1, i)] += rule.weights[q] * v.y * phi[i];
      }
    }
  }
}

StateVector interpolate_state(const Mesh& mesh, const SpaceLayout& layout,
                              const VectorField& u, const ScalarField& p) {
  StateVector state = StateVector::zero(layout);
  const int k = layout.degree;
  const int mp = layout.cell_p;
  project_cell_velocity(mesh, layout, u, state);

  const auto rule = triangle_quadrature(std::min(2 * k + 8, kMaxQuadratureExactness));
  std::vector<double> phi;
  if (p) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = map_to_physical(mesh, c, rule.points[q]);
        const double v = p(x);
        eval_cell_basis(k - 1, rule.points[q], phi);
        for (int i = 0; i < mp; ++i)
          state.data[layout.p_dof(c, i)] += rule.weights[q] * v * phi[i];
      }
    }
  }

  const auto erule = edge_quadrature(std::min(2 * k + 8, kMaxQuadratureExactness));
  std::vector<double> psi;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    const Vec2 a = mesh.vertex(face.verts[0]);
    const Vec2 b = mesh.vertex(face.verts[1]);
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double s = erule.points[q];
      const Vec2 x = (1.0 - s) * a + s * b;
      eval_edge_basis(k, s, psi);
      const Vec2 v = u(x);
      const double pv = p ? p(x) : 0.0;
      for (int j = 0; j <= k; ++j) {
        state.data[layout.ubar_dof(f, 0, j)] += erule.weights[q] * v.x * psi[j];
        state.data[layout.ubar_dof(f, 1, j)] += erule.weights[q] * v.y * psi[j];
        state.data[layout.pbar_dof(f, j)] += erule.weights[q] * pv * psi[j];
      }
    }
  }
  return state;
}

Vec2 eval_velocity(const Mesh& mesh, const SpaceLayout& layout,
                   const StateVector& state, int cell, Vec2 r) {
  (void)mesh;
  std::vector<double> phi;
  eval_cell_basis(layout.degree, r, phi);
  Vec2 v{0.0, 0.0};
  for (int i = 0; i < layout.scalar_cell_basis(); ++i) {
    v.x += state.data[layout.u_dof(cell, 0, i)] * phi[i];
    v.y += state.data[layout.u_dof(cell, 1, i)] * phi[i];
  }
  return v;
}

double eval_pressure(const Mesh& mesh, const SpaceLayout& layout,
                     const StateVector& state, int cell, Vec2 r) {
  (void)mesh;
  std::vector<double> phi;
  eval_cell_basis(layout.degree - 1, r, phi);
  double v = 0.0;
  for (int i = 0; i < layout.cell_p; ++i)
    v += state.data[layout.p_dof(cell, i)] * phi[i];
  return v;
}

Vec2 eval_trace_velocity(const SpaceLayout& layout, const StateVector& state,
                         int face, double s) {
  std::vector<double> psi;
  eval_edge_basis(layout.degree, s, psi);
  Vec2 v{0.0, 0.0};
  for (int j = 0; j <= layout.degree; ++j) {
    v.x += state.data[layout.ubar_dof(face, 0, j)] * psi[j];
    v.y += state.data[layout.ubar_dof(face, 1, j)] * psi[j];
  }
  return v;
}

double eval_trace_pressure(const SpaceLayout& layout, const StateVector& state,
                           int face, double s) {
  std::vector<double> psi;
  eval_edge_basis(layout.degree, s, psi);
  double v = 0.0;
  for (int j = 0; j <= layout.degree; ++j)
    v += state.data[layout.pbar_dof(face, j)] * psi[j];
  return v;
}

}  // namespace hdgns
