#include "hdgns/norms.hpp"

#include <cmath>

#include "hdgns/basis.hpp"
#include "hdgns/quadrature.hpp"

namespace hdgns {

namespace {

const Vec2 kRefVerts[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

struct ErrorEval {
  const Mesh& mesh;
  const SpaceLayout& layout;
  const StateVector& state;
  const VectorField& u_ex;
  const TensorField& grad_ex;
  const ScalarField& p_ex;
};

}  // namespace

NormSet compute_error_norms(const Mesh& mesh, const SpaceLayout& layout,
                            const StateVector& state, const VectorField& u_ex,
                            const TensorField& grad_ex, const ScalarField& p_ex,
                            double gamma, double mu) {
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const int mp = layout.cell_p;
  const auto vrule = triangle_quadrature(std::min(2 * k + 8, kMaxQuadratureExactness));
  const auto erule = edge_quadrature(std::min(2 * k + 8, kMaxQuadratureExactness));

  NormSet n;
  double grad2 = 0.0, v2 = 0.0, r2 = 0.0, l2u = 0.0, l2p = 0.0, ptr2 = 0.0,
         oneh_face = 0.0;

  std::vector<double> phi, phip, psi;
  std::vector<Vec2> gradref;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cv = mesh.cell(c);
    const Vec2 v0 = mesh.vertex(cv[0]);
    const Vec2 e1 = mesh.vertex(cv[1]) - v0;
    const Vec2 e2 = mesh.vertex(cv[2]) - v0;
    const double det = e1.cross(e2);
    const double inv_det = 1.0 / det;
    const double it00 = e2.y * inv_det, it01 = -e1.y * inv_det;
    const double it10 = -e2.x * inv_det, it11 = e1.x * inv_det;

    for (std::size_t q = 0; q < vrule.points.size(); ++q) {
      const Vec2 r = vrule.points[q];
      const double wq = vrule.weights[q] * det;
      const Vec2 x = v0 + r.x * e1 + r.y * e2;
      eval_cell_basis_grad(k, r, phi, gradref);
      eval_cell_basis(k - 1, r, phip);

      Vec2 uh{0.0, 0.0};
      std::array<Vec2, 2> gh{Vec2{0, 0}, Vec2{0, 0}};
      for (int i = 0; i < m; ++i) {
        const double cx = state.data[layout.u_dof(c, 0, i)];
        const double cy = state.data[layout.u_dof(c, 1, i)];
        const Vec2 g{it00 * gradref[i].x + it01 * gradref[i].y,
                     it10 * gradref[i].x + it11 * gradref[i].y};
        uh.x += cx * phi[i];
        uh.y += cy * phi[i];
        gh[0] = gh[0] + cx * g;
        gh[1] = gh[1] + cy * g;
      }
      double ph = 0.0;
      for (int i = 0; i < mp; ++i) ph += state.data[layout.p_dof(c, i)] * phip[i];

      const Vec2 ue = u_ex ? u_ex(x) : Vec2{0, 0};
      const auto ge = grad_ex ? grad_ex(x) : std::array<Vec2, 2>{Vec2{0, 0}, Vec2{0, 0}};
      const double pe = p_ex ? p_ex(x) : 0.0;

      const Vec2 du = ue - uh;
      const Vec2 dg0 = ge[0] - gh[0];
      const Vec2 dg1 = ge[1] - gh[1];
      grad2 += wq * (dg0.dot(dg0) + dg1.dot(dg1));
      l2u += wq * du.dot(du);
      const double dp = pe - ph;
      l2p += wq * dp * dp;
    }
  }
  ptr2 = l2p;

  // face terms, cellwise weights h_K^-1 / h_K
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double hK = mesh.cell_diameter(c);
    for (int lf = 0; lf < 3; ++lf) {
      const int f = mesh.cell_faces(c)[lf];
      const auto& face = mesh.face(f);
      const double sign = mesh.cell_face_sign(c, lf);
      const Vec2 nrm = sign * face.normal;
      const Vec2 pa = kRefVerts[lf];
      const Vec2 pb = kRefVerts[(lf + 1) % 3];
      const bool fwd = face.verts[0] == mesh.cell(c)[lf];
      const Vec2 va = mesh.vertex(face.verts[0]);
      const Vec2 vb = mesh.vertex(face.verts[1]);

      for (std::size_t q = 0; q < erule.points.size(); ++q) {
        const double s = erule.points[q];
        const double wq = erule.weights[q] * face.length;
        const Vec2 rp = fwd ? (1.0 - s) * pa + s * pb : (1.0 - s) * pb + s * pa;
        const Vec2 x = (1.0 - s) * va + s * vb;
        eval_cell_basis(k, rp, phi);
        eval_edge_basis(k, s, psi);

        Vec2 uh{0.0, 0.0};
        for (int i = 0; i < m; ++i) {
          uh.x += state.data[layout.u_dof(c, 0, i)] * phi[i];
          uh.y += state.data[layout.u_dof(c, 1, i)] * phi[i];
        }
        Vec2 ubh{0.0, 0.0};
        double pbh = 0.0;
        for (int j = 0; j <= k; ++j) {
          ubh.x += state.data[layout.ubar_dof(f, 0, j)] * psi[j];
          ubh.y += state.data[layout.ubar_dof(f, 1, j)] * psi[j];
          pbh += state.data[layout.pbar_dof(f, j)] * psi[j];
        }
        const Vec2 ue = u_ex ? u_ex(x) : Vec2{0, 0};
        const double pe = p_ex ? p_ex(x) : 0.0;
        const Vec2 e = ue - uh;     // cell error at the face
        const Vec2 eb = ue - ubh;   // trace error (exact trace = restriction)
        const Vec2 mismatch = eb - e;
        v2 += wq * mismatch.dot(mismatch) / hK;
        const double nm = mismatch.dot(nrm);
        r2 += wq * nm * nm / hK;
        const double dpb = pe - pbh;
        ptr2 += wq * hK * dpb * dpb;
      }
    }
  }

  // ||.||_{1,h}: trace replaced by the average of the cell values
  const auto face_avg_term = [&](int f) {
    const auto& face = mesh.face(f);
    const int ncells = face.is_boundary() ? 1 : 2;
    double acc = 0.0;
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double s = erule.points[q];
      const Vec2 va = mesh.vertex(face.verts[0]);
      const Vec2 vb = mesh.vertex(face.verts[1]);
      const Vec2 x = (1.0 - s) * va + s * vb;
      const Vec2 ue = u_ex ? u_ex(x) : Vec2{0, 0};
      Vec2 vals[2];
      for (int sd = 0; sd < ncells; ++sd) {
        const int c = face.cells[sd];
        int lf = -1;
        for (int e = 0; e < 3; ++e)
          if (mesh.cell_faces(c)[e] == f) lf = e;
        const Vec2 pa = kRefVerts[lf];
        const Vec2 pb = kRefVerts[(lf + 1) % 3];
        const bool fwd = face.verts[0] == mesh.cell(c)[lf];
        const Vec2 rp = fwd ? (1.0 - s) * pa + s * pb : (1.0 - s) * pb + s * pa;
        eval_cell_basis(k, rp, phi);
        Vec2 uh{0.0, 0.0};
        for (int i = 0; i < m; ++i) {
          uh.x += state.data[layout.u_dof(c, 0, i)] * phi[i];
          uh.y += state.data[layout.u_dof(c, 1, i)] * phi[i];
        }
        vals[sd] = ue - uh;
      }
      // boundary faces: the average operator is zero
      const Vec2 avg = ncells == 2 ? 0.5 * (vals[0] + vals[1]) : Vec2{0.0, 0.0};
      for (int sd = 0; sd < ncells; ++sd) {
        const int c = face.cells[sd];
        const double hK = mesh.cell_diameter(c);
        const Vec2 mm = avg - vals[sd];
        acc += erule.weights[q] * face.length * mm.dot(mm) / hK;
      }
    }
    return acc;
  };
  for (int f = 0; f < mesh.num_faces(); ++f) oneh_face += face_avg_term(f);

  v2 += grad2;
  n.v_norm = std::sqrt(v2);
  n.r_semi = std::sqrt(r2);
  n.v_gamma = std::sqrt(v2 + gamma / mu * r2);
  n.p_norm = std::sqrt(ptr2);
  n.one_h = std::sqrt(grad2 + oneh_face);
  n.l2_u = std::sqrt(l2u);
  n.l2_p = std::sqrt(l2p);
  return n;
}

NormSet compute_norms(const Mesh& mesh, const SpaceLayout& layout,
                      const StateVector& state, double gamma, double mu) {
  return compute_error_norms(mesh, layout, state, nullptr, nullptr, nullptr,
                             gamma, mu);
}

}  // namespace hdgns
