#include "hdgns/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "hdgns/basis.hpp"
#include "hdgns/parallel.hpp"
#include "hdgns/quadrature.hpp"

namespace hdgns {

BoundaryData BoundaryData::lid_cavity() {
  BoundaryData b;
  b.velocity = [](Vec2 x) {
    return x.y >= 1.0 - 1e-12 ? Vec2{1.0, 0.0} : Vec2{0.0, 0.0};
  };
  b.forcing = nullptr;
  b.dirichlet_tags = {BoundaryTag::wall, BoundaryTag::lid};
  return b;
}

BoundaryData BoundaryData::backward_facing_step() {
  BoundaryData b;
  b.velocity = [](Vec2 x) {
    if (x.x <= 1e-12) return Vec2{4.0 * (2.0 - x.y) * (x.y - 1.0), 0.0};
    return Vec2{0.0, 0.0};
  };
  b.forcing = nullptr;
  b.dirichlet_tags = {BoundaryTag::wall, BoundaryTag::inflow};
  b.outflow_tags = {BoundaryTag::outflow};
  return b;
}

BoundaryData BoundaryData::manufactured(std::function<Vec2(Vec2)> g,
                                        std::function<Vec2(Vec2)> f) {
  BoundaryData b;
  b.velocity = std::move(g);
  b.forcing = std::move(f);
  b.dirichlet_tags = {BoundaryTag::wall, BoundaryTag::lid, BoundaryTag::inflow};
  return b;
}

StateVector StateVector::initial(const SpaceLayout& layout, const Constraints& c) {
  StateVector s = StateVector::zero(layout);
  for (long i = 0; i < layout.total(); ++i)
    if (c.is_fixed(i)) s.data[i] = c.values[i];
  return s;
}

Constraints build_constraints(const Mesh& mesh, const SpaceLayout& layout,
                              const BoundaryData& bdata) {
  Constraints c;
  c.fixed.assign(layout.total(), 0);
  c.values.assign(layout.total(), 0.0);
  const int k = layout.degree;
  const auto rule = edge_quadrature(2 * k + 6);
  std::vector<double> psi;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    if (bdata.dirichlet_tags.count(face.tag)) {
      const Vec2 a = mesh.vertex(face.verts[0]);
      const Vec2 b = mesh.vertex(face.verts[1]);
      std::vector<double> cx(k + 1, 0.0), cy(k + 1, 0.0);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        const Vec2 x = (1.0 - s) * a + s * b;
        const Vec2 g = bdata.velocity ? bdata.velocity(x) : Vec2{0.0, 0.0};
        eval_edge_basis(k, s, psi);
        for (int j = 0; j <= k; ++j) {
          cx[j] += rule.weights[q] * g.x * psi[j];
          cy[j] += rule.weights[q] * g.y * psi[j];
        }
      }
      for (int j = 0; j <= k; ++j) {
        const long dx = layout.ubar_dof(f, 0, j);
        const long dy = layout.ubar_dof(f, 1, j);
        c.fixed[dx] = 1;
        c.values[dx] = cx[j];
        c.fixed[dy] = 1;
        c.values[dy] = cy[j];
        c.num_fixed += 2;
      }
    } else if (bdata.outflow_tags.count(face.tag)) {
      for (int j = 0; j <= k; ++j) {
        const long d = layout.pbar_dof(f, j);
        c.fixed[d] = 1;
        c.values[d] = 0.0;
        c.num_fixed += 1;
      }
    } else if (face.tag != BoundaryTag::none) {
      throw Error("build_constraints: unhandled boundary tag '" +
                  to_string(face.tag) + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// reference tables and element kernels
// ---------------------------------------------------------------------------

namespace {

const Vec2 kRefVerts[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

struct RefTables {
  int k = 1;
  int m = 0;   // dim P_k
  int mp = 0;  // dim P_{k-1}
  QuadratureRule vol;
  EdgeQuadratureRule edge;
  // volume tables: [q][i]
  std::vector<std::vector<double>> vphi;
  std::vector<std::vector<Vec2>> vgrad;
  // face tables: [local edge][orientation][q][i]
  std::vector<std::vector<double>> fphi[3][2];
  std::vector<std::vector<Vec2>> fgrad[3][2];
  // edge basis at face quadrature points: [q][j]
  std::vector<std::vector<double>> epsi;

  RefTables(int degree, int vol_exactness, int edge_exactness) : k(degree) {
    m = cell_basis_size(k);
    mp = cell_basis_size(k - 1);
    vol = triangle_quadrature(vol_exactness);
    edge = edge_quadrature(edge_exactness);
    const int nq = static_cast<int>(vol.points.size());
    vphi.resize(nq);
    vgrad.resize(nq);
    for (int q = 0; q < nq; ++q)
      eval_cell_basis_grad(k, vol.points[q], vphi[q], vgrad[q]);
    const int ne = static_cast<int>(edge.points.size());
    epsi.resize(ne);
    for (int q = 0; q < ne; ++q) eval_edge_basis(k, edge.points[q], epsi[q]);
    for (int le = 0; le < 3; ++le) {
      const Vec2 pa = kRefVerts[le];
      const Vec2 pb = kRefVerts[(le + 1) % 3];
      for (int o = 0; o < 2; ++o) {
        fphi[le][o].resize(ne);
        fgrad[le][o].resize(ne);
        for (int q = 0; q < ne; ++q) {
          const double s = edge.points[q];
          const Vec2 p = o == 0 ? (1.0 - s) * pa + s * pb
                                : (1.0 - s) * pb + s * pa;
          eval_cell_basis_grad(k, p, fphi[le][o][q], fgrad[le][o][q]);
        }
      }
    }
  }
};

struct CellGeometry {
  Vec2 v0;
  double jac[2][2];     // [v1-v0 | v2-v0]
  double inv_jac_t[2][2];
  double det = 0.0;     // 2 * area
  double hK = 0.0;
};

CellGeometry cell_geometry(const Mesh& mesh, int c) {
  CellGeometry g;
  const auto& cv = mesh.cell(c);
  g.v0 = mesh.vertex(cv[0]);
  const Vec2 e1 = mesh.vertex(cv[1]) - g.v0;
  const Vec2 e2 = mesh.vertex(cv[2]) - g.v0;
  g.jac[0][0] = e1.x;
  g.jac[1][0] = e1.y;
  g.jac[0][1] = e2.x;
  g.jac[1][1] = e2.y;
  g.det = e1.cross(e2);
  const double inv_det = 1.0 / g.det;
  // inverse transpose of jac
  g.inv_jac_t[0][0] = g.jac[1][1] * inv_det;
  g.inv_jac_t[0][1] = -g.jac[1][0] * inv_det;
  g.inv_jac_t[1][0] = -g.jac[0][1] * inv_det;
  g.inv_jac_t[1][1] = g.jac[0][0] * inv_det;
  g.hK = mesh.cell_diameter(c);
  return g;
}

inline Vec2 physical_grad(const CellGeometry& g, Vec2 ref) {
  return {g.inv_jac_t[0][0] * ref.x + g.inv_jac_t[0][1] * ref.y,
          g.inv_jac_t[1][0] * ref.x + g.inv_jac_t[1][1] * ref.y};
}

// Local dof bookkeeping. v-space = [u_x(m) u_y(m) | per-face ubar_x, ubar_y],
// full local space = [u p | ubar pbar].
struct LocalIndex {
  int k, m, mp;
  int nu() const { return 2 * m; }                 // cell velocity dofs
  int nv() const { return 2 * m + 6 * (k + 1); }   // velocity + trace velocity
  int npb() const { return 3 * (k + 1); }          // trace pressure dofs
  int full() const { return 2 * m + mp + 9 * (k + 1); }

  int u(int comp, int i) const { return comp * m + i; }
  int ub(int lf, int comp, int j) const {
    return 2 * m + lf * 2 * (k + 1) + comp * (k + 1) + j;
  }
  // positions in the full local matrix
  int full_u(int comp, int i) const { return comp * m + i; }
  int full_p(int i) const { return 2 * m + i; }
  int full_ub(int lf, int comp, int j) const {
    return 2 * m + mp + lf * 2 * (k + 1) + comp * (k + 1) + j;
  }
  int full_pb(int lf, int j) const {
    return 2 * m + mp + 6 * (k + 1) + lf * (k + 1) + j;
  }
  // v-space index -> full index
  int v_to_full(int v) const { return v < 2 * m ? v : v + mp; }
};

struct FaceContext {
  int face = -1;
  int orient = 0;       // 0: cell edge direction matches canonical direction
  Vec2 normal;          // outward for this cell
  double length = 0.0;
};

FaceContext face_context(const Mesh& mesh, int c, int lf) {
  FaceContext ctx;
  ctx.face = mesh.cell_faces(c)[lf];
  const auto& face = mesh.face(ctx.face);
  ctx.orient = face.verts[0] == mesh.cell(c)[lf] ? 0 : 1;
  const double sign = mesh.cell_face_sign(c, lf);
  ctx.normal = sign * face.normal;
  ctx.length = face.length;
  return ctx;
}

struct LocalForms {
  Eigen::MatrixXd a;   // nv x nv
  Eigen::MatrixXd g;   // nv x nv
  Eigen::MatrixXd n;   // nv x nv
  Eigen::MatrixXd b1;  // mp x nu
  Eigen::MatrixXd b2;  // npb x nu
};

// Evaluate the state's cell velocity at a reference point given basis values.
inline Vec2 eval_state_velocity(const Vector& coeffs, long off_x, long off_y,
                                const std::vector<double>& phi, int m) {
  Vec2 w{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    w.x += coeffs[off_x + i] * phi[i];
    w.y += coeffs[off_y + i] * phi[i];
  }
  return w;
}

// Element matrices for one cell: viscous a_h, penalty g_h, convection o_h
// (mode-dependent), divergence coupling b1, normal-trace coupling b2.
LocalForms element_forms(const Mesh& mesh, const SpaceLayout& layout,
                         const RefTables& rt, int c, double alpha,
                         ConvectionMode mode, const StateVector* state,
                         const std::vector<char>& outflow_faces) {
  const int k = rt.k, m = rt.m, mp = rt.mp;
  const LocalIndex li{k, m, mp};
  LocalForms lf;
  lf.a = Eigen::MatrixXd::Zero(li.nv(), li.nv());
  lf.g = Eigen::MatrixXd::Zero(li.nv(), li.nv());
  lf.n = Eigen::MatrixXd::Zero(li.nv(), li.nv());
  lf.b1 = Eigen::MatrixXd::Zero(mp, li.nu());
  lf.b2 = Eigen::MatrixXd::Zero(li.npb(), li.nu());

  const CellGeometry geo = cell_geometry(mesh, c);
  const bool convect = mode != ConvectionMode::none;
  const bool newton = mode == ConvectionMode::newton;

  std::vector<Vec2> grad(m);

  // volume integrals
  for (std::size_t q = 0; q < rt.vol.points.size(); ++q) {
    const double wq = rt.vol.weights[q] * geo.det;
    const auto& phi = rt.vphi[q];
    for (int i = 0; i < m; ++i) grad[i] = physical_grad(geo, rt.vgrad[q][i]);

    Vec2 wvel{0.0, 0.0};
    if (convect)
      wvel = eval_state_velocity(state->data, layout.u_dof(c, 0, 0),
                                 layout.u_dof(c, 1, 0), phi, m);

    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double gg = grad[i].dot(grad[j]);
        // (2 eps(u), eps(v)) = delta_qr grad.grad + d_q phi_i d_r phi_j
        lf.a(li.u(0, i), li.u(0, j)) += wq * (gg + grad[i].x * grad[j].x);
        lf.a(li.u(0, i), li.u(1, j)) += wq * grad[i].y * grad[j].x;
        lf.a(li.u(1, i), li.u(0, j)) += wq * grad[i].x * grad[j].y;
        lf.a(li.u(1, i), li.u(1, j)) += wq * (gg + grad[i].y * grad[j].y);
        if (convect) {
          const double adv = wvel.dot(grad[i]) * phi[j];
          lf.n(li.u(0, i), li.u(0, j)) -= wq * adv;
          lf.n(li.u(1, i), li.u(1, j)) -= wq * adv;
          if (newton) {
            // derivative of the advecting field: -(u x delta) : grad v
            const double dx = phi[j] * grad[i].x;
            const double dy = phi[j] * grad[i].y;
            lf.n(li.u(0, i), li.u(0, j)) -= wq * wvel.x * dx;
            lf.n(li.u(0, i), li.u(1, j)) -= wq * wvel.x * dy;
            lf.n(li.u(1, i), li.u(0, j)) -= wq * wvel.y * dx;
            lf.n(li.u(1, i), li.u(1, j)) -= wq * wvel.y * dy;
          }
        }
      }
      for (int jp = 0; jp < mp; ++jp) {
        lf.b1(jp, li.u(0, i)) -= wq * phi[jp] * grad[i].x;
        lf.b1(jp, li.u(1, i)) -= wq * phi[jp] * grad[i].y;
      }
    }
  }

  // face integrals
  for (int lfc = 0; lfc < 3; ++lfc) {
    const FaceContext fc = face_context(mesh, c, lfc);
    const Vec2 n = fc.normal;
    const double hK_inv = 1.0 / geo.hK;
    for (std::size_t q = 0; q < rt.edge.points.size(); ++q) {
      const double wq = rt.edge.weights[q] * fc.length;
      const auto& phi = rt.fphi[lfc][fc.orient][q];
      const auto& gradref = rt.fgrad[lfc][fc.orient][q];
      const auto& psi = rt.epsi[q];
      for (int i = 0; i < m; ++i) grad[i] = physical_grad(geo, gradref[i]);

      auto gc = [](const Vec2& v, int c) { return c == 0 ? v.x : v.y; };
      const double nxy[2] = {n.x, n.y};

      // For u = phi_j e_q: (2 eps(u) n)_a = delta_aq (grad phi_j . n) + d_a phi_j n_q.
      for (int i = 0; i < m; ++i) {
        const double gin = grad[i].dot(n);
        for (int j = 0; j < m; ++j) {
          const double gjn = grad[j].dot(n);
          for (int rc = 0; rc < 2; ++rc) {
            for (int qc = 0; qc < 2; ++qc) {
              double v = rc == qc ? 2.0 * alpha * hK_inv * phi[i] * phi[j] : 0.0;
              const double sig_u = (rc == qc ? gjn : 0.0) + gc(grad[j], rc) * nxy[qc];
              const double sig_v = (rc == qc ? gin : 0.0) + gc(grad[i], qc) * nxy[rc];
              v -= phi[i] * sig_u + phi[j] * sig_v;
              lf.a(li.u(rc, i), li.u(qc, j)) += wq * v;
              lf.g(li.u(rc, i), li.u(qc, j)) +=
                  wq * hK_inv * nxy[rc] * nxy[qc] * phi[i] * phi[j];
            }
          }
        }
        // (v, ubar) and (vbar, u) couplings
        for (int J = 0; J <= k; ++J) {
          for (int rc = 0; rc < 2; ++rc) {
            for (int qc = 0; qc < 2; ++qc) {
              const double pen =
                  rc == qc ? 2.0 * alpha * hK_inv * phi[i] * psi[J] : 0.0;
              const double sig_v = (qc == rc ? gin : 0.0) + gc(grad[i], qc) * nxy[rc];
              lf.a(li.u(rc, i), li.ub(lfc, qc, J)) += wq * (psi[J] * sig_v - pen);
              const double sig_u = (rc == qc ? gin : 0.0) + gc(grad[i], rc) * nxy[qc];
              lf.a(li.ub(lfc, rc, J), li.u(qc, i)) += wq * (psi[J] * sig_u - pen);
              const double gpen = wq * hK_inv * nxy[rc] * nxy[qc] * phi[i] * psi[J];
              lf.g(li.u(rc, i), li.ub(lfc, qc, J)) -= gpen;
              lf.g(li.ub(lfc, rc, J), li.u(qc, i)) -= gpen;
            }
          }
        }
        // b2: <qbar, u . n> on this cell boundary
        for (int J = 0; J <= k; ++J) {
          lf.b2(lfc * (k + 1) + J, li.u(0, i)) += wq * psi[J] * phi[i] * n.x;
          lf.b2(lfc * (k + 1) + J, li.u(1, i)) += wq * psi[J] * phi[i] * n.y;
        }
      }
      // (ubar, vbar) couplings of a_h and g_h
      for (int I = 0; I <= k; ++I) {
        for (int J = 0; J <= k; ++J) {
          for (int rc = 0; rc < 2; ++rc) {
            const double nr = rc == 0 ? n.x : n.y;
            for (int qc = 0; qc < 2; ++qc) {
              const double nq = qc == 0 ? n.x : n.y;
              double v = 0.0;
              if (rc == qc) v += 2.0 * alpha * hK_inv * psi[I] * psi[J];
              lf.a(li.ub(lfc, rc, I), li.ub(lfc, qc, J)) += wq * v;
              lf.g(li.ub(lfc, rc, I), li.ub(lfc, qc, J)) +=
                  wq * hK_inv * nr * nq * psi[I] * psi[J];
            }
          }
        }
      }

      if (convect) {
        const bool open_face =
            !outflow_faces.empty() && outflow_faces[fc.face] != 0;
        const Vec2 wvel = eval_state_velocity(
            state->data, layout.u_dof(c, 0, 0), layout.u_dof(c, 1, 0), phi, m);
        const double wn = wvel.dot(n);
        const double awn = std::abs(wn);
        const double cu = 0.5 * (wn + awn);   // coefficient of u in the flux
        // open boundary: only the outgoing flux (w.n)+ u, tested against v
        const double cub = open_face ? 0.0 : 0.5 * (wn - awn);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            const double v = cu * phi[j] * phi[i];
            lf.n(li.u(0, i), li.u(0, j)) += wq * v;
            lf.n(li.u(1, i), li.u(1, j)) += wq * v;
          }
          for (int J = 0; J <= k; ++J) {
            const double v = cub * psi[J] * phi[i];
            lf.n(li.u(0, i), li.ub(lfc, 0, J)) += wq * v;
            lf.n(li.u(1, i), li.ub(lfc, 1, J)) += wq * v;
            if (!open_face) {
              const double vt = cu * phi[i] * psi[J];
              lf.n(li.ub(lfc, 0, J), li.u(0, i)) -= wq * vt;
              lf.n(li.ub(lfc, 1, J), li.u(1, i)) -= wq * vt;
            }
          }
        }
        if (!open_face) {
          for (int I = 0; I <= k; ++I)
            for (int J = 0; J <= k; ++J) {
              const double v = cub * psi[J] * psi[I];
              lf.n(li.ub(lfc, 0, I), li.ub(lfc, 0, J)) -= wq * v;
              lf.n(li.ub(lfc, 1, I), li.ub(lfc, 1, J)) -= wq * v;
            }
        }

        if (newton) {
          // theta = 1/2 [(u + ubar) + sign(w.n)(u - ubar)] at the current state
          const double sgn = wn > 0.0 ? 1.0 : (wn < 0.0 ? -1.0 : 0.0);
          Vec2 ubar{0.0, 0.0};
          const int fidx = fc.face;
          for (int J = 0; J <= k; ++J) {
            ubar.x += state->data[layout.ubar_dof(fidx, 0, J)] * psi[J];
            ubar.y += state->data[layout.ubar_dof(fidx, 1, J)] * psi[J];
          }
          // on an open face the flux is (w.n)+ u: derivative coefficient
          // 1/2 (1 + sign) u
          const Vec2 theta = open_face
                                 ? 0.5 * (1.0 + sgn) * wvel
                                 : 0.5 * ((wvel + ubar) + sgn * (wvel - ubar));
          for (int j = 0; j < m; ++j) {
            for (int qc = 0; qc < 2; ++qc) {
              const double dn = phi[j] * (qc == 0 ? n.x : n.y);
              for (int i = 0; i < m; ++i) {
                lf.n(li.u(0, i), li.u(qc, j)) += wq * phi[i] * theta.x * dn;
                lf.n(li.u(1, i), li.u(qc, j)) += wq * phi[i] * theta.y * dn;
              }
              if (!open_face) {
                for (int I = 0; I <= k; ++I) {
                  lf.n(li.ub(lfc, 0, I), li.u(qc, j)) -= wq * psi[I] * theta.x * dn;
                  lf.n(li.ub(lfc, 1, I), li.u(qc, j)) -= wq * psi[I] * theta.y * dn;
                }
              }
            }
          }
        }
      }
    }
  }
  return lf;
}

int volume_exactness(int k, ConvectionMode mode) {
  return mode == ConvectionMode::none ? 2 * k + 2 : 3 * k + 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// global assembly
// ---------------------------------------------------------------------------

namespace {

struct GlobalScatter {
  std::vector<Triplet> a_uu, a_uub, a_ubu, a_ubub;
  std::vector<Triplet> g_uu, g_uub, g_ubu, g_ubub;
  std::vector<Triplet> n_uu, n_uub, n_ubu, n_ubub;
  std::vector<Triplet> b_pu, b_pbu;
};

// Scatter one cell's local forms into global triplet lists.
void scatter_cell(const Mesh& mesh, const SpaceLayout& layout, int c,
                  const LocalForms& lf, bool with_convection, GlobalScatter& gs) {
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const int mp = layout.cell_p;
  const LocalIndex li{k, m, mp};

  // global dof of each v-space index; flag whether it is a u or ubar dof
  const int nv = li.nv();
  std::vector<long> gdof(nv);
  std::vector<char> is_ubar(nv, 0);
  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < m; ++i) gdof[li.u(comp, i)] = layout.u_dof(c, comp, i);
  for (int lfc = 0; lfc < 3; ++lfc) {
    const int f = mesh.cell_faces(c)[lfc];
    for (int comp = 0; comp < 2; ++comp)
      for (int j = 0; j <= k; ++j) {
        const int v = li.ub(lfc, comp, j);
        gdof[v] = layout.ubar_dof(f, comp, j);
        is_ubar[v] = 1;
      }
  }
  const long off_ubar = layout.off_ubar;

  auto push = [&](std::vector<Triplet>& uu, std::vector<Triplet>& uub,
                  std::vector<Triplet>& ubu, std::vector<Triplet>& ubub,
                  const Eigen::MatrixXd& mat) {
    for (int r = 0; r < nv; ++r) {
      for (int cc = 0; cc < nv; ++cc) {
        const double v = mat(r, cc);
        const long gr = gdof[r], gc = gdof[cc];
        if (!is_ubar[r] && !is_ubar[cc])
          uu.push_back({int(gr), int(gc), v});
        else if (!is_ubar[r])
          uub.push_back({int(gr), int(gc - off_ubar), v});
        else if (!is_ubar[cc])
          ubu.push_back({int(gr - off_ubar), int(gc), v});
        else
          ubub.push_back({int(gr - off_ubar), int(gc - off_ubar), v});
      }
    }
  };
  push(gs.a_uu, gs.a_uub, gs.a_ubu, gs.a_ubub, lf.a);
  push(gs.g_uu, gs.g_uub, gs.g_ubu, gs.g_ubub, lf.g);
  if (with_convection) push(gs.n_uu, gs.n_uub, gs.n_ubu, gs.n_ubub, lf.n);

  for (int jp = 0; jp < mp; ++jp) {
    const long gr = layout.p_dof(c, jp) - layout.off_p;
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < m; ++i)
        gs.b_pu.push_back(
            {int(gr), int(gdof[li.u(comp, i)]), lf.b1(jp, li.u(comp, i))});
  }
  for (int lfc = 0; lfc < 3; ++lfc) {
    const int f = mesh.cell_faces(c)[lfc];
    for (int J = 0; J <= k; ++J) {
      const long gr = layout.pbar_dof(f, J) - layout.off_pbar;
      for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < m; ++i)
          gs.b_pbu.push_back({int(gr), int(gdof[li.u(comp, i)]),
                              lf.b2(lfc * (k + 1) + J, li.u(comp, i))});
    }
  }
}

}  // namespace

BlockSystem assemble_block_system(const Mesh& mesh, const SpaceLayout& layout,
                                  const AssemblyOptions& opts,
                                  const StateVector& w,
                                  const BoundaryData& bdata) {
  if (opts.alpha <= 0.0) throw Error("assemble: alpha must be > 0");
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const int mp = layout.cell_p;
  const LocalIndex li{k, m, mp};
  const RefTables rt(k, volume_exactness(k, opts.mode), volume_exactness(k, opts.mode));

  std::vector<char> outflow_faces(mesh.num_faces(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    if (face.is_boundary() && bdata.outflow_tags.count(face.tag))
      outflow_faces[f] = 1;
  }

  const int nc = mesh.num_cells();
  std::vector<LocalForms> locals(nc);
  parallel_for(nc, [&](int c) {
    locals[c] = element_forms(mesh, layout, rt, c, opts.alpha, opts.mode, &w,
                              outflow_faces);
  });

  BlockSystem sys;
  sys.mesh = &mesh;
  sys.layout = &layout;
  sys.mu = opts.mu;
  sys.alpha = opts.alpha;
  sys.gamma = opts.gamma;
  sys.mode = opts.mode;
  sys.outflow_faces = std::move(outflow_faces);
  sys.w = w;

  GlobalScatter gs;
  const bool convect = opts.mode != ConvectionMode::none;
  for (int c = 0; c < nc; ++c) scatter_cell(mesh, layout, c, locals[c], convect, gs);

  const int nu = int(layout.n_u), np = int(layout.n_p);
  const int nub = int(layout.n_ubar), npb = int(layout.n_pbar);
  sys.A_uu = SparseMatrix::from_triplets(nu, nu, std::move(gs.a_uu));
  sys.A_uubar = SparseMatrix::from_triplets(nu, nub, std::move(gs.a_uub));
  sys.A_ubaru = SparseMatrix::from_triplets(nub, nu, std::move(gs.a_ubu));
  sys.A_ubarubar = SparseMatrix::from_triplets(nub, nub, std::move(gs.a_ubub));
  sys.G_uu = SparseMatrix::from_triplets(nu, nu, std::move(gs.g_uu));
  sys.G_uubar = SparseMatrix::from_triplets(nu, nub, std::move(gs.g_uub));
  sys.G_ubaru = SparseMatrix::from_triplets(nub, nu, std::move(gs.g_ubu));
  sys.G_ubarubar = SparseMatrix::from_triplets(nub, nub, std::move(gs.g_ubub));
  sys.N_uu = SparseMatrix::from_triplets(nu, nu, std::move(gs.n_uu));
  sys.N_uubar = SparseMatrix::from_triplets(nu, nub, std::move(gs.n_uub));
  sys.N_ubaru = SparseMatrix::from_triplets(nub, nu, std::move(gs.n_ubu));
  sys.N_ubarubar = SparseMatrix::from_triplets(nub, nub, std::move(gs.n_ubub));
  sys.B_pu = SparseMatrix::from_triplets(np, nu, std::move(gs.b_pu));
  sys.B_pbaru = SparseMatrix::from_triplets(npb, nu, std::move(gs.b_pbu));
  sys.Mbar = assemble_trace_mass(mesh, layout);
  sys.load = assemble_load(mesh, layout, bdata, opts.mode);

  // dense local jacobians [u p | ubar pbar] for static condensation
  sys.local_K.resize(nc);
  parallel_for(nc, [&](int c) {
    const LocalForms& lfc = locals[c];
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(li.full(), li.full());
    const int nv = li.nv();
    for (int r = 0; r < nv; ++r)
      for (int cc = 0; cc < nv; ++cc) {
        double v = opts.mu * lfc.a(r, cc) + lfc.n(r, cc);
        if (opts.gamma != 0.0) v += opts.gamma * lfc.g(r, cc);
        K(li.v_to_full(r), li.v_to_full(cc)) += v;
      }
    for (int jp = 0; jp < mp; ++jp)
      for (int iu = 0; iu < li.nu(); ++iu) {
        K(li.full_p(jp), iu) += lfc.b1(jp, iu);
        K(iu, li.full_p(jp)) += lfc.b1(jp, iu);
      }
    for (int jb = 0; jb < li.npb(); ++jb) {
      const int lfidx = jb / (k + 1), J = jb % (k + 1);
      for (int iu = 0; iu < li.nu(); ++iu) {
        K(li.full_pb(lfidx, J), iu) += lfc.b2(jb, iu);
        K(iu, li.full_pb(lfidx, J)) += lfc.b2(jb, iu);
      }
    }
    sys.local_K[c] = std::move(K);
  });
  return sys;
}

StokesBlocks assemble_stokes_forms(const Mesh& mesh, const SpaceLayout& layout,
                                   double mu, double alpha) {
  AssemblyOptions opts;
  opts.mu = mu;
  opts.alpha = alpha;
  opts.mode = ConvectionMode::none;
  BoundaryData bd;
  bd.velocity = nullptr;
  const StateVector w = StateVector::zero(layout);
  BlockSystem sys = assemble_block_system(mesh, layout, opts, w, bd);
  StokesBlocks out;
  out.A_uu = std::move(sys.A_uu);
  out.A_uubar = std::move(sys.A_uubar);
  out.A_ubaru = std::move(sys.A_ubaru);
  out.A_ubarubar = std::move(sys.A_ubarubar);
  out.B_pu = std::move(sys.B_pu);
  out.B_pbaru = std::move(sys.B_pbaru);
  out.mu = mu;
  out.alpha = alpha;
  return out;
}

ConvectionBlocks assemble_convection(const Mesh& mesh, const SpaceLayout& layout,
                                     const StateVector& w, ConvectionMode mode) {
  for (double v : w.data)
    if (!std::isfinite(v)) throw Error("assemble_convection: non-finite state");
  AssemblyOptions opts;
  opts.mode = mode;
  BoundaryData bd;
  bd.velocity = nullptr;
  BlockSystem sys = assemble_block_system(mesh, layout, opts, w, bd);
  return ConvectionBlocks{std::move(sys.N_uu), std::move(sys.N_uubar),
                          std::move(sys.N_ubaru), std::move(sys.N_ubarubar)};
}

GhBlocks assemble_gh(const Mesh& mesh, const SpaceLayout& layout) {
  AssemblyOptions opts;
  BoundaryData bd;
  bd.velocity = nullptr;
  const StateVector w = StateVector::zero(layout);
  BlockSystem sys = assemble_block_system(mesh, layout, opts, w, bd);
  return GhBlocks{std::move(sys.G_uu), std::move(sys.G_uubar),
                  std::move(sys.G_ubaru), std::move(sys.G_ubarubar)};
}

SparseMatrix assemble_dh(const Mesh& mesh, const SpaceLayout& layout) {
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const auto rule = edge_quadrature(2 * k + 2);
  std::vector<double> phi_a, phi_b;
  std::vector<Triplet> trips;

  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    const Vec2 n = face.normal;
    const double w_h = 1.0 / face.length;  // h_F^-1
    // jump operator: [[v.n]] = v0.n0 + v1.n1 with n0 = n, n1 = -n
    const int ncells = face.is_boundary() ? 1 : 2;
    std::vector<std::pair<int, double>> sides;  // (cell, sign)
    sides.push_back({face.cells[0], 1.0});
    if (ncells == 2) sides.push_back({face.cells[1], -1.0});

    // local face index and orientation for each side
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double s = rule.points[q];
      const double wq = rule.weights[q] * face.length * w_h;
      // normal trace of each side's basis at this point
      std::vector<std::vector<double>> trace(ncells);  // [side][2m]
      for (int sd = 0; sd < ncells; ++sd) {
        const int c = sides[sd].first;
        int lfc = -1;
        for (int e = 0; e < 3; ++e)
          if (mesh.cell_faces(c)[e] == f) lfc = e;
        const Vec2 pa = kRefVerts[lfc];
        const Vec2 pb = kRefVerts[(lfc + 1) % 3];
        const bool fwd = face.verts[0] == mesh.cell(c)[lfc];
        const Vec2 p = fwd ? (1.0 - s) * pa + s * pb : (1.0 - s) * pb + s * pa;
        eval_cell_basis(k, p, phi_a);
        trace[sd].assign(2 * m, 0.0);
        const double sgn = sides[sd].second;
        for (int i = 0; i < m; ++i) {
          trace[sd][i] = sgn * phi_a[i] * n.x;
          trace[sd][m + i] = sgn * phi_a[i] * n.y;
        }
      }
      for (int sa = 0; sa < ncells; ++sa)
        for (int sb = 0; sb < ncells; ++sb) {
          const int ca = sides[sa].first, cb = sides[sb].first;
          for (int i = 0; i < 2 * m; ++i) {
            if (trace[sa][i] == 0.0) continue;
            const long gr = layout.u_dof(ca, i / m, i % m);
            for (int j = 0; j < 2 * m; ++j) {
              const long gc = layout.u_dof(cb, j / m, j % m);
              trips.push_back({int(gr), int(gc), wq * trace[sa][i] * trace[sb][j]});
            }
          }
        }
    }
  }
  return SparseMatrix::from_triplets(int(layout.n_u), int(layout.n_u),
                                     std::move(trips));
}

SparseMatrix assemble_trace_mass(const Mesh& mesh, const SpaceLayout& layout) {
  const int k = layout.degree;
  // orthonormal edge basis: the face block is h_F * L_F * I = L_F^2 * I
  std::vector<Triplet> trips;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double v = mesh.face(f).length * mesh.face(f).length;
    for (int j = 0; j <= k; ++j) {
      const int d = int(layout.pbar_dof(f, j) - layout.off_pbar);
      trips.push_back({d, d, v});
    }
  }
  return SparseMatrix::from_triplets(int(layout.n_pbar), int(layout.n_pbar),
                                     std::move(trips));
}

Vector assemble_load(const Mesh& mesh, const SpaceLayout& layout,
                     const BoundaryData& bdata, ConvectionMode mode) {
  Vector load(layout.total(), 0.0);
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();

  if (bdata.forcing) {
    const auto rule = triangle_quadrature(volume_exactness(k, mode) + 2);
    std::vector<double> phi;
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const CellGeometry geo = cell_geometry(mesh, c);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 ref = rule.points[q];
        const Vec2 x = geo.v0 + Vec2{geo.jac[0][0] * ref.x + geo.jac[0][1] * ref.y,
                                     geo.jac[1][0] * ref.x + geo.jac[1][1] * ref.y};
        const Vec2 f = bdata.forcing(x);
        const double wq = rule.weights[q] * geo.det;
        eval_cell_basis(k, ref, phi);
        for (int i = 0; i < m; ++i) {
          load[layout.u_dof(c, 0, i)] += wq * f.x * phi[i];
          load[layout.u_dof(c, 1, i)] += wq * f.y * phi[i];
        }
      }
    }
  }

  // boundary-data terms <g.n, qbar> on Dirichlet boundary faces
  if (bdata.velocity) {
    const auto rule = edge_quadrature(2 * k + 6);
    std::vector<double> psi;
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const auto& face = mesh.face(f);
      if (!face.is_boundary() || !bdata.dirichlet_tags.count(face.tag)) continue;
      const Vec2 a = mesh.vertex(face.verts[0]);
      const Vec2 b = mesh.vertex(face.verts[1]);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        const Vec2 x = (1.0 - s) * a + s * b;
        const double gn = bdata.velocity(x).dot(face.normal);
        if (gn == 0.0) continue;
        const double wq = rule.weights[q] * face.length;
        eval_edge_basis(k, s, psi);
        for (int j = 0; j <= k; ++j)
          load[layout.pbar_dof(f, j)] += wq * gn * psi[j];
      }
    }
  }
  return load;
}

Vector nonlinear_residual(const BlockSystem& sys, const StateVector& state,
                          const Constraints& cons) {
  const SpaceLayout& layout = *sys.layout;
  const Mesh& mesh = *sys.mesh;
  const long nu = layout.n_u, np = layout.n_p, nub = layout.n_ubar;
  Vector r(layout.total(), 0.0);

  const Vector u(state.data.begin(), state.data.begin() + nu);
  const Vector p(state.data.begin() + layout.off_p,
                 state.data.begin() + layout.off_p + np);
  const Vector ub(state.data.begin() + layout.off_ubar,
                  state.data.begin() + layout.off_ubar + nub);
  const Vector pb(state.data.begin() + layout.off_pbar, state.data.end());

  Vector ru(nu, 0.0), rub(nub, 0.0);
  sys.A_uu.multiply_add(sys.mu, u, ru);
  sys.A_uubar.multiply_add(sys.mu, ub, ru);
  sys.A_ubaru.multiply_add(sys.mu, u, rub);
  sys.A_ubarubar.multiply_add(sys.mu, ub, rub);
  if (sys.gamma != 0.0) {
    sys.G_uu.multiply_add(sys.gamma, u, ru);
    sys.G_uubar.multiply_add(sys.gamma, ub, ru);
    sys.G_ubaru.multiply_add(sys.gamma, u, rub);
    sys.G_ubarubar.multiply_add(sys.gamma, ub, rub);
  }
  sys.B_pu.multiply_transpose_add(1.0, p, ru);
  sys.B_pbaru.multiply_transpose_add(1.0, pb, ru);

  Vector rp(np, 0.0), rpb(layout.n_pbar, 0.0);
  sys.B_pu.multiply_add(1.0, u, rp);
  sys.B_pbaru.multiply_add(1.0, u, rpb);

  std::copy(ru.begin(), ru.end(), r.begin());
  std::copy(rp.begin(), rp.end(), r.begin() + layout.off_p);
  std::copy(rub.begin(), rub.end(), r.begin() + layout.off_ubar);
  std::copy(rpb.begin(), rpb.end(), r.begin() + layout.off_pbar);

  // convection residual o_h(w; w, .) evaluated directly
  if (sys.mode != ConvectionMode::none) {
    const int k = layout.degree;
    const int m = layout.scalar_cell_basis();
    const RefTables rt(k, volume_exactness(k, ConvectionMode::picard),
                       volume_exactness(k, ConvectionMode::picard));
    std::vector<Vec2> grad(m);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const CellGeometry geo = cell_geometry(mesh, c);
      for (std::size_t q = 0; q < rt.vol.points.size(); ++q) {
        const double wq = rt.vol.weights[q] * geo.det;
        const auto& phi = rt.vphi[q];
        for (int i = 0; i < m; ++i) grad[i] = physical_grad(geo, rt.vgrad[q][i]);
        const Vec2 wv = eval_state_velocity(state.data, layout.u_dof(c, 0, 0),
                                            layout.u_dof(c, 1, 0), phi, m);
        for (int i = 0; i < m; ++i) {
          const double adv = wv.dot(grad[i]);
          r[layout.u_dof(c, 0, i)] -= wq * wv.x * adv;
          r[layout.u_dof(c, 1, i)] -= wq * wv.y * adv;
        }
      }
      for (int lfc = 0; lfc < 3; ++lfc) {
        const FaceContext fc = face_context(mesh, c, lfc);
        for (std::size_t q = 0; q < rt.edge.points.size(); ++q) {
          const double wq = rt.edge.weights[q] * fc.length;
          const auto& phi = rt.fphi[lfc][fc.orient][q];
          const auto& psi = rt.epsi[q];
          const Vec2 wv = eval_state_velocity(state.data, layout.u_dof(c, 0, 0),
                                              layout.u_dof(c, 1, 0), phi, m);
          Vec2 wb{0.0, 0.0};
          for (int J = 0; J <= k; ++J) {
            wb.x += state.data[layout.ubar_dof(fc.face, 0, J)] * psi[J];
            wb.y += state.data[layout.ubar_dof(fc.face, 1, J)] * psi[J];
          }
          const double wn = wv.dot(fc.normal);
          const bool open_face = !sys.outflow_faces.empty() &&
                                 sys.outflow_faces[fc.face] != 0;
          const Vec2 flux = open_face
                                ? 0.5 * (wn + std::abs(wn)) * wv
                                : 0.5 * ((wn * (wv + wb)) + std::abs(wn) * (wv - wb));
          for (int i = 0; i < m; ++i) {
            r[layout.u_dof(c, 0, i)] += wq * flux.x * phi[i];
            r[layout.u_dof(c, 1, i)] += wq * flux.y * phi[i];
          }
          if (!open_face) {
            for (int J = 0; J <= k; ++J) {
              r[layout.ubar_dof(fc.face, 0, J)] -= wq * flux.x * psi[J];
              r[layout.ubar_dof(fc.face, 1, J)] -= wq * flux.y * psi[J];
            }
          }
        }
      }
    }
  }

  for (long i = 0; i < layout.total(); ++i) {
    r[i] -= sys.load[i];
    if (cons.is_fixed(i)) r[i] = 0.0;
  }
  return r;
}

// ---------------------------------------------------------------------------
// monolithic matrix and constraint handling
// ---------------------------------------------------------------------------

namespace {

enum class AugKind { gh, dh };

template <typename Fn>
void for_each_monolithic_entry(const BlockSystem& sys, Fn&& fn,
                               AugKind aug = AugKind::gh) {
  const SpaceLayout& l = *sys.layout;
  auto emit = [&](const SparseMatrix& M, long row_off, long col_off,
                  double scale) {
    const auto& off = M.row_offsets();
    const auto& col = M.col_indices();
    const auto& val = M.values();
    for (int r = 0; r < M.rows(); ++r)
      for (long i = off[r]; i < off[r + 1]; ++i)
        fn(row_off + r, col_off + col[i], scale * val[i]);
  };
  auto emit_t = [&](const SparseMatrix& M, long row_off, long col_off,
                    double scale) {
    const auto& off = M.row_offsets();
    const auto& col = M.col_indices();
    const auto& val = M.values();
    for (int r = 0; r < M.rows(); ++r)
      for (long i = off[r]; i < off[r + 1]; ++i)
        fn(row_off + col[i], col_off + r, scale * val[i]);
  };

  emit(sys.A_uu, l.off_u, l.off_u, sys.mu);
  emit(sys.A_uubar, l.off_u, l.off_ubar, sys.mu);
  emit(sys.A_ubaru, l.off_ubar, l.off_u, sys.mu);
  emit(sys.A_ubarubar, l.off_ubar, l.off_ubar, sys.mu);
  if (sys.mode != ConvectionMode::none) {
    emit(sys.N_uu, l.off_u, l.off_u, 1.0);
    emit(sys.N_uubar, l.off_u, l.off_ubar, 1.0);
    emit(sys.N_ubaru, l.off_ubar, l.off_u, 1.0);
    emit(sys.N_ubarubar, l.off_ubar, l.off_ubar, 1.0);
  }
  if (sys.gamma != 0.0) {
    if (aug == AugKind::gh) {
      emit(sys.G_uu, l.off_u, l.off_u, sys.gamma);
      emit(sys.G_uubar, l.off_u, l.off_ubar, sys.gamma);
      emit(sys.G_ubaru, l.off_ubar, l.off_u, sys.gamma);
      emit(sys.G_ubarubar, l.off_ubar, l.off_ubar, sys.gamma);
    } else {
      emit(*sys.D_uu, l.off_u, l.off_u, sys.gamma);
    }
  }
  emit(sys.B_pu, l.off_p, l.off_u, 1.0);
  emit_t(sys.B_pu, l.off_u, l.off_p, 1.0);
  emit(sys.B_pbaru, l.off_pbar, l.off_u, 1.0);
  emit_t(sys.B_pbaru, l.off_u, l.off_pbar, 1.0);
}

}  // namespace

namespace {

SparseMatrix build_monolithic(const BlockSystem& sys, const Constraints& cons,
                              AugKind aug) {
  const long n = sys.layout->total();
  std::vector<Triplet> trips;
  for_each_monolithic_entry(
      sys,
      [&](long r, long c, double v) {
        if (cons.is_fixed(r) || cons.is_fixed(c)) return;
        trips.push_back({int(r), int(c), v});
      },
      aug);
  for (long i = 0; i < n; ++i)
    if (cons.is_fixed(i)) trips.push_back({int(i), int(i), 1.0});
  return SparseMatrix::from_triplets(int(n), int(n), std::move(trips));
}

}  // namespace

SparseMatrix monolithic_matrix(const BlockSystem& sys, const Constraints& cons) {
  return build_monolithic(sys, cons, AugKind::gh);
}

SparseMatrix monolithic_matrix_dh(const BlockSystem& sys, const Constraints& cons) {
  if (!sys.D_uu) throw Error("monolithic_matrix_dh: system has no assembled D_uu");
  return build_monolithic(sys, cons, AugKind::dh);
}

Vector monolithic_rhs(const BlockSystem& sys, const Constraints& cons,
                      const Vector& rhs) {
  Vector out = rhs;
  for_each_monolithic_entry(sys, [&](long r, long c, double v) {
    if (!cons.is_fixed(r) && cons.is_fixed(c)) out[r] -= v * cons.values[c];
  });
  for (long i = 0; i < sys.layout->total(); ++i)
    if (cons.is_fixed(i)) out[i] = cons.values[i];
  return out;
}

DivergenceReport divergence_moments(const Mesh& mesh, const SpaceLayout& layout,
                                    const StateVector& state,
                                    const BoundaryData& bdata) {
  DivergenceReport rep;
  const int k = layout.degree;
  const int m = layout.scalar_cell_basis();
  const int mp = layout.cell_p;
  const RefTables rt(k, 2 * k + 2, 2 * k + 2);
  std::vector<Vec2> grad(m);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    std::vector<double> mom(mp, 0.0);
    for (std::size_t q = 0; q < rt.vol.points.size(); ++q) {
      const double wq = rt.vol.weights[q] * geo.det;
      const auto& phi = rt.vphi[q];
      for (int i = 0; i < m; ++i) grad[i] = physical_grad(geo, rt.vgrad[q][i]);
      double div = 0.0;
      for (int i = 0; i < m; ++i) {
        div += state.data[layout.u_dof(c, 0, i)] * grad[i].x;
        div += state.data[layout.u_dof(c, 1, i)] * grad[i].y;
      }
      for (int jp = 0; jp < mp; ++jp) mom[jp] += wq * div * phi[jp];
    }
    for (double v : mom) rep.max_cell_moment = std::max(rep.max_cell_moment, std::abs(v));
  }

  const auto erule = edge_quadrature(2 * k + 6);
  std::vector<double> psi, phi;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& face = mesh.face(f);
    const bool outflow = face.is_boundary() && bdata.outflow_tags.count(face.tag);
    if (outflow) continue;  // normal flux is unconstrained there
    std::vector<double> mom(k + 1, 0.0);
    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      const double s = erule.points[q];
      const double wq = erule.weights[q] * face.length;
      eval_edge_basis(k, s, psi);
      double jump = 0.0;
      const int ncells = face.is_boundary() ? 1 : 2;
      for (int sd = 0; sd < ncells; ++sd) {
        const int c = face.cells[sd];
        int lfc = -1;
        for (int e = 0; e < 3; ++e)
          if (mesh.cell_faces(c)[e] == f) lfc = e;
        const Vec2 pa = kRefVerts[lfc];
        const Vec2 pb = kRefVerts[(lfc + 1) % 3];
        const bool fwd = face.verts[0] == mesh.cell(c)[lfc];
        const Vec2 p = fwd ? (1.0 - s) * pa + s * pb : (1.0 - s) * pb + s * pa;
        eval_cell_basis(k, p, phi);
        const Vec2 uv = eval_state_velocity(state.data, layout.u_dof(c, 0, 0),
                                            layout.u_dof(c, 1, 0), phi, m);
        const double sgn = sd == 0 ? 1.0 : -1.0;
        jump += sgn * uv.dot(face.normal);
      }
      if (ncells == 1 && bdata.velocity &&
          bdata.dirichlet_tags.count(face.tag)) {
        const Vec2 a = mesh.vertex(face.verts[0]);
        const Vec2 b = mesh.vertex(face.verts[1]);
        jump -= bdata.velocity((1.0 - s) * a + s * b).dot(face.normal);
      }
      for (int j = 0; j <= k; ++j) mom[j] += wq * jump * psi[j];
    }
    for (double v : mom)
      rep.max_face_jump_moment = std::max(rep.max_face_jump_moment, std::abs(v));
  }
  return rep;
}

void remove_pressure_mean(const Mesh& mesh, const SpaceLayout& layout,
                          StateVector& state) {
  // with the orthonormal cell basis, integral of p over K is det * c0 / sqrt(2)
  double integral = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    integral += 2.0 * mesh.cell_area(c) *
                state.data[layout.p_dof(c, 0)] / std::sqrt(2.0);
  const double mean = integral / mesh.total_area();
  for (int c = 0; c < mesh.num_cells(); ++c)
    state.data[layout.p_dof(c, 0)] -= mean / std::sqrt(2.0) * 1.0;
  for (int f = 0; f < mesh.num_faces(); ++f)
    state.data[layout.pbar_dof(f, 0)] -= mean;  // edge basis 0 is constant 1
}

}  // namespace hdgns
