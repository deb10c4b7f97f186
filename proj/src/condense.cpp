#include "hdgns/condense.hpp"

#include <cmath>

#include "hdgns/parallel.hpp"

namespace hdgns {

namespace {

void check_local_factor(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, int cell) {
  // the blocks can be legitimately ill-conditioned at large augmentation
  // weights, so only an exact breakdown counts as singular
  const auto diag = lu.matrixLU().diagonal();
  const double dmin = diag.cwiseAbs().minCoeff();
  if (dmin == 0.0 || !std::isfinite(diag.cwiseAbs().sum()))
    throw Error("condense: singular local saddle block in cell " +
                std::to_string(cell) +
                " (check the penalty parameter and cell geometry)");
}

}  // namespace

CondensedSystem condense(const BlockSystem& sys, const Constraints& cons,
                         const Vector& rhs) {
  const Mesh& mesh = *sys.mesh;
  const SpaceLayout& l = *sys.layout;
  const int k = l.degree;
  const int nx = l.cell_u + l.cell_p;
  const int ny = 9 * (k + 1);
  const int nub_f = 2 * (k + 1);

  CondensedSystem cond;
  cond.mesh = &mesh;
  cond.layout = &l;
  cond.n_ubar = l.n_ubar;
  cond.n_pbar = l.n_pbar;
  cond.gamma = sys.gamma;
  cond.Mbar = sys.Mbar;
  const long nc_total = l.condensed();

  // fixed flags/values in condensed indexing
  std::vector<char> yfixed(nc_total, 0);
  Vector yvalue(nc_total, 0.0);
  for (long i = 0; i < l.n_ubar; ++i) {
    yfixed[i] = cons.fixed[l.off_ubar + i];
    yvalue[i] = cons.values[l.off_ubar + i];
  }
  for (long i = 0; i < l.n_pbar; ++i) {
    yfixed[l.n_ubar + i] = cons.fixed[l.off_pbar + i];
    yvalue[l.n_ubar + i] = cons.values[l.off_pbar + i];
  }

  cond.rhs.assign(nc_total, 0.0);
  for (long i = 0; i < l.n_ubar; ++i) cond.rhs[i] = rhs[l.off_ubar + i];
  for (long i = 0; i < l.n_pbar; ++i) cond.rhs[l.n_ubar + i] = rhs[l.off_pbar + i];
  for (long i = 0; i < nc_total; ++i)
    if (yfixed[i]) cond.rhs[i] = yvalue[i];

  const int ncells = mesh.num_cells();
  cond.cells.resize(ncells);
  std::vector<Eigen::MatrixXd> schur(ncells);
  std::vector<Eigen::VectorXd> yrhs(ncells);

  parallel_for(ncells, [&](int c) {
    const Eigen::MatrixXd& K = sys.local_K[c];
    auto& cd = cond.cells[c];
    cd.ydofs.resize(ny);
    for (int lf = 0; lf < 3; ++lf) {
      const int f = mesh.cell_faces(c)[lf];
      for (int comp = 0; comp < 2; ++comp)
        for (int j = 0; j <= k; ++j)
          cd.ydofs[lf * nub_f + comp * (k + 1) + j] = l.cond_ubar(f, comp, j);
      for (int j = 0; j <= k; ++j)
        cd.ydofs[6 * (k + 1) + lf * (k + 1) + j] = l.cond_pbar(f, j);
    }

    Eigen::MatrixXd Axx = K.topLeftCorner(nx, nx);
    Eigen::MatrixXd Axy = K.topRightCorner(nx, ny);
    Eigen::MatrixXd Ayx = K.bottomLeftCorner(ny, nx);
    Eigen::MatrixXd Ayy = K.bottomRightCorner(ny, ny);

    Eigen::VectorXd bx(nx);
    for (int i = 0; i < l.cell_u; ++i) bx[i] = rhs[l.u_dof(c, 0, 0) + i];
    for (int i = 0; i < l.cell_p; ++i) bx[l.cell_u + i] = rhs[l.p_dof(c, i)];

    // move constrained face columns to the local rhs
    for (int j = 0; j < ny; ++j) {
      if (!yfixed[cd.ydofs[j]]) continue;
      const double v = yvalue[cd.ydofs[j]];
      if (v != 0.0) bx -= v * Axy.col(j);
      Axy.col(j).setZero();
      Ayx.row(j).setZero();
      Ayy.row(j).setZero();
      Ayy.col(j).setZero();
    }

    cd.lu = Eigen::PartialPivLU<Eigen::MatrixXd>(Axx);
    check_local_factor(cd.lu, c);
    const Eigen::MatrixXd X = cd.lu.solve(Axy);
    const Eigen::VectorXd xb = cd.lu.solve(bx);
    schur[c] = Ayy - Ayx * X;
    yrhs[c] = -(Ayx * xb);
    cd.Kxy = std::move(Axy);
    cd.bx = std::move(bx);
  });

  std::vector<Triplet> trips;
  for (int c = 0; c < ncells; ++c) {
    const auto& cd = cond.cells[c];
    for (int r = 0; r < ny; ++r) {
      const long gr = cd.ydofs[r];
      if (yfixed[gr]) continue;
      cond.rhs[gr] += yrhs[c][r];
      for (int cc = 0; cc < ny; ++cc) {
        const long gc = cd.ydofs[cc];
        if (yfixed[gc]) continue;
        trips.push_back({int(gr), int(gc), schur[c](r, cc)});
      }
    }
  }
  for (long i = 0; i < nc_total; ++i)
    if (yfixed[i]) trips.push_back({int(i), int(i), 1.0});
  cond.K = SparseMatrix::from_triplets(int(nc_total), int(nc_total),
                                       std::move(trips));
  cond.fixed = std::move(yfixed);
  return cond;
}

StateVector back_substitute(const CondensedSystem& cond, const Vector& y) {
  const SpaceLayout& l = *cond.layout;
  StateVector state = StateVector::zero(l);
  for (long i = 0; i < l.n_ubar; ++i) state.data[l.off_ubar + i] = y[i];
  for (long i = 0; i < l.n_pbar; ++i)
    state.data[l.off_pbar + i] = y[l.n_ubar + i];

  const int ny = 9 * (l.degree + 1);
  const int ncells = cond.mesh->num_cells();
  parallel_for(ncells, [&](int c) {
    const auto& cd = cond.cells[c];
    Eigen::VectorXd yloc(ny);
    for (int j = 0; j < ny; ++j) yloc[j] = y[cd.ydofs[j]];
    const Eigen::VectorXd x = cd.lu.solve(cd.bx - cd.Kxy * yloc);
    for (int i = 0; i < l.cell_u; ++i) state.data[l.u_dof(c, 0, 0) + i] = x[i];
    for (int i = 0; i < l.cell_p; ++i) state.data[l.p_dof(c, i)] = x[l.cell_u + i];
  });
  return state;
}

Eigen::MatrixXd dense_monolithic(const BlockSystem& sys, const Constraints& cons,
                                 Augmentation aug) {
  const long n = sys.layout->total();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const SparseMatrix mono = aug == Augmentation::gh
                                ? monolithic_matrix(sys, cons)
                                : monolithic_matrix_dh(sys, cons);
  const auto& off = mono.row_offsets();
  const auto& col = mono.col_indices();
  const auto& val = mono.values();
  for (int r = 0; r < mono.rows(); ++r)
    for (long i = off[r]; i < off[r + 1]; ++i) M(r, col[i]) += val[i];
  return M;
}

DenseCondensed condense_dense_reference(const BlockSystem& sys,
                                        const Constraints& cons,
                                        const Vector& rhs, Augmentation aug,
                                        long max_dofs) {
  const SpaceLayout& l = *sys.layout;
  if (l.total() > max_dofs)
    throw Error("condense_dense_reference: " + std::to_string(l.total()) +
                " dofs exceed the dense-path guard of " + std::to_string(max_dofs));
  if (aug == Augmentation::dh && !sys.D_uu)
    throw Error("condense_dense_reference: system has no assembled D_uu");

  const Eigen::MatrixXd M = dense_monolithic(sys, cons, aug);
  const Vector b = monolithic_rhs(sys, cons, rhs);
  const long nx = l.n_u + l.n_p;
  const long nyy = l.condensed();

  const Eigen::MatrixXd Axx = M.topLeftCorner(nx, nx);
  const Eigen::MatrixXd Axy = M.topRightCorner(nx, nyy);
  const Eigen::MatrixXd Ayx = M.bottomLeftCorner(nyy, nx);
  const Eigen::MatrixXd Ayy = M.bottomRightCorner(nyy, nyy);
  Eigen::VectorXd bx(nx), by(nyy);
  for (long i = 0; i < nx; ++i) bx[i] = b[i];
  for (long i = 0; i < nyy; ++i) by[i] = b[nx + i];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Axx);
  DenseCondensed out;
  out.K = Ayy - Ayx * lu.solve(Axy);
  out.rhs = by - Ayx * lu.solve(bx);
  out.n_ubar = l.n_ubar;
  out.n_pbar = l.n_pbar;
  return out;
}

}  // namespace hdgns
