#include "hdgns/alprecond.hpp"

#include <cmath>

namespace hdgns {

std::string to_string(PrecondVariant v) {
  return v == PrecondVariant::G ? "G" : "GM";
}

ALPreconditioner::ALPreconditioner(const CondensedSystem& cond,
                                   const PreconditionerSpec& spec)
    : cond_(&cond), spec_(spec), n_ubar_(cond.n_ubar), n_pbar_(cond.n_pbar) {
  if (cond.gamma <= 0.0)
    throw Error("ALPreconditioner: gamma must be > 0 (the Schur approximation "
                "is -gamma^-1 Mbar)");
  Fbar_ = cond.trace_velocity_block();
  Bbar_pu_ = cond.coupling_block();

  // Shat = -gamma^-1 Mbar (variant GM), additionally + condensed pbar block
  // (variant G). Constrained pbar rows stay identity rows.
  std::vector<Triplet> trips;
  const auto add_block = [&](const SparseMatrix& M, double scale) {
    const auto& off = M.row_offsets();
    const auto& col = M.col_indices();
    const auto& val = M.values();
    for (int r = 0; r < M.rows(); ++r) {
      if (cond.fixed[n_ubar_ + r]) continue;
      for (long i = off[r]; i < off[r + 1]; ++i) {
        if (cond.fixed[n_ubar_ + col[i]]) continue;
        trips.push_back({r, col[i], scale * val[i]});
      }
    }
  };
  add_block(cond.Mbar, -1.0 / cond.gamma);
  if (spec.variant == PrecondVariant::G)
    add_block(cond.pressure_schur_block(), 1.0);
  for (long i = 0; i < n_pbar_; ++i)
    if (cond.fixed[n_ubar_ + i]) trips.push_back({int(i), int(i), 1.0});
  Shat_ = SparseMatrix::from_triplets(int(n_pbar_), int(n_pbar_), std::move(trips));

  if (spec.use_ilu)
    velocity_ilu_.emplace(Fbar_, spec.ilu_level);
  else
    velocity_lu_.emplace(Fbar_);
  if (spec.exact_inner)
    schur_lu_.emplace(Shat_);
  else
    schur_jacobi_.emplace(Shat_);
}

void ALPreconditioner::apply(const Vector& r, Vector& z) const {
  Vector r_u(r.begin(), r.begin() + n_ubar_);
  Vector r_p(r.begin() + n_ubar_, r.end());

  // z_ubar from the trace velocity block
  Vector z_u(n_ubar_, 0.0);
  if (spec_.exact_inner && velocity_lu_) {
    velocity_lu_->solve(r_u, z_u);
    max_vel_iters_ = std::max(max_vel_iters_, 1);
  } else {
    const LinOp pc = velocity_lu_ ? velocity_lu_->op() : velocity_ilu_->op();
    const SolveStats st =
        gmres(matrix_op(Fbar_), r_u, z_u, spec_.velocity_cfg, &pc);
    max_vel_iters_ = std::max(max_vel_iters_, st.iterations);
  }

  // z_pbar from the Schur approximation with the lower-triangular coupling
  Vector t(n_pbar_, 0.0);
  Bbar_pu_.multiply(z_u, t);
  for (long i = 0; i < n_pbar_; ++i) t[i] = r_p[i] - t[i];
  Vector z_p(n_pbar_, 0.0);
  if (spec_.exact_inner) {
    schur_lu_->solve(t, z_p);
    max_schur_iters_ = std::max(max_schur_iters_, 1);
  } else {
    const SolveStats st =
        fgmres(matrix_op(Shat_), t, z_p, spec_.schur_cfg, schur_jacobi_->op());
    max_schur_iters_ = std::max(max_schur_iters_, st.iterations);
  }

  z.resize(r.size());
  std::copy(z_u.begin(), z_u.end(), z.begin());
  std::copy(z_p.begin(), z_p.end(), z.begin() + n_ubar_);
}

LinOp ALPreconditioner::op() const {
  return [this](const Vector& r, Vector& z) { apply(r, z); };
}

void ALPreconditioner::reset_stats() {
  max_vel_iters_ = 0;
  max_schur_iters_ = 0;
}

Eigen::MatrixXd dense_pressure_schur(const BlockSystem& sys,
                                     const Constraints& cons, long max_dofs) {
  const DenseCondensed dc = condense_dense_reference(
      sys, cons, Vector(sys.layout->total(), 0.0), Augmentation::gh, max_dofs);
  const long nu = dc.n_ubar, np = dc.n_pbar;
  const Eigen::MatrixXd Kuu = dc.K.topLeftCorner(nu, nu);
  const Eigen::MatrixXd Kup = dc.K.topRightCorner(nu, np);
  const Eigen::MatrixXd Kpu = dc.K.bottomLeftCorner(np, nu);
  const Eigen::MatrixXd Kpp = dc.K.bottomRightCorner(np, np);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Kuu);
  return Kpp - Kpu * lu.solve(Kup);
}

SchurQualityReport schur_mass_quality(const Mesh& mesh, int k, double mu,
                                      double alpha, const BoundaryData& bdata,
                                      const std::vector<double>& gammas,
                                      long max_dofs) {
  SchurQualityReport rep;
  const SpaceLayout layout = build_layout(mesh, k);
  if (layout.total() > max_dofs)
    throw Error("schur_mass_quality: problem exceeds the dense-path guard");
  const Constraints cons = build_constraints(mesh, layout, bdata);
  const SparseMatrix Mbar_sp = assemble_trace_mass(mesh, layout);
  Eigen::MatrixXd Mbar = Eigen::MatrixXd::Zero(layout.n_pbar, layout.n_pbar);
  {
    const auto& off = Mbar_sp.row_offsets();
    const auto& col = Mbar_sp.col_indices();
    const auto& val = Mbar_sp.values();
    for (int r = 0; r < Mbar_sp.rows(); ++r)
      for (long i = off[r]; i < off[r + 1]; ++i) Mbar(r, col[i]) = val[i];
  }
  // pinned trace pressure dofs are not part of the Schur comparison
  std::vector<int> free_p;
  for (long i = 0; i < layout.n_pbar; ++i)
    if (!cons.is_fixed(layout.off_pbar + i)) free_p.push_back(int(i));
  const bool enclosed = [&] {
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const auto& face = mesh.face(f);
      if (face.is_boundary() && bdata.outflow_tags.count(face.tag)) return false;
    }
    return true;
  }();

  for (double gamma : gammas) {
    if (gamma <= 0.0) {
      rep.applicable = false;
      rep.note = "gamma = 0: the mass-matrix Schur approximation -gamma^-1 Mbar "
                 "is undefined; no augmentation to compare against";
      continue;
    }
    AssemblyOptions opts;
    opts.mu = mu;
    opts.alpha = alpha;
    opts.gamma = gamma;
    opts.mode = ConvectionMode::none;
    const StateVector w = StateVector::zero(layout);
    const BlockSystem sys = assemble_block_system(mesh, layout, opts, w, bdata);
    const Eigen::MatrixXd S = dense_pressure_schur(sys, cons, max_dofs);

    const int nf = int(free_p.size());
    Eigen::MatrixXd Sf(nf, nf), Mf(nf, nf);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j) {
        Sf(i, j) = S(free_p[i], free_p[j]);
        Mf(i, j) = Mbar(free_p[i], free_p[j]);
      }
    Eigen::MatrixXd Ssym = 0.5 * (Sf + Sf.transpose());
    Eigen::MatrixXd Mg = Mf / gamma;
    if (enclosed) {
      // enclosed flow: the Schur complement annihilates the constant trace
      // pressure; compare on its orthogonal complement
      Eigen::VectorXd v0 = Eigen::VectorXd::Zero(nf);
      for (int i = 0; i < nf; ++i) {
        const long g = free_p[i];
        if (g % layout.face_p == 0) v0[i] = 1.0;  // constant edge mode
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(v0);
      const Eigen::MatrixXd Qfull =
          qr.householderQ() * Eigen::MatrixXd::Identity(nf, nf);
      const Eigen::MatrixXd C = Qfull.rightCols(nf - 1);
      Ssym = (C.transpose() * Ssym * C).eval();
      Mg = (C.transpose() * Mg * C).eval();
    }
    SchurQualityEntry e;
    e.gamma = gamma;
    e.abs_gap = (Ssym + Mg).norm();
    e.rel_gap = e.abs_gap / Mg.norm();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(-Ssym, Mg);
    Eigen::VectorXd ev = eig.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size());
    e.eig_min = ev[0];
    e.eig_max = ev[ev.size() - 1];
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace hdgns
