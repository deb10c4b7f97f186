// Acceptance suite: every criterion below runs at its stated tolerance and
// prints one PASS/FAIL line. The process exits nonzero if any criterion
// fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hdgns/alprecond.hpp"
#include "hdgns/perturblab.hpp"
#include "hdgns/study.hpp"

using namespace hdgns;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

Eigen::MatrixXd to_dense(const SparseMatrix& s) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  const auto& off = s.row_offsets();
  for (int r = 0; r < s.rows(); ++r)
    for (long i = off[r]; i < off[r + 1]; ++i)
      d(r, s.col_indices()[i]) += s.values()[i];
  return d;
}

// 1. Exact reproduction of the degree-2 dof counts on the 32x32 cavity mesh.
void criterion_dof_counts() {
  const Mesh mesh = generate_unit_square(32);
  const SpaceLayout l = build_layout(mesh, 2);
  std::ostringstream d;
  d << "cells=" << mesh.num_cells() << " total=" << l.total()
    << " condensed=" << l.condensed();
  report(1, "dof-count reproduction", 
         mesh.num_cells() == 2048 && l.total() == 58944 && l.condensed() == 28224,
         d.str());
}

// 2. The facet-jump penalty factors exactly through the trace pressure mass.
void criterion_penalty_factorization() {
  double worst = 0.0;
  for (int nx : {2, 4}) {
    for (int k : {1, 2}) {
      const Mesh mesh = generate_unit_square(nx);
      const SpaceLayout l = build_layout(mesh, k);
      const StokesBlocks S = assemble_stokes_forms(mesh, l, 1.0, 10.0 * k * k);
      const Eigen::MatrixXd D = to_dense(assemble_dh(mesh, l));
      const Eigen::MatrixXd B = to_dense(S.B_pbaru);
      const Eigen::MatrixXd M = to_dense(assemble_trace_mass(mesh, l));
      const Eigen::MatrixXd ref = B.transpose() * M.ldlt().solve(B);
      worst = std::max(worst, (D - ref).cwiseAbs().maxCoeff() /
                                  D.cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream d;
  d << "max relative max-norm difference " << worst << " (tol 1e-10)";
  report(2, "facet penalty equals B' Mbar^-1 B", worst <= 1e-10, d.str());
}

// 3. Mass-matrix Schur specialization: first-order identity and second-order
//    remainder decay.
void criterion_mass_corollary() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> ndist(4, 12);
  double worst_identity = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = ndist(rng);
    std::uniform_int_distribution<int> mdist(1, n - 1);
    const DenseSaddle ds = DenseSaddle::random_al(n, mdist(rng), 1e4, rng);
    worst_identity =
        std::max(worst_identity, verify_al_mass_identity(ds).first_order_identity);
  }
  std::mt19937_64 rng2(7);
  DenseSaddle base = DenseSaddle::random_al(10, 4, 1.0, rng2);
  std::vector<double> gammas{1e2, 1e3, 1e4, 1e5}, gaps;
  for (double g : gammas) {
    base.gamma = g;
    gaps.push_back(verify_al_mass_identity(base).mass_gap);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double lx = std::log(gammas[i]), ly = std::log(gaps[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double slope =
      (gammas.size() * sxy - sx * sy) / (gammas.size() * sxx - sx * sx);
  std::ostringstream d;
  d << "max ||B E_Q B' - M|| = " << worst_identity << " (tol 1e-9), decay slope "
    << slope << " (target -2 +/- 0.2)";
  report(3, "mass-matrix Schur identity",
         worst_identity <= 1e-9 && std::abs(slope + 2.0) <= 0.2, d.str());
}

// 4. General expansion: leading-order constant stable, second-term sign.
void criterion_expansion() {
  std::mt19937_64 rng(11);
  DenseSaddle base = DenseSaddle::random(10, 4, 1.0, rng);
  double cmin = 1e300, cmax = 0.0;
  bool minus_ok = true;
  for (double g : {1e2, 1e3, 1e4}) {
    base.gamma = g;
    const SchurExpansionReport rep = verify_schur_expansion(base);
    cmin = std::min(cmin, rep.leading_residual * g * g);
    cmax = std::max(cmax, rep.leading_residual * g * g);
    minus_ok = minus_ok && rep.minus_matches;
  }
  std::ostringstream d;
  d << "C in [" << cmin << ", " << cmax << "] (stability factor "
    << cmax / cmin << " <= 3); gamma^-2 term sign: negative";
  report(4, "Schur expansion of singular perturbations",
         minus_ok && cmax / cmin <= 3.0, d.str());
}

// 5. Equivalence of the penalized and mixed normal-jump projections.
void criterion_jump_equivalence() {
  double worst = 0.0;
  for (int k : {1, 2})
    for (double g : {1e2, 1e4}) {
      const JumpEquivalenceReport rep =
          verify_jump_equivalence(generate_unit_square(2), k, g, 31 + k);
      worst = std::max({worst, rep.u_diff_rel, rep.pbar_diff_rel});
    }
  std::ostringstream d;
  d << "worst relative difference " << worst << " (tol 1e-9)";
  report(5, "penalized/mixed projection equivalence", worst <= 1e-9, d.str());
}

// 6. Static condensation against the monolithic direct solve.
void criterion_condensation_equivalence() {
  const Mesh mesh = generate_unit_square(2);
  const SpaceLayout l = build_layout(mesh, 1);
  const BoundaryData bd = BoundaryData::lid_cavity();
  Constraints cons = build_constraints(mesh, l, bd);
  cons.fixed[l.pbar_dof(0, 0)] = 1;  // pin the enclosed pressure constant
  cons.values[l.pbar_dof(0, 0)] = 0.0;
  const StateVector zero = StateVector::initial(l, cons);

  auto solve_both = [&](ConvectionMode mode, const StateVector& w) {
    AssemblyOptions opts;
    opts.mu = mode == ConvectionMode::none ? 1.0 : 0.1;
    opts.alpha = 10.0;
    opts.gamma = 1e4;
    opts.mode = mode;
    const BlockSystem sys = assemble_block_system(mesh, l, opts, w, bd);
    const SparseMatrix M = monolithic_matrix(sys, cons);
    const Vector rhs = monolithic_rhs(sys, cons, sys.load);
    const SparseLUSolver lu(M);
    Vector xm = lu.solve(rhs);
    Vector r = M.apply(xm);
    for (long i = 0; i < l.total(); ++i) r[i] = rhs[i] - r[i];
    const Vector corr = lu.solve(r);
    for (long i = 0; i < l.total(); ++i) xm[i] += corr[i];

    const CondensedSystem cond = condense(sys, cons, sys.load);
    const SparseLUSolver clu(cond.K);
    Vector y = clu.solve(cond.rhs);
    Vector rc = cond.K.apply(y);
    for (std::size_t i = 0; i < y.size(); ++i) rc[i] = cond.rhs[i] - rc[i];
    const Vector yc = clu.solve(rc);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += yc[i];
    const StateVector xc = back_substitute(cond, y);

    double num = 0.0, den = 0.0;
    for (long i = 0; i < l.total(); ++i) {
      num += (xc.data[i] - xm[i]) * (xc.data[i] - xm[i]);
      den += xm[i] * xm[i];
    }
    return std::make_pair(std::sqrt(num / den), StateVector{xm});
  };

  const auto stokes = solve_both(ConvectionMode::none, zero);
  const auto picard = solve_both(ConvectionMode::picard, stokes.second);
  std::ostringstream d;
  d << "Stokes rel diff " << stokes.first << ", Picard rel diff " << picard.first
    << " (tol 1e-9)";
  report(6, "condensed solve equals monolithic solve",
         stokes.first <= 1e-9 && picard.first <= 1e-9, d.str());
}

// 7. Divergence conformity of the converged cavity state at Re 100.
void criterion_divergence_conformity() {
  const Mesh mesh = generate_unit_square(8);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                      ContinuationSchedule::lid(100.0), opts);
  if (!r.ok) {
    report(7, "divergence/conformity at convergence", false, r.message);
    return;
  }
  const DivergenceReport rep =
      divergence_moments(mesh, l, r.state, BoundaryData::lid_cavity());
  std::ostringstream d;
  d << "cell moments " << rep.max_cell_moment << ", face jump moments "
    << rep.max_face_jump_moment << " (tol 1e-9)";
  report(7, "divergence/conformity at convergence",
         rep.max_cell_moment <= 1e-9 && rep.max_face_jump_moment <= 1e-9,
         d.str());
}

// 8. Manufactured-solution convergence rates at k=2.
void criterion_rates() {
  DriverOptions opts;
  const StudyResult r = convergence_study(trig_vortex(), 2, {4, 8, 16}, 1.0, opts);
  if (!r.ok) {
    report(8, "manufactured-solution rates", false, r.message);
    return;
  }
  const double rv = r.rate_v_gamma.back();
  const double rp = r.rate_p_l2.back();
  std::ostringstream d;
  d << "velocity rate " << rv << " (in [1.8,2.4]), pressure rate " << rp
    << " (in [1.8,2.6])";
  report(8, "manufactured-solution rates",
         rv >= 1.8 && rv <= 2.4 && rp >= 1.8 && rp <= 2.6, d.str());
}

// 9. Preconditioner robustness over mesh size and Reynolds number.
void criterion_preconditioner_robustness() {
  bool ok = true;
  std::ostringstream d;
  for (int nx : {8, 16}) {
    const Mesh mesh = generate_unit_square(nx);
    const SpaceLayout l = build_layout(mesh, 2);
    for (PrecondVariant variant : {PrecondVariant::GM, PrecondVariant::G}) {
      DriverOptions opts;
      opts.variant = variant;
      const SteadyResult r = solve_steady(mesh, l, FlowCase::lid,
                                          ContinuationSchedule::lid(1000.0), opts);
      if (!r.ok) {
        ok = false;
        d << " [nx=" << nx << " " << to_string(variant) << ": " << r.message << "]";
        continue;
      }
      int max_newton = 0, max_outer = 0, max_inner = 0;
      for (const auto& rec : r.records) {
        const bool listed = rec.re == 1 || rec.re == 10 || rec.re == 100 ||
                            rec.re == 1000;
        if (!listed) continue;
        max_newton = std::max(max_newton, rec.newton_iters);
        max_outer = std::max(max_outer, rec.max_outer);
        max_inner = std::max(max_inner, rec.max_inner);
      }
      const int outer_cap = variant == PrecondVariant::GM ? 12 : 18;
      const bool pass = max_newton <= 5 && max_outer <= outer_cap && max_inner == 1;
      ok = ok && pass;
      d << " [nx=" << nx << " " << to_string(variant) << ": newton " << max_newton
        << ", outer " << max_outer << ", inner " << max_inner << "]";
    }
  }
  report(9, "preconditioner robustness (lid, Re 1..1000)", ok, d.str());
}

// 10. Backward-facing step smoke test to Re 400.
void criterion_bfs_smoke() {
  const Mesh mesh = generate_bfs(2);
  const SpaceLayout l = build_layout(mesh, 2);
  DriverOptions opts;
  const SteadyResult r = solve_steady(mesh, l, FlowCase::bfs,
                                      ContinuationSchedule::bfs(400.0), opts);
  if (!r.ok) {
    report(10, "backward-facing step to Re 400", false, r.message);
    return;
  }
  int max_outer = 0;
  for (const auto& rec : r.records) max_outer = std::max(max_outer, rec.max_outer);
  std::ostringstream d;
  d << r.records.size() << " continuation steps, max outer " << max_outer
    << " (cap 15)";
  report(10, "backward-facing step to Re 400", max_outer <= 15, d.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_dof_counts();
  criterion_penalty_factorization();
  criterion_mass_corollary();
  criterion_expansion();
  criterion_jump_equivalence();
  criterion_condensation_equivalence();
  criterion_divergence_conformity();
  criterion_rates();
  criterion_preconditioner_robustness();
  criterion_bfs_smoke();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - failures, secs);
  return failures == 0 ? 0 : 1;
}
