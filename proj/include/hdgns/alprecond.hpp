// Block lower-triangular augmented Lagrangian preconditioners for the
// condensed system. Variant GM approximates the trace pressure Schur
// complement by -gamma^-1 Mbar; variant G additionally keeps the condensed
// pressure block. Applied in the "lower" Schur factorization: one inner
// solve with the trace velocity block, then one with the Schur approximation.

#ifndef HDGNS_ALPRECOND_HPP
#define HDGNS_ALPRECOND_HPP

#include <optional>
#include <string>

#include "hdgns/condense.hpp"
#include "hdgns/solvers.hpp"

namespace hdgns {

enum class PrecondVariant { G, GM };

std::string to_string(PrecondVariant v);

struct PreconditionerSpec {
  PrecondVariant variant = PrecondVariant::GM;
  KrylovConfig velocity_cfg{1e-2, 1e-8, 300, 300};
  KrylovConfig schur_cfg{1e-2, 1e-8, 300, 300};
  /// Replace the exact inner LU by ILU(level) to emulate an inexact
  /// factorization.
  bool use_ilu = false;
  int ilu_level = 0;
  /// Inner solves by direct factorization instead of Krylov iterations
  /// (used by tests that need a linear preconditioner action).
  bool exact_inner = false;
};

class ALPreconditioner {
 public:
  ALPreconditioner(const CondensedSystem& cond, const PreconditionerSpec& spec);

  /// z = P^-1 r with r partitioned as (r_ubar, r_pbar).
  void apply(const Vector& r, Vector& z) const;
  LinOp op() const;

  int max_velocity_iterations() const { return max_vel_iters_; }
  int max_schur_iterations() const { return max_schur_iters_; }
  void reset_stats();

  const SparseMatrix& schur_approximation() const { return Shat_; }

 private:
  const CondensedSystem* cond_;
  PreconditionerSpec spec_;
  long n_ubar_ = 0, n_pbar_ = 0;
  SparseMatrix Fbar_;
  SparseMatrix Bbar_pu_;
  SparseMatrix Shat_;
  std::optional<SparseLUSolver> velocity_lu_;
  std::optional<ILUPreconditioner> velocity_ilu_;
  std::optional<JacobiPreconditioner> schur_jacobi_;
  std::optional<SparseLUSolver> schur_lu_;
  mutable int max_vel_iters_ = 0;
  mutable int max_schur_iters_ = 0;
};

/// Quality of the mass-matrix Schur approximation on a dense-feasible
/// problem: relative gap || S_true + gamma^-1 Mbar || / || gamma^-1 Mbar ||
/// and the extreme eigenvalues of (gamma^-1 Mbar)^-1 (-S_true). For enclosed
/// flows the one known constant-pressure null direction is excluded.
struct SchurQualityEntry {
  double gamma = 0.0;
  double rel_gap = 0.0;  ///< || S + gamma^-1 Mbar || / || gamma^-1 Mbar ||
  double abs_gap = 0.0;  ///< || S + gamma^-1 Mbar ||; decays ~1/gamma
  double eig_min = 0.0;
  double eig_max = 0.0;
};

struct SchurQualityReport {
  std::vector<SchurQualityEntry> entries;
  bool applicable = true;
  std::string note;
};

SchurQualityReport schur_mass_quality(const Mesh& mesh, int k, double mu,
                                      double alpha, const BoundaryData& bdata,
                                      const std::vector<double>& gammas,
                                      long max_dofs = 4000);

/// Dense true Schur complement in pbar of the condensed system (oracle used
/// by schur_mass_quality and tests).
Eigen::MatrixXd dense_pressure_schur(const BlockSystem& sys,
                                     const Constraints& cons, long max_dofs = 4000);

}  // namespace hdgns

#endif
