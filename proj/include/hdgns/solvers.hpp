// Krylov solvers and preconditioners: restarted GMRES with right
// preconditioning, flexible GMRES, Jacobi, level-based ILU, and an exact
// sparse LU used both as a direct solver and as an inner preconditioner.

#ifndef HDGNS_SOLVERS_HPP
#define HDGNS_SOLVERS_HPP

#include <functional>
#include <memory>

#include "hdgns/sparse.hpp"

namespace hdgns {

/// A linear action y = Op(x). Preconditioner actions may be nonlinear
/// (e.g. an inner iterative solve) when used with fgmres.
using LinOp = std::function<void(const Vector& x, Vector& y)>;

LinOp matrix_op(const SparseMatrix& A);

struct KrylovConfig {
  double rtol = 1e-4;
  double atol = 1e-9;
  int restart = 300;
  int max_iters = 300;
  /// When set, receives the unpreconditioned residual estimate after every
  /// inner iteration.
  std::vector<double>* residual_history = nullptr;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
};

/// Restarted GMRES with optional right preconditioning. Convergence is
/// checked on the unpreconditioned residual: ||b - A x|| <= max(rtol*||b||, atol).
/// x is used as the initial guess and holds the solution on return.
SolveStats gmres(const LinOp& A, const Vector& b, Vector& x,
                 const KrylovConfig& cfg, const LinOp* right_precond = nullptr);

/// Flexible GMRES: the right preconditioner may change between iterations.
SolveStats fgmres(const LinOp& A, const Vector& b, Vector& x,
                  const KrylovConfig& cfg, const LinOp& precond);

/// Diagonal (Jacobi) preconditioner; throws if a diagonal entry is zero.
class JacobiPreconditioner {
 public:
  explicit JacobiPreconditioner(const SparseMatrix& A);
  void apply(const Vector& r, Vector& z) const;
  LinOp op() const;

 private:
  std::vector<double> inv_diag_;
};

/// Exact sparse LU with partial pivoting and fill-reducing column ordering.
class SparseLUSolver {
 public:
  explicit SparseLUSolver(const SparseMatrix& A);
  ~SparseLUSolver();
  SparseLUSolver(SparseLUSolver&&) noexcept;
  SparseLUSolver& operator=(SparseLUSolver&&) noexcept;

  void solve(const Vector& b, Vector& x) const;
  Vector solve(const Vector& b) const;
  LinOp op() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Incomplete LU with level-of-fill dropping, no pivoting. Used to emulate an
/// inexact inner factorization.
class ILUPreconditioner {
 public:
  ILUPreconditioner(const SparseMatrix& A, int level);
  void apply(const Vector& r, Vector& z) const;
  LinOp op() const;

 private:
  int n_ = 0;
  std::vector<long> offsets_;
  std::vector<int> columns_;
  std::vector<double> values_;
  std::vector<long> diag_;
};

}  // namespace hdgns

#endif
