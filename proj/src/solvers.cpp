#include "hdgns/solvers.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>

namespace hdgns {

LinOp matrix_op(const SparseMatrix& A) {
  return [&A](const Vector& x, Vector& y) { A.multiply(x, y); };
}

void KrylovConfig::validate() const {
  if (rtol <= 0.0 || atol <= 0.0) throw Error("KrylovConfig: tolerances must be > 0");
  if (restart < 1) throw Error("KrylovConfig: restart must be >= 1");
  if (max_iters < 1) throw Error("KrylovConfig: max_iters must be >= 1");
}

namespace {

constexpr double kBreakdownTol = 1e-14;

// Shared Arnoldi-based driver. If flexible, z_j = M_j(v_j) vectors are stored
// and the update is x += Z y; otherwise x += M(V y) with a fixed M.
SolveStats gmres_driver(const LinOp& A, const Vector& b, Vector& x,
                        const KrylovConfig& cfg, const LinOp* precond,
                        bool flexible) {
  cfg.validate();
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);

  const double bnorm = norm2(b);
  const double target = std::max(cfg.rtol * bnorm, cfg.atol);

  SolveStats stats;
  Vector r(n), w(n), z(n);

  auto apply_op = [&](const Vector& in, Vector& out) {
    if (!flexible && precond) {
      (*precond)(in, z);
      A(z, out);
    } else {
      A(in, out);
    }
  };

  A(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rho = norm2(r);
  stats.final_residual = rho;
  if (rho <= target) {
    stats.converged = true;
    return stats;
  }

  const int m = cfg.restart;
  std::vector<Vector> V(m + 1, Vector(n));
  std::vector<Vector> Z;
  if (flexible) Z.assign(m, Vector(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);

  while (stats.iterations < cfg.max_iters) {
    // start/restart cycle
    A(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    rho = norm2(r);
    stats.final_residual = rho;
    if (rho <= target) {
      stats.converged = true;
      return stats;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / rho;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rho;

    int j = 0;
    bool lucky = false;
    for (; j < m && stats.iterations < cfg.max_iters; ++j) {
      ++stats.iterations;
      if (flexible) {
        (*precond)(V[j], Z[j]);
        A(Z[j], w);
      } else {
        apply_op(V[j], w);
      }
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        axpy(-H[i][j], V[i], w);
      }
      H[j + 1][j] = norm2(w);
      const bool happy = H[j + 1][j] <= kBreakdownTol * std::max(1.0, rho);
      if (!happy)
        for (std::size_t i = 0; i < n; ++i) V[j + 1][i] = w[i] / H[j + 1][j];

      // apply stored Givens rotations, then form a new one
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double denom = std::hypot(H[j][j], H[j + 1][j]);
      cs[j] = H[j][j] / denom;
      sn[j] = H[j + 1][j] / denom;
      H[j][j] = denom;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      const double res_est = std::abs(g[j + 1]);
      if (cfg.residual_history) cfg.residual_history->push_back(res_est);

      if (happy) {
        lucky = true;
        ++j;
        stats.breakdown = res_est > target;
        break;
      }
      if (res_est <= target) {
        ++j;
        break;
      }
    }

    // back substitution for y, then update x
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= H[i][l] * y[l];
      y[i] = s / H[i][i];
    }
    if (flexible) {
      for (int l = 0; l < j; ++l) axpy(y[l], Z[l], x);
    } else {
      Vector vy(n, 0.0);
      for (int l = 0; l < j; ++l) axpy(y[l], V[l], vy);
      if (precond) {
        (*precond)(vy, z);
        axpy(1.0, z, x);
      } else {
        axpy(1.0, vy, x);
      }
    }

    A(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    rho = norm2(r);
    stats.final_residual = rho;
    if (rho <= target) {
      stats.converged = true;
      return stats;
    }
    if (lucky) {
      // exact subspace exhausted without reaching the target
      stats.breakdown = true;
      return stats;
    }
  }
  return stats;
}

}  // namespace

SolveStats gmres(const LinOp& A, const Vector& b, Vector& x,
                 const KrylovConfig& cfg, const LinOp* right_precond) {
  return gmres_driver(A, b, x, cfg, right_precond, false);
}

SolveStats fgmres(const LinOp& A, const Vector& b, Vector& x,
                  const KrylovConfig& cfg, const LinOp& precond) {
  return gmres_driver(A, b, x, cfg, &precond, true);
}

JacobiPreconditioner::JacobiPreconditioner(const SparseMatrix& A) {
  const auto d = A.diagonal();
  inv_diag_.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0)
      throw Error("JacobiPreconditioner: zero diagonal in row " + std::to_string(i));
    inv_diag_[i] = 1.0 / d[i];
  }
}

void JacobiPreconditioner::apply(const Vector& r, Vector& z) const {
  z.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

LinOp JacobiPreconditioner::op() const {
  return [this](const Vector& r, Vector& z) { apply(r, z); };
}

struct SparseLUSolver::Impl {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SparseLUSolver::SparseLUSolver(const SparseMatrix& A) : impl_(new Impl) {
  if (A.rows() != A.cols()) throw Error("sparse_lu: matrix must be square");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.num_nonzeros());
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (int r = 0; r < A.rows(); ++r)
    for (long i = off[r]; i < off[r + 1]; ++i)
      t.emplace_back(r, col[i], val[i]);
  impl_->A.resize(A.rows(), A.cols());
  impl_->A.setFromTriplets(t.begin(), t.end());
  impl_->A.makeCompressed();
  impl_->lu.isSymmetric(false);
  impl_->lu.compute(impl_->A);
  if (impl_->lu.info() != Eigen::Success)
    throw Error("sparse_lu: matrix is singular or structurally deficient");
}

SparseLUSolver::~SparseLUSolver() = default;
SparseLUSolver::SparseLUSolver(SparseLUSolver&&) noexcept = default;
SparseLUSolver& SparseLUSolver::operator=(SparseLUSolver&&) noexcept = default;

void SparseLUSolver::solve(const Vector& b, Vector& x) const {
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), b.size());
  Eigen::VectorXd xe = impl_->lu.solve(bm);
  if (impl_->lu.info() != Eigen::Success) throw Error("sparse_lu: solve failed");
  x.assign(xe.data(), xe.data() + xe.size());
}

Vector SparseLUSolver::solve(const Vector& b) const {
  Vector x;
  solve(b, x);
  return x;
}

LinOp SparseLUSolver::op() const {
  return [this](const Vector& b, Vector& x) { solve(b, x); };
}

ILUPreconditioner::ILUPreconditioner(const SparseMatrix& A, int level) {
  if (A.rows() != A.cols()) throw Error("ilu: matrix must be square");
  if (level < 0) throw Error("ilu: level must be >= 0");
  n_ = A.rows();

  // symbolic phase: level-of-fill per row against previously processed rows
  std::vector<std::map<int, int>> lev(n_);  // col -> level
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (int r = 0; r < n_; ++r) {
    for (long i = off[r]; i < off[r + 1]; ++i) lev[r][col[i]] = 0;
    lev[r][r];  // ensure a diagonal slot exists
    for (auto it = lev[r].begin(); it != lev[r].end() && it->first < r; ++it) {
      const int k = it->first;
      const int lrk = it->second;
      for (const auto& [c, lkc] : lev[k]) {
        if (c <= k) continue;
        const int fill = lrk + lkc + 1;
        if (fill > level) continue;
        auto [jt, inserted] = lev[r].try_emplace(c, fill);
        if (!inserted) jt->second = std::min(jt->second, fill);
      }
    }
  }

  offsets_.assign(n_ + 1, 0);
  for (int r = 0; r < n_; ++r) offsets_[r + 1] = offsets_[r] + long(lev[r].size());
  columns_.resize(offsets_[n_]);
  values_.assign(offsets_[n_], 0.0);
  diag_.resize(n_);
  for (int r = 0; r < n_; ++r) {
    long i = offsets_[r];
    for (const auto& [c, l] : lev[r]) {
      columns_[i] = c;
      if (c == r) diag_[r] = i;
      ++i;
    }
  }
  for (int r = 0; r < n_; ++r)
    for (long i = off[r]; i < off[r + 1]; ++i) {
      const long lo = offsets_[r], hi = offsets_[r + 1];
      const auto it = std::lower_bound(columns_.begin() + lo, columns_.begin() + hi,
                                       col[i]);
      values_[it - columns_.begin()] = val[i];
    }

  // numeric phase (IKJ)
  for (int r = 0; r < n_; ++r) {
    for (long i = offsets_[r]; i < offsets_[r + 1] && columns_[i] < r; ++i) {
      const int k = columns_[i];
      const double piv = values_[diag_[k]];
      if (piv == 0.0) throw Error("ilu: zero pivot in row " + std::to_string(k));
      const double m = values_[i] / piv;
      values_[i] = m;
      for (long j = diag_[k] + 1; j < offsets_[k + 1]; ++j) {
        const int c = columns_[j];
        const long lo = offsets_[r], hi = offsets_[r + 1];
        const auto it = std::lower_bound(columns_.begin() + lo,
                                         columns_.begin() + hi, c);
        if (it != columns_.begin() + hi && *it == c)
          values_[it - columns_.begin()] -= m * values_[j];
      }
    }
    if (values_[diag_[r]] == 0.0)
      throw Error("ilu: zero pivot in row " + std::to_string(r));
  }
}

void ILUPreconditioner::apply(const Vector& r, Vector& z) const {
  z = r;
  for (int i = 0; i < n_; ++i)
    for (long j = offsets_[i]; j < offsets_[i + 1] && columns_[j] < i; ++j)
      z[i] -= values_[j] * z[columns_[j]];
  for (int i = n_ - 1; i >= 0; --i) {
    for (long j = diag_[i] + 1; j < offsets_[i + 1]; ++j)
      z[i] -= values_[j] * z[columns_[j]];
    z[i] /= values_[diag_[i]];
  }
}

LinOp ILUPreconditioner::op() const {
  return [this](const Vector& r, Vector& z) { apply(r, z); };
}

}  // namespace hdgns
