#ifndef HDGNS_SPARSE_HPP
#define HDGNS_SPARSE_HPP

#include <vector>

#include "hdgns/types.hpp"

namespace hdgns {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row and duplicates are summed at construction.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols),
                                     offsets_(rows + 1, 0) {}

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> t);
  static SparseMatrix identity(int n);
  /// alpha*A + beta*B with merged sparsity patterns.
  static SparseMatrix sum(double alpha, const SparseMatrix& A, double beta,
                          const SparseMatrix& B);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long num_nonzeros() const { return static_cast<long>(values_.size()); }

  const std::vector<long>& row_offsets() const { return offsets_; }
  const std::vector<int>& col_indices() const { return columns_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// y = A x
  void multiply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const;
  /// y += alpha * A x
  void multiply_add(double alpha, const Vector& x, Vector& y) const;
  /// y += alpha * A^T x
  void multiply_transpose_add(double alpha, const Vector& x, Vector& y) const;

  SparseMatrix transpose() const;
  /// Contiguous block A(r0:r1, c0:c1) as a new matrix.
  SparseMatrix block(int r0, int r1, int c0, int c1) const;
  SparseMatrix scaled(double a) const;

  double coeff(int r, int c) const;  ///< 0 if not stored
  double max_abs() const;
  std::vector<double> diagonal() const;

  /// Structural check: every entry (r,c) couples row block i with col block i
  /// under the given partitions (entries of starts are block boundaries).
  bool is_block_diagonal(const std::vector<long>& row_starts,
                         const std::vector<long>& col_starts) const;

  bool same_pattern(const SparseMatrix& other) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<long> offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

/// y = A x with dimension checks.
Vector spmv(const SparseMatrix& A, const Vector& x);

}  // namespace hdgns

#endif
