#include "hdgns/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace hdgns {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> t) {
  for (const auto& e : t) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw Error("from_triplets: entry (" + std::to_string(e.row) + "," +
                  std::to_string(e.col) + ") outside " + std::to_string(rows) +
                  "x" + std::to_string(cols));
  }
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.columns_.reserve(t.size());
  m.values_.reserve(t.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    while (i < t.size() && t[i].row == r) {
      const int c = t[i].col;
      double v = 0.0;
      while (i < t.size() && t[i].row == r && t[i].col == c) v += t[i++].value;
      m.columns_.push_back(c);
      m.values_.push_back(v);
    }
    m.offsets_[r + 1] = static_cast<long>(m.columns_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  m.columns_.resize(n);
  m.values_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    m.columns_[i] = i;
    m.offsets_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::sum(double alpha, const SparseMatrix& A, double beta,
                               const SparseMatrix& B) {
  if (A.rows_ != B.rows_ || A.cols_ != B.cols_)
    throw Error("SparseMatrix::sum: dimension mismatch");
  SparseMatrix m(A.rows_, A.cols_);
  m.columns_.reserve(A.columns_.size() + B.columns_.size());
  m.values_.reserve(A.columns_.size() + B.columns_.size());
  for (int r = 0; r < A.rows_; ++r) {
    long ia = A.offsets_[r], ib = B.offsets_[r];
    const long ea = A.offsets_[r + 1], eb = B.offsets_[r + 1];
    while (ia < ea || ib < eb) {
      int c;
      double v = 0.0;
      if (ib >= eb || (ia < ea && A.columns_[ia] <= B.columns_[ib])) {
        c = A.columns_[ia];
        v += alpha * A.values_[ia++];
        if (ib < eb && B.columns_[ib] == c) v += beta * B.values_[ib++];
      } else {
        c = B.columns_[ib];
        v += beta * B.values_[ib++];
      }
      m.columns_.push_back(c);
      m.values_.push_back(v);
    }
    m.offsets_[r + 1] = static_cast<long>(m.columns_.size());
  }
  return m;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  if (static_cast<int>(x.size()) != cols_)
    throw Error("spmv: x has size " + std::to_string(x.size()) +
                ", expected " + std::to_string(cols_));
  y.assign(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
      s += values_[i] * x[columns_[i]];
    y[r] = s;
  }
}

Vector SparseMatrix::apply(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

void SparseMatrix::multiply_add(double alpha, const Vector& x, Vector& y) const {
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
      s += values_[i] * x[columns_[i]];
    y[r] += alpha * s;
  }
}

void SparseMatrix::multiply_transpose_add(double alpha, const Vector& x,
                                          Vector& y) const {
  for (int r = 0; r < rows_; ++r) {
    const double xr = alpha * x[r];
    if (xr == 0.0) continue;
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
      y[columns_[i]] += values_[i] * xr;
  }
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix m(cols_, rows_);
  std::vector<long> count(cols_ + 1, 0);
  for (int c : columns_) ++count[c + 1];
  for (int c = 0; c < cols_; ++c) count[c + 1] += count[c];
  m.offsets_ = count;
  m.columns_.resize(columns_.size());
  m.values_.resize(values_.size());
  std::vector<long> next(m.offsets_.begin(), m.offsets_.end() - 1);
  for (int r = 0; r < rows_; ++r) {
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i) {
      const long pos = next[columns_[i]]++;
      m.columns_[pos] = r;
      m.values_[pos] = values_[i];
    }
  }
  return m;
}

SparseMatrix SparseMatrix::block(int r0, int r1, int c0, int c1) const {
  SparseMatrix m(r1 - r0, c1 - c0);
  for (int r = r0; r < r1; ++r) {
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i) {
      const int c = columns_[i];
      if (c >= c0 && c < c1) {
        m.columns_.push_back(c - c0);
        m.values_.push_back(values_[i]);
      }
    }
    m.offsets_[r - r0 + 1] = static_cast<long>(m.columns_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::scaled(double a) const {
  SparseMatrix m = *this;
  for (double& v : m.values_) v *= a;
  return m;
}

double SparseMatrix::coeff(int r, int c) const {
  for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
    if (columns_[i] == c) return values_[i];
  return 0.0;
}

double SparseMatrix::max_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = coeff(r, r);
  return d;
}

bool SparseMatrix::is_block_diagonal(const std::vector<long>& row_starts,
                                     const std::vector<long>& col_starts) const {
  std::vector<int> row_block(rows_), col_block(cols_);
  for (std::size_t b = 0; b + 1 < row_starts.size(); ++b)
    for (long i = row_starts[b]; i < row_starts[b + 1]; ++i) row_block[i] = int(b);
  for (std::size_t b = 0; b + 1 < col_starts.size(); ++b)
    for (long i = col_starts[b]; i < col_starts[b + 1]; ++i) col_block[i] = int(b);
  for (int r = 0; r < rows_; ++r)
    for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
      if (col_block[columns_[i]] != row_block[r]) return false;
  return true;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         offsets_ == other.offsets_ && columns_ == other.columns_;
}

Vector spmv(const SparseMatrix& A, const Vector& x) { return A.apply(x); }

}  // namespace hdgns
