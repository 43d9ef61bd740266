#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace pimsner {

using IntegerVector = std::vector<mpz_class>;

/// Dense row-major matrix of arbitrary-precision integers.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  /// Throws std::invalid_argument when entries.size() != rows*cols.
  IntegerMatrix(std::size_t rows, std::size_t cols, std::vector<mpz_class> entries);

  static IntegerMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<mpz_class>& entries() const { return data_; }

  IntegerMatrix transpose() const;
  IntegerVector apply(const IntegerVector& x) const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += factor * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const mpz_class& factor);
  /// col[dst] += factor * col[src]
  void add_col_multiple(std::size_t dst, std::size_t src, const mpz_class& factor);
  void negate_row(std::size_t r);
  void negate_col(std::size_t c);

  bool is_diagonal() const;

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);
  friend IntegerMatrix operator+(const IntegerMatrix& a, const IntegerMatrix& b);
  friend IntegerMatrix operator-(const IntegerMatrix& a, const IntegerMatrix& b);
  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
mpz_class determinant(const IntegerMatrix& m);

IntegerVector operator-(const IntegerVector& a, const IntegerVector& b);
IntegerVector operator+(const IntegerVector& a, const IntegerVector& b);

}  // namespace pimsner
