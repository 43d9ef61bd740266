#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "pimsner/fock.hpp"
#include "pimsner/scalar.hpp"

namespace pimsner {

/// Echelon basis of a growing span of sparse exact vectors.
class IncrementalBasis {
 public:
  /// Adds v to the span; true when v was independent of the current basis.
  bool insert(SparseColumn v);
  std::size_t rank() const { return pivots_.size(); }

 private:
  std::map<std::size_t, SparseColumn> pivots_;  // leading index -> row with leading 1
};

std::size_t exact_rank(const std::vector<SparseColumn>& vectors);
/// Numerical rank via column-pivoted Householder QR with relative threshold tol.
std::size_t float_rank(const std::vector<SparseColumn>& vectors, std::size_t ambient, double tol);
std::size_t exact_rank(const std::vector<std::vector<ExactComplex>>& rows);

}  // namespace pimsner
