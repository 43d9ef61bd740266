#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "pimsner/bimodule.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

namespace pimsner {

/// Paths of length 0..K, level-major then lexicographic.
class TruncatedFock {
 public:
  TruncatedFock(const DirectedGraph& g, std::size_t truncation, std::size_t cap = default_path_cap);

  const DirectedGraph& graph() const { return *graph_; }
  std::size_t truncation() const { return truncation_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<Path>& basis() const { return basis_; }
  const Path& path(std::size_t i) const { return basis_[i]; }
  std::size_t level(std::size_t i) const { return basis_[i].length(); }
  VertexIndex range(std::size_t i) const { return basis_[i].range(); }
  std::size_t level_offset(std::size_t k) const { return offsets_.at(k); }
  std::size_t level_size(std::size_t k) const { return offsets_.at(k + 1) - offsets_.at(k); }
  std::optional<std::size_t> find(const Path& p) const;

 private:
  const DirectedGraph* graph_;
  std::size_t truncation_;
  std::vector<Path> basis_;
  std::vector<std::size_t> offsets_;
  std::map<Path, std::size_t> index_;
};

using SparseColumn = std::map<std::size_t, ExactComplex>;

/// Sparse exact operator on (F^{≤K})^{⊕copies}; index = copy * F.size() + i.
/// Inputs at levels <= clean_max() are mapped exactly as by the untruncated
/// operator; output level minus input level lies in [min_shift, max_shift].
class FockOperator {
 public:
  explicit FockOperator(const TruncatedFock& f, std::size_t copies = 1);
  static FockOperator identity(const TruncatedFock& f, std::size_t copies = 1);
  /// Block matrix; every block must act on a single copy of f.
  static FockOperator block(const std::vector<std::vector<FockOperator>>& blocks);

  const TruncatedFock& fock() const { return *fock_; }
  std::size_t copies() const { return copies_; }
  std::size_t dimension() const { return columns_.size(); }
  std::size_t level_of(std::size_t index) const { return fock_->level(index % fock_->size()); }
  VertexIndex range_of(std::size_t index) const { return fock_->range(index % fock_->size()); }

  const SparseColumn& column(std::size_t j) const { return columns_[j]; }
  ExactComplex at(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, const ExactComplex& c);

  long clean_max() const { return clean_max_; }
  long min_shift() const { return min_shift_; }
  long max_shift() const { return max_shift_; }
  void set_window(long clean_max, long min_shift, long max_shift);

  FockOperator adjoint() const;
  bool is_zero() const;
  /// True if every entry joins basis vectors with equal range vertex.
  bool is_right_linear() const;

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(const ExactComplex& c);
  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(const ExactComplex& c, FockOperator a) { return a *= c; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
  /// Entrywise equality (windows ignored).
  friend bool operator==(const FockOperator& a, const FockOperator& b) { return a.columns_ == b.columns_; }

 private:
  void require_compatible(const FockOperator& o) const;

  const TruncatedFock* fock_;
  std::size_t copies_;
  std::vector<SparseColumn> columns_;
  long clean_max_;
  long min_shift_ = 0;
  long max_shift_ = 0;
};

/// T_ν ξ = ν ⊗ ξ. Throws ValidationError when |ν| > K.
FockOperator creation(const TruncatedFock& f, const TensorElement& nu);
/// Adjoint of creation(f, nu).
FockOperator annihilation(const TruncatedFock& f, const TensorElement& nu);
/// δ_μ ↦ a(s(μ)) δ_μ.
FockOperator left_action(const TruncatedFock& f, const VertexFunction<ExactComplex>& a);
/// δ_μ ↦ δ_μ a(r(μ)).
FockOperator right_action(const TruncatedFock& f, const VertexFunction<ExactComplex>& a);
FockOperator level_projection(const TruncatedFock& f, std::size_t k);
/// The Fock module is the range of Q, so Q is the identity here.
FockOperator fock_projection_Q(const TruncatedFock& f);

/// Level-k diagonal block of a single-copy operator.
EndoMatrix compress(const FockOperator& t, std::size_t k);

}  // namespace pimsner
