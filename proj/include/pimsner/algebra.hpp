#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pimsner/bimodule.hpp"
#include "pimsner/fock.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

namespace pimsner {

/// S_μ S_ν*, meaningful only when r(μ) = r(ν).
struct Monomial {
  Path mu;
  Path nu;
  long degree() const { return static_cast<long>(mu.length()) - static_cast<long>(nu.length()); }
  std::size_t depth() const { return std::max(mu.length(), nu.length()); }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// c·1 + Σ coeff S_μS_ν* in the unitised graph algebra.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  static AlgebraElement unit(ExactComplex c = 1);
  /// S_μS_ν*; zero when r(μ) ≠ r(ν).
  static AlgebraElement monomial(const Path& mu, const Path& nu, ExactComplex c = 1);
  static AlgebraElement vertex(VertexIndex v, ExactComplex c = 1);
  /// S_μ = S_μ p_{r(μ)}.
  static AlgebraElement path(const Path& mu, ExactComplex c = 1);
  static AlgebraElement edge(const DirectedGraph& g, EdgeIndex e, ExactComplex c = 1);
  /// 1_A = Σ_v p_v.
  static AlgebraElement one_A(const DirectedGraph& g);

  const ExactComplex& unit_coeff() const { return unit_; }
  const std::map<Monomial, ExactComplex>& terms() const { return terms_; }
  bool is_zero() const { return unit_.is_zero() && terms_.empty(); }
  void add_term(const Monomial& m, const ExactComplex& c);
  void add_unit(const ExactComplex& c) { unit_ += c; }

  AlgebraElement adjoint() const;
  /// Largest max(|μ|,|ν|) over the terms.
  std::size_t depth() const;
  std::size_t max_mu_length() const;
  std::size_t max_nu_length() const;

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(const ExactComplex& c);
  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(const ExactComplex& c, AlgebraElement a) { return a *= c; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
  /// Syntactic equality of canonical term lists; use equals() for equality in the algebra.
  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

  std::string to_string(const DirectedGraph& g) const;

 private:
  ExactComplex unit_;
  std::map<Monomial, ExactComplex> terms_;
};

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement adjoint(const AlgebraElement& x);

/// Coefficients on {S_μS_ν* : max(|μ|,|ν|) = d} plus the adjoined unit.
struct NormalForm {
  std::size_t depth = 0;
  ExactComplex unit;
  std::map<Monomial, ExactComplex> terms;
  friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

/// Expands with S_μS_ν* = Σ_{s(e)=r(μ)} S_{μe}S_{νe}*. Throws ValidationError
/// at a sink or when d is below the element's depth.
NormalForm normal_form(const DirectedGraph& g, const AlgebraElement& x, std::size_t d);
bool equals(const DirectedGraph& g, const AlgebraElement& x, const AlgebraElement& y);

std::map<long, AlgebraElement> gauge_decompose(const AlgebraElement& x);
AlgebraElement core_expectation(const AlgebraElement& x);

/// c·1 + Σ_v a_v p_v.
struct ScalarPart {
  ExactComplex unit;
  VertexFunction<ExactComplex> vertex;
  /// Value of the element as a function on G⁰ ⊔ {∞}; index |G⁰| is ∞.
  ExactComplex value_at(std::size_t point) const {
    return point < vertex.size() ? unit + vertex[point] : unit;
  }
};

std::optional<ScalarPart> reduce_to_scalars(const DirectedGraph& g, const AlgebraElement& x);
AlgebraElement from_scalars(const ScalarPart& s);

/// c·Id + Σ coeff T_μT_ν* on the truncated Fock module.
FockOperator fock_action(const TruncatedFock& f, const AlgebraElement& x);

/// Φ_∞(S_μS_μ*) = δ_{s(μ)} · lim e^{β_{n−|μ|}}(r(μ))/e^{β_n}(s(μ)); Φ_∞(1) = 1.
class Expectation {
 public:
  Expectation(const DirectedGraph& g, LimitMode mode, std::size_t cutoff = 60, double tol = 1e-9);

  const DirectedGraph& graph() const { return *graph_; }
  const RatioLimit& limit() const { return limit_; }
  /// Scalar value of Φ_∞(S_μS_μ*) at s(μ).
  double weight(const Path& mu) const { return limit_.value(mu.length(), mu.source(), mu.range()); }
  VertexFunction<std::complex<double>> operator()(const AlgebraElement& x) const;
  /// Exact values when every vertex emits the same number n of edges (then
  /// the ratios equal n^{-|μ|} for all large n); nullopt otherwise.
  std::optional<VertexFunction<ExactComplex>> exact(const AlgebraElement& x) const;

 private:
  const DirectedGraph* graph_;
  RatioLimit limit_;
  std::optional<long> constant_out_degree_;
};

VertexFunction<std::complex<double>> phi_infinity(const DirectedGraph& g, const AlgebraElement& x, LimitMode mode,
                                                  std::size_t cutoff = 60, double tol = 1e-9);

class MatrixOverAlgebra {
 public:
  explicit MatrixOverAlgebra(std::size_t size = 1) : size_(size), entries_(size * size) {}
  static MatrixOverAlgebra scalar(const AlgebraElement& x);
  static MatrixOverAlgebra block_sum(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);

  std::size_t size() const { return size_; }
  AlgebraElement& operator()(std::size_t i, std::size_t j) { return entries_[i * size_ + j]; }
  const AlgebraElement& operator()(std::size_t i, std::size_t j) const { return entries_[i * size_ + j]; }
  const std::vector<AlgebraElement>& entries() const { return entries_; }

  MatrixOverAlgebra adjoint() const;
  std::size_t max_mu_length() const;
  std::size_t max_nu_length() const;
  std::vector<long> gauge_degrees() const;

  friend MatrixOverAlgebra operator*(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);
  friend MatrixOverAlgebra operator+(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);

 private:
  std::size_t size_;
  std::vector<AlgebraElement> entries_;
};

bool equals(const DirectedGraph& g, const MatrixOverAlgebra& a, const MatrixOverAlgebra& b);
FockOperator fock_action(const TruncatedFock& f, const MatrixOverAlgebra& v);

using ScalarMatrix = std::vector<ScalarPart>;  // row-major, size k*k

/// A partial isometry over the unitised algebra whose source and range
/// projections are scalar.
class PartialIsometryClass {
 public:
  /// Throws ValidationError unless v v* v = v, v*v and vv* reduce to Ã and
  /// agree at the adjoined point.
  PartialIsometryClass(const DirectedGraph& g, MatrixOverAlgebra v, std::string name = "");

  const std::string& name() const { return name_; }
  const MatrixOverAlgebra& matrix() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const ScalarMatrix& domain() const { return domain_; }      // v*v
  const ScalarMatrix& codomain() const { return codomain_; }  // vv*
  /// Rank of v*v (resp. vv*) at each point of G⁰ ⊔ {∞}.
  const std::vector<std::size_t>& domain_ranks() const { return domain_ranks_; }
  const std::vector<std::size_t>& codomain_ranks() const { return codomain_ranks_; }

 private:
  std::string name_;
  MatrixOverAlgebra v_;
  ScalarMatrix domain_;
  ScalarMatrix codomain_;
  std::vector<std::size_t> domain_ranks_;
  std::vector<std::size_t> codomain_ranks_;
};

/// Scalar matrix as left action on (F^{≤K})^{⊕k}.
FockOperator scalar_action(const TruncatedFock& f, const ScalarMatrix& m, std::size_t k);

}  // namespace pimsner
