#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

namespace pimsner {

/// One value per vertex, indexed in load order.
template <class T>
using VertexFunction = std::vector<T>;

/// An element of E^{⊗k}: finitely supported coefficients on length-k paths.
class TensorElement {
 public:
  explicit TensorElement(std::size_t degree) : degree_(degree) {}
  static TensorElement point_mass(const Path& p, ExactComplex coeff = 1);

  std::size_t degree() const { return degree_; }
  const std::map<Path, ExactComplex>& coefficients() const { return coeffs_; }
  ExactComplex at(const Path& p) const;
  /// Throws ValidationError when p has the wrong length.
  void add(const Path& p, const ExactComplex& c);

  TensorElement& operator+=(const TensorElement& o);
  TensorElement& operator*=(const ExactComplex& c);
  friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
  friend TensorElement operator*(const ExactComplex& c, TensorElement a) { return a *= c; }
  friend bool operator==(const TensorElement&, const TensorElement&) = default;

 private:
  std::size_t degree_;
  std::map<Path, ExactComplex> coeffs_;
};

/// Point masses δ_μ, |μ| = k, in enumeration order.
std::vector<TensorElement> standard_frame(const DirectedGraph& g, std::size_t k, std::size_t cap = default_path_cap);

/// (ξ|η)_A(v) = Σ_{r(μ)=v} conj ξ(μ) η(μ).
VertexFunction<ExactComplex> right_inner(const DirectedGraph& g, const TensorElement& xi, const TensorElement& eta);
/// _A(ξ|η)(v) = Σ_{s(μ)=v} ξ(μ) conj η(μ).
VertexFunction<ExactComplex> left_inner(const DirectedGraph& g, const TensorElement& xi, const TensorElement& eta);

/// Dense exact operator on E^{⊗k} in the path basis.
class EndoMatrix {
 public:
  EndoMatrix(const DirectedGraph& g, std::size_t degree, std::size_t cap = default_path_cap);
  static EndoMatrix identity(const DirectedGraph& g, std::size_t degree, std::size_t cap = default_path_cap);
  /// Θ_{x,y} ζ = x (y|ζ)_A.
  static EndoMatrix theta(const DirectedGraph& g, const TensorElement& x, const TensorElement& y);

  std::size_t degree() const { return degree_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<Path>& basis() const { return basis_; }
  std::size_t index_of(const Path& p) const;

  ExactComplex& operator()(std::size_t i, std::size_t j) { return entries_[i * basis_.size() + j]; }
  const ExactComplex& operator()(std::size_t i, std::size_t j) const { return entries_[i * basis_.size() + j]; }

  TensorElement apply(const TensorElement& x) const;
  EndoMatrix adjoint() const;
  bool is_zero() const;

  EndoMatrix& operator+=(const EndoMatrix& o);
  EndoMatrix& operator-=(const EndoMatrix& o);
  friend EndoMatrix operator+(EndoMatrix a, const EndoMatrix& b) { return a += b; }
  friend EndoMatrix operator-(EndoMatrix a, const EndoMatrix& b) { return a -= b; }
  friend EndoMatrix operator*(const EndoMatrix& a, const EndoMatrix& b);
  friend bool operator==(const EndoMatrix& a, const EndoMatrix& b) {
    return a.degree_ == b.degree_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t degree_;
  std::vector<Path> basis_;
  std::map<Path, std::size_t> index_;
  std::vector<ExactComplex> entries_;
};

/// e^{β_k}(v) = (V^k 1)_v.
VertexFunction<mpz_class> watatani_index(const DirectedGraph& g, std::size_t k);
/// ℓ_k(v) = ((V^T)^k 1)_v.
VertexFunction<mpz_class> watatani_left(const DirectedGraph& g, std::size_t k);

/// Φ_k(T)(v) = Σ_{s(μ)=v} T_{μμ}.
VertexFunction<ExactComplex> phi_k(const DirectedGraph& g, const EndoMatrix& t);
VertexFunction<double> phi_k(const DirectedGraph& g, const std::vector<Path>& basis,
                             const std::vector<std::vector<double>>& t);

/// How limits of path-count ratios are evaluated.
enum class LimitMode { automatic, closed_form, cesaro };

std::string to_string(LimitMode mode);
LimitMode parse_limit_mode(const std::string& text);

/// Exact e^{β_n} for n = 0..cutoff, cached per graph instance.
class PathCounts {
 public:
  explicit PathCounts(const DirectedGraph& g) : graph_(&g) {}
  const VertexFunction<mpz_class>& at(std::size_t n) const;
  /// e^{β_{n-m}}(r) / e^{β_n}(s) as a double, n >= m.
  double ratio(std::size_t n, std::size_t m, VertexIndex s, VertexIndex r) const;

 private:
  const DirectedGraph* graph_;
  mutable std::vector<VertexFunction<mpz_class>> cache_;
};

/// lim_n e^{β_{n-m}}(r)/e^{β_n}(s), in closed form from Perron data or as a
/// delayed Cesàro mean over a period-aligned tail window ending at cutoff.
class RatioLimit {
 public:
  RatioLimit(const DirectedGraph& g, LimitMode mode, std::size_t cutoff, double tol);

  LimitMode resolved_mode() const { return mode_; }
  std::size_t cutoff() const { return cutoff_; }
  std::size_t period() const { return period_; }
  const PathCounts& counts() const { return counts_; }
  const std::optional<PerronData>& perron() const { return perron_; }

  /// Throws ConvergenceError when the two halves of the window disagree by more than tol.
  double value(std::size_t m, VertexIndex s, VertexIndex r) const;

 private:
  const DirectedGraph* graph_;
  LimitMode mode_;
  std::size_t cutoff_;
  double tol_;
  std::size_t period_;
  std::optional<PerronData> perron_;
  PathCounts counts_;
  mutable std::map<std::tuple<std::size_t, VertexIndex, VertexIndex>, double> cache_;
};

struct RateFit {
  bool exact = false;          // Λ_k^{(n)} = Λ_k from the first n on
  double geometric_rate = 0;   // err_n ~ rate^n
  double geometric_residual = 0;
  double delta_hat = 0;        // err_n ~ n^{-delta_hat}
  double polynomial_residual = 0;
  bool geometric_preferred = false;
  std::size_t samples = 0;
};

struct LambdaOperator {
  std::size_t degree = 0;
  std::vector<Path> basis;
  std::vector<double> diagonal;  // λ_k(μ)
  LimitMode mode = LimitMode::automatic;
  bool periodic = false;
  RateFit rate;
};

LambdaOperator lambda_operator(const DirectedGraph& g, std::size_t k, const RatioLimit& limit,
                               std::size_t cap = default_path_cap);

struct FactorizationWitness {
  Path first;
  Path second;
  double first_value;
  double second_value;
};

struct Factorization {
  bool success = false;
  VertexFunction<double> c;   // valid when success
  std::vector<char> support;  // R_k diagonal, 0/1
  double residual = 0;        // ‖Λ_k − L(c_k) R_k‖_max
  std::optional<FactorizationWitness> witness;
};

Factorization assumption2_factorize(const LambdaOperator& lambda, double tol);

struct AssumptionEntry {
  LambdaOperator lambda;
  Factorization factorization;
};

struct AssumptionReport {
  LimitMode mode;
  std::size_t cutoff;
  double tol;
  std::optional<PerronData> perron;
  std::vector<AssumptionEntry> entries;  // k = 1..kmax
};

AssumptionReport verify_assumptions(const DirectedGraph& g, std::size_t kmax, LimitMode mode, std::size_t cutoff,
                                    double tol, std::size_t cap = default_path_cap);

}  // namespace pimsner
