#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pimsner/algebra.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/integer_matrix.hpp"

namespace pimsner {

/// U·M·W = S with U, W unimodular and S diagonal, d_i ≥ 0, d_i | d_{i+1}.
struct SmithDecomposition {
  IntegerMatrix U;
  IntegerMatrix S;
  IntegerMatrix W;
  IntegerMatrix U_inverse;
  std::size_t rank = 0;
  std::vector<mpz_class> diagonal() const;
};

/// Pivot rule: the entry of least nonzero absolute value, first in row-major order.
SmithDecomposition smith_normal_form(const IntegerMatrix& m);
/// Checks every postcondition exactly; returns an empty string or the first violation.
std::string check_smith(const IntegerMatrix& m, const SmithDecomposition& d);

struct KGroup {
  std::size_t rank = 0;
  std::vector<mpz_class> torsion;         // invariant factors ≥ 2
  std::vector<IntegerVector> generators;  // torsion generators first, then free ones
  std::string to_string() const;
  friend bool operator==(const KGroup& a, const KGroup& b) { return a.rank == b.rank && a.torsion == b.torsion; }
};

KGroup cokernel(const IntegerMatrix& m);
KGroup kernel(const IntegerMatrix& m);

struct KPair {
  KGroup even;
  KGroup odd;
};

/// K₀ = coker(1 − V^T), K₁ = ker(1 − V^T).
KPair k_theory(const DirectedGraph& g);
/// K⁰ = ker(1 − V), K¹ = coker(1 − V).
KPair k_homology(const DirectedGraph& g);

using KClass = IntegerVector;

/// [E] acts on K₀(A) = ℤ^{G⁰} as V^T.
IntegerMatrix class_of_E(const DirectedGraph& g);
KClass one_minus_E(const DirectedGraph& g, const KClass& x);

/// [v*v] − [vv*] ∈ K₀(A).
KClass ev_star(const PartialIsometryClass& v);

enum class RankMode { exact, floating };
std::string to_string(RankMode mode);
RankMode parse_rank_mode(const std::string& text);

struct IndexLevel {
  std::size_t truncation;
  long domain_window;    // inputs at levels ≤ this were used for the kernel
  long codomain_window;  // and for the cokernel
  KClass kernel;
  KClass cokernel;
};

struct IndexComputation {
  std::vector<IndexLevel> levels;
  bool stabilized = false;
  KClass index;    // [ker] − [coker]
  KClass pairing;  // −index
};

/// Index of P_{vv*} T(v) P_{v*v} on F^{≤K} ⊗ C^k, escalating K until two
/// consecutive levels agree. Throws ConvergenceError past max_truncation.
IndexComputation index_pairing(const DirectedGraph& g, const PartialIsometryClass& v, std::size_t truncation,
                               RankMode mode = RankMode::exact, std::size_t max_truncation = 0,
                               std::size_t cap = default_path_cap);

struct DiagramReport {
  std::string name;
  IndexComputation index;
  KClass lhs;  // (1 − [E])·Index
  KClass rhs;  // ev_*
  bool pass = false;
  KClass opposite_lhs;  // (1 − [E])·pairing, the other sign resolution
  bool opposite_pass = false;
};

DiagramReport diagram_check(const DirectedGraph& g, const PartialIsometryClass& v, std::size_t truncation,
                            RankMode mode = RankMode::exact, std::size_t cap = default_path_cap);

/// First column S_{e_i}* over the edge frame, padded to a square |G¹| matrix.
PartialIsometryClass w_class(const DirectedGraph& g);
/// Truncation used when none is given: (max degree in w) + 2.
inline constexpr std::size_t w_default_truncation = 3;
KClass pairing_w(const DirectedGraph& g, std::size_t truncation = w_default_truncation,
                 RankMode mode = RankMode::exact);

struct RankCheck {
  std::string name;
  bool pass;
  std::string lhs;
  std::string rhs;
};

struct ExactSequenceReport {
  KPair k;
  KPair k_hom;
  std::vector<RankCheck> checks;
};

ExactSequenceReport exact_sequence_report(const DirectedGraph& g);

struct SmebReport {
  bool permutation = false;    // V is a permutation matrix
  bool compatibility = false;  // _A(δ_e|δ_f)δ_g = δ_e(δ_f|δ_g)_A for all edges
};

SmebReport smeb_report(const DirectedGraph& g);
bool is_smeb(const DirectedGraph& g);

}  // namespace pimsner
