#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pimsner/algebra.hpp"

namespace pimsner {

/// n if r = max(n,0), else −(r − max(n,0)) − max(−n,0).
long default_psi(long n, long r);
using Psi = std::function<long(long, long)>;

/// One orthonormal vector of the truncated Ξ, homogeneous for the bigrading.
struct XiCoordinate {
  long degree;
  long layer;
  VertexIndex vertex;  // right vertex s(β)
};

struct XiBlockSummary {
  long degree;
  VertexIndex vertex;
  std::size_t basis_size;
  std::size_t generators;
  std::map<long, std::size_t> layer_ranks;
  double min_gram_eigenvalue;  // over all generator Gram layers
  std::size_t dropped;         // numerically dependent directions discarded
};

/// Monomials S_αS_β* with |α| − |β| = n, |n| ≤ N, |α| ≤ Rmax under the Φ_∞
/// inner product, orthonormalized layer by layer in |α|.
class XiTruncation {
 public:
  XiTruncation(const Expectation& phi, long degree_window, long rank_window, double tol = 1e-10,
               Psi psi = default_psi);

  const Expectation& expectation() const { return *phi_; }
  long degree_window() const { return degree_window_; }
  long rank_window() const { return rank_window_; }
  double tol() const { return tol_; }
  std::size_t dimension() const { return coordinates_.size(); }
  const std::vector<XiCoordinate>& coordinates() const { return coordinates_; }
  const std::vector<XiBlockSummary>& blocks() const { return blocks_; }
  std::size_t layer_dimension(long n, long r) const;

  long psi(std::size_t j) const { return psi_(coordinates_[j].degree, coordinates_[j].layer); }
  bool in_Q(std::size_t j) const { return coordinates_[j].degree >= 0 && coordinates_[j].layer == coordinates_[j].degree; }
  bool in_kernel_D(std::size_t j) const { return psi(j) == 0; }

  struct Embedding {
    Eigen::VectorXcd coefficients;  // ⟨u_j, x⟩
    double norm_squared = 0;        // ‖x‖²
    double captured = 0;            // Σ |⟨u_j, x⟩|²
  };
  /// Coordinates of x (no adjoined unit) against the truncation.
  Embedding embed(const AlgebraElement& x) const;

  struct Action {
    std::size_t copies = 1;
    Eigen::MatrixXcd matrix;   // ⟨u_i, v u_j⟩ on Ξ ⊗ C^copies
    std::vector<char> clean;   // column j: v u_j lies in the truncation
    std::vector<double> image_norm_squared;
    long label_degree(std::size_t index, const XiTruncation& xi) const;
  };
  /// Left multiplication by v on Ξ ⊗ C^k; index = copy * dimension() + j.
  Action action(const MatrixOverAlgebra& v) const;

  /// Orthogonal projection onto the span of the embedded S_α, 0 ≤ |α| ≤ min(N, Rmax), in coordinates.
  Eigen::MatrixXcd fock_embedding_projection() const;

 private:
  struct Degree {
    long n;
    std::size_t depth;
    std::vector<Monomial> basis;
    std::map<Monomial, std::size_t> index;
    std::vector<double> weight;
    Eigen::MatrixXd frame;  // columns: coordinates in weighted-orthonormal monomial coordinates
    std::size_t offset;     // first global coordinate
  };

  const Degree* find_degree(long n) const;
  std::map<Monomial, std::complex<double>> expand(const AlgebraElement& x, std::size_t depth) const;
  void action_block(const AlgebraElement& x, const Degree& in, std::size_t in_copy, std::size_t out_copy,
                    Action& out) const;

  const Expectation* phi_;
  long degree_window_;
  long rank_window_;
  double tol_;
  Psi psi_;
  std::vector<Degree> degrees_;
  std::vector<XiCoordinate> coordinates_;
  std::vector<XiBlockSummary> blocks_;
};

struct Bigrade {
  long m;
  long s;
  friend auto operator<=>(const Bigrade&, const Bigrade&) = default;
};

struct HomogeneousDecomposition {
  std::map<Bigrade, Eigen::MatrixXcd> components;  // v_{m,s} on clean columns (other columns zero)
  std::size_t clean_columns = 0;
  std::size_t total_columns = 0;
  std::vector<long> gauge_degrees;
  long layer_shift_min = 0;  // −max|ν|
  long layer_shift_max = 0;  // max|μ|
  bool finite_certified = false;
  double reconstruction_error = 0;  // ‖Σ v_{m,s} − v‖ on clean columns
  double chop_vee_violation = 0;    // max over distinct components of v_a* v_b and v_a v_b*
  double vee_modular_violation = 0; // [vDv*, Q], [vDv*, ker D], [v*Dv, Q], [v*Dv, ker D]
  std::size_t modular_columns = 0;  // columns on which the commutators could be evaluated
  bool homog = false;               // every m present has a (m, m) component
};

/// Throws ConvergenceError when no column of v is clean on the window.
HomogeneousDecomposition homogeneous_decompose(const PartialIsometryClass& v, const XiTruncation& xi);

}  // namespace pimsner
