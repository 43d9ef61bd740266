#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "pimsner/integer_matrix.hpp"

namespace pimsner {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

/// For an edge e: s(e) = src, r(e) = dst.
struct Edge {
  std::string id;
  VertexIndex src;
  VertexIndex dst;
};

/// Finite directed graph; immutable once constructed. Vertex and edge order
/// is the construction order and fixes every matrix index downstream.
class DirectedGraph {
 public:
  /// Throws ValidationError on duplicate identifiers or dangling endpoints.
  DirectedGraph(std::vector<std::string> vertices, std::vector<Edge> edges);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& vertex_id(VertexIndex v) const { return vertices_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }

  std::optional<VertexIndex> find_vertex(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(std::string_view id) const;

  /// Edges with s(e) = v, in file order.
  const std::vector<EdgeIndex>& out_edges(VertexIndex v) const { return out_edges_.at(v); }
  /// Edges with r(e) = v, in file order.
  const std::vector<EdgeIndex>& in_edges(VertexIndex v) const { return in_edges_.at(v); }

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::map<std::string, VertexIndex, std::less<>> vertex_lookup_;
  std::map<std::string, EdgeIndex, std::less<>> edge_lookup_;
  std::vector<std::vector<EdgeIndex>> out_edges_;
  std::vector<std::vector<EdgeIndex>> in_edges_;
};

/// A finite path mu = e_1 e_2 ... e_k with r(e_i) = s(e_{i+1}); length-0 paths
/// are vertices. Ordering is lexicographic on edge indices, then vertices.
class Path {
 public:
  static Path at_vertex(VertexIndex v) { return Path({}, {v}); }
  static Path along_edge(const DirectedGraph& g, EdgeIndex e);
  /// Throws ValidationError when the edges do not compose or the list is empty.
  static Path from_edges(const DirectedGraph& g, const std::vector<EdgeIndex>& edges);

  std::size_t length() const { return edges_.size(); }
  bool is_vertex() const { return edges_.empty(); }
  VertexIndex source() const { return vertices_.front(); }
  VertexIndex range() const { return vertices_.back(); }
  const std::vector<EdgeIndex>& edges() const { return edges_; }
  /// Vertex visited after i edges, 0 <= i <= length().
  VertexIndex vertex_at(std::size_t i) const { return vertices_.at(i); }

  /// this followed by other; nullopt unless range() == other.source().
  std::optional<Path> then(const Path& other) const;
  /// True when this is an initial segment of other (same source, edge prefix).
  bool is_prefix_of(const Path& other) const;
  /// The first n edges (n <= length()).
  Path head(std::size_t n) const;
  /// Everything after the first n edges (n <= length()).
  Path tail(std::size_t n) const;
  /// this extended by one edge e with s(e) = range().
  Path extended(const DirectedGraph& g, EdgeIndex e) const;

  /// Concatenated edge ids joined by U+00B7, or the vertex id for length 0.
  std::string id(const DirectedGraph& g) const;

  friend auto operator<=>(const Path&, const Path&) = default;
  friend bool operator==(const Path&, const Path&) = default;

 private:
  Path(std::vector<EdgeIndex> edges, std::vector<VertexIndex> vertices)
      : edges_(std::move(edges)), vertices_(std::move(vertices)) {}

  std::vector<EdgeIndex> edges_;
  std::vector<VertexIndex> vertices_;
};

/// Parses a path id ("a·b", or a vertex id) against g; throws ParseError.
Path parse_path_id(const DirectedGraph& g, const std::string& id);

/// Parses the JSON graph format:
///   {"vertices": ["u","v"], "edges": [{"id":"a","src":"u","dst":"v"}, ...]}
/// Edge ids default to "e0", "e1", ... in file order. Throws ParseError
/// (with line or field location) or ValidationError.
DirectedGraph load_graph(std::string_view text);
DirectedGraph load_graph_file(const std::string& path);
std::string graph_to_json(const DirectedGraph& g);

struct NonsingularReport {
  bool no_sources = true;
  bool no_sinks = true;
  std::vector<VertexIndex> sources;  // in-degree 0
  std::vector<VertexIndex> sinks;    // out-degree 0
  bool nonsingular() const { return no_sources && no_sinks; }
};

NonsingularReport validate_nonsingular(const DirectedGraph& g);
/// Throws ValidationError naming the offending vertices.
void require_nonsingular(const DirectedGraph& g);

/// V(i,j) = #{e : s(e) = v_i, r(e) = v_j}.
IntegerMatrix vertex_matrix(const DirectedGraph& g);

inline constexpr std::size_t default_path_cap = 1'000'000;
/// PIMSNER_PATH_CAP overrides fallback when set to a positive integer.
std::size_t path_cap_from_env(std::size_t fallback = default_path_cap);

/// (V^k 1)_v: number of length-k paths starting at v.
IntegerVector paths_from_vertices(const DirectedGraph& g, std::size_t k);
/// ((V^T)^k 1)_v: number of length-k paths ending at v.
IntegerVector paths_into_vertices(const DirectedGraph& g, std::size_t k);
mpz_class count_paths(const DirectedGraph& g, std::size_t k);

/// All length-k paths, lexicographic in edge order; k = 0 gives the vertices.
/// Throws ResourceLimitError when the count exceeds cap.
std::vector<Path> enumerate_paths(const DirectedGraph& g, std::size_t k, std::size_t cap = default_path_cap);

/// Decides V^m > 0 entrywise for some m <= (n-1)^2 + 1.
bool is_primitive(const IntegerMatrix& v);
/// lcm over vertices on cycles of gcd{closed walk lengths}; 0 when acyclic.
std::size_t graph_period(const DirectedGraph& g);

struct PerronData {
  double spectral_radius = 0;
  std::vector<double> eigenvector;       // right, max entry 1
  std::vector<double> left_eigenvector;  // max entry 1
  double subdominant = 0;                // |lambda_2| estimate
  bool primitive = false;
  std::size_t period = 0;
  double residual = 0;                   // ||Vx - lambda x||_inf
  std::size_t iterations = 0;
};

/// Power iteration on V + I (handles periodic graphs), deflation for |lambda_2|.
/// Throws ValidationError for singular graphs and ConvergenceError when the
/// residual does not drop below tol within max_iterations.
PerronData perron_data(const DirectedGraph& g, double tol = 1e-12, std::size_t max_iterations = 200000);

}  // namespace pimsner
