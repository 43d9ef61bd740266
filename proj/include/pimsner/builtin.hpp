#pragma once

#include <string>
#include <vector>

#include "pimsner/algebra.hpp"
#include "pimsner/graph.hpp"

namespace pimsner {

/// One vertex with n loops (edges a, b, c, ... for n ≤ 26).
DirectedGraph cuntz_graph(std::size_t n);
/// v0 → v1 → ... → v_{m-1} → v0.
DirectedGraph cycle_graph(std::size_t m);
/// u→u, u→v, v→u.
DirectedGraph fibonacci_graph();
/// Two vertices, one loop each.
DirectedGraph two_loops_graph();
/// x→x, x→y, y→z, z→x, z→y.
DirectedGraph primitive_three_graph();

struct NamedGraph {
  std::string name;
  DirectedGraph graph;
};

std::vector<NamedGraph> builtin_graphs();

/// Vertex projections, units, qualifying edge isometries, the w class and block sums over g.
std::vector<PartialIsometryClass> builtin_isometries(const DirectedGraph& g);

}  // namespace pimsner
