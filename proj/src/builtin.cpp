#include "pimsner/builtin.hpp"

#include "pimsner/kktheory.hpp"

namespace pimsner {

DirectedGraph cuntz_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "e" + std::to_string(i), 0, 0});
  return DirectedGraph({"v"}, std::move(edges));
}

DirectedGraph cycle_graph(std::size_t m) {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) vertices.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) edges.push_back({"e" + std::to_string(i), i, (i + 1) % m});
  return DirectedGraph(std::move(vertices), std::move(edges));
}

DirectedGraph fibonacci_graph() { return DirectedGraph({"u", "v"}, {{"a", 0, 0}, {"b", 0, 1}, {"c", 1, 0}}); }

DirectedGraph two_loops_graph() { return DirectedGraph({"u", "v"}, {{"a", 0, 0}, {"b", 1, 1}}); }

DirectedGraph primitive_three_graph() {
  return DirectedGraph({"x", "y", "z"}, {{"a", 0, 0}, {"b", 0, 1}, {"c", 1, 2}, {"d", 2, 0}, {"f", 2, 1}});
}

std::vector<NamedGraph> builtin_graphs() {
  return {{"O2", cuntz_graph(2)},          {"O3", cuntz_graph(3)},       {"loop", cycle_graph(1)},
          {"cycle2", cycle_graph(2)},      {"cycle3", cycle_graph(3)},   {"fibonacci", fibonacci_graph()},
          {"two-loops", two_loops_graph()}, {"primitive3", primitive_three_graph()}};
}

std::vector<PartialIsometryClass> builtin_isometries(const DirectedGraph& g) {
  std::vector<PartialIsometryClass> out;
  auto scalar = [&](const AlgebraElement& x, const std::string& name) {
    out.emplace_back(g, MatrixOverAlgebra::scalar(x), name);
  };
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) scalar(AlgebraElement::vertex(v), "p_" + g.vertex_id(v));
  scalar(AlgebraElement::one_A(g), "1_A");
  scalar(AlgebraElement::unit(), "1");
  scalar(AlgebraElement::unit() - AlgebraElement::vertex(0, 2), "1-2p_" + g.vertex_id(0));

  std::vector<EdgeIndex> qualifying;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e)
    if (g.out_edges(g.edge(e).src).size() == 1) qualifying.push_back(e);
  for (EdgeIndex e : qualifying) {
    scalar(AlgebraElement::edge(g, e), "S_" + g.edge(e).id);
    scalar(AlgebraElement::edge(g, e).adjoint(), "S_" + g.edge(e).id + "*");
  }
  // Paths of length 2 through out-degree-1 vertices are partial isometries too.
  for (EdgeIndex e : qualifying)
    for (EdgeIndex f : g.out_edges(g.edge(e).dst))
      if (g.out_edges(g.edge(f).src).size() == 1) {
        Path mu = Path::from_edges(g, {e, f});
        scalar(AlgebraElement::path(mu), "S_" + mu.id(g));
        break;
      }
  if (qualifying.size() == g.edge_count() && g.edge_count() > 0) {
    AlgebraElement shift;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) shift += AlgebraElement::edge(g, e);
    scalar(shift, "shift");
  }

  PartialIsometryClass w = w_class(g);
  out.push_back(w);
  out.emplace_back(g, MatrixOverAlgebra::block_sum(MatrixOverAlgebra::scalar(AlgebraElement::vertex(0)), w.matrix()),
                   "p_" + g.vertex_id(0) + "+w");
  if (!qualifying.empty()) {
    EdgeIndex e = qualifying.front();
    out.emplace_back(g,
                     MatrixOverAlgebra::block_sum(MatrixOverAlgebra::scalar(AlgebraElement::edge(g, e)),
                                                  MatrixOverAlgebra::scalar(AlgebraElement::edge(g, e).adjoint())),
                     "S_" + g.edge(e).id + "+S_" + g.edge(e).id + "*");
  }
  return out;
}

}  // namespace pimsner
