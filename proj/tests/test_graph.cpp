#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <set>

#include <Eigen/Eigenvalues>

#include "pimsner/builtin.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/graph.hpp"
#include "support.hpp"

using namespace pimsner;

namespace {

// Depth-first count of paths of length k starting at each vertex.
std::vector<long> brute_force_counts(const DirectedGraph& g, std::size_t k) {
  std::function<long(VertexIndex, std::size_t)> walk = [&](VertexIndex v, std::size_t left) -> long {
    if (left == 0) return 1;
    long total = 0;
    for (EdgeIndex e : g.out_edges(v)) total += walk(g.edge(e).dst, left - 1);
    return total;
  };
  std::vector<long> out;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) out.push_back(walk(v, k));
  return out;
}

}  // namespace

TEST_CASE("graph file parsing") {
  DirectedGraph g = load_graph(R"({"vertices": ["u", "v"], "edges": [{"src": "u", "dst": "v"}, {"id": "x", "src": "v", "dst": "u"}]})");
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge(0).id == "e0");
  CHECK(g.edge(1).id == "x");
  CHECK(g.edge(0).src == 0);
  CHECK(g.edge(0).dst == 1);
  CHECK(g.out_edges(1) == std::vector<EdgeIndex>{1});

  DirectedGraph h = load_graph(graph_to_json(g));
  CHECK(h.vertices() == g.vertices());
  CHECK(h.edge(1).id == "x");
}

TEST_CASE("graph file errors carry a location") {
  try {
    load_graph("{\n\"vertices\": [\"u\",\n]\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location().rfind("line ", 0) == 0);
  }
  try {
    load_graph(R"({"vertices": ["u"], "edges": [{"src": "u"}]})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.location() == "edges[0].dst");
  }
  CHECK_THROWS_AS(load_graph(R"({"vertices": ["u", "u"]})"), ValidationError);
  CHECK_THROWS_AS(load_graph(R"({"vertices": ["u"], "edges": [{"src": "u", "dst": "w"}]})"), ValidationError);
  CHECK_THROWS_AS(load_graph(R"({"vertices": ["u"], "edges": [{"id": "a", "src": "u", "dst": "u"}, {"id": "a", "src": "u", "dst": "u"}]})"),
                  ValidationError);
  CHECK_THROWS_AS(load_graph("[1, 2]"), ParseError);
}

TEST_CASE("nonsingular validation names sources and sinks") {
  DirectedGraph g({"a", "b", "c"}, {{"e0", 0, 1}, {"e1", 1, 1}});
  NonsingularReport r = validate_nonsingular(g);
  CHECK_FALSE(r.nonsingular());
  CHECK(r.sources == std::vector<VertexIndex>{0, 2});
  CHECK(r.sinks == std::vector<VertexIndex>{2});
  CHECK_THROWS_AS(require_nonsingular(g), ValidationError);
  for (const auto& ng : builtin_graphs()) CHECK(validate_nonsingular(ng.graph).nonsingular());
}

TEST_CASE("vertex matrix counts parallel edges") {
  DirectedGraph g({"u", "v"}, {{"a", 0, 1}, {"b", 0, 1}, {"c", 1, 0}});
  IntegerMatrix v = vertex_matrix(g);
  CHECK(v(0, 1) == 2);
  CHECK(v(1, 0) == 1);
  CHECK(v(0, 0) == 0);
}

TEST_CASE("path counts agree with depth-first enumeration") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    DirectedGraph g = testing::random_nonsingular_graph(rng, 5, 2);
    for (std::size_t k = 0; k <= 4; ++k) {
      auto expected = brute_force_counts(g, k);
      IntegerVector from = paths_from_vertices(g, k);
      mpz_class total = 0;
      for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        CHECK(from[v] == expected[v]);
        total += expected[v];
      }
      CHECK(count_paths(g, k) == total);
      auto paths = enumerate_paths(g, k);
      CHECK(mpz_class(static_cast<unsigned long>(paths.size())) == total);
      CHECK(std::is_sorted(paths.begin(), paths.end()));
      CHECK(std::set<Path>(paths.begin(), paths.end()).size() == paths.size());
      IntegerVector into = paths_into_vertices(g, k);
      std::vector<long> ending(g.vertex_count(), 0);
      for (const Path& p : paths) {
        CHECK(p.length() == k);
        ++ending[p.range()];
        for (std::size_t i = 0; i < k; ++i) {
          CHECK(g.edge(p.edges()[i]).src == p.vertex_at(i));
          CHECK(g.edge(p.edges()[i]).dst == p.vertex_at(i + 1));
        }
      }
      for (VertexIndex v = 0; v < g.vertex_count(); ++v) CHECK(into[v] == ending[v]);
    }
  }
}

TEST_CASE("path cap and environment override") {
  DirectedGraph g = cuntz_graph(3);
  CHECK(enumerate_paths(g, 4, 81).size() == 81);
  CHECK_THROWS_AS(enumerate_paths(g, 4, 80), ResourceLimitError);
  ::setenv("PIMSNER_PATH_CAP", "17", 1);
  CHECK(path_cap_from_env() == 17);
  ::setenv("PIMSNER_PATH_CAP", "junk", 1);
  CHECK(path_cap_from_env(5) == 5);
  ::unsetenv("PIMSNER_PATH_CAP");
  CHECK(path_cap_from_env() == default_path_cap);
}

TEST_CASE("path ids and composition") {
  DirectedGraph g = fibonacci_graph();
  Path p = parse_path_id(g, "a·b·c");
  CHECK(p.length() == 3);
  CHECK(p.id(g) == "a·b·c");
  CHECK(p.source() == 0);
  CHECK(p.range() == 0);
  CHECK(parse_path_id(g, "v") == Path::at_vertex(1));
  CHECK_THROWS_AS(parse_path_id(g, "b·b"), ParseError);
  CHECK_THROWS_AS(parse_path_id(g, "q"), ParseError);
  Path ab = parse_path_id(g, "a·b");
  CHECK(ab.is_prefix_of(p));
  CHECK_FALSE(p.is_prefix_of(ab));
  CHECK(ab.then(Path::along_edge(g, 2)) == p);
  CHECK_FALSE(ab.then(Path::along_edge(g, 0)).has_value());
  CHECK(p.head(1).id(g) == "a");
  CHECK(p.tail(1).id(g) == "b·c");
  CHECK(p.tail(3) == Path::at_vertex(0));
  CHECK(Path::at_vertex(0).then(ab) == ab);
}

TEST_CASE("primitivity and period") {
  CHECK(is_primitive(vertex_matrix(fibonacci_graph())));
  CHECK(is_primitive(vertex_matrix(primitive_three_graph())));
  CHECK(is_primitive(vertex_matrix(cuntz_graph(2))));
  CHECK_FALSE(is_primitive(vertex_matrix(cycle_graph(3))));
  CHECK_FALSE(is_primitive(vertex_matrix(two_loops_graph())));
  for (std::size_t m = 1; m <= 6; ++m) CHECK(graph_period(cycle_graph(m)) == m);
  CHECK(graph_period(fibonacci_graph()) == 1);
}

TEST_CASE("Perron data matches a dense eigen-decomposition") {
  std::mt19937 rng(11);
  std::vector<DirectedGraph> graphs = {fibonacci_graph(), primitive_three_graph(), cuntz_graph(4), cycle_graph(4)};
  for (int i = 0; i < 10; ++i) graphs.push_back(testing::random_nonsingular_graph(rng, 6, 3, 0.5));
  for (const DirectedGraph& g : graphs) {
    Eigen::MatrixXd v = testing::dense_vertex_matrix(g);
    Eigen::EigenSolver<Eigen::MatrixXd> es(v);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(moduli.rbegin(), moduli.rend());
    PerronData p;
    try {
      p = perron_data(g);
    } catch (const ConvergenceError&) {
      // Reducible graphs with repeated top eigenvalue defeat power iteration.
      CHECK_FALSE(is_primitive(vertex_matrix(g)));
      continue;
    }
    CHECK(p.spectral_radius == doctest::Approx(moduli[0]).epsilon(1e-9));
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.eigenvector.data(), static_cast<Eigen::Index>(p.eigenvector.size()));
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(p.left_eigenvector.data(), static_cast<Eigen::Index>(p.left_eigenvector.size()));
    CHECK((v * x - p.spectral_radius * x).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((v.transpose() * y - p.spectral_radius * y).cwiseAbs().maxCoeff() < 1e-8);
    if (p.primitive && moduli.size() > 1) CHECK(p.subdominant == doctest::Approx(moduli[1]).epsilon(1e-2));
  }
  PerronData fib = perron_data(fibonacci_graph());
  CHECK(fib.spectral_radius == doctest::Approx((1 + std::sqrt(5.0)) / 2));
  CHECK(fib.subdominant == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-6));
}
