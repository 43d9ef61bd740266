#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

namespace testing {

using pimsner::DirectedGraph;
using pimsner::Edge;

// Nonsingular by construction: a random permutation is laid down first, then
// up to max_parallel extra edges per ordered pair.
inline DirectedGraph random_nonsingular_graph(std::mt19937& rng, std::size_t max_vertices, int max_parallel,
                                              double density = 0.3) {
  std::uniform_int_distribution<std::size_t> size(1, max_vertices);
  const std::size_t n = size(rng);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<int>> count(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) count[i][perm[i]] = 1;
  std::bernoulli_distribution add(density);
  std::uniform_int_distribution<int> extra(1, max_parallel);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (add(rng)) count[i][j] = std::min(max_parallel, count[i][j] + extra(rng));
  std::vector<std::string> vertices;
  for (std::size_t i = 0; i < n; ++i) vertices.push_back("v" + std::to_string(i));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (int c = 0; c < count[i][j]; ++c) edges.push_back({"e" + std::to_string(edges.size()), i, j});
  return DirectedGraph(std::move(vertices), std::move(edges));
}

inline Eigen::MatrixXd dense_vertex_matrix(const DirectedGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.vertex_count()),
                                            static_cast<Eigen::Index>(g.vertex_count()));
  for (const Edge& e : g.edges()) m(static_cast<Eigen::Index>(e.src), static_cast<Eigen::Index>(e.dst)) += 1;
  return m;
}

inline pimsner::ExactComplex random_gaussian_rational(std::mt19937& rng, int range = 5) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, 3);
  mpq_class re(num(rng), den(rng)), im(num(rng), den(rng));
  re.canonicalize();
  im.canonicalize();
  return {re, im};
}

}  // namespace testing
