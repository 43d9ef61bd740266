#include <doctest.h>

#include "pimsner/bimodule.hpp"
#include "pimsner/builtin.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/fock.hpp"
#include "support.hpp"

using namespace pimsner;

namespace {

TensorElement random_tensor(const DirectedGraph& g, std::size_t k, std::mt19937& rng) {
  TensorElement t(k);
  for (const Path& p : enumerate_paths(g, k)) t.add(p, testing::random_gaussian_rational(rng));
  return t;
}

// Columns whose input level is at most `level` agree.
bool agree_up_to(const FockOperator& a, const FockOperator& b, long level) {
  for (std::size_t j = 0; j < a.dimension(); ++j)
    if (static_cast<long>(a.level_of(j)) <= level && a.column(j) != b.column(j)) return false;
  return true;
}

FockOperator projection_from_level(const TruncatedFock& f, std::size_t k) {
  FockOperator p(f);
  for (std::size_t j = k; j <= f.truncation(); ++j) p += level_projection(f, j);
  return p;
}

}  // namespace

TEST_CASE("truncated Fock basis is level-major") {
  DirectedGraph g = fibonacci_graph();
  TruncatedFock f(g, 3);
  std::size_t expected = 0;
  for (std::size_t k = 0; k <= 3; ++k) {
    CHECK(f.level_offset(k) == expected);
    CHECK(f.level_size(k) == enumerate_paths(g, k).size());
    expected += f.level_size(k);
  }
  CHECK(f.size() == expected);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.find(f.path(i)) == i);
  CHECK_FALSE(f.find(parse_path_id(g, "a·a·a·a")).has_value());
}

TEST_CASE("creation operators concatenate paths") {
  DirectedGraph g = fibonacci_graph();
  TruncatedFock f(g, 3);
  Path b = parse_path_id(g, "b");
  FockOperator t = creation(f, TensorElement::point_mass(b));
  CHECK(t.clean_max() == 2);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Path& mu = f.path(j);
    auto joined = b.then(mu);
    if (joined && joined->length() <= 3) {
      CHECK(t.column(j).size() == 1);
      CHECK(t.at(*f.find(*joined), j) == ExactComplex(1));
    } else {
      CHECK(t.column(j).empty());
    }
  }
  CHECK_THROWS_AS(creation(f, TensorElement::point_mass(parse_path_id(g, "a·a·a·a"))), ValidationError);
}

TEST_CASE("adjoint is the conjugate transpose and annihilation is its instance") {
  std::mt19937 rng(21);
  for (const auto& ng : builtin_graphs()) {
    TruncatedFock f(ng.graph, 3);
    TensorElement x = random_tensor(ng.graph, 1, rng);
    FockOperator t = creation(f, x);
    FockOperator ta = t.adjoint();
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) CHECK(ta.at(i, j) == t.at(j, i).conj());
    CHECK(annihilation(f, x) == ta);
    CHECK(ta.adjoint() == t);
    CHECK(t.is_right_linear());
  }
}

TEST_CASE("Toeplitz relation on clean windows") {
  std::mt19937 rng(23);
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    for (std::size_t K = 1; K <= 5; ++K) {
      TruncatedFock f(g, K);
      for (std::size_t k = 1; k <= std::min<std::size_t>(K, 2); ++k) {
        TensorElement xi = random_tensor(g, k, rng), eta = random_tensor(g, k, rng);
        FockOperator lhs = annihilation(f, xi) * creation(f, eta);
        FockOperator rhs = left_action(f, right_inner(g, xi, eta));
        CHECK(lhs.clean_max() >= static_cast<long>(K - k));
        CHECK(agree_up_to(lhs, rhs, lhs.clean_max()));
      }
    }
  }
}

TEST_CASE("frame sums on the Fock module") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    for (std::size_t K = 1; K <= 5; ++K) {
      TruncatedFock f(g, K);
      for (std::size_t k = 1; k <= std::min<std::size_t>(K, 3); ++k) {
        FockOperator sum(f);
        for (const TensorElement& d : standard_frame(g, k)) sum += creation(f, d) * annihilation(f, d);
        // Σ_{|μ|=k} T_μ T_μ* projects onto levels ≥ k; exact at every level here.
        CHECK(sum == projection_from_level(f, k));
      }
      // The frame identity at level k, read off the compression.
      for (std::size_t k = 0; k <= K; ++k) {
        EndoMatrix sum(g, k);
        for (const TensorElement& d : standard_frame(g, k)) sum += EndoMatrix::theta(g, d, d);
        CHECK(compress(FockOperator::identity(f), k) == sum);
      }
    }
  }
}

TEST_CASE("left and right actions") {
  DirectedGraph g = fibonacci_graph();
  TruncatedFock f(g, 2);
  VertexFunction<ExactComplex> a{2, ExactComplex(0, 1)};
  FockOperator l = left_action(f, a), r = right_action(f, a);
  for (std::size_t j = 0; j < f.size(); ++j) {
    CHECK(l.at(j, j) == a[f.path(j).source()]);
    CHECK(r.at(j, j) == a[f.path(j).range()]);
  }
  CHECK(r.is_right_linear());
  CHECK(l.is_right_linear());
  // Right multiplication commutes with every creation operator.
  FockOperator t = creation(f, TensorElement::point_mass(parse_path_id(g, "b")));
  CHECK(t * r == r * t);
}

TEST_CASE("level projections resolve the identity") {
  TruncatedFock f(primitive_three_graph(), 3);
  FockOperator sum(f);
  for (std::size_t k = 0; k <= 3; ++k) {
    FockOperator p = level_projection(f, k);
    CHECK(p * p == p);
    CHECK(p.adjoint() == p);
    sum += p;
  }
  CHECK(sum == FockOperator::identity(f));
  CHECK(fock_projection_Q(f) == FockOperator::identity(f));
}

TEST_CASE("clean-window bookkeeping for products") {
  DirectedGraph g = cuntz_graph(2);
  TruncatedFock f(g, 5);
  FockOperator ta = creation(f, TensorElement::point_mass(parse_path_id(g, "a·b")));
  FockOperator tb = creation(f, TensorElement::point_mass(parse_path_id(g, "b")));
  CHECK(ta.clean_max() == 3);
  CHECK(ta.min_shift() == 2);
  CHECK(ta.max_shift() == 2);
  FockOperator prod = ta * tb;
  CHECK(prod.clean_max() == 2);
  CHECK(prod.min_shift() == 3);
  FockOperator adj = ta.adjoint();
  CHECK(adj.min_shift() == -2);
  CHECK(adj.max_shift() == -2);
  CHECK(adj.clean_max() == 5);
  // Inside the clean window the product is the untruncated composite.
  FockOperator direct = creation(f, TensorElement::point_mass(parse_path_id(g, "a·b·b")));
  CHECK(agree_up_to(prod, direct, prod.clean_max()));
}

TEST_CASE("block operators on several copies") {
  DirectedGraph g = cycle_graph(2);
  TruncatedFock f(g, 2);
  FockOperator t = creation(f, TensorElement::point_mass(Path::along_edge(g, 0)));
  FockOperator zero(f);
  FockOperator b = FockOperator::block({{zero, t}, {t.adjoint(), zero}});
  CHECK(b.copies() == 2);
  CHECK(b.dimension() == 2 * f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j) {
      CHECK(b.at(i, f.size() + j) == t.at(i, j));
      CHECK(b.at(f.size() + i, j) == t.at(j, i).conj());
      CHECK(b.at(i, j).is_zero());
    }
  CHECK(b.adjoint() == b);
}
