#include <doctest.h>

#include "pimsner/algebra.hpp"
#include "pimsner/builtin.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/kktheory.hpp"
#include "support.hpp"

using namespace pimsner;

namespace {

AlgebraElement random_element(const DirectedGraph& g, std::mt19937& rng, std::size_t max_length, int terms,
                              bool with_unit = false) {
  AlgebraElement x;
  if (with_unit) x.add_unit(testing::random_gaussian_rational(rng));
  std::uniform_int_distribution<std::size_t> len(0, max_length);
  for (int t = 0; t < terms; ++t) {
    auto mus = enumerate_paths(g, len(rng));
    auto nus = enumerate_paths(g, len(rng));
    std::uniform_int_distribution<std::size_t> pick_mu(0, mus.size() - 1), pick_nu(0, nus.size() - 1);
    for (int attempt = 0; attempt < 20; ++attempt) {
      const Path& mu = mus[pick_mu(rng)];
      const Path& nu = nus[pick_nu(rng)];
      if (mu.range() != nu.range()) continue;
      x += AlgebraElement::monomial(mu, nu, testing::random_gaussian_rational(rng));
      break;
    }
  }
  return x;
}

bool agree_up_to(const FockOperator& a, const FockOperator& b, long level) {
  for (std::size_t j = 0; j < a.dimension(); ++j)
    if (static_cast<long>(a.level_of(j)) <= level && a.column(j) != b.column(j)) return false;
  return true;
}

}  // namespace

TEST_CASE("monomial products follow the prefix rules") {
  DirectedGraph g = fibonacci_graph();
  Path a = parse_path_id(g, "a"), b = parse_path_id(g, "b"), ab = parse_path_id(g, "a·b"), c = parse_path_id(g, "c");
  Path u = Path::at_vertex(0), v = Path::at_vertex(1);
  // S_a* S_a = p_u, S_a* S_b = 0, S_a* S_{ab} = S_b.
  CHECK(AlgebraElement::path(a).adjoint() * AlgebraElement::path(a) == AlgebraElement::vertex(0));
  CHECK((AlgebraElement::path(a).adjoint() * AlgebraElement::path(b)).is_zero());
  CHECK(AlgebraElement::path(a).adjoint() * AlgebraElement::path(ab) == AlgebraElement::path(b));
  CHECK(AlgebraElement::path(ab).adjoint() * AlgebraElement::path(a) == AlgebraElement::monomial(v, b));
  CHECK((AlgebraElement::path(c) * AlgebraElement::path(c)).is_zero());
  CHECK(AlgebraElement::vertex(0) * AlgebraElement::path(b) == AlgebraElement::path(b));
  CHECK((AlgebraElement::vertex(1) * AlgebraElement::path(b)).is_zero());
  CHECK(AlgebraElement::monomial(u, u) == AlgebraElement::vertex(0));
  CHECK(AlgebraElement::monomial(a, b).is_zero());
  CHECK_FALSE(AlgebraElement::monomial(a, c).is_zero());
  CHECK(AlgebraElement::unit(3) * AlgebraElement::path(a) == AlgebraElement::path(a, 3));
}

TEST_CASE("the Fock representation is multiplicative on clean windows") {
  std::mt19937 rng(31);
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    TruncatedFock f(g, 5);
    for (int trial = 0; trial < 6; ++trial) {
      AlgebraElement x = random_element(g, rng, 2, 3, trial % 2 == 0);
      AlgebraElement y = random_element(g, rng, 2, 3, true);
      FockOperator fx = fock_action(f, x), fy = fock_action(f, y);
      FockOperator product = fx * fy;
      CHECK(product.clean_max() >= 0);
      CHECK(agree_up_to(fock_action(f, x * y), product, product.clean_max()));
      CHECK(fock_action(f, x.adjoint()) == fx.adjoint());
    }
  }
}

TEST_CASE("algebra identities") {
  std::mt19937 rng(37);
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    for (int trial = 0; trial < 4; ++trial) {
      AlgebraElement x = random_element(g, rng, 2, 3, true);
      AlgebraElement y = random_element(g, rng, 2, 3);
      AlgebraElement z = random_element(g, rng, 1, 2, true);
      CHECK(equals(g, x * (y * z), (x * y) * z));
      CHECK(equals(g, (x * y).adjoint(), y.adjoint() * x.adjoint()));
      CHECK(x.adjoint().adjoint() == x);
      AlgebraElement sum;
      for (const auto& [n, part] : gauge_decompose(x)) {
        for (const auto& [m, c] : part.terms()) CHECK(m.degree() == n);
        sum += part;
      }
      CHECK(sum == x);
      CHECK(core_expectation(x) == gauge_decompose(x)[0]);
    }
  }
}

TEST_CASE("Cuntz-Krieger relation holds in normal form") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      AlgebraElement sum;
      for (EdgeIndex e : g.out_edges(v)) {
        AlgebraElement s = AlgebraElement::edge(g, e);
        sum += s * s.adjoint();
        CHECK(s.adjoint() * s == AlgebraElement::vertex(g.edge(e).dst));
      }
      CHECK(equals(g, sum, AlgebraElement::vertex(v)));
      CHECK_FALSE(sum == AlgebraElement::vertex(v));
    }
    CHECK(equals(g, AlgebraElement::one_A(g) * AlgebraElement::one_A(g), AlgebraElement::one_A(g)));
    CHECK_FALSE(equals(g, AlgebraElement::one_A(g), AlgebraElement::unit()));
  }
}

TEST_CASE("normal forms are consistent across depths") {
  DirectedGraph g = primitive_three_graph();
  std::mt19937 rng(41);
  AlgebraElement x = random_element(g, rng, 2, 4, true);
  NormalForm d2 = normal_form(g, x, 2), d3 = normal_form(g, x, 3);
  CHECK(normal_form(g, x, 3) == d3);
  AlgebraElement from2;
  from2.add_unit(d2.unit);
  for (const auto& [m, c] : d2.terms) {
    CHECK(m.depth() == 2);
    from2.add_term(m, c);
  }
  CHECK(normal_form(g, from2, 3) == d3);
  CHECK_THROWS_AS(normal_form(g, x, 1), ValidationError);
}

TEST_CASE("scalar reduction") {
  DirectedGraph g = cycle_graph(2);
  auto s = reduce_to_scalars(g, AlgebraElement::unit() - AlgebraElement::vertex(0, 2));
  REQUIRE(s.has_value());
  CHECK(s->unit == ExactComplex(1));
  CHECK(s->vertex == VertexFunction<ExactComplex>{-2, 0});
  CHECK(s->value_at(0) == ExactComplex(-1));
  CHECK(s->value_at(2) == ExactComplex(1));
  AlgebraElement e0 = AlgebraElement::edge(g, 0);
  auto p = reduce_to_scalars(g, e0 * e0.adjoint() + e0.adjoint() * e0);
  REQUIRE(p.has_value());
  CHECK(p->vertex == VertexFunction<ExactComplex>{1, 1});
  CHECK_FALSE(reduce_to_scalars(g, e0).has_value());
  CHECK(equals(g, from_scalars(*p), AlgebraElement::one_A(g)));
}

TEST_CASE("expectation weights satisfy the Cuntz-Krieger recursion") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    Expectation phi(g, LimitMode::automatic);
    for (std::size_t k = 0; k <= 2; ++k)
      for (const Path& mu : enumerate_paths(g, k)) {
        double children = 0;
        for (EdgeIndex e : g.out_edges(mu.range())) children += phi.weight(mu.extended(g, e));
        CHECK(phi.weight(mu) == doctest::Approx(children).epsilon(1e-9));
      }
    // Off-diagonal monomials have zero expectation.
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      auto value = phi(AlgebraElement::edge(g, e));
      for (auto c : value) CHECK(std::abs(c) < 1e-15);
    }
  }
  DirectedGraph o3 = cuntz_graph(3);
  Expectation phi(o3, LimitMode::automatic);
  Path ab = parse_path_id(o3, "a·b");
  auto exact = phi.exact(AlgebraElement::monomial(ab, ab, 9) + AlgebraElement::unit(2));
  REQUIRE(exact.has_value());
  CHECK((*exact)[0] == ExactComplex(3));
}

TEST_CASE("matrices over the algebra") {
  DirectedGraph g = cycle_graph(2);
  MatrixOverAlgebra a = MatrixOverAlgebra::scalar(AlgebraElement::edge(g, 0));
  MatrixOverAlgebra b = MatrixOverAlgebra::block_sum(a, a.adjoint());
  CHECK(b.size() == 2);
  CHECK(b(0, 1).is_zero());
  CHECK(b(1, 1) == AlgebraElement::edge(g, 0).adjoint());
  CHECK(b.gauge_degrees() == std::vector<long>{-1, 1});
  MatrixOverAlgebra bb = b.adjoint() * b;
  CHECK(equals(g, bb(0, 0), AlgebraElement::vertex(1)));
  CHECK(equals(g, bb(1, 1), AlgebraElement::vertex(0)));
}

TEST_CASE("partial isometry classes validate their projections") {
  DirectedGraph c2 = cycle_graph(2);
  PartialIsometryClass s(c2, MatrixOverAlgebra::scalar(AlgebraElement::edge(c2, 0)), "S_e0");
  CHECK(s.domain_ranks() == std::vector<std::size_t>{0, 1, 0});
  CHECK(s.codomain_ranks() == std::vector<std::size_t>{1, 0, 0});
  CHECK(ev_star(s) == KClass{-1, 1});

  CHECK_THROWS_AS(PartialIsometryClass(c2, MatrixOverAlgebra::scalar(AlgebraElement::vertex(0, 2))), ValidationError);
  DirectedGraph o2 = cuntz_graph(2);
  // S_a*S_a = 1_A but S_aS_a* is not scalar.
  CHECK_THROWS_AS(PartialIsometryClass(o2, MatrixOverAlgebra::scalar(AlgebraElement::edge(o2, 0))), ValidationError);
  // The adjoined unit in one corner is a valid class.
  MatrixOverAlgebra mixed = MatrixOverAlgebra::block_sum(MatrixOverAlgebra::scalar(AlgebraElement::unit()),
                                                          MatrixOverAlgebra::scalar(AlgebraElement()));
  CHECK_NOTHROW(PartialIsometryClass(o2, mixed));

  PartialIsometryClass p(o2, MatrixOverAlgebra::scalar(AlgebraElement::vertex(0)), "p");
  CHECK(ev_star(p) == KClass{0});
  for (const auto& ng : builtin_graphs()) CHECK(builtin_isometries(ng.graph).size() >= 6);
}
