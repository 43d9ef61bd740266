#include <doctest.h>

#include "pimsner/builtin.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/kktheory.hpp"
#include "support.hpp"

using namespace pimsner;

namespace {

IntegerMatrix random_matrix(std::mt19937& rng, std::size_t max_dim, int range) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_int_distribution<int> entry(-range, range);
  std::bernoulli_distribution sparse(0.3);
  const std::size_t r = dim(rng), c = dim(rng);
  IntegerMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = sparse(rng) ? 0 : entry(rng);
  return m;
}

// Laplace expansion; only for tiny minors.
mpz_class cofactor_det(const std::vector<std::vector<mpz_class>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  mpz_class total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<mpz_class>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<mpz_class> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(a[i][c]);
      minor.push_back(std::move(row));
    }
    mpz_class term = a[0][j] * cofactor_det(minor);
    total += (j % 2 == 0) ? term : mpz_class(-term);
  }
  return total;
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// d_k = D_k / D_{k-1}, with D_k the gcd of all k×k minors.
std::vector<mpz_class> determinantal_factors(const IntegerMatrix& m) {
  std::vector<mpz_class> out;
  mpz_class previous = 1;
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rows, cols;
    std::vector<std::size_t> cur;
    subsets(m.rows(), k, 0, cur, rows);
    subsets(m.cols(), k, 0, cur, cols);
    mpz_class g = 0;
    for (const auto& r : rows)
      for (const auto& c : cols) {
        std::vector<std::vector<mpz_class>> a(k, std::vector<mpz_class>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) a[i][j] = m(r[i], c[j]);
        mpz_class d = cofactor_det(a);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    out.push_back(g / previous);
    previous = g;
  }
  return out;
}

KClass unit_vector(std::size_t n, std::size_t i, long value = 1) {
  KClass x(n, 0);
  x[i] = value;
  return x;
}

}  // namespace

TEST_CASE("Smith normal form of small hand examples") {
  IntegerMatrix m(2, 2, {2, 4, 6, 8});
  SmithDecomposition d = smith_normal_form(m);
  CHECK(check_smith(m, d).empty());
  CHECK(d.diagonal() == std::vector<mpz_class>{2, 4});
  IntegerMatrix z(2, 3, {0, 0, 0, 0, 0, 0});
  CHECK(smith_normal_form(z).rank == 0);
  IntegerMatrix row(1, 3, {6, 10, 15});
  CHECK(smith_normal_form(row).diagonal() == std::vector<mpz_class>{1});
  IntegerMatrix diag(3, 3, {4, 0, 0, 0, 6, 0, 0, 0, 10});
  CHECK(smith_normal_form(diag).diagonal() == std::vector<mpz_class>{2, 2, 60});
}

TEST_CASE("Smith normal form contract on random matrices") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    IntegerMatrix m = random_matrix(rng, 8, 9);
    SmithDecomposition d = smith_normal_form(m);
    CHECK(check_smith(m, d) == "");
    CHECK(d.U * m * d.W == d.S);
    CHECK(abs(determinant(d.U)) == 1);
    CHECK(abs(determinant(d.W)) == 1);
    CHECK(d.U * d.U_inverse == IntegerMatrix::identity(m.rows()));
    auto diag = d.diagonal();
    for (std::size_t i = 0; i + 1 < d.rank; ++i) CHECK(diag[i + 1] % diag[i] == 0);
    if (std::max(m.rows(), m.cols()) <= 4) {
      std::vector<mpz_class> expected = determinantal_factors(m);
      CHECK(std::vector<mpz_class>(diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(d.rank)) == expected);
    }
  }
}

TEST_CASE("kernel and cokernel generators") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    IntegerMatrix m = random_matrix(rng, 5, 4);
    KGroup ker = kernel(m);
    CHECK(ker.torsion.empty());
    CHECK(ker.rank + smith_normal_form(m).rank == m.cols());
    for (const IntegerVector& x : ker.generators) {
      IntegerVector y = m.apply(x);
      CHECK(std::all_of(y.begin(), y.end(), [](const mpz_class& z) { return z == 0; }));
    }
    KGroup coker = cokernel(m);
    CHECK(coker.rank + smith_normal_form(m).rank == m.rows());
    CHECK(coker.generators.size() == coker.torsion.size() + coker.rank);
  }
  // coker [[2,0],[0,3]] = Z/6 generated in one step; the generator has order 6.
  IntegerMatrix m(2, 2, {2, 0, 0, 3});
  KGroup c = cokernel(m);
  CHECK(c.rank == 0);
  CHECK(c.torsion == std::vector<mpz_class>{6});
  CHECK(c.to_string() == "Z/6");
}

TEST_CASE("graph K-theory table") {
  for (std::size_t n = 2; n <= 6; ++n) {
    KPair k = k_theory(cuntz_graph(n));
    CHECK(k.even.rank == 0);
    if (n == 2) {
      CHECK(k.even.torsion.empty());
    } else {
      CHECK(k.even.torsion == std::vector<mpz_class>{mpz_class(static_cast<unsigned long>(n - 1))});
    }
    CHECK(k.odd.rank == 0);
  }
  for (std::size_t m = 1; m <= 6; ++m) {
    KPair k = k_theory(cycle_graph(m));
    CHECK(k.even.rank == 1);
    CHECK(k.even.torsion.empty());
    CHECK(k.odd.rank == 1);
  }
  KPair fib = k_theory(fibonacci_graph());
  CHECK(fib.even.rank == 0);
  CHECK(fib.even.torsion.empty());
  CHECK(fib.odd.rank == 0);
  KPair two = k_theory(two_loops_graph());
  CHECK(two.even.rank == 2);
  CHECK(two.odd.rank == 2);
}

TEST_CASE("K-homology mirrors K-theory") {
  std::mt19937 rng(107);
  for (int trial = 0; trial < 30; ++trial) {
    DirectedGraph g = testing::random_nonsingular_graph(rng, 8, 3, 0.25);
    KPair k = k_theory(g), h = k_homology(g);
    CHECK(h.odd.torsion == k.even.torsion);
    CHECK(h.even.rank == k.odd.rank);
    CHECK(h.odd.rank == k.even.rank);
    ExactSequenceReport r = exact_sequence_report(g);
    for (const RankCheck& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
  }
  ExactSequenceReport o4 = exact_sequence_report(cuntz_graph(4));
  CHECK(o4.k.even.to_string() == "Z/3");
  CHECK(o4.k_hom.odd.to_string() == "Z/3");
  CHECK(o4.k_hom.even.to_string() == "0");
}

TEST_CASE("class of E and ev_*") {
  DirectedGraph c2 = cycle_graph(2);
  CHECK(one_minus_E(c2, {1, 0}) == KClass{1, -1});
  CHECK(one_minus_E(c2, {0, 0}) == KClass{0, 0});
  CHECK(class_of_E(c2) == vertex_matrix(c2).transpose());
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    KClass ev = ev_star(w_class(g));
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
      CHECK(ev[v] + static_cast<long>(g.in_edges(v).size()) == 1);
  }
}

TEST_CASE("index of single-edge isometries on cycles") {
  // S_e maps p_{r(e)}F injectively into p_{s(e)}F and misses only the level-0
  // copy of p_{s(e)}: kernel 0, cokernel e_{s(e)}.
  for (std::size_t m = 1; m <= 4; ++m) {
    DirectedGraph g = cycle_graph(m);
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
      PartialIsometryClass v(g, MatrixOverAlgebra::scalar(AlgebraElement::edge(g, e)), "S");
      IndexComputation c = index_pairing(g, v, 2);
      CHECK(c.stabilized);
      CHECK(c.index == unit_vector(m, g.edge(e).src, -1));
      CHECK(c.pairing == unit_vector(m, g.edge(e).src, 1));
      for (const IndexLevel& l : c.levels) CHECK(l.kernel == KClass(m, 0));
      PartialIsometryClass va(g, MatrixOverAlgebra::scalar(AlgebraElement::edge(g, e).adjoint()), "S*");
      CHECK(index_pairing(g, va, 2).index == unit_vector(m, g.edge(e).src, 1));
    }
  }
}

TEST_CASE("index of projections vanishes") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    const KClass zero(g.vertex_count(), 0);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
      PartialIsometryClass p(g, MatrixOverAlgebra::scalar(AlgebraElement::vertex(v)), "p");
      CHECK(index_pairing(g, p, 1).index == zero);
    }
    PartialIsometryClass one(g, MatrixOverAlgebra::scalar(AlgebraElement::unit()), "1");
    CHECK(index_pairing(g, one, 1).index == zero);
  }
}

TEST_CASE("w class pairs to minus the unit class") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    const KClass minus_ones(g.vertex_count(), -1);
    CHECK(pairing_w(g) == minus_ones);
    IndexComputation c = index_pairing(g, w_class(g), w_default_truncation);
    CHECK(c.levels.size() == 2);
    CHECK(c.levels.back().kernel == KClass(g.vertex_count(), 1));
    CHECK(c.levels.back().cokernel == KClass(g.vertex_count(), 0));
  }
}

TEST_CASE("index is additive over block sums") {
  for (const auto& ng : builtin_graphs()) {
    const DirectedGraph& g = ng.graph;
    auto suite = builtin_isometries(g);
    for (std::size_t i = 0; i + 1 < suite.size(); i += 2) {
      const auto& a = suite[i];
      const auto& b = suite[i + 1];
      PartialIsometryClass sum(g, MatrixOverAlgebra::block_sum(a.matrix(), b.matrix()), "sum");
      CHECK(index_pairing(g, sum, 3).index == index_pairing(g, a, 3).index + index_pairing(g, b, 3).index);
    }
  }
}

TEST_CASE("floating rank mode agrees with exact") {
  CHECK(parse_rank_mode("exact") == RankMode::exact);
  CHECK(parse_rank_mode("float") == RankMode::floating);
  CHECK_THROWS(parse_rank_mode("fast"));
  for (const auto& ng : builtin_graphs())
    for (const auto& v : builtin_isometries(ng.graph))
      CHECK(index_pairing(ng.graph, v, 3, RankMode::floating).index == index_pairing(ng.graph, v, 3).index);
}

TEST_CASE("diagram commutes on the builtin suite") {
  std::size_t cases = 0;
  for (const auto& ng : builtin_graphs())
    for (const auto& v : builtin_isometries(ng.graph)) {
      DiagramReport r = diagram_check(ng.graph, v, 3);
      CHECK_MESSAGE(r.pass, std::string(ng.name + " " + v.name()));
      CHECK(r.rhs == ev_star(v));
      ++cases;
    }
  CHECK(cases >= 20);
}

TEST_CASE("stabilization failure is reported") {
  DirectedGraph g = cycle_graph(2);
  PartialIsometryClass v(g, MatrixOverAlgebra::scalar(AlgebraElement::edge(g, 0)), "S");
  CHECK_THROWS_AS(index_pairing(g, v, 1, RankMode::exact, 1), ConvergenceError);
  DirectedGraph sink({"u", "v"}, {{"a", 0, 1}});
  CHECK_THROWS_AS(k_theory(sink), ValidationError);
}

TEST_CASE("self-Morita equivalence criterion") {
  CHECK(is_smeb(cycle_graph(2)));
  CHECK(is_smeb(cycle_graph(5)));
  CHECK(is_smeb(two_loops_graph()));
  CHECK_FALSE(is_smeb(cuntz_graph(2)));
  CHECK_FALSE(is_smeb(fibonacci_graph()));
  for (const auto& ng : builtin_graphs()) {
    SmebReport r = smeb_report(ng.graph);
    CHECK(r.permutation == r.compatibility);
  }
}
