#include "pimsner/kktheory.hpp"

#include <algorithm>

#include "pimsner/bimodule.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/fock.hpp"
#include "pimsner/linalg.hpp"

namespace pimsner {

std::vector<mpz_class> SmithDecomposition::diagonal() const {
  std::vector<mpz_class> d;
  for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
  return d;
}

SmithDecomposition smith_normal_form(const IntegerMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  SmithDecomposition d{IntegerMatrix::identity(rows), m, IntegerMatrix::identity(cols),
                       IntegerMatrix::identity(rows), 0};
  IntegerMatrix& S = d.S;
  auto row_swap = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    S.swap_rows(a, b);
    d.U.swap_rows(a, b);
    d.U_inverse.swap_cols(a, b);
  };
  auto row_add = [&](std::size_t dst, std::size_t src, const mpz_class& f) {
    S.add_row_multiple(dst, src, f);
    d.U.add_row_multiple(dst, src, f);
    d.U_inverse.add_col_multiple(src, dst, -f);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    S.swap_cols(a, b);
    d.W.swap_cols(a, b);
  };
  auto col_add = [&](std::size_t dst, std::size_t src, const mpz_class& f) {
    S.add_col_multiple(dst, src, f);
    d.W.add_col_multiple(dst, src, f);
  };

  const std::size_t n = std::min(rows, cols);
  for (std::size_t t = 0; t < n; ++t) {
    bool found = false;
    while (true) {
      std::size_t pi = 0, pj = 0;
      found = false;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (S(i, j) == 0) continue;
          if (!found || abs(S(i, j)) < abs(S(pi, pj))) {
            pi = i;
            pj = j;
            found = true;
          }
        }
      if (!found) break;
      row_swap(t, pi);
      col_swap(t, pj);
      bool dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (S(i, t) == 0) continue;
        mpz_class q = S(i, t) / S(t, t);
        row_add(i, t, -q);
        if (S(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (S(t, j) == 0) continue;
        mpz_class q = S(t, j) / S(t, t);
        col_add(j, t, -q);
        if (S(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      bool divisible = true;
      for (std::size_t i = t + 1; i < rows && divisible; ++i)
        for (std::size_t j = t + 1; j < cols && divisible; ++j)
          if (S(i, j) % S(t, t) != 0) {
            row_add(t, i, 1);
            divisible = false;
          }
      if (divisible) break;
    }
    if (!found) break;
    if (S(t, t) < 0) {
      S.negate_row(t);
      d.U.negate_row(t);
      d.U_inverse.negate_col(t);
    }
    ++d.rank;
  }
  return d;
}

std::string check_smith(const IntegerMatrix& m, const SmithDecomposition& d) {
  if (!(d.U * m * d.W == d.S)) return "U·M·W != S";
  if (abs(determinant(d.U)) != 1) return "U is not unimodular";
  if (abs(determinant(d.W)) != 1) return "W is not unimodular";
  if (!(d.U * d.U_inverse == IntegerMatrix::identity(d.U.rows()))) return "U_inverse is not the inverse of U";
  if (!d.S.is_diagonal()) return "S is not diagonal";
  auto diag = d.diagonal();
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (diag[i] < 0) return "negative invariant factor";
    if (i + 1 < diag.size()) {
      if (diag[i] == 0 && diag[i + 1] != 0) return "zero before a nonzero invariant factor";
      if (diag[i] != 0 && diag[i + 1] % diag[i] != 0) return "divisibility chain broken";
    }
  }
  return "";
}

std::string KGroup::to_string() const {
  std::vector<std::string> parts;
  for (const mpz_class& t : torsion) parts.push_back("Z/" + t.get_str());
  if (rank == 1) parts.push_back("Z");
  if (rank > 1) parts.push_back("Z^" + std::to_string(rank));
  if (parts.empty()) return "0";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " + " + parts[i];
  return out;
}

namespace {

IntegerVector column_of(const IntegerMatrix& m, std::size_t j) {
  IntegerVector v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

}  // namespace

KGroup cokernel(const IntegerMatrix& m) {
  SmithDecomposition d = smith_normal_form(m);
  KGroup group;
  std::vector<IntegerVector> free;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    mpz_class di = (i < m.cols()) ? d.S(i, i) : mpz_class(0);
    if (di == 1) continue;
    if (di == 0) {
      ++group.rank;
      free.push_back(column_of(d.U_inverse, i));
    } else {
      group.torsion.push_back(di);
      group.generators.push_back(column_of(d.U_inverse, i));
    }
  }
  group.generators.insert(group.generators.end(), free.begin(), free.end());
  return group;
}

KGroup kernel(const IntegerMatrix& m) {
  SmithDecomposition d = smith_normal_form(m);
  KGroup group;
  for (std::size_t j = d.rank; j < m.cols(); ++j) {
    ++group.rank;
    group.generators.push_back(column_of(d.W, j));
  }
  return group;
}

namespace {

IntegerMatrix one_minus(const IntegerMatrix& m) { return IntegerMatrix::identity(m.rows()) - m; }

}  // namespace

KPair k_theory(const DirectedGraph& g) {
  require_nonsingular(g);
  IntegerMatrix m = one_minus(vertex_matrix(g).transpose());
  return {cokernel(m), kernel(m)};
}

KPair k_homology(const DirectedGraph& g) {
  require_nonsingular(g);
  IntegerMatrix m = one_minus(vertex_matrix(g));
  return {kernel(m), cokernel(m)};
}

IntegerMatrix class_of_E(const DirectedGraph& g) { return vertex_matrix(g).transpose(); }

KClass one_minus_E(const DirectedGraph& g, const KClass& x) {
  if (x.size() != g.vertex_count()) throw ValidationError("K-class length does not match the vertex count");
  return x - class_of_E(g).apply(x);
}

KClass ev_star(const PartialIsometryClass& v) {
  const std::size_t n = v.domain_ranks().size() - 1;
  KClass out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<long>(v.domain_ranks()[i]) - static_cast<long>(v.codomain_ranks()[i]);
  return out;
}

std::string to_string(RankMode mode) { return mode == RankMode::exact ? "exact" : "float"; }

RankMode parse_rank_mode(const std::string& text) {
  if (text == "exact") return RankMode::exact;
  if (text == "float") return RankMode::floating;
  throw ParseError("--mode", "unknown arithmetic mode '" + text + "'");
}

namespace {

// Per-vertex dim ker of op on the range of proj, over inputs at levels ≤ op's clean window.
KClass block_kernel(const FockOperator& op, const FockOperator& proj, RankMode mode) {
  const std::size_t n = op.fock().graph().vertex_count();
  const long window = op.clean_max();
  std::vector<std::vector<SparseColumn>> domain(n), image(n);
  for (std::size_t j = 0; j < op.dimension(); ++j) {
    if (static_cast<long>(op.level_of(j)) > window) continue;
    VertexIndex w = op.range_of(j);
    if (!proj.column(j).empty()) domain[w].push_back(proj.column(j));
    if (!op.column(j).empty()) image[w].push_back(op.column(j));
  }
  KClass out(n);
  for (VertexIndex w = 0; w < n; ++w) {
    std::size_t a, b;
    if (mode == RankMode::exact) {
      a = exact_rank(domain[w]);
      b = exact_rank(image[w]);
    } else {
      a = float_rank(domain[w], op.dimension(), 1e-9);
      b = float_rank(image[w], op.dimension(), 1e-9);
    }
    out[w] = static_cast<long>(a) - static_cast<long>(b);
  }
  return out;
}

IndexLevel index_level(const DirectedGraph& g, const PartialIsometryClass& v, std::size_t truncation, RankMode mode,
                       std::size_t cap) {
  TruncatedFock f(g, truncation, cap);
  const std::size_t k = v.size();
  FockOperator t = fock_action(f, v.matrix());
  FockOperator domain = scalar_action(f, v.domain(), k);
  FockOperator codomain = scalar_action(f, v.codomain(), k);
  FockOperator x = codomain * t * domain;
  FockOperator x_star = x.adjoint();
  IndexLevel level;
  level.truncation = truncation;
  level.domain_window = x.clean_max();
  level.codomain_window = x_star.clean_max();
  level.kernel = block_kernel(x, domain, mode);
  level.cokernel = block_kernel(x_star, codomain, mode);
  return level;
}

}  // namespace

IndexComputation index_pairing(const DirectedGraph& g, const PartialIsometryClass& v, std::size_t truncation,
                               RankMode mode, std::size_t max_truncation, std::size_t cap) {
  require_nonsingular(g);
  const std::size_t band = std::max(v.matrix().max_mu_length(), v.matrix().max_nu_length());
  truncation = std::max(truncation, band);
  if (max_truncation == 0) max_truncation = truncation + 6;
  IndexComputation out;
  for (std::size_t K = truncation; K <= max_truncation; ++K) {
    out.levels.push_back(index_level(g, v, K, mode, cap));
    if (out.levels.size() < 2) continue;
    const IndexLevel& a = out.levels[out.levels.size() - 2];
    const IndexLevel& b = out.levels.back();
    if (a.domain_window < 0 || a.codomain_window < 0) continue;
    if (a.kernel == b.kernel && a.cokernel == b.cokernel) {
      out.stabilized = true;
      out.index = b.kernel - b.cokernel;
      out.pairing = KClass(out.index.size(), 0) - out.index;
      return out;
    }
  }
  throw ConvergenceError("index of '" + v.name() + "' did not stabilize up to truncation " +
                             std::to_string(max_truncation),
                         0.0);
}

DiagramReport diagram_check(const DirectedGraph& g, const PartialIsometryClass& v, std::size_t truncation,
                            RankMode mode, std::size_t cap) {
  DiagramReport r;
  r.name = v.name();
  r.index = index_pairing(g, v, truncation, mode, 0, cap);
  r.lhs = one_minus_E(g, r.index.index);
  r.rhs = ev_star(v);
  r.pass = r.lhs == r.rhs;
  r.opposite_lhs = one_minus_E(g, r.index.pairing);
  r.opposite_pass = r.opposite_lhs == r.rhs;
  return r;
}

PartialIsometryClass w_class(const DirectedGraph& g) {
  require_nonsingular(g);
  const std::size_t n = g.edge_count();
  MatrixOverAlgebra w(n);
  for (EdgeIndex e = 0; e < n; ++e) w(e, 0) = AlgebraElement::edge(g, e).adjoint();
  return PartialIsometryClass(g, std::move(w), "w");
}

KClass pairing_w(const DirectedGraph& g, std::size_t truncation, RankMode mode) {
  return index_pairing(g, w_class(g), truncation, mode).pairing;
}

ExactSequenceReport exact_sequence_report(const DirectedGraph& g) {
  ExactSequenceReport r{k_theory(g), k_homology(g), {}};
  const std::size_t n = g.vertex_count();
  auto bookkeeping = [&](const std::string& name, const IntegerMatrix& m) {
    SmithDecomposition d = smith_normal_form(m);
    std::size_t nullity = m.cols() - d.rank;
    r.checks.push_back({"rank ker(" + name + ") + rank im(" + name + ") = |G0|", nullity + d.rank == n,
                        std::to_string(nullity) + " + " + std::to_string(d.rank), std::to_string(n)});
  };
  bookkeeping("1-V^T", one_minus(vertex_matrix(g).transpose()));
  bookkeeping("1-V", one_minus(vertex_matrix(g)));
  auto torsion_string = [](const KGroup& k) {
    std::string s;
    for (const auto& t : k.torsion) s += (s.empty() ? "" : ",") + t.get_str();
    return "[" + s + "]";
  };
  r.checks.push_back({"torsion K0 = torsion K^1", r.k.even.torsion == r.k_hom.odd.torsion,
                      torsion_string(r.k.even), torsion_string(r.k_hom.odd)});
  r.checks.push_back({"rank K1 = rank K^0", r.k.odd.rank == r.k_hom.even.rank, std::to_string(r.k.odd.rank),
                      std::to_string(r.k_hom.even.rank)});
  return r;
}

SmebReport smeb_report(const DirectedGraph& g) {
  SmebReport r;
  const IntegerMatrix v = vertex_matrix(g);
  r.permutation = true;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    mpz_class row = 0, col = 0;
    for (std::size_t j = 0; j < v.cols(); ++j) {
      if (v(i, j) != 0 && v(i, j) != 1) r.permutation = false;
      if (v(j, i) != 0 && v(j, i) != 1) r.permutation = false;
      row += v(i, j);
      col += v(j, i);
    }
    if (row != 1 || col != 1) r.permutation = false;
  }
  r.compatibility = g.vertex_count() > 0;
  std::vector<TensorElement> frame;
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) frame.push_back(TensorElement::point_mass(Path::along_edge(g, e)));
  for (std::size_t e = 0; e < frame.size() && r.compatibility; ++e)
    for (std::size_t f = 0; f < frame.size() && r.compatibility; ++f) {
      const auto left = left_inner(g, frame[e], frame[f]);
      for (std::size_t h = 0; h < frame.size() && r.compatibility; ++h) {
        const auto right = right_inner(g, frame[f], frame[h]);
        TensorElement lhs(1), rhs(1);
        for (const auto& [p, c] : frame[h].coefficients()) lhs.add(p, left[p.source()] * c);
        for (const auto& [p, c] : frame[e].coefficients()) rhs.add(p, c * right[p.range()]);
        if (!(lhs == rhs)) r.compatibility = false;
      }
    }
  return r;
}

bool is_smeb(const DirectedGraph& g) { return smeb_report(g).permutation; }

}  // namespace pimsner
