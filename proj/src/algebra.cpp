#include "pimsner/algebra.hpp"

#include <algorithm>
#include <set>

#include "pimsner/errors.hpp"
#include "pimsner/linalg.hpp"

namespace pimsner {

AlgebraElement AlgebraElement::unit(ExactComplex c) {
  AlgebraElement x;
  x.unit_ = std::move(c);
  return x;
}

AlgebraElement AlgebraElement::monomial(const Path& mu, const Path& nu, ExactComplex c) {
  AlgebraElement x;
  x.add_term({mu, nu}, c);
  return x;
}

AlgebraElement AlgebraElement::vertex(VertexIndex v, ExactComplex c) {
  return monomial(Path::at_vertex(v), Path::at_vertex(v), std::move(c));
}

AlgebraElement AlgebraElement::path(const Path& mu, ExactComplex c) {
  return monomial(mu, Path::at_vertex(mu.range()), std::move(c));
}

AlgebraElement AlgebraElement::edge(const DirectedGraph& g, EdgeIndex e, ExactComplex c) {
  return path(Path::along_edge(g, e), std::move(c));
}

AlgebraElement AlgebraElement::one_A(const DirectedGraph& g) {
  AlgebraElement x;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) x += vertex(v);
  return x;
}

void AlgebraElement::add_term(const Monomial& m, const ExactComplex& c) {
  if (c.is_zero() || m.mu.range() != m.nu.range()) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement x;
  x.unit_ = unit_.conj();
  for (const auto& [m, c] : terms_) x.terms_.emplace(Monomial{m.nu, m.mu}, c.conj());
  return x;
}

std::size_t AlgebraElement::depth() const {
  std::size_t d = 0;
  for (const auto& entry : terms_) d = std::max(d, entry.first.depth());
  return d;
}

std::size_t AlgebraElement::max_mu_length() const {
  std::size_t d = 0;
  for (const auto& entry : terms_) d = std::max(d, entry.first.mu.length());
  return d;
}

std::size_t AlgebraElement::max_nu_length() const {
  std::size_t d = 0;
  for (const auto& entry : terms_) d = std::max(d, entry.first.nu.length());
  return d;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  unit_ += o.unit_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  unit_ -= o.unit_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(const ExactComplex& c) {
  if (c.is_zero()) {
    unit_ = 0;
    terms_.clear();
    return *this;
  }
  unit_ *= c;
  for (auto& entry : terms_) entry.second *= c;
  return *this;
}

namespace {

// (S_μS_ν*)(S_γS_δ*) via S_ν*S_γ.
std::optional<Monomial> multiply_monomials(const Monomial& a, const Monomial& b) {
  if (a.nu.is_prefix_of(b.mu)) {
    auto mu = a.mu.then(b.mu.tail(a.nu.length()));
    if (!mu) return std::nullopt;
    return Monomial{*mu, b.nu};
  }
  if (b.mu.is_prefix_of(a.nu)) {
    auto nu = b.nu.then(a.nu.tail(b.mu.length()));
    if (!nu) return std::nullopt;
    return Monomial{a.mu, *nu};
  }
  return std::nullopt;
}

}  // namespace

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out;
  out.unit_ = a.unit_ * b.unit_;
  if (!a.unit_.is_zero())
    for (const auto& [m, c] : b.terms_) out.add_term(m, a.unit_ * c);
  if (!b.unit_.is_zero())
    for (const auto& [m, c] : a.terms_) out.add_term(m, c * b.unit_);
  for (const auto& [m, c] : a.terms_)
    for (const auto& [n, d] : b.terms_)
      if (auto p = multiply_monomials(m, n)) out.add_term(*p, c * d);
  return out;
}

std::string AlgebraElement::to_string(const DirectedGraph& g) const {
  std::string out;
  auto append = [&](const std::string& coeff, const std::string& word) {
    if (!out.empty()) out += " + ";
    out += "(" + coeff + ")" + word;
  };
  if (!unit_.is_zero()) append(unit_.to_string(), "1");
  for (const auto& [m, c] : terms_) {
    std::string word;
    if (m.mu.is_vertex() && m.nu.is_vertex()) {
      word = "p_" + g.vertex_id(m.mu.source());
    } else {
      if (!m.mu.is_vertex()) word += "S_" + m.mu.id(g);
      if (!m.nu.is_vertex()) word += "S*_" + m.nu.id(g);
    }
    append(c.to_string(), word);
  }
  return out.empty() ? "0" : out;
}

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) { return x * y; }
AlgebraElement adjoint(const AlgebraElement& x) { return x.adjoint(); }

namespace {

void expand_into(const DirectedGraph& g, const Monomial& m, const ExactComplex& c, std::size_t d,
                 std::map<Monomial, ExactComplex>& out) {
  if (m.depth() >= d) {
    auto [it, inserted] = out.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) out.erase(it);
    }
    return;
  }
  const auto& edges = g.out_edges(m.mu.range());
  if (edges.empty()) {
    throw ValidationError("normal form: sink vertex '" + g.vertex_id(m.mu.range()) + "'");
  }
  for (EdgeIndex e : edges) expand_into(g, {m.mu.extended(g, e), m.nu.extended(g, e)}, c, d, out);
}

}  // namespace

NormalForm normal_form(const DirectedGraph& g, const AlgebraElement& x, std::size_t d) {
  if (d < x.depth()) {
    throw ValidationError("normal form depth " + std::to_string(d) + " below element depth " +
                          std::to_string(x.depth()));
  }
  NormalForm nf;
  nf.depth = d;
  nf.unit = x.unit_coeff();
  for (const auto& [m, c] : x.terms()) expand_into(g, m, c, d, nf.terms);
  return nf;
}

bool equals(const DirectedGraph& g, const AlgebraElement& x, const AlgebraElement& y) {
  const std::size_t d = std::max(x.depth(), y.depth());
  return normal_form(g, x, d) == normal_form(g, y, d);
}

std::map<long, AlgebraElement> gauge_decompose(const AlgebraElement& x) {
  std::map<long, AlgebraElement> parts;
  if (!x.unit_coeff().is_zero()) parts[0].add_unit(x.unit_coeff());
  for (const auto& [m, c] : x.terms()) parts[m.degree()].add_term(m, c);
  return parts;
}

AlgebraElement core_expectation(const AlgebraElement& x) {
  auto parts = gauge_decompose(x);
  auto it = parts.find(0);
  return it == parts.end() ? AlgebraElement() : it->second;
}

std::optional<ScalarPart> reduce_to_scalars(const DirectedGraph& g, const AlgebraElement& x) {
  const std::size_t d = x.depth();
  NormalForm nf = normal_form(g, x, d);
  ScalarPart s{nf.unit, VertexFunction<ExactComplex>(g.vertex_count())};
  std::vector<std::size_t> seen(g.vertex_count(), 0);
  std::vector<char> assigned(g.vertex_count(), 0);
  for (const auto& [m, c] : nf.terms) {
    if (m.mu != m.nu) return std::nullopt;
    VertexIndex v = m.mu.source();
    if (!assigned[v]) {
      s.vertex[v] = c;
      assigned[v] = 1;
    } else if (!(s.vertex[v] == c)) {
      return std::nullopt;
    }
    ++seen[v];
  }
  IntegerVector counts = paths_from_vertices(g, d);
  for (VertexIndex v = 0; v < g.vertex_count(); ++v)
    if (assigned[v] && counts[v] != static_cast<unsigned long>(seen[v])) return std::nullopt;
  return s;
}

AlgebraElement from_scalars(const ScalarPart& s) {
  AlgebraElement x = AlgebraElement::unit(s.unit);
  for (VertexIndex v = 0; v < s.vertex.size(); ++v) x += AlgebraElement::vertex(v, s.vertex[v]);
  return x;
}

namespace {

// T_μ T_ν*: δ_{νρ} ↦ δ_{μρ}.
FockOperator monomial_action(const TruncatedFock& f, const Monomial& m, const ExactComplex& c) {
  FockOperator op(f);
  const std::size_t K = f.truncation();
  const std::size_t lm = m.mu.length(), ln = m.nu.length();
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Path& rho = f.path(j);
    if (!m.nu.is_prefix_of(rho)) continue;
    if (rho.length() - ln + lm > K) continue;
    auto image = m.mu.then(rho.tail(ln));
    if (!image) continue;
    op.add(*f.find(*image), j, c);
  }
  const long shift = static_cast<long>(lm) - static_cast<long>(ln);
  op.set_window(std::min(static_cast<long>(K), static_cast<long>(K) - shift), shift, shift);
  return op;
}

}  // namespace

FockOperator fock_action(const TruncatedFock& f, const AlgebraElement& x) {
  FockOperator op = FockOperator::identity(f);
  op *= x.unit_coeff();
  if (x.unit_coeff().is_zero()) op = FockOperator(f);
  for (const auto& [m, c] : x.terms()) op += monomial_action(f, m, c);
  return op;
}

Expectation::Expectation(const DirectedGraph& g, LimitMode mode, std::size_t cutoff, double tol)
    : graph_(&g), limit_(g, mode, cutoff, tol) {
  std::optional<long> degree;
  bool constant = true;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    long d = static_cast<long>(g.out_edges(v).size());
    if (degree && *degree != d) constant = false;
    degree = d;
  }
  if (constant && degree && *degree > 0) constant_out_degree_ = degree;
}

VertexFunction<std::complex<double>> Expectation::operator()(const AlgebraElement& x) const {
  VertexFunction<std::complex<double>> out(graph_->vertex_count(), x.unit_coeff().to_complex());
  for (const auto& [m, c] : x.terms()) {
    if (m.mu != m.nu) continue;
    out[m.mu.source()] += c.to_complex() * weight(m.mu);
  }
  return out;
}

std::optional<VertexFunction<ExactComplex>> Expectation::exact(const AlgebraElement& x) const {
  if (!constant_out_degree_) return std::nullopt;
  VertexFunction<ExactComplex> out(graph_->vertex_count(), x.unit_coeff());
  for (const auto& [m, c] : x.terms()) {
    if (m.mu != m.nu) continue;
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), mpz_class(*constant_out_degree_).get_mpz_t(), m.mu.length());
    out[m.mu.source()] += c * ExactComplex(mpq_class(1, power));
  }
  return out;
}

VertexFunction<std::complex<double>> phi_infinity(const DirectedGraph& g, const AlgebraElement& x, LimitMode mode,
                                                  std::size_t cutoff, double tol) {
  return Expectation(g, mode, cutoff, tol)(x);
}

MatrixOverAlgebra MatrixOverAlgebra::scalar(const AlgebraElement& x) {
  MatrixOverAlgebra m(1);
  m(0, 0) = x;
  return m;
}

MatrixOverAlgebra MatrixOverAlgebra::block_sum(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  MatrixOverAlgebra m(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(a.size() + i, a.size() + j) = b(i, j);
  return m;
}

MatrixOverAlgebra MatrixOverAlgebra::adjoint() const {
  MatrixOverAlgebra m(size_);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < size_; ++j) m(i, j) = (*this)(j, i).adjoint();
  return m;
}

std::size_t MatrixOverAlgebra::max_mu_length() const {
  std::size_t d = 0;
  for (const auto& x : entries_) d = std::max(d, x.max_mu_length());
  return d;
}

std::size_t MatrixOverAlgebra::max_nu_length() const {
  std::size_t d = 0;
  for (const auto& x : entries_) d = std::max(d, x.max_nu_length());
  return d;
}

std::vector<long> MatrixOverAlgebra::gauge_degrees() const {
  std::set<long> degrees;
  for (const auto& x : entries_)
    for (const auto& entry : gauge_decompose(x)) degrees.insert(entry.first);
  return {degrees.begin(), degrees.end()};
}

MatrixOverAlgebra operator*(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  if (a.size() != b.size()) throw ValidationError("matrix size mismatch");
  MatrixOverAlgebra c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < a.size(); ++j)
        if (!b(k, j).is_zero()) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

MatrixOverAlgebra operator+(const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  if (a.size() != b.size()) throw ValidationError("matrix size mismatch");
  MatrixOverAlgebra c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) c(i, j) += b(i, j);
  return c;
}

bool equals(const DirectedGraph& g, const MatrixOverAlgebra& a, const MatrixOverAlgebra& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    if (!equals(g, a.entries()[i], b.entries()[i])) return false;
  return true;
}

FockOperator fock_action(const TruncatedFock& f, const MatrixOverAlgebra& v) {
  std::vector<std::vector<FockOperator>> blocks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) blocks[i].push_back(fock_action(f, v(i, j)));
  return FockOperator::block(blocks);
}

namespace {

ScalarMatrix reduce_matrix(const DirectedGraph& g, const MatrixOverAlgebra& m, const std::string& what) {
  ScalarMatrix out;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      auto s = reduce_to_scalars(g, m(i, j));
      if (!s) {
        throw ValidationError(what + " entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") does not lie in the unitised coefficient algebra: " + m(i, j).to_string(g));
      }
      out.push_back(std::move(*s));
    }
  return out;
}

std::vector<std::size_t> point_ranks(const ScalarMatrix& m, std::size_t k, std::size_t vertices) {
  std::vector<std::size_t> ranks;
  for (std::size_t p = 0; p <= vertices; ++p) {
    std::vector<std::vector<ExactComplex>> rows(k, std::vector<ExactComplex>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) rows[i][j] = m[i * k + j].value_at(p);
    ranks.push_back(exact_rank(rows));
  }
  return ranks;
}

}  // namespace

PartialIsometryClass::PartialIsometryClass(const DirectedGraph& g, MatrixOverAlgebra v, std::string name)
    : name_(std::move(name)), v_(std::move(v)) {
  const MatrixOverAlgebra star = v_.adjoint();
  const MatrixOverAlgebra source = star * v_;
  const MatrixOverAlgebra range = v_ * star;
  if (!equals(g, v_ * source, v_)) throw ValidationError("v v* v != v: not a partial isometry");
  domain_ = reduce_matrix(g, source, "v*v");
  codomain_ = reduce_matrix(g, range, "vv*");
  domain_ranks_ = point_ranks(domain_, v_.size(), g.vertex_count());
  codomain_ranks_ = point_ranks(codomain_, v_.size(), g.vertex_count());
  if (domain_ranks_.back() != codomain_ranks_.back()) {
    throw ValidationError("[v*v] - [vv*] is not a class over the coefficient algebra (ranks at the adjoined point " +
                          std::to_string(domain_ranks_.back()) + " vs " + std::to_string(codomain_ranks_.back()) +
                          ")");
  }
}

FockOperator scalar_action(const TruncatedFock& f, const ScalarMatrix& m, std::size_t k) {
  std::vector<std::vector<FockOperator>> blocks(k);
  const std::size_t n = f.graph().vertex_count();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      VertexFunction<ExactComplex> values(n);
      for (VertexIndex v = 0; v < n; ++v) values[v] = m[i * k + j].value_at(v);
      blocks[i].push_back(left_action(f, values));
    }
  return FockOperator::block(blocks);
}

}  // namespace pimsner
