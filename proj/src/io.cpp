#include "pimsner/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pimsner/errors.hpp"

namespace pimsner {

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

mpq_class rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return mpq_class(mpz_class(j.dump()));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& err) {
      throw ParseError(where, err.what());
    }
  }
  throw ParseError(where, "expected an integer or a rational string");
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

Path path_from_ids(const DirectedGraph& g, const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of edge ids");
  std::string id;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ParseError(where + "[" + std::to_string(i) + "]", "expected a string");
    if (i) id += "·";
    id += j[i].get<std::string>();
  }
  try {
    return parse_path_id(g, id);
  } catch (const ParseError& err) {
    throw ParseError(where, err.what());
  }
}

Json edge_ids(const DirectedGraph& g, const Path& p) {
  Json out = Json::array();
  for (EdgeIndex e : p.edges()) out.push_back(g.edge(e).id);
  return out;
}

std::size_t size_field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + "." + key, "missing field");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
    throw ParseError(where + "." + key, "expected a nonnegative integer");
  return it->get<std::size_t>();
}

Json double_vector(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& err) {
    throw ParseError("line " + std::to_string(line_of_offset(text, err.byte == 0 ? 0 : err.byte - 1)),
                     "invalid JSON (" + std::string(err.what()) + ")");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExactComplex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != 2) throw ParseError(where, "expected [re, im]");
    return {rational_from_json(j[0], where + "[0]"), rational_from_json(j[1], where + "[1]")};
  }
  return {rational_from_json(j, where)};
}

Json complex_to_json(const ExactComplex& c) {
  return Json::array({rational_to_string(c.real()), rational_to_string(c.imag())});
}

AlgebraElement algebra_element_from_json(const DirectedGraph& g, const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  AlgebraElement x;
  if (auto it = j.find("unit"); it != j.end()) x.add_unit(complex_from_json(*it, where + ".unit"));
  auto terms = j.find("terms");
  if (terms == j.end()) return x;
  if (!terms->is_array()) throw ParseError(where + ".terms", "expected an array");
  for (std::size_t i = 0; i < terms->size(); ++i) {
    const Json& t = (*terms)[i];
    const std::string at = where + ".terms[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ParseError(at, "expected an object");
    const Json empty = Json::array();
    const Json& mu_ids = t.contains("mu") ? t["mu"] : empty;
    const Json& nu_ids = t.contains("nu") ? t["nu"] : empty;
    if (!mu_ids.is_array()) throw ParseError(at + ".mu", "expected an array of edge ids");
    if (!nu_ids.is_array()) throw ParseError(at + ".nu", "expected an array of edge ids");
    std::optional<VertexIndex> vertex;
    if (auto v = t.find("vertex"); v != t.end()) {
      if (!v->is_string()) throw ParseError(at + ".vertex", "expected a string");
      vertex = g.find_vertex(v->get<std::string>());
      if (!vertex) throw ParseError(at + ".vertex", "unknown vertex '" + v->get<std::string>() + "'");
    }
    std::optional<Path> mu = mu_ids.empty() ? std::nullopt : std::optional(path_from_ids(g, mu_ids, at + ".mu"));
    std::optional<Path> nu = nu_ids.empty() ? std::nullopt : std::optional(path_from_ids(g, nu_ids, at + ".nu"));
    VertexIndex r;
    if (mu)
      r = mu->range();
    else if (nu)
      r = nu->range();
    else if (vertex)
      r = *vertex;
    else
      throw ParseError(at, "a term with empty mu and nu needs a vertex");
    if (vertex && *vertex != r) throw ValidationError(at + ": vertex does not match the range of the paths");
    if (mu && nu && mu->range() != nu->range()) throw ValidationError(at + ": r(mu) != r(nu)");
    ExactComplex c = t.contains("coeff") ? complex_from_json(t["coeff"], at + ".coeff") : ExactComplex(1);
    x.add_term({mu ? *mu : Path::at_vertex(r), nu ? *nu : Path::at_vertex(r)}, c);
  }
  return x;
}

Json algebra_element_to_json(const DirectedGraph& g, const AlgebraElement& x) {
  Json out;
  out["unit"] = complex_to_json(x.unit_coeff());
  out["terms"] = Json::array();
  for (const auto& [m, c] : x.terms()) {
    Json t;
    t["mu"] = edge_ids(g, m.mu);
    t["nu"] = edge_ids(g, m.nu);
    if (m.mu.is_vertex() && m.nu.is_vertex()) t["vertex"] = g.vertex_id(m.mu.source());
    t["coeff"] = complex_to_json(c);
    out["terms"].push_back(std::move(t));
  }
  return out;
}

PartialIsometryClass isometry_from_json(const DirectedGraph& g, const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  std::string name;
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw ParseError(where + ".name", "expected a string");
    name = it->get<std::string>();
  }
  if (!j.contains("size") && !j.contains("entries"))
    return PartialIsometryClass(g, MatrixOverAlgebra::scalar(algebra_element_from_json(g, j, where)), name);
  const std::size_t k = size_field(j, "size", where);
  if (k == 0) throw ValidationError(where + ".size: must be positive");
  auto entries = j.find("entries");
  if (entries == j.end() || !entries->is_array()) throw ParseError(where + ".entries", "missing or not an array");
  if (entries->size() != k * k)
    throw ValidationError(where + ".entries: expected " + std::to_string(k * k) + " entries");
  MatrixOverAlgebra m(k);
  for (std::size_t i = 0; i < k * k; ++i)
    m(i / k, i % k) = algebra_element_from_json(g, (*entries)[i], where + ".entries[" + std::to_string(i) + "]");
  return PartialIsometryClass(g, std::move(m), name);
}

std::vector<PartialIsometryClass> isometry_suite_from_json(const DirectedGraph& g, const Json& j) {
  const Json* list = &j;
  if (j.is_object()) {
    auto it = j.find("isometries");
    if (it == j.end()) return {isometry_from_json(g, j)};
    list = &*it;
  }
  if (!list->is_array()) throw ParseError("isometries", "expected an array");
  std::vector<PartialIsometryClass> out;
  for (std::size_t i = 0; i < list->size(); ++i)
    out.push_back(isometry_from_json(g, (*list)[i], "isometries[" + std::to_string(i) + "]"));
  return out;
}

Json matrix_over_algebra_to_json(const DirectedGraph& g, const MatrixOverAlgebra& m) {
  Json out;
  out["size"] = m.size();
  out["entries"] = Json::array();
  for (const AlgebraElement& x : m.entries()) out["entries"].push_back(algebra_element_to_json(g, x));
  return out;
}

IntegerMatrix integer_matrix_from_json(const Json& j) {
  auto integer = [](const Json& x, const std::string& where) {
    if (x.is_number_integer()) return mpz_class(x.dump());
    if (x.is_string()) {
      mpz_class z;
      const std::string s = x.get<std::string>();
      if (s.empty() || z.set_str(s, 10) != 0) throw ParseError(where, "invalid integer '" + s + "'");
      return z;
    }
    throw ParseError(where, "expected an integer");
  };
  if (j.is_array()) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j[0].size() : 0;
    std::vector<mpz_class> entries;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!j[i].is_array() || j[i].size() != cols)
        throw ParseError("[" + std::to_string(i) + "]", "rows must be arrays of equal length");
      for (std::size_t c = 0; c < cols; ++c)
        entries.push_back(integer(j[i][c], "[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
    }
    return IntegerMatrix(rows, cols, std::move(entries));
  }
  if (!j.is_object()) throw ParseError("<root>", "expected an object or an array of rows");
  const std::size_t rows = size_field(j, "rows", "matrix");
  const std::size_t cols = size_field(j, "cols", "matrix");
  auto e = j.find("entries");
  if (e == j.end() || !e->is_array()) throw ParseError("matrix.entries", "missing or not an array");
  if (e->size() != rows * cols) throw ValidationError("matrix.entries: expected rows*cols entries");
  std::vector<mpz_class> entries;
  for (std::size_t i = 0; i < e->size(); ++i) entries.push_back(integer((*e)[i], "entries[" + std::to_string(i) + "]"));
  return IntegerMatrix(rows, cols, std::move(entries));
}

Json integer_matrix_to_json(const IntegerMatrix& m) {
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["entries"] = Json::array();
  for (const mpz_class& z : m.entries()) out["entries"].push_back(z.get_str());
  return out;
}

Json integer_vector_to_json(const IntegerVector& v) {
  Json out = Json::array();
  for (const mpz_class& z : v) out.push_back(z.get_str());
  return out;
}

Json k_class_to_json(const DirectedGraph& g, const KClass& x) {
  Json out = Json::object();
  for (VertexIndex v = 0; v < x.size(); ++v) out[g.vertex_id(v)] = x[v].get_str();
  return out;
}

Json kgroup_to_json(const KGroup& k) {
  Json out;
  out["rank"] = k.rank;
  out["torsion"] = integer_vector_to_json(k.torsion);
  out["generators"] = Json::array();
  for (const IntegerVector& gen : k.generators) out["generators"].push_back(integer_vector_to_json(gen));
  out["group"] = k.to_string();
  return out;
}

Json exact_sequence_to_json(const DirectedGraph& g, const ExactSequenceReport& r) {
  Json out;
  out["vertices"] = g.vertices();
  out["k0"] = kgroup_to_json(r.k.even);
  out["k1"] = kgroup_to_json(r.k.odd);
  out["k_hom"] = {{"k0", kgroup_to_json(r.k_hom.even)}, {"k1", kgroup_to_json(r.k_hom.odd)}};
  out["checks"] = Json::array();
  for (const RankCheck& c : r.checks)
    out["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  return out;
}

Json smith_to_json(const IntegerMatrix& m, const SmithDecomposition& d) {
  Json out;
  out["input"] = integer_matrix_to_json(m);
  out["U"] = integer_matrix_to_json(d.U);
  out["S"] = integer_matrix_to_json(d.S);
  out["W"] = integer_matrix_to_json(d.W);
  out["rank"] = d.rank;
  out["diagonal"] = integer_vector_to_json(d.diagonal());
  const std::string failure = check_smith(m, d);
  out["checks"] = Json::array({{{"name", "U*M*W = S, unimodular, divisibility"},
                                {"pass", failure.empty()},
                                {"lhs", failure.empty() ? "ok" : failure},
                                {"rhs", "ok"}}});
  return out;
}

Json assumptions_to_json(const DirectedGraph& g, const AssumptionReport& r) {
  Json out;
  out["mode"] = to_string(r.mode);
  out["cutoff"] = r.cutoff;
  out["tol"] = r.tol;
  if (r.perron) {
    out["perron"] = {{"spectral_radius", r.perron->spectral_radius},
                     {"subdominant", r.perron->subdominant},
                     {"ratio", r.perron->spectral_radius > 0 ? r.perron->subdominant / r.perron->spectral_radius : 0.0},
                     {"primitive", r.perron->primitive},
                     {"period", r.perron->period}};
  } else {
    out["perron"] = nullptr;
  }
  out["entries"] = Json::array();
  for (const AssumptionEntry& e : r.entries) {
    Json item;
    item["k"] = e.lambda.degree;
    Json diag = Json::object();
    for (std::size_t i = 0; i < e.lambda.basis.size(); ++i) diag[e.lambda.basis[i].id(g)] = e.lambda.diagonal[i];
    item["lambda"] = std::move(diag);
    item["periodic"] = e.lambda.periodic;
    const RateFit& f = e.lambda.rate;
    item["assumption1"] = {{"exact", f.exact},
                           {"geometric_rate", f.geometric_rate},
                           {"geometric_residual", f.geometric_residual},
                           {"delta_hat", f.delta_hat},
                           {"polynomial_residual", f.polynomial_residual},
                           {"geometric_preferred", f.geometric_preferred},
                           {"samples", f.samples}};
    Json a2;
    a2["success"] = e.factorization.success;
    a2["residual"] = e.factorization.residual;
    if (e.factorization.success) {
      a2["c"] = double_vector(e.factorization.c);
      Json support = Json::object();
      for (std::size_t i = 0; i < e.lambda.basis.size(); ++i)
        support[e.lambda.basis[i].id(g)] = static_cast<int>(e.factorization.support[i]);
      a2["support"] = std::move(support);
    }
    if (e.factorization.witness) {
      const auto& w = *e.factorization.witness;
      a2["witness"] = {{"first", w.first.id(g)},
                       {"second", w.second.id(g)},
                       {"first_value", w.first_value},
                       {"second_value", w.second_value}};
    }
    item["assumption2"] = std::move(a2);
    out["entries"].push_back(std::move(item));
  }
  return out;
}

Json index_to_json(const DirectedGraph& g, const IndexComputation& c) {
  Json out;
  out["levels"] = Json::array();
  for (const IndexLevel& l : c.levels)
    out["levels"].push_back({{"truncation", l.truncation},
                             {"domain_window", l.domain_window},
                             {"codomain_window", l.codomain_window},
                             {"kernel", k_class_to_json(g, l.kernel)},
                             {"cokernel", k_class_to_json(g, l.cokernel)}});
  out["stabilized"] = c.stabilized;
  out["index"] = k_class_to_json(g, c.index);
  out["pairing"] = k_class_to_json(g, c.pairing);
  return out;
}

Json diagram_to_json(const DirectedGraph& g, const std::vector<DiagramReport>& reports) {
  Json out;
  out["cases"] = Json::array();
  out["checks"] = Json::array();
  bool all = true;
  for (const DiagramReport& r : reports) {
    all = all && r.pass;
    out["cases"].push_back({{"name", r.name},
                            {"index", index_to_json(g, r.index)},
                            {"lhs", k_class_to_json(g, r.lhs)},
                            {"rhs", k_class_to_json(g, r.rhs)},
                            {"pass", r.pass},
                            {"opposite_sign_lhs", k_class_to_json(g, r.opposite_lhs)},
                            {"opposite_sign_pass", r.opposite_pass}});
    out["checks"].push_back({{"name", "diagram " + r.name},
                             {"pass", r.pass},
                             {"lhs", integer_vector_to_json(r.lhs)},
                             {"rhs", integer_vector_to_json(r.rhs)}});
  }
  out["all_pass"] = all;
  return out;
}

Json smeb_to_json(const SmebReport& r) {
  return {{"smeb", r.permutation}, {"permutation", r.permutation}, {"compatibility", r.compatibility}};
}

Json tensor_to_json(const DirectedGraph& g, const TensorElement& t) {
  Json out;
  out["degree"] = t.degree();
  Json coeffs = Json::object();
  for (const auto& [p, c] : t.coefficients()) coeffs[p.id(g)] = complex_to_json(c);
  out["coefficients"] = std::move(coeffs);
  return out;
}

Json endo_matrix_to_json(const DirectedGraph& g, const EndoMatrix& m) {
  Json out;
  out["degree"] = m.degree();
  Json basis = Json::array();
  for (const Path& p : m.basis()) basis.push_back(p.id(g));
  out["basis"] = std::move(basis);
  Json entries = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (!m(i, j).is_zero())
        entries.push_back({{"row", m.basis()[i].id(g)}, {"col", m.basis()[j].id(g)}, {"value", complex_to_json(m(i, j))}});
  out["entries"] = std::move(entries);
  return out;
}

}  // namespace pimsner
