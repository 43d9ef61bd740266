#include "pimsner/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pimsner/errors.hpp"

namespace pimsner {

DirectedGraph::DirectedGraph(std::vector<std::string> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  for (VertexIndex v = 0; v < vertices_.size(); ++v) {
    if (!vertex_lookup_.emplace(vertices_[v], v).second) {
      throw ValidationError("duplicate vertex identifier '" + vertices_[v] + "'");
    }
  }
  out_edges_.resize(vertices_.size());
  in_edges_.resize(vertices_.size());
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (!edge_lookup_.emplace(edge.id, e).second) {
      throw ValidationError("duplicate edge identifier '" + edge.id + "'");
    }
    if (edge.src >= vertices_.size() || edge.dst >= vertices_.size()) {
      throw ValidationError("edge '" + edge.id + "' has an endpoint outside the vertex list");
    }
    out_edges_[edge.src].push_back(e);
    in_edges_[edge.dst].push_back(e);
  }
}

std::optional<VertexIndex> DirectedGraph::find_vertex(std::string_view id) const {
  auto it = vertex_lookup_.find(id);
  if (it == vertex_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> DirectedGraph::find_edge(std::string_view id) const {
  auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

Path Path::along_edge(const DirectedGraph& g, EdgeIndex e) {
  const Edge& edge = g.edge(e);
  return Path({e}, {edge.src, edge.dst});
}

Path Path::from_edges(const DirectedGraph& g, const std::vector<EdgeIndex>& edges) {
  if (edges.empty()) throw ValidationError("Path::from_edges: empty edge list (use at_vertex)");
  std::vector<VertexIndex> vertices{g.edge(edges.front()).src};
  for (EdgeIndex e : edges) {
    const Edge& edge = g.edge(e);
    if (edge.src != vertices.back()) {
      throw ValidationError("edges do not compose: '" + edge.id + "' does not start at '" +
                            g.vertex_id(vertices.back()) + "'");
    }
    vertices.push_back(edge.dst);
  }
  return Path(edges, std::move(vertices));
}

std::optional<Path> Path::then(const Path& other) const {
  if (range() != other.source()) return std::nullopt;
  std::vector<EdgeIndex> edges = edges_;
  edges.insert(edges.end(), other.edges_.begin(), other.edges_.end());
  std::vector<VertexIndex> vertices = vertices_;
  vertices.insert(vertices.end(), other.vertices_.begin() + 1, other.vertices_.end());
  return Path(std::move(edges), std::move(vertices));
}

bool Path::is_prefix_of(const Path& other) const {
  if (source() != other.source() || length() > other.length()) return false;
  return std::equal(edges_.begin(), edges_.end(), other.edges_.begin());
}

Path Path::head(std::size_t n) const {
  return Path(std::vector<EdgeIndex>(edges_.begin(), edges_.begin() + static_cast<std::ptrdiff_t>(n)),
              std::vector<VertexIndex>(vertices_.begin(), vertices_.begin() + static_cast<std::ptrdiff_t>(n + 1)));
}

Path Path::tail(std::size_t n) const {
  return Path(std::vector<EdgeIndex>(edges_.begin() + static_cast<std::ptrdiff_t>(n), edges_.end()),
              std::vector<VertexIndex>(vertices_.begin() + static_cast<std::ptrdiff_t>(n), vertices_.end()));
}

Path Path::extended(const DirectedGraph& g, EdgeIndex e) const {
  const Edge& edge = g.edge(e);
  if (edge.src != range()) throw ValidationError("Path::extended: edge '" + edge.id + "' does not compose");
  Path p = *this;
  p.edges_.push_back(e);
  p.vertices_.push_back(edge.dst);
  return p;
}

std::string Path::id(const DirectedGraph& g) const {
  if (is_vertex()) return g.vertex_id(source());
  std::string out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i) out += "·";
    out += g.edge(edges_[i]).id;
  }
  return out;
}

Path parse_path_id(const DirectedGraph& g, const std::string& id) {
  if (auto v = g.find_vertex(id); v && !g.find_edge(id)) return Path::at_vertex(*v);
  static const std::string separator = "·";
  std::vector<EdgeIndex> edges;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = id.find(separator, start);
    std::string piece = id.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    auto e = g.find_edge(piece);
    if (!e) throw ParseError("path '" + id + "'", "unknown edge '" + piece + "'");
    edges.push_back(*e);
    if (pos == std::string::npos) break;
    start = pos + separator.size();
  }
  try {
    return Path::from_edges(g, edges);
  } catch (const ValidationError& err) {
    throw ParseError("path '" + id + "'", err.what());
  }
}

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string string_field(const nlohmann::json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(where + "." + key, "missing field");
  if (!it->is_string()) throw ParseError(where + "." + key, "expected a string");
  return it->get<std::string>();
}

}  // namespace

DirectedGraph load_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError("line " + std::to_string(line_of_offset(text, err.byte == 0 ? 0 : err.byte - 1)),
                     "invalid JSON (" + std::string(err.what()) + ")");
  }
  if (!doc.is_object()) throw ParseError("<root>", "expected a JSON object");
  auto vit = doc.find("vertices");
  if (vit == doc.end() || !vit->is_array()) throw ParseError("vertices", "missing or not an array");
  std::vector<std::string> vertices;
  std::map<std::string, VertexIndex, std::less<>> lookup;
  for (std::size_t i = 0; i < vit->size(); ++i) {
    const auto& item = (*vit)[i];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!item.is_string()) throw ParseError(where, "expected a string");
    std::string id = item.get<std::string>();
    if (!lookup.emplace(id, i).second) throw ValidationError(where + ": duplicate vertex identifier '" + id + "'");
    vertices.push_back(std::move(id));
  }
  std::vector<Edge> edges;
  auto eit = doc.find("edges");
  if (eit != doc.end()) {
    if (!eit->is_array()) throw ParseError("edges", "expected an array");
    for (std::size_t i = 0; i < eit->size(); ++i) {
      const auto& item = (*eit)[i];
      const std::string where = "edges[" + std::to_string(i) + "]";
      if (!item.is_object()) throw ParseError(where, "expected an object");
      std::string id = item.contains("id") ? string_field(item, "id", where) : "e" + std::to_string(i);
      std::string src = string_field(item, "src", where);
      std::string dst = string_field(item, "dst", where);
      auto s = lookup.find(src);
      if (s == lookup.end()) throw ValidationError(where + ".src: unknown vertex '" + src + "'");
      auto d = lookup.find(dst);
      if (d == lookup.end()) throw ValidationError(where + ".dst: unknown vertex '" + dst + "'");
      edges.push_back({std::move(id), s->second, d->second});
    }
  }
  return DirectedGraph(std::move(vertices), std::move(edges));
}

DirectedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_graph(buffer.str());
}

std::string graph_to_json(const DirectedGraph& g) {
  nlohmann::ordered_json doc;
  doc["vertices"] = g.vertices();
  doc["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) {
    doc["edges"].push_back({{"id", e.id}, {"src", g.vertex_id(e.src)}, {"dst", g.vertex_id(e.dst)}});
  }
  return doc.dump(2);
}

NonsingularReport validate_nonsingular(const DirectedGraph& g) {
  NonsingularReport report;
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
    if (g.in_edges(v).empty()) {
      report.no_sources = false;
      report.sources.push_back(v);
    }
    if (g.out_edges(v).empty()) {
      report.no_sinks = false;
      report.sinks.push_back(v);
    }
  }
  return report;
}

void require_nonsingular(const DirectedGraph& g) {
  NonsingularReport report = validate_nonsingular(g);
  if (report.nonsingular()) return;
  std::string message = "graph is singular:";
  for (VertexIndex v : report.sources) message += " source '" + g.vertex_id(v) + "'";
  for (VertexIndex v : report.sinks) message += " sink '" + g.vertex_id(v) + "'";
  throw ValidationError(message);
}

IntegerMatrix vertex_matrix(const DirectedGraph& g) {
  IntegerMatrix v(g.vertex_count(), g.vertex_count());
  for (const Edge& e : g.edges()) v(e.src, e.dst) += 1;
  return v;
}

std::size_t path_cap_from_env(std::size_t fallback) {
  const char* raw = std::getenv("PIMSNER_PATH_CAP");
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) return fallback;
  return static_cast<std::size_t>(value);
}

IntegerVector paths_from_vertices(const DirectedGraph& g, std::size_t k) {
  IntegerVector counts(g.vertex_count(), 1);
  for (std::size_t step = 0; step < k; ++step) {
    IntegerVector next(g.vertex_count(), 0);
    for (const Edge& e : g.edges()) next[e.src] += counts[e.dst];
    counts = std::move(next);
  }
  return counts;
}

IntegerVector paths_into_vertices(const DirectedGraph& g, std::size_t k) {
  IntegerVector counts(g.vertex_count(), 1);
  for (std::size_t step = 0; step < k; ++step) {
    IntegerVector next(g.vertex_count(), 0);
    for (const Edge& e : g.edges()) next[e.dst] += counts[e.src];
    counts = std::move(next);
  }
  return counts;
}

mpz_class count_paths(const DirectedGraph& g, std::size_t k) {
  mpz_class total = 0;
  for (const mpz_class& c : paths_from_vertices(g, k)) total += c;
  return total;
}

std::vector<Path> enumerate_paths(const DirectedGraph& g, std::size_t k, std::size_t cap) {
  mpz_class total = count_paths(g, k);
  if (total > mpz_class(static_cast<unsigned long>(cap))) {
    throw ResourceLimitError("enumerate_paths: " + total.get_str() + " paths of length " + std::to_string(k) +
                             " exceed the cap of " + std::to_string(cap));
  }
  std::vector<Path> current;
  current.reserve(g.vertex_count());
  for (VertexIndex v = 0; v < g.vertex_count(); ++v) current.push_back(Path::at_vertex(v));
  if (k == 0) return current;
  // Seed with edges in index order, then extend: each round keeps the
  // lexicographic order because out_edges are in index order.
  current.clear();
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) current.push_back(Path::along_edge(g, e));
  for (std::size_t level = 1; level < k; ++level) {
    std::vector<Path> next;
    next.reserve(current.size() * 2);
    for (const Path& p : current) {
      for (EdgeIndex e : g.out_edges(p.range())) next.push_back(p.extended(g, e));
    }
    current = std::move(next);
  }
  std::sort(current.begin(), current.end());
  return current;
}

namespace {

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix boolean_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix c(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (b[k][j]) c[i][j] = 1;
  return c;
}

BoolMatrix support(const IntegerMatrix& v) {
  BoolMatrix b(v.rows(), std::vector<char>(v.cols(), 0));
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) b[i][j] = v(i, j) != 0;
  return b;
}

}  // namespace

bool is_primitive(const IntegerMatrix& v) {
  const std::size_t n = v.rows();
  if (n == 0 || !v.is_square()) return false;
  const std::size_t bound = (n - 1) * (n - 1) + 1;
  BoolMatrix base = support(v);
  BoolMatrix power = base;
  for (std::size_t m = 1; m <= bound; ++m) {
    bool positive = true;
    for (const auto& row : power)
      for (char x : row) positive = positive && x;
    if (positive) return true;
    power = boolean_product(power, base);
  }
  return false;
}

std::size_t graph_period(const DirectedGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return 0;
  BoolMatrix base = support(vertex_matrix(g));
  BoolMatrix power = base;
  std::vector<std::size_t> gcds(n, 0);
  const std::size_t bound = n * n + n;
  for (std::size_t m = 1; m <= bound; ++m) {
    for (std::size_t v = 0; v < n; ++v)
      if (power[v][v]) gcds[v] = std::gcd(gcds[v], m);
    power = boolean_product(power, base);
  }
  std::size_t period = 0;
  for (std::size_t d : gcds) {
    if (d == 0) continue;
    period = period == 0 ? d : std::lcm(period, d);
  }
  return period;
}

namespace {

using DenseMatrix = std::vector<std::vector<double>>;

std::vector<double> multiply(const DenseMatrix& m, const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
  return y;
}

double max_abs(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

struct PowerResult {
  double value;
  std::vector<double> vector;
  double residual;
  std::size_t iterations;
};

// Dominant eigenpair of a nonnegative matrix m via iteration on m + I.
PowerResult shifted_power_iteration(const DenseMatrix& m, double tol, std::size_t max_iterations) {
  const std::size_t n = m.size();
  DenseMatrix shifted = m;
  for (std::size_t i = 0; i < n; ++i) shifted[i][i] += 1.0;
  std::vector<double> x(n, 1.0);
  PowerResult result{0, x, 0, 0};
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    std::vector<double> y = multiply(shifted, x);
    double scale = max_abs(y);
    for (double& v : y) v /= scale;
    x = std::move(y);
    std::vector<double> mx = multiply(m, x);
    double lambda = 0;
    for (double v : mx) lambda = std::max(lambda, v);
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(mx[i] - lambda * x[i]));
    result = {lambda, x, residual, it};
    if (residual <= tol * std::max(1.0, lambda)) return result;
  }
  return result;
}

}  // namespace

PerronData perron_data(const DirectedGraph& g, double tol, std::size_t max_iterations) {
  require_nonsingular(g);
  const IntegerMatrix v = vertex_matrix(g);
  const std::size_t n = g.vertex_count();
  DenseMatrix m(n, std::vector<double>(n)), mt(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = v(i, j).get_d();
      mt[j][i] = m[i][j];
    }

  PerronData data;
  data.primitive = is_primitive(v);
  data.period = graph_period(g);

  PowerResult right = shifted_power_iteration(m, tol, max_iterations);
  if (right.residual > tol * std::max(1.0, right.value)) {
    throw ConvergenceError("perron_data: power iteration did not converge after " +
                               std::to_string(right.iterations) + " iterations",
                           right.residual);
  }
  PowerResult left = shifted_power_iteration(mt, tol, max_iterations);
  if (left.residual > tol * std::max(1.0, left.value)) {
    throw ConvergenceError("perron_data: left power iteration did not converge", left.residual);
  }
  data.spectral_radius = right.value;
  data.eigenvector = right.vector;
  data.left_eigenvector = left.vector;
  data.residual = right.residual;
  data.iterations = right.iterations;

  // Deflate: V' = V - lambda x y^T / (y^T x); V' x = 0 and V' keeps the rest
  // of the spectrum, so the growth rate of V'^k z estimates |lambda_2|.
  double yx = 0;
  for (std::size_t i = 0; i < n; ++i) yx += left.vector[i] * right.vector[i];
  DenseMatrix deflated = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deflated[i][j] -= right.value * right.vector[i] * left.vector[j] / yx;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  const std::size_t warmup = 200, window = 400;
  double log_sum = 0;
  std::size_t counted = 0;
  bool vanished = false;
  for (std::size_t it = 0; it < warmup + window; ++it) {
    std::vector<double> y = multiply(deflated, z);
    double norm = max_abs(y);
    if (norm <= 1e-300) {
      vanished = true;
      break;
    }
    for (double& value : y) value /= norm;
    z = std::move(y);
    if (it >= warmup) {
      log_sum += std::log(norm);
      ++counted;
    }
  }
  data.subdominant = (vanished || counted == 0) ? 0.0 : std::exp(log_sum / static_cast<double>(counted));
  // Rounding noise in the rank-one correction sits around 1e-15 * lambda.
  if (data.subdominant < 1e-12 * std::max(1.0, data.spectral_radius)) data.subdominant = 0.0;
  data.subdominant = std::min(data.subdominant, data.spectral_radius);
  return data;
}

}  // namespace pimsner
