#include "pimsner/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pimsner/errors.hpp"

namespace pimsner {

TensorElement TensorElement::point_mass(const Path& p, ExactComplex coeff) {
  TensorElement t(p.length());
  t.add(p, coeff);
  return t;
}

ExactComplex TensorElement::at(const Path& p) const {
  auto it = coeffs_.find(p);
  return it == coeffs_.end() ? ExactComplex() : it->second;
}

void TensorElement::add(const Path& p, const ExactComplex& c) {
  if (p.length() != degree_) {
    throw ValidationError("TensorElement: path of length " + std::to_string(p.length()) + " in degree " +
                          std::to_string(degree_));
  }
  if (c.is_zero()) return;
  auto [it, inserted] = coeffs_.emplace(p, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

TensorElement& TensorElement::operator+=(const TensorElement& o) {
  if (o.degree_ != degree_) throw ValidationError("TensorElement: degree mismatch in sum");
  for (const auto& [p, c] : o.coeffs_) add(p, c);
  return *this;
}

TensorElement& TensorElement::operator*=(const ExactComplex& c) {
  if (c.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [p, x] : coeffs_) x *= c;
  return *this;
}

std::vector<TensorElement> standard_frame(const DirectedGraph& g, std::size_t k, std::size_t cap) {
  std::vector<TensorElement> frame;
  for (const Path& p : enumerate_paths(g, k, cap)) frame.push_back(TensorElement::point_mass(p));
  return frame;
}

namespace {

void require_same_degree(const TensorElement& a, const TensorElement& b) {
  if (a.degree() != b.degree()) {
    throw ValidationError("inner product of tensors of degrees " + std::to_string(a.degree()) + " and " +
                          std::to_string(b.degree()));
  }
}

}  // namespace

VertexFunction<ExactComplex> right_inner(const DirectedGraph& g, const TensorElement& xi, const TensorElement& eta) {
  require_same_degree(xi, eta);
  VertexFunction<ExactComplex> out(g.vertex_count());
  for (const auto& [p, c] : xi.coefficients()) {
    auto it = eta.coefficients().find(p);
    if (it != eta.coefficients().end()) out[p.range()] += c.conj() * it->second;
  }
  return out;
}

VertexFunction<ExactComplex> left_inner(const DirectedGraph& g, const TensorElement& xi, const TensorElement& eta) {
  require_same_degree(xi, eta);
  VertexFunction<ExactComplex> out(g.vertex_count());
  for (const auto& [p, c] : xi.coefficients()) {
    auto it = eta.coefficients().find(p);
    if (it != eta.coefficients().end()) out[p.source()] += c * it->second.conj();
  }
  return out;
}

EndoMatrix::EndoMatrix(const DirectedGraph& g, std::size_t degree, std::size_t cap)
    : degree_(degree), basis_(enumerate_paths(g, degree, cap)) {
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
  entries_.resize(basis_.size() * basis_.size());
}

EndoMatrix EndoMatrix::identity(const DirectedGraph& g, std::size_t degree, std::size_t cap) {
  EndoMatrix m(g, degree, cap);
  for (std::size_t i = 0; i < m.size(); ++i) m(i, i) = 1;
  return m;
}

EndoMatrix EndoMatrix::theta(const DirectedGraph& g, const TensorElement& x, const TensorElement& y) {
  require_same_degree(x, y);
  EndoMatrix m(g, x.degree());
  for (const auto& [mu, a] : x.coefficients()) {
    for (const auto& [nu, b] : y.coefficients()) {
      if (mu.range() == nu.range()) m(m.index_of(mu), m.index_of(nu)) += a * b.conj();
    }
  }
  return m;
}

std::size_t EndoMatrix::index_of(const Path& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) throw ValidationError("EndoMatrix: path not in basis");
  return it->second;
}

TensorElement EndoMatrix::apply(const TensorElement& x) const {
  if (x.degree() != degree_) throw ValidationError("EndoMatrix::apply: degree mismatch");
  TensorElement out(degree_);
  for (const auto& [p, c] : x.coefficients()) {
    std::size_t j = index_of(p);
    for (std::size_t i = 0; i < size(); ++i) {
      const ExactComplex& e = (*this)(i, j);
      if (!e.is_zero()) out.add(basis_[i], e * c);
    }
  }
  return out;
}

EndoMatrix EndoMatrix::adjoint() const {
  EndoMatrix m = *this;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) m(i, j) = (*this)(j, i).conj();
  return m;
}

bool EndoMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const ExactComplex& c) { return c.is_zero(); });
}

EndoMatrix& EndoMatrix::operator+=(const EndoMatrix& o) {
  if (o.degree_ != degree_) throw ValidationError("EndoMatrix: degree mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

EndoMatrix& EndoMatrix::operator-=(const EndoMatrix& o) {
  if (o.degree_ != degree_) throw ValidationError("EndoMatrix: degree mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  return *this;
}

EndoMatrix operator*(const EndoMatrix& a, const EndoMatrix& b) {
  if (a.degree_ != b.degree_) throw ValidationError("EndoMatrix: degree mismatch");
  EndoMatrix c = a;
  const std::size_t n = a.size();
  std::fill(c.entries_.begin(), c.entries_.end(), ExactComplex());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const ExactComplex& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b(k, j).is_zero()) c(i, j) += x * b(k, j);
    }
  return c;
}

VertexFunction<mpz_class> watatani_index(const DirectedGraph& g, std::size_t k) { return paths_from_vertices(g, k); }

VertexFunction<mpz_class> watatani_left(const DirectedGraph& g, std::size_t k) { return paths_into_vertices(g, k); }

VertexFunction<ExactComplex> phi_k(const DirectedGraph& g, const EndoMatrix& t) {
  VertexFunction<ExactComplex> out(g.vertex_count());
  for (std::size_t i = 0; i < t.size(); ++i) out[t.basis()[i].source()] += t(i, i);
  return out;
}

VertexFunction<double> phi_k(const DirectedGraph& g, const std::vector<Path>& basis,
                             const std::vector<std::vector<double>>& t) {
  VertexFunction<double> out(g.vertex_count(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) out[basis[i].source()] += t[i][i];
  return out;
}

std::string to_string(LimitMode mode) {
  switch (mode) {
    case LimitMode::automatic: return "auto";
    case LimitMode::closed_form: return "closed-form";
    case LimitMode::cesaro: return "cesaro";
  }
  return "auto";
}

LimitMode parse_limit_mode(const std::string& text) {
  if (text == "auto") return LimitMode::automatic;
  if (text == "closed-form" || text == "closed") return LimitMode::closed_form;
  if (text == "cesaro") return LimitMode::cesaro;
  throw ParseError("--mode", "unknown limit mode '" + text + "'");
}

const VertexFunction<mpz_class>& PathCounts::at(std::size_t n) const {
  if (cache_.empty()) cache_.push_back(VertexFunction<mpz_class>(graph_->vertex_count(), 1));
  while (cache_.size() <= n) {
    const auto& last = cache_.back();
    VertexFunction<mpz_class> next(graph_->vertex_count(), 0);
    for (const Edge& e : graph_->edges()) next[e.src] += last[e.dst];
    cache_.push_back(std::move(next));
  }
  return cache_[n];
}

double PathCounts::ratio(std::size_t n, std::size_t m, VertexIndex s, VertexIndex r) const {
  mpq_class q(at(n - m)[r], at(n)[s]);
  q.canonicalize();
  return q.get_d();
}

RatioLimit::RatioLimit(const DirectedGraph& g, LimitMode mode, std::size_t cutoff, double tol)
    : graph_(&g), mode_(mode), cutoff_(cutoff), tol_(tol), period_(std::max<std::size_t>(1, graph_period(g))),
      counts_(g) {
  require_nonsingular(g);
  const bool primitive = is_primitive(vertex_matrix(g));
  if (mode_ == LimitMode::automatic) mode_ = primitive ? LimitMode::closed_form : LimitMode::cesaro;
  if (mode_ == LimitMode::closed_form) {
    if (!primitive) throw ValidationError("closed-form limits need a primitive vertex matrix");
    perron_ = perron_data(g);
  } else {
    try {
      perron_ = perron_data(g);
    } catch (const ConvergenceError&) {
    }
  }
}

double RatioLimit::value(std::size_t m, VertexIndex s, VertexIndex r) const {
  auto key = std::make_tuple(m, s, r);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  double result = 0;
  if (mode_ == LimitMode::closed_form) {
    const PerronData& p = *perron_;
    result = std::pow(p.spectral_radius, -static_cast<double>(m)) * p.eigenvector[r] / p.eigenvector[s];
  } else {
    const std::size_t span = cutoff_ > m ? cutoff_ - m : 0;
    const std::size_t window = period_ * ((span / 2) / period_);
    if (window == 0) throw ConvergenceError("Cesàro window is empty; raise the cutoff", 0.0);
    auto tail_mean = [&](std::size_t end, std::size_t width) {
      double sum = 0;
      for (std::size_t n = end - width + 1; n <= end; ++n) sum += counts_.ratio(n, m, s, r);
      return sum / static_cast<double>(width);
    };
    result = tail_mean(cutoff_, window);
    const std::size_t half = period_ * (window / (2 * period_));
    if (half > 0) {
      double early = tail_mean(cutoff_ - half, half);
      double late = tail_mean(cutoff_, half);
      double drift = std::abs(early - late);
      if (drift > tol_ * std::max(1.0, std::abs(result))) {
        throw ConvergenceError("Cesàro mean of path-count ratios did not settle within cutoff " +
                                   std::to_string(cutoff_) + " (half-window drift " + std::to_string(drift) + ")",
                               drift);
      }
    }
  }
  cache_.emplace(key, result);
  return result;
}

namespace {

struct LineFit {
  double slope = 0;
  double residual = 0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  LineFit fit;
  if (denom == 0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double d = ys[i] - (intercept + fit.slope * xs[i]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace

LambdaOperator lambda_operator(const DirectedGraph& g, std::size_t k, const RatioLimit& limit, std::size_t cap) {
  LambdaOperator op;
  op.degree = k;
  op.basis = enumerate_paths(g, k, cap);
  op.mode = limit.resolved_mode();
  op.periodic = limit.period() > 1;
  op.diagonal.reserve(op.basis.size());
  double scale = 0;
  for (const Path& p : op.basis) {
    op.diagonal.push_back(limit.value(k, p.source(), p.range()));
    scale = std::max(scale, std::abs(op.diagonal.back()));
  }

  // err_n = max over the distinct (s, r) pairs of |ratio_n − limit|.
  std::set<std::pair<VertexIndex, VertexIndex>> ends;
  for (const Path& p : op.basis) ends.emplace(p.source(), p.range());
  std::vector<double> ns, errors;
  for (std::size_t n = std::max<std::size_t>(k, 1); n <= limit.cutoff(); ++n) {
    double err = 0;
    for (auto [s, r] : ends) err = std::max(err, std::abs(limit.counts().ratio(n, k, s, r) - limit.value(k, s, r)));
    ns.push_back(static_cast<double>(n));
    errors.push_back(err);
  }
  const double floor = 1e-13 * std::max(1.0, scale);
  const double fit_floor = 1e-9 * std::max(1.0, scale);
  op.rate.exact = std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= floor; });
  if (op.rate.exact) return op;

  std::vector<double> xs, logn, ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] <= fit_floor) continue;
    xs.push_back(ns[i]);
    logn.push_back(std::log(ns[i]));
    ys.push_back(std::log(errors[i]));
  }
  op.rate.samples = xs.size();
  if (xs.size() < 3) {
    op.rate.exact = xs.empty();
    return op;
  }
  LineFit geometric = least_squares(xs, ys);
  LineFit polynomial = least_squares(logn, ys);
  op.rate.geometric_rate = std::exp(geometric.slope);
  op.rate.geometric_residual = geometric.residual;
  op.rate.delta_hat = -polynomial.slope;
  op.rate.polynomial_residual = polynomial.residual;
  op.rate.geometric_preferred = geometric.residual <= polynomial.residual;
  return op;
}

Factorization assumption2_factorize(const LambdaOperator& lambda, double tol) {
  Factorization f;
  std::size_t vertices = 0;
  for (const Path& p : lambda.basis) vertices = std::max(vertices, p.source() + 1);
  f.support.resize(lambda.diagonal.size());
  std::vector<std::optional<std::size_t>> representative(vertices);
  for (std::size_t i = 0; i < lambda.diagonal.size(); ++i) {
    f.support[i] = std::abs(lambda.diagonal[i]) > tol ? 1 : 0;
    if (!f.support[i]) continue;
    VertexIndex s = lambda.basis[i].source();
    if (!representative[s]) {
      representative[s] = i;
      continue;
    }
    std::size_t j = *representative[s];
    if (std::abs(lambda.diagonal[i] - lambda.diagonal[j]) > tol) {
      f.witness = FactorizationWitness{lambda.basis[j], lambda.basis[i], lambda.diagonal[j], lambda.diagonal[i]};
      return f;
    }
  }
  f.success = true;
  f.c.assign(vertices, 0.0);
  for (VertexIndex v = 0; v < vertices; ++v)
    if (representative[v]) f.c[v] = lambda.diagonal[*representative[v]];
  for (std::size_t i = 0; i < lambda.diagonal.size(); ++i) {
    double approx = f.support[i] ? f.c[lambda.basis[i].source()] : 0.0;
    f.residual = std::max(f.residual, std::abs(lambda.diagonal[i] - approx));
  }
  return f;
}

AssumptionReport verify_assumptions(const DirectedGraph& g, std::size_t kmax, LimitMode mode, std::size_t cutoff,
                                    double tol, std::size_t cap) {
  RatioLimit limit(g, mode, cutoff, tol);
  AssumptionReport report{limit.resolved_mode(), cutoff, tol, limit.perron(), {}};
  for (std::size_t k = 1; k <= kmax; ++k) {
    LambdaOperator lambda = lambda_operator(g, k, limit, cap);
    Factorization f = assumption2_factorize(lambda, tol);
    report.entries.push_back({std::move(lambda), std::move(f)});
  }
  return report;
}

}  // namespace pimsner
