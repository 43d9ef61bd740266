#include "pimsner/xi.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pimsner/errors.hpp"

namespace pimsner {

long default_psi(long n, long r) {
  const long base = std::max(n, 0L);
  if (r == base) return n;
  return -(r - base) - std::max(-n, 0L);
}

namespace {

using FloatTerms = std::map<Monomial, std::complex<double>>;

std::vector<Monomial> paired_paths(const DirectedGraph& g, std::size_t alpha_length, std::size_t beta_length,
                                   std::optional<VertexIndex> beta_source = std::nullopt) {
  std::vector<Monomial> out;
  const auto alphas = enumerate_paths(g, alpha_length);
  const auto betas = enumerate_paths(g, beta_length);
  for (const Path& a : alphas)
    for (const Path& b : betas)
      if (a.range() == b.range() && (!beta_source || b.source() == *beta_source)) out.push_back({a, b});
  return out;
}

std::optional<Monomial> ancestor(const Monomial& t, std::size_t drop) {
  if (drop == 0) return t;
  if (t.mu.length() < drop || t.nu.length() < drop) return std::nullopt;
  const auto& a = t.mu.edges();
  const auto& b = t.nu.edges();
  if (!std::equal(a.end() - static_cast<std::ptrdiff_t>(drop), a.end(), b.end() - static_cast<std::ptrdiff_t>(drop)))
    return std::nullopt;
  return Monomial{t.mu.head(t.mu.length() - drop), t.nu.head(t.nu.length() - drop)};
}

}  // namespace

XiTruncation::XiTruncation(const Expectation& phi, long degree_window, long rank_window, double tol, Psi psi)
    : phi_(&phi), degree_window_(degree_window), rank_window_(rank_window), tol_(tol), psi_(std::move(psi)) {
  if (degree_window < 0 || rank_window < 0) throw ValidationError("Xi windows must be nonnegative");
  const DirectedGraph& g = phi.graph();
  const std::size_t R = static_cast<std::size_t>(rank_window);
  for (long n = -degree_window; n <= degree_window; ++n) {
    if (n > rank_window) continue;
    Degree d;
    d.n = n;
    d.depth = R + static_cast<std::size_t>(std::max(0L, -n));
    d.basis = paired_paths(g, R, static_cast<std::size_t>(rank_window - n));
    for (std::size_t i = 0; i < d.basis.size(); ++i) {
      d.index.emplace(d.basis[i], i);
      d.weight.push_back(phi.weight(d.basis[i].nu));
    }
    d.frame = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.basis.size()),
                                    static_cast<Eigen::Index>(d.basis.size()));
    d.offset = coordinates_.size();
    std::size_t column = 0;

    for (VertexIndex w = 0; w < g.vertex_count(); ++w) {
      std::vector<std::size_t> rows;
      std::map<std::size_t, std::size_t> local;
      for (std::size_t i = 0; i < d.basis.size(); ++i)
        if (d.basis[i].nu.source() == w) {
          local.emplace(i, rows.size());
          rows.push_back(i);
        }
      XiBlockSummary summary{n, w, rows.size(), 0, {}, 0.0, 0};
      if (rows.empty()) {
        blocks_.push_back(summary);
        continue;
      }
      const auto m = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd accepted(m, 0);
      bool first_layer = true;
      for (long r = std::max(n, 0L); r <= rank_window; ++r) {
        const auto gens = paired_paths(g, static_cast<std::size_t>(r), static_cast<std::size_t>(r - n), w);
        summary.generators += gens.size();
        if (gens.empty()) continue;
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(gens.size()));
        const std::size_t extension = R - static_cast<std::size_t>(r);
        for (std::size_t c = 0; c < gens.size(); ++c) {
          for (const Path& eps : enumerate_paths(g, extension)) {
            if (eps.source() != gens[c].mu.range()) continue;
            Monomial t{*gens[c].mu.then(eps), *gens[c].nu.then(eps)};
            std::size_t i = d.index.at(t);
            block(static_cast<Eigen::Index>(local.at(i)), static_cast<Eigen::Index>(c)) = std::sqrt(d.weight[i]);
          }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> raw(block.transpose() * block, Eigen::EigenvaluesOnly);
        double lowest = raw.eigenvalues().minCoeff();
        summary.min_gram_eigenvalue = first_layer ? lowest : std::min(summary.min_gram_eigenvalue, lowest);
        first_layer = false;

        Eigen::MatrixXd residual = block;
        for (int pass = 0; pass < 2; ++pass)
          if (accepted.cols() > 0) residual -= accepted * (accepted.transpose() * residual);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(residual.transpose() * residual);
        const double scale = std::max(1.0, es.eigenvalues().maxCoeff());
        std::size_t rank = 0;
        for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
          const double lambda = es.eigenvalues()(k);
          if (lambda <= tol_ * scale) continue;
          Eigen::VectorXd u = residual * es.eigenvectors().col(k) / std::sqrt(lambda);
          if (accepted.cols() > 0) u -= accepted * (accepted.transpose() * u);
          u.normalize();
          accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
          accepted.col(accepted.cols() - 1) = u;
          for (Eigen::Index row = 0; row < m; ++row)
            d.frame(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(row)]),
                    static_cast<Eigen::Index>(column)) = u(row);
          coordinates_.push_back({n, r, w});
          ++column;
          ++rank;
        }
        summary.layer_ranks[r] = rank;
        summary.dropped += gens.size() - rank;
      }
      blocks_.push_back(summary);
    }
    d.frame.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(column));
    degrees_.push_back(std::move(d));
  }
}

std::size_t XiTruncation::layer_dimension(long n, long r) const {
  std::size_t count = 0;
  for (const auto& c : coordinates_)
    if (c.degree == n && c.layer == r) ++count;
  return count;
}

const XiTruncation::Degree* XiTruncation::find_degree(long n) const {
  for (const Degree& d : degrees_)
    if (d.n == n) return &d;
  return nullptr;
}

std::map<Monomial, std::complex<double>> XiTruncation::expand(const AlgebraElement& x, std::size_t depth) const {
  FloatTerms out;
  for (const auto& [m, c] : normal_form(phi_->graph(), x, depth).terms) out.emplace(m, c.to_complex());
  return out;
}

XiTruncation::Embedding XiTruncation::embed(const AlgebraElement& x) const {
  Embedding e;
  e.coefficients = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension()));
  AlgebraElement body = x;
  body.add_unit(-x.unit_coeff());
  body += x.unit_coeff() * AlgebraElement::one_A(phi_->graph());
  for (const auto& [n, part] : gauge_decompose(body)) {
    const Degree* d = find_degree(n);
    std::size_t depth = std::max(part.depth(), d ? d->depth : 0);
    FloatTerms z = expand(part, depth);
    Eigen::VectorXcd g = d ? Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d->basis.size())) : Eigen::VectorXcd();
    for (const auto& [t, c] : z) {
      double w = phi_->weight(t.nu);
      e.norm_squared += std::norm(c) * w;
      if (!d) continue;
      if (auto a = ancestor(t, depth - d->depth)) {
        std::size_t b = d->index.at(*a);
        g(static_cast<Eigen::Index>(b)) += c * w / std::sqrt(d->weight[b]);
      }
    }
    if (!d) continue;
    Eigen::VectorXcd coords = d->frame.transpose().cast<std::complex<double>>() * g;
    e.coefficients.segment(static_cast<Eigen::Index>(d->offset), coords.size()) = coords;
  }
  e.captured = e.coefficients.squaredNorm();
  return e;
}

long XiTruncation::Action::label_degree(std::size_t index, const XiTruncation& xi) const {
  return xi.coordinates()[index % xi.dimension()].degree;
}

void XiTruncation::action_block(const AlgebraElement& x, const Degree& in, std::size_t in_copy,
                                std::size_t out_copy, Action& out) const {
  const std::size_t dim = dimension();
  const auto nb = static_cast<Eigen::Index>(in.basis.size());
  for (const auto& [m, part] : gauge_decompose(x)) {
    const long n_out = in.n + m;
    const Degree* d = find_degree(n_out);
    std::vector<AlgebraElement> images;
    std::size_t depth = d ? d->depth : 0;
    for (const Monomial& b : in.basis) {
      images.push_back(part * AlgebraElement::monomial(b.mu, b.nu));
      depth = std::max(depth, images.back().depth());
    }
    Eigen::MatrixXcd g;
    if (d) g = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d->basis.size()), nb);
    std::map<Monomial, std::vector<std::pair<std::size_t, std::complex<double>>>> by_term;
    for (std::size_t b = 0; b < images.size(); ++b) {
      if (images[b].is_zero()) continue;
      for (const auto& [t, c] : expand(images[b], depth)) {
        by_term[t].emplace_back(b, c);
        if (!d) continue;
        if (auto a = ancestor(t, depth - d->depth)) {
          std::size_t row = d->index.at(*a);
          g(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(b)) +=
              c * phi_->weight(t.nu) / std::sqrt(d->weight[row] * in.weight[b]);
        }
      }
    }
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(nb, nb);
    for (const auto& [t, entries] : by_term) {
      const double w = phi_->weight(t.nu);
      for (const auto& [b1, c1] : entries)
        for (const auto& [b2, c2] : entries)
          gram(static_cast<Eigen::Index>(b1), static_cast<Eigen::Index>(b2)) +=
              std::conj(c1) * c2 * w / std::sqrt(in.weight[b1] * in.weight[b2]);
    }
    const Eigen::MatrixXcd frame_in = in.frame.cast<std::complex<double>>();
    Eigen::MatrixXcd projected = frame_in.adjoint() * gram * frame_in;
    for (Eigen::Index j = 0; j < projected.cols(); ++j)
      out.image_norm_squared[in_copy * dim + in.offset + static_cast<std::size_t>(j)] += projected(j, j).real();
    if (!d || d->frame.cols() == 0 || in.frame.cols() == 0) continue;
    Eigen::MatrixXcd block = d->frame.transpose().cast<std::complex<double>>() * g * frame_in;
    out.matrix.block(static_cast<Eigen::Index>(out_copy * dim + d->offset),
                     static_cast<Eigen::Index>(in_copy * dim + in.offset), block.rows(), block.cols()) += block;
  }
}

XiTruncation::Action XiTruncation::action(const MatrixOverAlgebra& v) const {
  Action out;
  out.copies = v.size();
  const std::size_t dim = dimension();
  const auto total = static_cast<Eigen::Index>(dim * v.size());
  out.matrix = Eigen::MatrixXcd::Zero(total, total);
  out.image_norm_squared.assign(dim * v.size(), 0.0);
  const AlgebraElement one = AlgebraElement::one_A(phi_->graph());
  for (std::size_t c = 0; c < v.size(); ++c)
    for (std::size_t i = 0; i < v.size(); ++i) {
      // The adjoined unit acts on Xi as 1_A.
      AlgebraElement x = v(i, c);
      const ExactComplex unit = x.unit_coeff();
      x.add_unit(-unit);
      x += unit * one;
      if (x.is_zero()) continue;
      for (const Degree& d : degrees_) action_block(x, d, c, i, out);
    }
  out.clean.assign(dim * v.size(), 0);
  for (std::size_t j = 0; j < dim * v.size(); ++j) {
    double captured = out.matrix.col(static_cast<Eigen::Index>(j)).squaredNorm();
    double image = out.image_norm_squared[j];
    out.clean[j] = std::abs(image - captured) <= 1e-9 * std::max(1.0, image) ? 1 : 0;
  }
  return out;
}

Eigen::MatrixXcd XiTruncation::fock_embedding_projection() const {
  const DirectedGraph& g = phi_->graph();
  std::vector<Eigen::VectorXcd> columns;
  for (long n = 0; n <= std::min(degree_window_, rank_window_); ++n)
    for (const Path& alpha : enumerate_paths(g, static_cast<std::size_t>(n)))
      columns.push_back(embed(AlgebraElement::path(alpha)).coefficients);
  const auto dim = static_cast<Eigen::Index>(dimension());
  if (columns.empty()) return Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd c(dim, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) c.col(static_cast<Eigen::Index>(k)) = columns[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.adjoint() * c);
  const double scale = std::max(1.0, es.eigenvalues().maxCoeff());
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda <= tol_ * scale) continue;
    Eigen::VectorXcd u = c * es.eigenvectors().col(k) / std::sqrt(lambda);
    p += u * u.adjoint();
  }
  return p;
}

namespace {

constexpr double kZero = 1e-9;

struct Labels {
  const XiTruncation& xi;
  long degree(std::size_t k) const { return xi.coordinates()[k % xi.dimension()].degree; }
  long layer(std::size_t k) const { return xi.coordinates()[k % xi.dimension()].layer; }
  Bigrade shift(std::size_t row, std::size_t col) const {
    return {degree(row) - degree(col), layer(row) - layer(col)};
  }
};

Eigen::MatrixXcd clean_part(const XiTruncation::Action& a) {
  Eigen::MatrixXcd m = a.matrix;
  for (std::size_t j = 0; j < a.clean.size(); ++j)
    if (!a.clean[j]) m.col(static_cast<Eigen::Index>(j)).setZero();
  return m;
}

std::map<Bigrade, Eigen::MatrixXcd> split(const Eigen::MatrixXcd& m, const Labels& labels) {
  std::map<Bigrade, Eigen::MatrixXcd> parts;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) <= kZero) continue;
      Bigrade b = labels.shift(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      auto it = parts.find(b);
      if (it == parts.end()) it = parts.emplace(b, Eigen::MatrixXcd::Zero(m.rows(), m.cols())).first;
      it->second(i, j) = m(i, j);
    }
  return parts;
}

// Columns j where a is clean and a e_j only touches columns on which b is clean,
// so that b * a e_j is exact.
std::vector<Eigen::Index> composable(const XiTruncation::Action& a, const Eigen::MatrixXcd& a_part,
                                     const XiTruncation::Action& b) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a_part.cols(); ++j) {
    if (!a.clean[static_cast<std::size_t>(j)]) continue;
    bool ok = true;
    for (Eigen::Index i = 0; i < a_part.rows() && ok; ++i)
      if (std::abs(a_part(i, j)) > kZero && !b.clean[static_cast<std::size_t>(i)]) ok = false;
    if (ok) cols.push_back(j);
  }
  return cols;
}

double max_abs_on(const Eigen::MatrixXcd& left, const Eigen::MatrixXcd& right, const std::vector<Eigen::Index>& cols) {
  double worst = 0;
  for (Eigen::Index j : cols) {
    Eigen::VectorXcd y = left * right.col(j);
    worst = std::max(worst, y.cwiseAbs().maxCoeff());
  }
  return worst;
}

// Max |[X, P]| over the evaluable columns for X = left diag(ψ) right.
double commutator_violation(const XiTruncation& xi, const Eigen::MatrixXcd& left, const XiTruncation::Action& right_action,
                            const Eigen::MatrixXcd& right, const XiTruncation::Action& left_action,
                            std::size_t& evaluated) {
  const std::size_t dim = xi.dimension();
  std::vector<Eigen::Index> cols = composable(right_action, right, left_action);
  evaluated += cols.size();
  double worst = 0;
  Eigen::VectorXd psi(right.rows());
  for (Eigen::Index k = 0; k < right.rows(); ++k) psi(k) = static_cast<double>(xi.psi(static_cast<std::size_t>(k) % dim));
  for (Eigen::Index j : cols) {
    Eigen::VectorXcd y = left * (psi.cast<std::complex<double>>().cwiseProduct(right.col(j)));
    const std::size_t jj = static_cast<std::size_t>(j) % dim;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const std::size_t ii = static_cast<std::size_t>(i) % dim;
      if (xi.in_Q(ii) != xi.in_Q(jj)) worst = std::max(worst, std::abs(y(i)));
      if (xi.in_kernel_D(ii) != xi.in_kernel_D(jj)) worst = std::max(worst, std::abs(y(i)));
    }
  }
  return worst;
}

}  // namespace

HomogeneousDecomposition homogeneous_decompose(const PartialIsometryClass& v, const XiTruncation& xi) {
  HomogeneousDecomposition out;
  const XiTruncation::Action a = xi.action(v.matrix());
  const XiTruncation::Action a_star = xi.action(v.matrix().adjoint());
  const Labels labels{xi};
  out.total_columns = a.clean.size();
  out.clean_columns = static_cast<std::size_t>(std::count(a.clean.begin(), a.clean.end(), 1));
  if (out.clean_columns == 0) {
    throw ConvergenceError("no clean column for '" + v.name() + "'; enlarge the Xi windows", 0.0);
  }
  const Eigen::MatrixXcd m = clean_part(a);
  const Eigen::MatrixXcd m_star = clean_part(a_star);
  out.components = split(m, labels);
  const auto components_star = split(m_star, labels);

  out.gauge_degrees = v.matrix().gauge_degrees();
  out.layer_shift_min = -static_cast<long>(v.matrix().max_nu_length());
  out.layer_shift_max = static_cast<long>(v.matrix().max_mu_length());
  out.finite_certified = !out.components.empty() || m.isZero(kZero);
  for (const auto& [b, part] : out.components) {
    bool degree_ok = std::find(out.gauge_degrees.begin(), out.gauge_degrees.end(), b.m) != out.gauge_degrees.end();
    bool layer_ok = b.s >= out.layer_shift_min && b.s <= out.layer_shift_max;
    out.finite_certified = out.finite_certified && degree_ok && layer_ok;
  }

  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  for (const auto& entry : out.components) sum += entry.second;
  out.reconstruction_error = out.components.empty() ? 0.0 : (sum - m).cwiseAbs().maxCoeff();

  // v_a* = (v*)_{-a}; products are evaluated only where every factor is clean.
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  auto star_component = [&](const Bigrade& b) -> const Eigen::MatrixXcd& {
    auto it = components_star.find({-b.m, -b.s});
    return it == components_star.end() ? zero : it->second;
  };
  for (const auto& [ba, pa] : out.components)
    for (const auto& [bb, pb] : out.components) {
      if (ba == bb) continue;
      out.chop_vee_violation =
          std::max(out.chop_vee_violation, max_abs_on(star_component(ba), pb, composable(a, pb, a_star)));
      const Eigen::MatrixXcd& sb = star_component(bb);
      out.chop_vee_violation = std::max(out.chop_vee_violation, max_abs_on(pa, sb, composable(a_star, sb, a)));
    }

  out.vee_modular_violation = std::max(commutator_violation(xi, m, a_star, m_star, a, out.modular_columns),
                                       commutator_violation(xi, m_star, a, m, a_star, out.modular_columns));

  std::set<long> degrees;
  for (const auto& entry : out.components) degrees.insert(entry.first.m);
  out.homog = true;
  for (long d : degrees) out.homog = out.homog && out.components.count({d, d}) > 0;
  return out;
}

}  // namespace pimsner
