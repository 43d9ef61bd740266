#include "pimsner/fock.hpp"

#include <algorithm>

#include "pimsner/errors.hpp"

namespace pimsner {

TruncatedFock::TruncatedFock(const DirectedGraph& g, std::size_t truncation, std::size_t cap)
    : graph_(&g), truncation_(truncation) {
  offsets_.push_back(0);
  for (std::size_t k = 0; k <= truncation; ++k) {
    if (count_paths(g, k) + basis_.size() > mpz_class(static_cast<unsigned long>(cap))) {
      throw ResourceLimitError("Fock truncation " + std::to_string(truncation) + " exceeds the path cap of " +
                               std::to_string(cap));
    }
    for (Path& p : enumerate_paths(g, k, cap)) basis_.push_back(std::move(p));
    offsets_.push_back(basis_.size());
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
}

std::optional<std::size_t> TruncatedFock::find(const Path& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FockOperator::FockOperator(const TruncatedFock& f, std::size_t copies)
    : fock_(&f), copies_(copies), columns_(copies * f.size()), clean_max_(static_cast<long>(f.truncation())) {}

FockOperator FockOperator::identity(const TruncatedFock& f, std::size_t copies) {
  FockOperator op(f, copies);
  for (std::size_t i = 0; i < op.dimension(); ++i) op.columns_[i].emplace(i, 1);
  return op;
}

FockOperator FockOperator::block(const std::vector<std::vector<FockOperator>>& blocks) {
  if (blocks.empty()) throw ValidationError("FockOperator::block: empty block matrix");
  const std::size_t n = blocks.size();
  const TruncatedFock& f = blocks[0].at(0).fock();
  FockOperator op(f, n);
  const std::size_t dim = f.size();
  long clean = static_cast<long>(f.truncation());
  long lo = 0, hi = 0;
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks[i].size() != n) throw ValidationError("FockOperator::block: block matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const FockOperator& b = blocks[i][j];
      if (&b.fock() != &f || b.copies() != 1) throw ValidationError("FockOperator::block: incompatible block");
      if (b.is_zero()) continue;
      for (std::size_t c = 0; c < dim; ++c)
        for (const auto& [r, x] : b.columns_[c]) op.columns_[j * dim + c].emplace(i * dim + r, x);
      clean = std::min(clean, b.clean_max_);
      lo = first ? b.min_shift_ : std::min(lo, b.min_shift_);
      hi = first ? b.max_shift_ : std::max(hi, b.max_shift_);
      first = false;
    }
  }
  op.set_window(clean, lo, hi);
  return op;
}

ExactComplex FockOperator::at(std::size_t i, std::size_t j) const {
  auto it = columns_.at(j).find(i);
  return it == columns_[j].end() ? ExactComplex() : it->second;
}

void FockOperator::add(std::size_t i, std::size_t j, const ExactComplex& c) {
  if (c.is_zero()) return;
  SparseColumn& col = columns_.at(j);
  auto [it, inserted] = col.emplace(i, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) col.erase(it);
  }
}

void FockOperator::set_window(long clean_max, long min_shift, long max_shift) {
  clean_max_ = std::min(clean_max, static_cast<long>(fock_->truncation()));
  min_shift_ = min_shift;
  max_shift_ = max_shift;
}

FockOperator FockOperator::adjoint() const {
  FockOperator op(*fock_, copies_);
  for (std::size_t j = 0; j < columns_.size(); ++j)
    for (const auto& [i, x] : columns_[j]) op.columns_[i].emplace(j, x.conj());
  op.set_window(std::min(static_cast<long>(fock_->truncation()), clean_max_ + min_shift_), -max_shift_, -min_shift_);
  return op;
}

bool FockOperator::is_zero() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const SparseColumn& c) { return c.empty(); });
}

bool FockOperator::is_right_linear() const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    for (const auto& entry : columns_[j])
      if (range_of(entry.first) != range_of(j)) return false;
  return true;
}

void FockOperator::require_compatible(const FockOperator& o) const {
  if (o.fock_ != fock_ || o.copies_ != copies_) throw ValidationError("FockOperator: incompatible operands");
}

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_compatible(o);
  bool was_zero = is_zero();
  for (std::size_t j = 0; j < columns_.size(); ++j)
    for (const auto& [i, x] : o.columns_[j]) add(i, j, x);
  if (was_zero) {
    set_window(std::min(clean_max_, o.clean_max_), o.min_shift_, o.max_shift_);
  } else if (!o.is_zero()) {
    set_window(std::min(clean_max_, o.clean_max_), std::min(min_shift_, o.min_shift_),
               std::max(max_shift_, o.max_shift_));
  } else {
    set_window(std::min(clean_max_, o.clean_max_), min_shift_, max_shift_);
  }
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  FockOperator negated = o;
  negated *= ExactComplex(-1);
  return *this += negated;
}

FockOperator& FockOperator::operator*=(const ExactComplex& c) {
  if (c.is_zero()) {
    for (auto& col : columns_) col.clear();
    return *this;
  }
  for (auto& col : columns_)
    for (auto& entry : col) entry.second *= c;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  a.require_compatible(b);
  FockOperator c(*a.fock_, a.copies_);
  for (std::size_t j = 0; j < b.columns_.size(); ++j) {
    SparseColumn& out = c.columns_[j];
    for (const auto& [k, y] : b.columns_[j]) {
      for (const auto& [i, x] : a.columns_[k]) {
        auto [it, inserted] = out.emplace(i, x * y);
        if (!inserted) it->second += x * y;
      }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  }
  c.set_window(std::min(b.clean_max_, a.clean_max_ - b.max_shift_), a.min_shift_ + b.min_shift_,
               a.max_shift_ + b.max_shift_);
  return c;
}

FockOperator creation(const TruncatedFock& f, const TensorElement& nu) {
  const std::size_t m = nu.degree();
  if (m > f.truncation()) {
    throw ValidationError("creation operator of degree " + std::to_string(m) + " exceeds truncation " +
                          std::to_string(f.truncation()));
  }
  FockOperator op(f);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Path& rho = f.path(j);
    if (rho.length() + m > f.truncation()) continue;
    for (const auto& [prefix, c] : nu.coefficients()) {
      auto joined = prefix.then(rho);
      if (!joined) continue;
      op.add(*f.find(*joined), j, c);
    }
  }
  const long shift = static_cast<long>(m);
  op.set_window(static_cast<long>(f.truncation()) - shift, shift, shift);
  return op;
}

FockOperator annihilation(const TruncatedFock& f, const TensorElement& nu) { return creation(f, nu).adjoint(); }

FockOperator left_action(const TruncatedFock& f, const VertexFunction<ExactComplex>& a) {
  FockOperator op(f);
  for (std::size_t j = 0; j < f.size(); ++j) op.add(j, j, a.at(f.path(j).source()));
  return op;
}

FockOperator right_action(const TruncatedFock& f, const VertexFunction<ExactComplex>& a) {
  FockOperator op(f);
  for (std::size_t j = 0; j < f.size(); ++j) op.add(j, j, a.at(f.range(j)));
  return op;
}

FockOperator level_projection(const TruncatedFock& f, std::size_t k) {
  if (k > f.truncation()) throw ValidationError("level_projection: level beyond truncation");
  FockOperator op(f);
  for (std::size_t j = f.level_offset(k); j < f.level_offset(k) + f.level_size(k); ++j) op.add(j, j, 1);
  return op;
}

FockOperator fock_projection_Q(const TruncatedFock& f) { return FockOperator::identity(f); }

EndoMatrix compress(const FockOperator& t, std::size_t k) {
  if (t.copies() != 1) throw ValidationError("compress: operator acts on several copies");
  const TruncatedFock& f = t.fock();
  EndoMatrix m(f.graph(), k);
  const std::size_t offset = f.level_offset(k);
  for (std::size_t j = 0; j < m.size(); ++j)
    for (const auto& [i, x] : t.column(offset + j))
      if (f.level(i) == k) m(i - offset, j) = x;
  return m;
}

}  // namespace pimsner
