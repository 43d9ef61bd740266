#include "pimsner/linalg.hpp"

#include <complex>

#include <Eigen/Dense>

namespace pimsner {

bool IncrementalBasis::insert(SparseColumn v) {
  while (!v.empty()) {
    auto lead = v.begin();
    auto pivot = pivots_.find(lead->first);
    if (pivot == pivots_.end()) {
      ExactComplex inverse = ExactComplex(1) / lead->second;
      for (auto& entry : v) entry.second *= inverse;
      pivots_.emplace(lead->first, std::move(v));
      return true;
    }
    ExactComplex factor = lead->second;
    for (const auto& [i, x] : pivot->second) {
      auto [it, inserted] = v.emplace(i, -(factor * x));
      if (!inserted) {
        it->second -= factor * x;
        if (it->second.is_zero()) v.erase(it);
      }
    }
  }
  return false;
}

std::size_t exact_rank(const std::vector<SparseColumn>& vectors) {
  IncrementalBasis basis;
  for (const SparseColumn& v : vectors) basis.insert(v);
  return basis.rank();
}

std::size_t float_rank(const std::vector<SparseColumn>& vectors, std::size_t ambient, double tol) {
  if (vectors.empty() || ambient == 0) return 0;
  std::map<std::size_t, std::size_t> rows;
  for (const SparseColumn& v : vectors)
    for (const auto& entry : v) rows.emplace(entry.first, 0);
  std::size_t next = 0;
  for (auto& entry : rows) entry.second = next++;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (const auto& [i, x] : vectors[j])
      m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(j)) = x.to_complex();
  if (rows.empty()) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
  qr.setThreshold(tol);
  return static_cast<std::size_t>(qr.rank());
}

std::size_t exact_rank(const std::vector<std::vector<ExactComplex>>& rows) {
  IncrementalBasis basis;
  for (const auto& row : rows) {
    SparseColumn v;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (!row[j].is_zero()) v.emplace(j, row[j]);
    basis.insert(std::move(v));
  }
  return basis.rank();
}

}  // namespace pimsner
