#include "diracnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "diracnls/errors.hpp"

namespace diracnls {

Vec2 apply(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Mat2 transpose(const Mat2& m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

Mat2 multiply(const Mat2& a, const Mat2& b) {
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return out;
}

LatticeBasis LatticeBasis::honeycomb() {
  using std::numbers::pi;
  const double s3 = std::sqrt(3.0);
  LatticeBasis lat{};
  lat.r1 = {s3 / 2.0, 0.5};
  lat.r2 = {s3 / 2.0, -0.5};
  lat.k1 = {2.0 * pi * s3 / 3.0, 2.0 * pi};
  lat.k2 = {2.0 * pi * s3 / 3.0, -2.0 * pi};
  lat.K = {0.0, 4.0 * pi / 3.0};
  lat.R = {{{-0.5, -s3 / 2.0}, {s3 / 2.0, -0.5}}};
  lat.cell_area = std::abs(lat.r1[0] * lat.r2[1] - lat.r1[1] * lat.r2[0]);
  return lat;
}

Vec2 LatticeBasis::reciprocal(FourierIndex idx) const {
  return static_cast<double>(idx.m1) * k1 + static_cast<double>(idx.m2) * k2;
}

Vec2 LatticeBasis::momentum(FourierIndex idx) const { return K + reciprocal(idx); }

Vec2 LatticeBasis::point(double alpha, double beta) const { return alpha * r1 + beta * r2; }

std::pair<Vec2, Vec2> dual_basis(const LatticeBasis& lattice) {
  // k_i = 2 pi (R_lattice^{-T}) e_i for the matrix with rows r1, r2.
  const double det = lattice.r1[0] * lattice.r2[1] - lattice.r1[1] * lattice.r2[0];
  const double f = 2.0 * std::numbers::pi / det;
  Vec2 k1{f * lattice.r2[1], -f * lattice.r2[0]};
  Vec2 k2{-f * lattice.r1[1], f * lattice.r1[0]};
  return {k1, k2};
}

FourierIndex rotate_index(FourierIndex idx) { return {-idx.m2, idx.m1 - idx.m2 + 1}; }

FourierIndex rotate_dual_index(FourierIndex idx) { return {-idx.m2, idx.m1 - idx.m2}; }

std::vector<FourierIndex> close_under_rotation(std::vector<FourierIndex> indices) {
  std::set<FourierIndex> closed(indices.begin(), indices.end());
  for (const auto& idx : indices) {
    const auto once = rotate_index(idx);
    closed.insert(once);
    closed.insert(rotate_index(once));
  }
  return {closed.begin(), closed.end()};
}

IndexSet::IndexSet(int cutoff, std::vector<FourierIndex> indices)
    : cutoff_(cutoff), indices_(std::move(indices)) {
  if (indices_.empty()) throw DomainError("IndexSet: empty index list");
  if (!std::is_sorted(indices_.begin(), indices_.end()) ||
      std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw StructuralError("IndexSet: indices must be strictly increasing");

  lower_ = upper_ = indices_.front();
  for (const auto& idx : indices_) {
    lower_.m1 = std::min(lower_.m1, idx.m1);
    lower_.m2 = std::min(lower_.m2, idx.m2);
    upper_.m1 = std::max(upper_.m1, idx.m1);
    upper_.m2 = std::max(upper_.m2, idx.m2);
  }
  const std::size_t w1 = static_cast<std::size_t>(upper_.m1 - lower_.m1 + 1);
  const std::size_t w2 = static_cast<std::size_t>(upper_.m2 - lower_.m2 + 1);
  lookup_.assign(w1 * w2, -1);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const auto& idx = indices_[i];
    lookup_[static_cast<std::size_t>(idx.m1 - lower_.m1) * w2 +
            static_cast<std::size_t>(idx.m2 - lower_.m2)] = static_cast<std::ptrdiff_t>(i);
  }

  rotation_.resize(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const auto target = find(rotate_index(indices_[i]));
    if (!target)
      throw StructuralError("IndexSet: not closed under rotation at (" + std::to_string(indices_[i].m1) +
                            ", " + std::to_string(indices_[i].m2) + ")");
    rotation_[i] = *target;
  }
}

std::optional<std::size_t> IndexSet::find(FourierIndex idx) const {
  if (idx.m1 < lower_.m1 || idx.m1 > upper_.m1 || idx.m2 < lower_.m2 || idx.m2 > upper_.m2)
    return std::nullopt;
  const std::size_t w2 = static_cast<std::size_t>(upper_.m2 - lower_.m2 + 1);
  const auto pos = lookup_[static_cast<std::size_t>(idx.m1 - lower_.m1) * w2 +
                           static_cast<std::size_t>(idx.m2 - lower_.m2)];
  if (pos < 0) return std::nullopt;
  return static_cast<std::size_t>(pos);
}

IndexSet build_index_set(int cutoff) {
  if (cutoff < 1) throw DomainError("build_index_set: cutoff must be at least 1");
  std::vector<FourierIndex> ball;
  ball.reserve(static_cast<std::size_t>((2 * cutoff + 1) * (2 * cutoff + 1)));
  for (int m1 = -cutoff; m1 <= cutoff; ++m1)
    for (int m2 = -cutoff; m2 <= cutoff; ++m2) ball.push_back({m1, m2});
  return IndexSet(cutoff, close_under_rotation(std::move(ball)));
}

}  // namespace diracnls
