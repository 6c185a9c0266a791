#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace diracnls {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

Vec2 apply(const Mat2& m, const Vec2& v);
Mat2 transpose(const Mat2& m);
Mat2 multiply(const Mat2& a, const Mat2& b);

/// Integer coordinates of a dual-lattice vector m1*k1 + m2*k2.
///
/// As a plane-wave label it carries momentum K + m1*k1 + m2*k2.
struct FourierIndex {
  int m1 = 0;
  int m2 = 0;

  friend auto operator<=>(const FourierIndex&, const FourierIndex&) = default;
  friend FourierIndex operator-(FourierIndex a, FourierIndex b) { return {a.m1 - b.m1, a.m2 - b.m2}; }
  friend FourierIndex operator+(FourierIndex a, FourierIndex b) { return {a.m1 + b.m1, a.m2 + b.m2}; }
  friend FourierIndex operator-(FourierIndex a) { return {-a.m1, -a.m2}; }
};

/// Honeycomb Bravais lattice in dimensionless units.
///
/// r1 = (sqrt3/2, 1/2), r2 = (sqrt3/2, -1/2); k1, k2 satisfy ri.kj = 2 pi delta_ij;
/// K = (0, 4 pi / 3) is the Brillouin-zone corner and R the 2 pi / 3 rotation
/// that leaves honeycomb potentials invariant.
struct LatticeBasis {
  Vec2 r1;
  Vec2 r2;
  Vec2 k1;
  Vec2 k2;
  Vec2 K;
  Mat2 R;
  double cell_area;

  static LatticeBasis honeycomb();

  /// m1*k1 + m2*k2
  Vec2 reciprocal(FourierIndex idx) const;
  /// K + m1*k1 + m2*k2
  Vec2 momentum(FourierIndex idx) const;
  /// Cartesian point alpha*r1 + beta*r2.
  Vec2 point(double alpha, double beta) const;
};

std::pair<Vec2, Vec2> dual_basis(const LatticeBasis& lattice);

/// Index of R^t (K + G_idx) - K, i.e. (m1, m2) -> (-m2, m1 - m2 + 1).
FourierIndex rotate_index(FourierIndex idx);

/// Zero-offset analogue acting on dual-lattice vectors: (m1, m2) -> (-m2, m1 - m2).
FourierIndex rotate_dual_index(FourierIndex idx);

/// Truncated, rotation-closed set of plane-wave labels.
///
/// Contains the max-norm ball of radius `cutoff` together with the full rotation
/// orbit of each of its members, ordered lexicographically by (m1, m2).
class IndexSet {
 public:
  IndexSet(int cutoff, std::vector<FourierIndex> indices);

  int cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const std::vector<FourierIndex>& indices() const noexcept { return indices_; }
  const FourierIndex& operator[](std::size_t i) const { return indices_[i]; }

  std::optional<std::size_t> find(FourierIndex idx) const;
  bool contains(FourierIndex idx) const { return find(idx).has_value(); }

  /// rotation_permutation()[i] is the position of rotate_index(indices()[i]).
  const std::vector<std::size_t>& rotation_permutation() const noexcept { return rotation_; }

  FourierIndex lower() const noexcept { return lower_; }
  FourierIndex upper() const noexcept { return upper_; }
  /// Largest extent (max - min) along either lattice index.
  int span() const noexcept { return std::max(upper_.m1 - lower_.m1, upper_.m2 - lower_.m2); }

  bool operator==(const IndexSet& other) const {
    return cutoff_ == other.cutoff_ && indices_ == other.indices_;
  }

 private:
  int cutoff_;
  std::vector<FourierIndex> indices_;
  FourierIndex lower_;
  FourierIndex upper_;
  std::vector<std::ptrdiff_t> lookup_;
  std::vector<std::size_t> rotation_;
};

/// Throws DomainError for cutoff < 1.
IndexSet build_index_set(int cutoff);

/// Adds every missing rotation-orbit member to `indices` and sorts them.
std::vector<FourierIndex> close_under_rotation(std::vector<FourierIndex> indices);

}  // namespace diracnls
