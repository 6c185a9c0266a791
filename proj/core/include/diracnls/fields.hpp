#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "diracnls/lattice.hpp"

namespace diracnls {

using cd = std::complex<double>;

/// K-quasi-periodic function stored as plane-wave coefficients.
///
/// Coefficient c(m) multiplies the orthonormal wave exp(i (K + G_m).x) / sqrt(|cell|),
/// so the L2 norm over one cell is the Euclidean norm of the coefficient vector.
class BlochField {
 public:
  BlochField() = default;
  explicit BlochField(std::shared_ptr<const IndexSet> set);
  BlochField(std::shared_ptr<const IndexSet> set, Eigen::VectorXcd coeffs);

  static BlochField plane_wave(std::shared_ptr<const IndexSet> set, FourierIndex idx);

  const IndexSet& index_set() const { return *set_; }
  const std::shared_ptr<const IndexSet>& index_set_ptr() const { return set_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  cd operator[](std::size_t i) const { return coeffs_[static_cast<Eigen::Index>(i)]; }

  /// Zero when the index is outside the set.
  cd coefficient(FourierIndex idx) const;

  double norm() const { return coeffs_.norm(); }
  bool shares_set_with(const BlochField& other) const;

  BlochField& operator+=(const BlochField& other);
  BlochField& operator-=(const BlochField& other);
  BlochField& operator*=(cd scale);

  friend BlochField operator+(BlochField a, const BlochField& b) { return a += b; }
  friend BlochField operator-(BlochField a, const BlochField& b) { return a -= b; }
  friend BlochField operator*(cd s, BlochField a) { return a *= s; }
  friend BlochField operator*(double s, BlochField a) { return a *= cd(s, 0.0); }

 private:
  std::shared_ptr<const IndexSet> set_;
  Eigen::VectorXcd coeffs_;
};

/// Throws StructuralError unless both fields live on the same index set.
void require_same_set(const BlochField& a, const BlochField& b);

/// <f, g>: conjugate-linear in f, linear in g.
cd inner_product(const BlochField& f, const BlochField& g);

/// x -> f(R x); moves the coefficient at idx to rotate_index(idx).
BlochField apply_rotation(const BlochField& f);

/// x -> conj(f(-x)); conjugates every coefficient in place.
BlochField conj_invert(const BlochField& f);

/// Uniform sampling of one unit cell at x = (s/n) r1 + (t/n) r2.
///
/// Transforms between coefficients and samples are exact for fields on the
/// associated index set. The default resolution leaves room for quintic
/// products of in-set fields to be evaluated without aliasing.
class RealGrid {
 public:
  RealGrid(std::shared_ptr<const IndexSet> set, const LatticeBasis& lattice, int resolution = 0);
  ~RealGrid();
  RealGrid(const RealGrid&) = delete;
  RealGrid& operator=(const RealGrid&) = delete;

  /// 3 (2N + 1): the smallest resolution accepted.
  static int minimum_resolution(const IndexSet& set);
  /// Resolution used when none is given.
  static int dealiased_resolution(const IndexSet& set);

  int n_x() const { return n_; }
  int n_y() const { return n_; }
  std::size_t num_points() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  double weight() const { return weight_; }
  const LatticeBasis& lattice() const { return lattice_; }
  const IndexSet& index_set() const { return *set_; }
  const std::shared_ptr<const IndexSet>& index_set_ptr() const { return set_; }

  Vec2 position(std::size_t point) const;

  std::vector<cd> to_grid(const BlochField& f) const;
  /// Projects samples onto the grid's index set; other frequencies are dropped.
  BlochField from_grid(std::span<const cd> samples) const;

  double integrate(std::span<const double> samples) const;
  cd integrate(std::span<const cd> samples) const;

  std::vector<double> sample(const std::function<double(const Vec2&)>& fn) const;

  /// Sample index of -x for the point x.
  std::size_t inverted_point(std::size_t point) const;
  /// Sample index of R x for the point x.
  std::size_t rotated_point(std::size_t point) const;

 private:
  struct Plans;

  std::shared_ptr<const IndexSet> set_;
  LatticeBasis lattice_;
  int n_;
  double weight_;
  std::vector<std::size_t> slots_;
  std::vector<cd> to_phase_;
  std::vector<cd> from_phase_;
  std::unique_ptr<Plans> plans_;
};

std::vector<double> density(std::span<const cd> samples);

/// from_grid(multiplier * to_grid(f)).
BlochField multiply(const RealGrid& grid, std::span<const double> multiplier, const BlochField& f);

/// from_grid(fn(x, |f(x)|^2) * f(x)).
BlochField pointwise_apply(const RealGrid& grid, const BlochField& f,
                           const std::function<double(const Vec2&, double)>& fn);

}  // namespace diracnls
