#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "diracnls/bootstrap.hpp"
#include "diracnls/fields.hpp"
#include "diracnls/lattice.hpp"
#include "diracnls/model.hpp"

namespace oracle {

using diracnls::cd;
using diracnls::Vec2;
using diracnls::operator+;
using diracnls::operator-;
using diracnls::operator*;
inline constexpr double pi = std::numbers::pi;

/// Dirac energy of the free problem.
inline double free_dirac_energy() { return 16.0 * pi * pi / 9.0; }

/// Hand-rolled generator of reproducible test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cd complex() {
    std::normal_distribution<double> n;
    const double re = n(rng_);
    return {re, n(rng_)};
  }

  diracnls::BlochField field(const std::shared_ptr<const diracnls::IndexSet>& set) {
    Eigen::VectorXcd c(static_cast<Eigen::Index>(set->size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = complex();
    return {set, c};
  }

  /// Unit field whose coefficients decay like exp(-|m|), so products stay resolved.
  diracnls::BlochField smooth_field(const std::shared_ptr<const diracnls::IndexSet>& set) {
    auto f = field(set);
    for (std::size_t i = 0; i < set->size(); ++i) {
      const auto& m = (*set)[i];
      f.coeffs()[static_cast<Eigen::Index>(i)] *= std::exp(-std::hypot(m.m1, m.m2));
    }
    f *= cd(1.0 / f.norm(), 0.0);
    return f;
  }

  diracnls::FourierIndex index(int radius) { return {integer(-radius, radius), integer(-radius, radius)}; }

 private:
  std::mt19937_64 rng_;
};

/// Direct evaluation of sum_m c(m) exp(i (K + G_m).x) / sqrt(|cell|).
inline cd evaluate_field(const diracnls::BlochField& f, const diracnls::LatticeBasis& lattice, const Vec2& x) {
  cd sum = 0.0;
  const auto& set = f.index_set();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec2 q = lattice.momentum(set[i]);
    sum += f[i] * std::polar(1.0, q[0] * x[0] + q[1] * x[1]);
  }
  return sum / std::sqrt(lattice.cell_area);
}

/// Coefficient of exp(i (K + G_m).x) / sqrt(|cell|) by direct cell quadrature of a callable.
template <typename F>
cd project_direct(F&& fn, const diracnls::LatticeBasis& lattice, diracnls::FourierIndex m, int n = 48) {
  const Vec2 q = lattice.momentum(m);
  cd sum = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      const Vec2 x = lattice.point(static_cast<double>(s) / n, static_cast<double>(t) / n);
      sum += fn(x) * std::polar(1.0, -(q[0] * x[0] + q[1] * x[1]));
    }
  return sum * lattice.cell_area / (static_cast<double>(n) * n) / std::sqrt(lattice.cell_area);
}

/// Dense convolution matrix of the scaled potential, built entry by entry.
inline Eigen::MatrixXcd convolution_matrix(const diracnls::IndexSet& set, const diracnls::HoneycombPotential& v) {
  const auto D = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXcd C(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j)
      C(i, j) = v.scaled_coefficient(set[static_cast<std::size_t>(i)] - set[static_cast<std::size_t>(j)]);
  return C;
}

/// Momentum rotation by the 2x2 matrix, mapped back to an index by solving against k1, k2.
inline diracnls::FourierIndex rotate_by_matrix(const diracnls::LatticeBasis& L, diracnls::FourierIndex idx) {
  const Vec2 q = diracnls::apply(diracnls::transpose(L.R), L.momentum(idx)) - L.K;
  // q = m1 k1 + m2 k2 and ri.kj = 2 pi delta_ij
  const double m1 = diracnls::dot(L.r1, q) / (2.0 * pi);
  const double m2 = diracnls::dot(L.r2, q) / (2.0 * pi);
  return {static_cast<int>(std::lround(m1)), static_cast<int>(std::lround(m2))};
}

/// Model parameters used by most tests: standard potential, eps_V = 0.5, Kerr K0 = 1.
inline diracnls::ModelParameters default_parameters(int cutoff = 6) {
  diracnls::ModelParameters p;
  p.cutoff = cutoff;
  return p;
}

inline std::shared_ptr<const diracnls::Workspace> shared_workspace() {
  static const auto ws = std::make_shared<const diracnls::Workspace>(default_parameters());
  return ws;
}

inline const diracnls::BootstrapSolver& shared_solver() {
  static const diracnls::BootstrapSolver solver(shared_workspace());
  return solver;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
    sxx += std::log(x[i]) * std::log(x[i]);
    sxy += std::log(x[i]) * std::log(y[i]);
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
