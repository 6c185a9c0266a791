#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "diracnls/fields.hpp"
#include "diracnls/linear_spectrum.hpp"

namespace diracnls {

/// Normalized Dirac-pair coefficients (a, b), |a|^2 + |b|^2 = 1.
struct ParameterPair {
  cd a{1.0, 0.0};
  cd b{0.0, 0.0};

  static ParameterPair a_pole() { return {1.0, 0.0}; }
  static ParameterPair b_pole() { return {0.0, 1.0}; }
  /// (1/sqrt2, exp(i beta)/sqrt2)
  static ParameterPair equator(double beta);
  /// (cos theta, sin theta exp(i phase))
  static ParameterPair from_angles(double theta, double phase);

  double norm() const { return std::sqrt(std::norm(a) + std::norm(b)); }
  /// Representative with a real nonnegative (b real positive when a = 0).
  ParameterPair canonical() const;
  /// arg(b / a) wrapped to [-pi, pi).
  double beta() const;
  /// atan2(|b|, |a|)
  double theta() const;
  bool on_equator(double tol = 1e-12) const { return std::abs(std::abs(a) - std::abs(b)) <= tol; }
};

/// Wraps an angle to [-pi, pi).
double wrap_angle(double x);

struct QuarticIntegrals {
  double I_one = 0.0;
  double I_int = 0.0;
  cd I_a;
  cd I_b;
  cd I_int_complex;
};

/// I_a = int K |a|^4, I_b = int K |b|^4, I_int = int K |a|^2 |b|^2.
/// Throws SymmetryError when |I_a - I_b| exceeds tol * max(|I_a|, |I_b|).
QuarticIntegrals quartic_integrals(const RealGrid& grid, const BlochField& phi_a, const BlochField& phi_b,
                                   std::span<const double> K_field, double tol = 1e-10);
QuarticIntegrals quartic_integrals(const RealGrid& grid, const SpectralBasis& basis,
                                   std::span<const double> K_field, double tol = 1e-10);

struct T2Term {
  std::size_t n = 0;
  double energy = 0.0;
  SymmetryClass cls = SymmetryClass::One;
  /// int K conj(phi_a)^2 phi_b phi_n
  cd first;
  /// int K conj(phi_a) phi_b^2 conj(phi_n)
  cd second;
  cd contribution;
};

struct T2Result {
  cd value;
  std::vector<T2Term> terms;
};

/// -sum_n first * second / (E_n - E0) over non-Dirac n, restricted to class 1 unless asked otherwise.
T2Result t2_sum(const RealGrid& grid, const SpectralBasis& basis, std::span<const double> K_field,
                bool restrict_to_class_one = true);

inline constexpr double kHypothesisThreshold = 1e-8;

struct PerturbationReport {
  double I_one = 0.0;
  double I_int = 0.0;
  double I_a_minus_I_b = 0.0;
  double I_one_imag = 0.0;
  double I_int_imag = 0.0;
  cd T2;
  cd M_integral;
  cd I_c_int;
  double theta_pred = 0.0;
  double nondegeneracy = 0.0;
  int n_terms_T2 = 0;
  bool nondegeneracy_warning = false;
  bool interaction_warning = false;
  GaugeRecord gauge;

  /// Nondegeneracy or interaction hypothesis fails; the eight-mode count is not predicted.
  bool prediction_void() const { return nondegeneracy_warning || interaction_warning; }
  /// Leading coefficient of (E - E0) / eps^2 for a pair.
  double leading_energy(const ParameterPair& pair) const;
  /// The six zeros (n pi - arg I_c_int) / 3 of the leading imaginary-energy law, ascending in [-pi, pi).
  std::vector<double> predicted_roots() const;
};

PerturbationReport complex_interaction(const RealGrid& grid, const SpectralBasis& basis,
                                       std::span<const double> K_field, std::span<const double> M_field);

/// |a b (|b|^2 - |a|^2) (I_one - 2 I_int)|
double landscape_value(const PerturbationReport& report, const ParameterPair& pair);

struct LandscapePoint {
  double theta = 0.0;
  double phase = 0.0;
  double value = 0.0;
};

/// theta in [0, pi/2] inclusive, phase in [0, 2 pi) exclusive.
std::vector<LandscapePoint> necessary_condition_landscape(const PerturbationReport& report, int n_theta,
                                                          int n_phase);

}  // namespace diracnls
