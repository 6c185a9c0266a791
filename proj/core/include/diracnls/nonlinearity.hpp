#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "diracnls/fields.hpp"
#include "diracnls/lattice.hpp"

namespace diracnls {

/// Lattice-periodic real potential V(x) = amplitude * sum_m V(m) exp(i G_m.x).
///
/// Coefficients are keyed by dual-lattice indices without the K offset.
class HoneycombPotential {
 public:
  HoneycombPotential() = default;
  HoneycombPotential(std::map<FourierIndex, cd> coeffs, double amplitude = 1.0);

  const std::map<FourierIndex, cd>& fourier_coeffs() const { return coeffs_; }
  double amplitude() const { return amplitude_; }

  /// Unscaled coefficient; zero for absent indices.
  cd coefficient(FourierIndex m) const;
  /// amplitude * coefficient(m)
  cd scaled_coefficient(FourierIndex m) const { return amplitude_ * coefficient(m); }

  HoneycombPotential scaled(double amplitude) const { return {coeffs_, amplitude}; }

  /// Real part of the scaled Fourier sum at a Cartesian point.
  double evaluate(const Vec2& x, const LatticeBasis& lattice) const;
  std::vector<double> sample(const RealGrid& grid) const;

  /// Whitespace-separated rows "m1 m2 re [im]"; '#' starts a comment.
  static HoneycombPotential read_table(const std::filesystem::path& path, double amplitude = 1.0);
  static HoneycombPotential parse_table(const std::string& text, double amplitude = 1.0);

 private:
  std::map<FourierIndex, cd> coeffs_;
  double amplitude_ = 1.0;
};

/// cos(k1.x) + cos(k2.x) + cos((k1 + k2).x)
HoneycombPotential standard_potential(double amplitude = 1.0);

struct SymmetryReport {
  double periodicity = 0.0;
  double realness = 0.0;
  double inversion = 0.0;
  double rotation = 0.0;
  double scale = 0.0;
  bool passed = true;

  double worst() const;
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// Violations are relative to the largest coefficient magnitude.
SymmetryReport validate_honeycomb(const HoneycombPotential& potential, double tol = kSymmetryTolerance);
/// Grid-sampled version; violations are relative to the largest sample magnitude.
SymmetryReport validate_honeycomb(const RealGrid& grid, std::span<const double> samples,
                                  double tol = kSymmetryTolerance);

enum class NonlinearityKind { Kerr, Saturable, Custom };

std::string to_string(NonlinearityKind kind);
NonlinearityKind parse_nonlinearity_kind(const std::string& name);

/// v(x, s) with s = |phi(x)|^2; v(x, 0) = 0 for every model.
///
/// The linear lattice potential V_L enters only through the local value vl.
struct NonlinearityModel {
  NonlinearityKind kind = NonlinearityKind::Kerr;
  double K0 = 1.0;
  double background = 1.0;

  // Custom models supply v and its two Taylor coefficients in s.
  std::function<double(double vl, double s)> custom_v;
  std::function<double(double vl)> custom_K;
  std::function<double(double vl)> custom_M;

  static NonlinearityModel kerr(double K0);
  static NonlinearityModel saturable(double K0, double background = 1.0);

  double value(double vl, double s) const;
  double K_coefficient(double vl) const;
  double M_coefficient(double vl) const;
};

/// Taylor coefficients of v in |phi|^2 sampled on a grid.
struct ExpansionFields {
  std::vector<double> K_field;
  std::vector<double> M_field;
};

/// Throws DomainError when a saturable denominator is not positive on the grid.
ExpansionFields expand_coefficients(const NonlinearityModel& model, std::span<const double> vl);

/// Exact v at every sample; throws DomainError for a negative density.
std::vector<double> evaluate_v(const NonlinearityModel& model, std::span<const double> vl,
                               std::span<const double> density);

}  // namespace diracnls
