#include "diracnls/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "diracnls/errors.hpp"

namespace diracnls {

using std::numbers::pi;

ParameterPair ParameterPair::equator(double beta) {
  const double s = std::sqrt(0.5);
  return {s, std::polar(s, beta)};
}

ParameterPair ParameterPair::from_angles(double theta, double phase) {
  return {std::cos(theta), std::polar(std::sin(theta), phase)};
}

ParameterPair ParameterPair::canonical() const {
  const cd ref = std::abs(a) > 0.0 ? a : b;
  if (std::abs(ref) == 0.0) return *this;
  const cd rot = std::conj(ref) / std::abs(ref);
  ParameterPair out{a * rot, b * rot};
  if (std::abs(a) > 0.0) out.a = std::abs(a);
  else out.b = std::abs(b);
  return out;
}

double ParameterPair::beta() const {
  if (std::abs(a) == 0.0 || std::abs(b) == 0.0) return 0.0;
  return wrap_angle(std::arg(b) - std::arg(a));
}

double ParameterPair::theta() const { return std::atan2(std::abs(b), std::abs(a)); }

double wrap_angle(double x) {
  double y = std::fmod(x + pi, 2.0 * pi);
  if (y < 0.0) y += 2.0 * pi;
  return y - pi;
}

QuarticIntegrals quartic_integrals(const RealGrid& grid, const BlochField& phi_a, const BlochField& phi_b,
                                   std::span<const double> K_field, double tol) {
  if (K_field.size() != grid.num_points()) throw StructuralError("quartic_integrals: K field size mismatch");
  const auto fa = grid.to_grid(phi_a);
  const auto fb = grid.to_grid(phi_b);
  std::vector<cd> ia(fa.size()), ib(fa.size()), iab(fa.size());
  for (std::size_t p = 0; p < fa.size(); ++p) {
    const double da = std::norm(fa[p]);
    const double db = std::norm(fb[p]);
    ia[p] = K_field[p] * da * da;
    ib[p] = K_field[p] * db * db;
    iab[p] = K_field[p] * da * db;
  }
  QuarticIntegrals out;
  out.I_a = grid.integrate(ia);
  out.I_b = grid.integrate(ib);
  out.I_int_complex = grid.integrate(iab);
  out.I_one = 0.5 * (out.I_a + out.I_b).real();
  out.I_int = out.I_int_complex.real();
  const double scale = std::max(std::abs(out.I_a), std::abs(out.I_b));
  if (std::abs(out.I_a - out.I_b) > tol * scale)
    throw SymmetryError("quartic integrals of the Dirac pair differ: " + std::to_string(std::abs(out.I_a - out.I_b)));
  return out;
}

QuarticIntegrals quartic_integrals(const RealGrid& grid, const SpectralBasis& basis,
                                   std::span<const double> K_field, double tol) {
  return quartic_integrals(grid, basis.phi_a(), basis.phi_b(), K_field, tol);
}

T2Result t2_sum(const RealGrid& grid, const SpectralBasis& basis, std::span<const double> K_field,
                bool restrict_to_class_one) {
  if (K_field.size() != grid.num_points()) throw StructuralError("t2_sum: K field size mismatch");
  const auto fa = grid.to_grid(basis.phi_a());
  const auto fb = grid.to_grid(basis.phi_b());
  std::vector<cd> g(fa.size()), h(fa.size());
  for (std::size_t p = 0; p < fa.size(); ++p) {
    g[p] = K_field[p] * fa[p] * fa[p] * std::conj(fb[p]);
    h[p] = K_field[p] * std::conj(fa[p]) * fb[p] * fb[p];
  }
  // int K conj(a)^2 b phi_n = <G, phi_n> and int K conj(a) b^2 conj(phi_n) = <phi_n, H>
  const Eigen::VectorXcd G = grid.from_grid(g).coeffs();
  const Eigen::VectorXcd Hc = grid.from_grid(h).coeffs();
  const Eigen::VectorXcd first = basis.vectors().adjoint() * G;
  const Eigen::VectorXcd second = basis.vectors().adjoint() * Hc;

  T2Result out;
  for (std::size_t n = 2; n < basis.size(); ++n) {
    const auto cls = basis.classes()[n];
    if (restrict_to_class_one && cls != SymmetryClass::One) continue;
    T2Term term;
    term.n = n;
    term.energy = basis.eigenvalues()[static_cast<Eigen::Index>(n)];
    term.cls = cls;
    term.first = std::conj(first[static_cast<Eigen::Index>(n)]);
    term.second = second[static_cast<Eigen::Index>(n)];
    term.contribution = -term.first * term.second / (term.energy - basis.E0());
    out.value += term.contribution;
    out.terms.push_back(term);
  }
  return out;
}

double PerturbationReport::leading_energy(const ParameterPair& pair) const {
  return std::norm(pair.a) * I_one + 2.0 * std::norm(pair.b) * I_int;
}

std::vector<double> PerturbationReport::predicted_roots() const {
  std::vector<double> roots;
  const double phase = std::arg(I_c_int);
  for (int n = 0; n < 6; ++n) roots.push_back(wrap_angle((n * pi - phase) / 3.0));
  std::sort(roots.begin(), roots.end());
  return roots;
}

PerturbationReport complex_interaction(const RealGrid& grid, const SpectralBasis& basis,
                                       std::span<const double> K_field, std::span<const double> M_field) {
  if (M_field.size() != grid.num_points()) throw StructuralError("complex_interaction: M field size mismatch");
  PerturbationReport r;
  const auto q = quartic_integrals(grid, basis, K_field);
  r.I_one = q.I_one;
  r.I_int = q.I_int;
  r.I_a_minus_I_b = std::abs(q.I_a - q.I_b);
  r.I_one_imag = 0.5 * (q.I_a + q.I_b).imag();
  r.I_int_imag = q.I_int_complex.imag();

  const auto t2 = t2_sum(grid, basis, K_field, true);
  r.T2 = t2.value;
  r.n_terms_T2 = static_cast<int>(t2.terms.size());

  const auto fa = grid.to_grid(basis.phi_a());
  const auto fb = grid.to_grid(basis.phi_b());
  std::vector<cd> m(fa.size());
  for (std::size_t p = 0; p < fa.size(); ++p) {
    const cd w = std::conj(fa[p]) * fb[p];
    m[p] = M_field[p] * w * w * w;
  }
  r.M_integral = grid.integrate(m);
  r.I_c_int = 3.0 * r.T2 + r.M_integral;
  r.theta_pred = std::arg(r.I_c_int) / 3.0;
  r.nondegeneracy = std::abs(r.I_one - 2.0 * r.I_int);
  r.nondegeneracy_warning = r.nondegeneracy < kHypothesisThreshold;
  r.interaction_warning = std::abs(r.I_c_int) < kHypothesisThreshold;
  r.gauge = basis.gauge();
  return r;
}

double landscape_value(const PerturbationReport& report, const ParameterPair& pair) {
  return std::abs(pair.a * pair.b * (std::norm(pair.b) - std::norm(pair.a)) * (report.I_one - 2.0 * report.I_int));
}

std::vector<LandscapePoint> necessary_condition_landscape(const PerturbationReport& report, int n_theta,
                                                          int n_phase) {
  if (n_theta < 2 || n_phase < 1) throw DomainError("landscape grid needs n_theta >= 2 and n_phase >= 1");
  std::vector<LandscapePoint> out;
  out.reserve(static_cast<std::size_t>(n_theta * n_phase));
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 0.5 * pi * i / (n_theta - 1);
    for (int j = 0; j < n_phase; ++j) {
      const double phase = 2.0 * pi * j / n_phase;
      out.push_back({theta, phase, landscape_value(report, ParameterPair::from_angles(theta, phase))});
    }
  }
  return out;
}

}  // namespace diracnls
