#include "diracnls/linear_spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "diracnls/errors.hpp"

namespace diracnls {

namespace {

const cd kOmega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
constexpr std::array kClasses{SymmetryClass::One, SymmetryClass::Omega, SymmetryClass::OmegaBar};
constexpr double kRotationTolerance = 1e-6;

SymmetryClass nearest_class(cd lambda, double& distance) {
  SymmetryClass best = SymmetryClass::One;
  distance = INFINITY;
  for (auto c : kClasses) {
    const double d = std::abs(lambda - class_value(c));
    if (d < distance) {
      distance = d;
      best = c;
    }
  }
  return best;
}

Eigen::MatrixXcd rotate_rows(const IndexSet& set, const Eigen::MatrixXcd& Q) {
  Eigen::MatrixXcd out(Q.rows(), Q.cols());
  const auto& perm = set.rotation_permutation();
  for (std::size_t i = 0; i < perm.size(); ++i)
    out.row(static_cast<Eigen::Index>(perm[i])) = Q.row(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace

cd class_value(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::One: return 1.0;
    case SymmetryClass::Omega: return kOmega;
    case SymmetryClass::OmegaBar: return std::conj(kOmega);
  }
  return 1.0;
}

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::One: return "1";
    case SymmetryClass::Omega: return "omega";
    case SymmetryClass::OmegaBar: return "omega_bar";
  }
  return "?";
}

Eigen::MatrixXcd build_hamiltonian(const LatticeBasis& lattice, const IndexSet& set,
                                   const HoneycombPotential& potential) {
  const auto D = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(D, D);
  for (Eigen::Index i = 0; i < D; ++i) {
    const auto mi = set[static_cast<std::size_t>(i)];
    H(i, i) = norm2(lattice.momentum(mi));
    for (Eigen::Index j = 0; j < D; ++j) H(i, j) += potential.scaled_coefficient(mi - set[static_cast<std::size_t>(j)]);
  }
  return H;
}

Eigen::MatrixXcd build_hamiltonian(const LatticeBasis& lattice, const IndexSet& set,
                                   const HoneycombPotential& potential, double epsilon_V) {
  return build_hamiltonian(lattice, set, potential.scaled(epsilon_V));
}

Eigen::MatrixXcd rotation_matrix(const IndexSet& set) {
  const auto D = static_cast<Eigen::Index>(set.size());
  return rotate_rows(set, Eigen::MatrixXcd::Identity(D, D));
}

Spectrum solve_spectrum(const Eigen::MatrixXcd& H) {
  if (H.rows() != H.cols()) throw StructuralError("solve_spectrum: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("solve_spectrum: Hermitian eigensolver did not converge", static_cast<int>(H.rows()),
                           static_cast<double>(solver.info()));
  Spectrum out{solver.eigenvalues(), solver.eigenvectors(), Eigen::VectorXd(H.rows())};
  for (Eigen::Index n = 0; n < H.rows(); ++n)
    out.residuals[n] = (H * out.eigenvectors.col(n) - out.eigenvalues[n] * out.eigenvectors.col(n)).norm();
  return out;
}

double default_degeneracy_tolerance(const Eigen::VectorXd& eigenvalues) {
  return 1e-8 * (eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0);
}

BlochField ClassifiedSpectrum::field(std::size_t n) const {
  return BlochField(set, vectors.col(static_cast<Eigen::Index>(n)));
}

ClassifiedSpectrum classify_clusters(std::shared_ptr<const IndexSet> set, const Eigen::MatrixXcd& H,
                                     const Spectrum& spectrum, double tol_degeneracy) {
  const auto D = spectrum.eigenvalues.size();
  if (static_cast<std::size_t>(D) != set->size() || H.rows() != D)
    throw StructuralError("classify_clusters: spectrum does not match the index set");

  ClassifiedSpectrum out;
  out.set = set;
  out.hamiltonian = H;
  out.tolerance = tol_degeneracy > 0.0 ? tol_degeneracy : default_degeneracy_tolerance(spectrum.eigenvalues);
  out.eigenvalues = spectrum.eigenvalues;
  out.vectors = spectrum.eigenvectors;
  out.residuals.resize(D);
  out.classes.resize(static_cast<std::size_t>(D));
  out.rotation_eigenvalues.resize(static_cast<std::size_t>(D));

  std::size_t begin = 0;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(D); ++n) {
    if (n < static_cast<std::size_t>(D) &&
        spectrum.eigenvalues[static_cast<Eigen::Index>(n)] - spectrum.eigenvalues[static_cast<Eigen::Index>(n - 1)] <=
            out.tolerance)
      continue;
    out.clusters.push_back({begin, n});
    begin = n;
  }

  for (const auto& cl : out.clusters) {
    const auto b = static_cast<Eigen::Index>(cl.begin);
    const auto k = static_cast<Eigen::Index>(cl.size());
    const Eigen::MatrixXcd Q = out.vectors.middleCols(b, k);
    const Eigen::MatrixXcd Rk = Q.adjoint() * rotate_rows(*set, Q);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> rot(Rk, false);
    for (Eigen::Index i = 0; i < k; ++i) {
      double distance = 0.0;
      nearest_class(rot.eigenvalues()[i], distance);
      if (distance > kRotationTolerance)
        throw SymmetryError("rotation eigenvalue " + std::to_string(std::abs(rot.eigenvalues()[i])) +
                            " exp(i " + std::to_string(std::arg(rot.eigenvalues()[i])) +
                            ") is not a cube root of unity");
    }

    Eigen::MatrixXcd W(k, 0);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(k, k);
    const Eigen::MatrixXcd Rk2 = Rk * Rk;
    for (auto c : kClasses) {
      const cd cb = std::conj(class_value(c));
      Eigen::MatrixXcd P = (I + cb * Rk + cb * cb * Rk2) / 3.0;
      P = 0.5 * (P + P.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> proj(P);
      Eigen::MatrixXcd Wc(k, 0);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (proj.eigenvalues()[i] <= 0.5) continue;
        Wc.conservativeResize(k, Wc.cols() + 1);
        Wc.col(Wc.cols() - 1) = proj.eigenvectors().col(i);
      }
      if (Wc.cols() == 0) continue;
      // Near-degenerate members of one class are separated again by H.
      const Eigen::MatrixXcd Qc = Q * Wc;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> block(Qc.adjoint() * H * Qc);
      Wc = (Wc * block.eigenvectors()).eval();
      W.conservativeResize(k, W.cols() + Wc.cols());
      W.rightCols(Wc.cols()) = Wc;
    }
    if (W.cols() != k)
      throw SymmetryError("symmetry adaptation produced " + std::to_string(W.cols()) + " vectors for a cluster of " +
                          std::to_string(k));

    out.vectors.middleCols(b, k) = Q * W;
  }

  const Eigen::MatrixXcd HV0 = H * out.vectors;
  for (const auto& cl : out.clusters) {
    std::vector<Eigen::Index> order(cl.size());
    std::vector<double> rq(cl.size());
    for (std::size_t i = 0; i < cl.size(); ++i) {
      const auto n = static_cast<Eigen::Index>(cl.begin + i);
      order[i] = n;
      rq[i] = out.vectors.col(n).dot(HV0.col(n)).real();
    }
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return rq[static_cast<std::size_t>(x) - cl.begin] < rq[static_cast<std::size_t>(y) - cl.begin];
    });
    const Eigen::MatrixXcd block = out.vectors.middleCols(static_cast<Eigen::Index>(cl.begin),
                                                          static_cast<Eigen::Index>(cl.size()));
    for (std::size_t i = 0; i < cl.size(); ++i)
      out.vectors.col(static_cast<Eigen::Index>(cl.begin + i)) = block.col(order[i] - static_cast<Eigen::Index>(cl.begin));
  }

  {
    // exact class projection in the full space
    const Eigen::MatrixXcd R1 = rotate_rows(*set, out.vectors);
    const Eigen::MatrixXcd R2 = rotate_rows(*set, R1);
    for (Eigen::Index n = 0; n < D; ++n) {
      double distance = 0.0;
      const cd c = class_value(nearest_class(out.vectors.col(n).dot(R1.col(n)), distance));
      const Eigen::VectorXcd p = (out.vectors.col(n) + std::conj(c) * R1.col(n) + c * R2.col(n)) / 3.0;
      out.vectors.col(n) = p.normalized();
    }
  }

  const Eigen::MatrixXcd HV = H * out.vectors;
  const Eigen::MatrixXcd RV = rotate_rows(*set, out.vectors);
  for (Eigen::Index n = 0; n < D; ++n) {
    const auto v = out.vectors.col(n);
    const double lambda = v.dot(HV.col(n)).real();
    out.eigenvalues[n] = lambda;
    out.residuals[n] = (HV.col(n) - lambda * v).norm();
    const cd r = v.dot(RV.col(n));
    double distance = 0.0;
    const auto cls = nearest_class(r, distance);
    if (distance > kRotationTolerance)
      throw SymmetryError("adapted vector " + std::to_string(n) + " is not a rotation eigenvector");
    out.classes[static_cast<std::size_t>(n)] = cls;
    out.rotation_eigenvalues[static_cast<std::size_t>(n)] = r;
  }
  return out;
}

std::string GaugeRecord::convention() const {
  return "phi_a largest coefficient real positive at (" + std::to_string(anchor.m1) + "," +
         std::to_string(anchor.m2) + "); phi_b = conj_invert(phi_a)";
}

SpectralBasis::SpectralBasis(ClassifiedSpectrum spectrum) : spectrum_(std::move(spectrum)) {
  if (spectrum_.clusters.empty()) throw DegeneracyError("empty spectrum", 0);
  const auto& lowest = spectrum_.clusters.front();
  if (lowest.size() != 2)
    throw DegeneracyError("lowest eigenvalue has multiplicity " + std::to_string(lowest.size()) + ", expected 2",
                          static_cast<int>(lowest.size()));
  const double E2 = spectrum_.eigenvalues[2];
  if (E2 - spectrum_.eigenvalues[1] <= 10.0 * spectrum_.tolerance)
    throw DegeneracyError("third eigenvalue is not separated from the lowest pair", 3);

  std::size_t ia = 2;
  for (std::size_t n = 0; n < 2; ++n)
    if (spectrum_.classes[n] == SymmetryClass::Omega) ia = n;
  if (ia == 2 || spectrum_.classes[1 - ia] != SymmetryClass::OmegaBar)
    throw DegeneracyError("lowest pair is not an (omega, omega_bar) doublet", 2);

  BlochField a = spectrum_.field(ia);
  const Eigen::VectorXd mags = a.coeffs().cwiseAbs();
  const double peak = mags.maxCoeff();
  Eigen::Index anchor = 0;
  while (mags[anchor] < peak * (1.0 - 1e-8)) ++anchor;
  const cd c = a.coeffs()[anchor];
  a *= std::conj(c) / std::abs(c);
  gauge_.anchor = index_set()[static_cast<std::size_t>(anchor)];

  const BlochField b = conj_invert(a);
  const Eigen::MatrixXcd Q = spectrum_.vectors.leftCols(2);
  const double leak = (b.coeffs() - Q * (Q.adjoint() * b.coeffs())).norm();
  if (leak > 1e-8) throw SymmetryError("conj_invert(phi_a) leaves the lowest eigenspace");

  set_pair(a);
  gap_ = E2 - E0_;
}

void SpectralBasis::set_pair(const BlochField& phi_a) {
  phi_a_ = phi_a;
  phi_b_ = conj_invert(phi_a);
  spectrum_.vectors.col(0) = phi_a_.coeffs();
  spectrum_.vectors.col(1) = phi_b_.coeffs();
  spectrum_.classes[0] = SymmetryClass::Omega;
  spectrum_.classes[1] = SymmetryClass::OmegaBar;
  const auto& H = spectrum_.hamiltonian;
  spectrum_.eigenvalues[0] = phi_a_.coeffs().dot(H * phi_a_.coeffs()).real();
  spectrum_.eigenvalues[1] = phi_b_.coeffs().dot(H * phi_b_.coeffs()).real();
  for (Eigen::Index n = 0; n < 2; ++n) {
    const auto v = spectrum_.vectors.col(n);
    spectrum_.residuals[n] = (H * v - spectrum_.eigenvalues[n] * v).norm();
    spectrum_.rotation_eigenvalues[static_cast<std::size_t>(n)] = v.dot(rotate_rows(index_set(), v).col(0));
  }
  E0_ = 0.5 * (spectrum_.eigenvalues[0] + spectrum_.eigenvalues[1]);
}

SpectralBasis SpectralBasis::with_gauge(double gamma) const {
  SpectralBasis out = *this;
  out.set_pair(std::polar(1.0, gamma) * phi_a_);
  out.spectrum_.eigenvalues.head(2) = spectrum_.eigenvalues.head(2);
  out.spectrum_.residuals.head(2) = spectrum_.residuals.head(2);
  out.E0_ = E0_;
  out.gauge_.gamma += gamma;
  return out;
}

BlochField SpectralBasis::apply_hamiltonian(const BlochField& f) const {
  if (!(f.index_set_ptr() == index_set_ptr() || f.index_set() == index_set()))
    throw StructuralError("apply_hamiltonian: field index set differs from the basis");
  return BlochField(index_set_ptr(), spectrum_.hamiltonian * f.coeffs());
}

SpectralBasis select_dirac_pair(ClassifiedSpectrum spectrum) { return SpectralBasis(std::move(spectrum)); }

SpectralBasis classify_and_adapt(std::shared_ptr<const IndexSet> set, const Eigen::MatrixXcd& H,
                                 const Spectrum& spectrum, double tol_degeneracy) {
  return select_dirac_pair(classify_clusters(std::move(set), H, spectrum, tol_degeneracy));
}

BlochField resolvent_apply(const SpectralBasis& basis, const BlochField& f, double shift) {
  if (!(std::abs(shift) < 0.5 * basis.degeneracy_gap()))
    throw StabilityError("resolvent shift " + std::to_string(shift) + " outside the window |shift| < " +
                         std::to_string(0.5 * basis.degeneracy_gap()));
  if (!(f.index_set_ptr() == basis.index_set_ptr() || f.index_set() == basis.index_set()))
    throw StructuralError("resolvent_apply: field index set differs from the basis");
  const auto& V = basis.vectors();
  Eigen::VectorXcd y = V.adjoint() * f.coeffs();
  y[0] = 0.0;
  y[1] = 0.0;
  const double E0 = basis.E0();
  for (Eigen::Index n = 2; n < y.size(); ++n) y[n] /= basis.eigenvalues()[n] - E0 - shift;
  return BlochField(basis.index_set_ptr(), V * y);
}

BlochField project_parallel(const SpectralBasis& basis, const BlochField& f) {
  return inner_product(basis.phi_a(), f) * basis.phi_a() + inner_product(basis.phi_b(), f) * basis.phi_b();
}

BlochField project_perp(const SpectralBasis& basis, const BlochField& f) { return f - project_parallel(basis, f); }

}  // namespace diracnls
