#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "diracnls/fields.hpp"
#include "diracnls/lattice.hpp"
#include "diracnls/nonlinearity.hpp"

namespace diracnls {

/// Eigenvalue of the rotation operator labelling a symmetry class.
enum class SymmetryClass { One, Omega, OmegaBar };

cd class_value(SymmetryClass c);
std::string to_string(SymmetryClass c);

/// Diagonal |K + G_m|^2 plus the potential's Fourier convolution matrix.
Eigen::MatrixXcd build_hamiltonian(const LatticeBasis& lattice, const IndexSet& set,
                                   const HoneycombPotential& potential);
/// Same with the potential's amplitude replaced by epsilon_V.
Eigen::MatrixXcd build_hamiltonian(const LatticeBasis& lattice, const IndexSet& set,
                                   const HoneycombPotential& potential, double epsilon_V);

/// Matrix of apply_rotation in the coefficient basis.
Eigen::MatrixXcd rotation_matrix(const IndexSet& set);

struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  /// ||H v - lambda v|| per pair.
  Eigen::VectorXd residuals;
};

/// Dense Hermitian eigendecomposition, eigenvalues ascending.
Spectrum solve_spectrum(const Eigen::MatrixXcd& H);

/// 1e-8 * max |E|
double default_degeneracy_tolerance(const Eigen::VectorXd& eigenvalues);

struct Cluster {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Spectrum whose degenerate clusters have been rotated into symmetry-adapted vectors.
struct ClassifiedSpectrum {
  std::shared_ptr<const IndexSet> set;
  Eigen::MatrixXcd hamiltonian;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd residuals;
  std::vector<SymmetryClass> classes;
  /// <v, R v> for each adapted vector.
  std::vector<cd> rotation_eigenvalues;
  std::vector<Cluster> clusters;
  double tolerance = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  BlochField field(std::size_t n) const;
};

/// Throws SymmetryError when a rotation eigenvalue is farther than 1e-6 from every cube root of unity.
ClassifiedSpectrum classify_clusters(std::shared_ptr<const IndexSet> set, const Eigen::MatrixXcd& H,
                                     const Spectrum& spectrum, double tol_degeneracy = 0.0);

/// How the Dirac pair phase was pinned.
struct GaugeRecord {
  FourierIndex anchor;
  /// Extra phase applied to phi_a after the anchor convention.
  double gamma = 0.0;
  std::string convention() const;
};

/// Classified spectrum with the distinguished degenerate pair at E0.
///
/// Columns 0 and 1 of vectors() are phi_a (class omega) and phi_b = conj_invert(phi_a).
class SpectralBasis {
 public:
  explicit SpectralBasis(ClassifiedSpectrum spectrum);

  const std::shared_ptr<const IndexSet>& index_set_ptr() const { return spectrum_.set; }
  const IndexSet& index_set() const { return *spectrum_.set; }
  const Eigen::MatrixXcd& hamiltonian() const { return spectrum_.hamiltonian; }
  const Eigen::VectorXd& eigenvalues() const { return spectrum_.eigenvalues; }
  const Eigen::MatrixXcd& vectors() const { return spectrum_.vectors; }
  const std::vector<SymmetryClass>& classes() const { return spectrum_.classes; }
  const ClassifiedSpectrum& spectrum() const { return spectrum_; }
  std::size_t size() const { return spectrum_.size(); }
  BlochField eigenfield(std::size_t n) const { return spectrum_.field(n); }

  const BlochField& phi_a() const { return phi_a_; }
  const BlochField& phi_b() const { return phi_b_; }
  double E0() const { return E0_; }
  double degeneracy_gap() const { return gap_; }
  const GaugeRecord& gauge() const { return gauge_; }

  /// Copy with phi_a multiplied by exp(i gamma) and phi_b re-derived from it.
  SpectralBasis with_gauge(double gamma) const;

  /// H applied to a field through the stored matrix.
  BlochField apply_hamiltonian(const BlochField& f) const;

 private:
  void set_pair(const BlochField& phi_a);

  ClassifiedSpectrum spectrum_;
  BlochField phi_a_;
  BlochField phi_b_;
  double E0_ = 0.0;
  double gap_ = 0.0;
  GaugeRecord gauge_;
};

/// Throws DegeneracyError unless the lowest cluster has size 2 and is well separated.
SpectralBasis select_dirac_pair(ClassifiedSpectrum spectrum);

SpectralBasis classify_and_adapt(std::shared_ptr<const IndexSet> set, const Eigen::MatrixXcd& H,
                                 const Spectrum& spectrum, double tol_degeneracy = 0.0);

/// sum over non-Dirac n of phi_n <phi_n, f> / (E_n - E0 - shift).
/// Throws StabilityError unless |shift| < gap / 2.
BlochField resolvent_apply(const SpectralBasis& basis, const BlochField& f, double shift);

BlochField project_parallel(const SpectralBasis& basis, const BlochField& f);
BlochField project_perp(const SpectralBasis& basis, const BlochField& f);

}  // namespace diracnls
