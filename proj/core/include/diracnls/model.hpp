#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "diracnls/fields.hpp"
#include "diracnls/lattice.hpp"
#include "diracnls/linear_spectrum.hpp"
#include "diracnls/nonlinearity.hpp"

namespace diracnls {

struct ModelParameters {
  /// Unit-amplitude lattice potential; epsilon_V scales it.
  HoneycombPotential potential = standard_potential();
  double epsilon_V = 0.5;
  NonlinearityModel nonlinearity = NonlinearityModel::kerr(1.0);
  int cutoff = 6;
  /// 0 selects the dealiased default.
  int grid_resolution = 0;
  /// 0 selects 1e-8 * max |E|.
  double degeneracy_tol = 0.0;
};

/// Everything up to the classified linear spectrum; no Dirac pair is required.
struct LinearProblem {
  ModelParameters params;
  LatticeBasis lattice;
  std::shared_ptr<const IndexSet> set;
  std::shared_ptr<const RealGrid> grid;
  /// Potential scaled by epsilon_V.
  HoneycombPotential potential;
  std::vector<double> vl;
  SymmetryReport potential_symmetry;
  Eigen::MatrixXcd hamiltonian;
  Spectrum spectrum;
  ClassifiedSpectrum classified;
};

/// Throws SymmetryError when the potential is not honeycomb symmetric.
LinearProblem build_linear_problem(const ModelParameters& params);

/// Linear problem, nonlinearity samples and the Dirac-pair basis bundled together.
class Workspace {
 public:
  explicit Workspace(const ModelParameters& params);
  explicit Workspace(LinearProblem problem);

  const ModelParameters& parameters() const { return params_; }
  const LatticeBasis& lattice() const { return lattice_; }
  const std::shared_ptr<const IndexSet>& index_set_ptr() const { return set_; }
  const IndexSet& index_set() const { return *set_; }
  const RealGrid& grid() const { return *grid_; }
  const HoneycombPotential& potential() const { return potential_; }
  const std::vector<double>& vl() const { return vl_; }
  const NonlinearityModel& model() const { return params_.nonlinearity; }
  const ExpansionFields& expansion() const { return expansion_; }
  const SpectralBasis& basis() const { return basis_; }

  /// Copy whose Dirac pair carries the extra gauge phase gamma.
  Workspace with_gauge(double gamma) const;

  /// v(|phi|^2) sampled on the grid.
  std::vector<double> potential_of(const BlochField& phi) const;
  std::vector<double> potential_of_samples(std::span<const cd> samples) const;

 private:
  ModelParameters params_;
  LatticeBasis lattice_;
  std::shared_ptr<const IndexSet> set_;
  std::shared_ptr<const RealGrid> grid_;
  HoneycombPotential potential_;
  std::vector<double> vl_;
  ExpansionFields expansion_;
  SpectralBasis basis_;
};

}  // namespace diracnls
