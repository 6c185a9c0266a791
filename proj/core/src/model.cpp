#include "diracnls/model.hpp"

#include "diracnls/errors.hpp"

namespace diracnls {

LinearProblem build_linear_problem(const ModelParameters& params) {
  LinearProblem p;
  p.params = params;
  p.lattice = LatticeBasis::honeycomb();
  if (params.cutoff < 1) throw DomainError("cutoff must be at least 1");
  p.set = std::make_shared<const IndexSet>(build_index_set(params.cutoff));
  p.grid = std::make_shared<const RealGrid>(p.set, p.lattice, params.grid_resolution);
  p.potential = params.potential.scaled(params.epsilon_V);
  p.potential_symmetry = validate_honeycomb(params.potential);
  if (!p.potential_symmetry.passed)
    throw SymmetryError("potential fails the honeycomb checks (realness " +
                        std::to_string(p.potential_symmetry.realness) + ", inversion " +
                        std::to_string(p.potential_symmetry.inversion) + ", rotation " +
                        std::to_string(p.potential_symmetry.rotation) + ")");
  p.vl = p.potential.sample(*p.grid);
  p.hamiltonian = build_hamiltonian(p.lattice, *p.set, p.potential);
  p.spectrum = solve_spectrum(p.hamiltonian);
  p.classified = classify_clusters(p.set, p.hamiltonian, p.spectrum, params.degeneracy_tol);
  return p;
}

Workspace::Workspace(const ModelParameters& params) : Workspace(build_linear_problem(params)) {}

Workspace::Workspace(LinearProblem problem)
    : params_(std::move(problem.params)),
      lattice_(problem.lattice),
      set_(std::move(problem.set)),
      grid_(std::move(problem.grid)),
      potential_(std::move(problem.potential)),
      vl_(std::move(problem.vl)),
      expansion_(expand_coefficients(params_.nonlinearity, vl_)),
      basis_(select_dirac_pair(std::move(problem.classified))) {
  // Effective linear part V_L + v(x, 0) and the Taylor fields must stay honeycomb symmetric.
  std::vector<double> effective(vl_.size());
  for (std::size_t p = 0; p < vl_.size(); ++p) effective[p] = vl_[p] + params_.nonlinearity.value(vl_[p], 0.0);
  for (const auto* samples : {&effective, &expansion_.K_field, &expansion_.M_field}) {
    const auto report = validate_honeycomb(*grid_, *samples, 1e-9);
    if (!report.passed) throw SymmetryError("nonlinearity breaks the honeycomb symmetry on the grid");
  }
}

Workspace Workspace::with_gauge(double gamma) const {
  Workspace out = *this;
  out.basis_ = basis_.with_gauge(gamma);
  return out;
}

std::vector<double> Workspace::potential_of_samples(std::span<const cd> samples) const {
  return evaluate_v(params_.nonlinearity, vl_, density(samples));
}

std::vector<double> Workspace::potential_of(const BlochField& phi) const {
  return potential_of_samples(grid_->to_grid(phi));
}

}  // namespace diracnls
