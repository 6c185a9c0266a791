#include "diracnls/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace diracnls {

using std::numbers::pi;

std::string to_string(ShiftMode mode) { return mode == ShiftMode::Zero ? "zero" : "real-E1"; }

ShiftMode parse_shift_mode(const std::string& name) {
  if (name == "zero") return ShiftMode::Zero;
  if (name == "real-E1") return ShiftMode::RealE1;
  throw DomainError("unknown resolvent shift mode '" + name + "'");
}

std::string to_string(BifurcationStatus status) {
  return status == BifurcationStatus::Ok ? "ok" : "prediction-void";
}

void BootstrapConfig::validate() const {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
  for (double t : {inner_tol, outer_tol, pseudo_tol, bisection_tol})
    if (!(t > std::numeric_limits<double>::epsilon())) throw DomainError("tolerances must exceed machine epsilon");
  if (max_inner < 1 || max_outer < 1) throw DomainError("iteration caps must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
  if (beta_samples < 12) throw DomainError("beta_samples must be at least 12");
}

std::vector<double> ModeResult::contraction_ratios() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < outer_steps.size(); ++i)
    if (outer_steps[i - 1] > 0.0) out.push_back(outer_steps[i] / outer_steps[i - 1]);
  return out;
}

struct BootstrapSolver::Frozen {
  ParameterPair pair;
  double epsilon = 0.0;
  std::vector<double> v;
  BlochField parallel;
  std::vector<cd> parallel_grid;
  bool use_a = true;
};

PerturbationReport compute_report(const Workspace& ws) {
  return complex_interaction(ws.grid(), ws.basis(), ws.expansion().K_field, ws.expansion().M_field);
}

BootstrapSolver::BootstrapSolver(std::shared_ptr<const Workspace> workspace, PerturbationReport report)
    : ws_(std::move(workspace)), report_(std::move(report)) {}

BootstrapSolver::BootstrapSolver(std::shared_ptr<const Workspace> workspace)
    : BootstrapSolver(workspace, compute_report(*workspace)) {}

BootstrapSolver::Frozen BootstrapSolver::freeze(const BlochField& phi_t, const ParameterPair& pair,
                                                double epsilon) const {
  const auto& basis = ws_->basis();
  Frozen fz;
  fz.pair = pair;
  fz.epsilon = epsilon;
  fz.v = ws_->potential_of(phi_t);
  fz.parallel = (epsilon * pair.a) * basis.phi_a() + (epsilon * pair.b) * basis.phi_b();
  fz.parallel_grid = ws_->grid().to_grid(fz.parallel);
  // ties (the equator) go to phi_a
  fz.use_a = std::abs(pair.a) >= std::abs(pair.b) * (1.0 - 1e-12);
  return fz;
}

namespace {

// v (eps u + c), truncated to the index set
BlochField apply_frozen(const RealGrid& grid, const std::vector<double>& v, const std::vector<cd>& parallel_grid,
                        const BlochField& c) {
  auto samples = grid.to_grid(c);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] = v[p] * (samples[p] + parallel_grid[p]);
  return grid.from_grid(samples);
}

}  // namespace

CorrectionResult BootstrapSolver::solve_correction(const Frozen& fz, double E1_real, const BootstrapConfig& config,
                                                   const BlochField& initial) const {
  const auto& basis = ws_->basis();
  const auto& grid = ws_->grid();
  const double floor = 1e-3 * config.outer_tol * std::max(fz.epsilon, 1e-300);
  CorrectionResult out{project_perp(basis, initial), 0, 0.0};
  double previous = -1.0;
  for (int k = 1; k <= config.max_inner; ++k) {
    BlochField rhs = -1.0 * project_perp(basis, apply_frozen(grid, fz.v, fz.parallel_grid, out.field));
    BlochField next = config.shift_mode == ShiftMode::RealE1
                          ? resolvent_apply(basis, rhs, E1_real)
                          : resolvent_apply(basis, rhs + E1_real * out.field, 0.0);
    next = project_perp(basis, next);
    const double step = (next - out.field).norm();
    out.field = std::move(next);
    out.iterations = k;
    if (previous > 0.0) out.contraction = std::max(out.contraction, step / previous);
    if (step <= std::max(config.inner_tol * out.field.norm(), floor)) return out;
    if (previous > 0.0 && step >= previous)
      throw ConvergenceError("orthogonal correction diverges: contraction ratio " + std::to_string(step / previous) +
                                 " >= 1 (epsilon too large)",
                             k, step / previous);
    previous = step;
  }
  throw ConvergenceError("orthogonal correction did not converge in max_inner sweeps", config.max_inner, previous);
}

cd BootstrapSolver::project_energy(const Frozen& fz, const BlochField& correction) const {
  const auto& basis = ws_->basis();
  const BlochField w = apply_frozen(ws_->grid(), fz.v, fz.parallel_grid, correction);
  if (fz.use_a) return inner_product(basis.phi_a(), w) / (fz.epsilon * fz.pair.a);
  return inner_product(basis.phi_b(), w) / (fz.epsilon * fz.pair.b);
}

std::pair<cd, CorrectionResult> BootstrapSolver::energy_fixed_point(const Frozen& fz, const BlochField& correction,
                                                                   const BootstrapConfig& config, cd E1) const {
  CorrectionResult corr{correction, 0, 0.0};
  const cd lead = report_.leading_energy(fz.pair) * fz.epsilon * fz.epsilon;
  int sweeps = 0;
  for (int k = 1; k <= config.max_inner; ++k) {
    corr = solve_correction(fz, E1.real(), config, corr.field);
    sweeps += corr.iterations;
    const cd E_new = project_energy(fz, corr.field);
    const double delta = std::abs(E_new - E1);
    E1 = (1.0 - config.damping) * E1 + config.damping * E_new;
    if (delta <= config.inner_tol * std::max(std::abs(E_new), std::abs(lead))) {
      corr.iterations = sweeps;
      E1 = E_new;
      if (std::abs(lead) > 0.0 && std::abs(E1 / lead - 1.0) > 1.0)
        throw DomainError("energy fixed point left the perturbative regime (|mu| > 1)");
      return {E1, corr};
    }
  }
  throw ConvergenceError("consistency energy did not converge in max_inner steps", config.max_inner, std::abs(E1));
}

CorrectionResult BootstrapSolver::orthogonal_correction(const BlochField& phi_t, double E1_real,
                                                        const ParameterPair& pair, const BootstrapConfig& config,
                                                        const BlochField* initial) const {
  const Frozen fz = freeze(phi_t, pair, config.epsilon);
  return solve_correction(fz, E1_real, config, initial ? *initial : BlochField(ws_->index_set_ptr()));
}

std::pair<cd, CorrectionResult> BootstrapSolver::consistency_energy(const BlochField& phi_t,
                                                                   const BlochField& correction,
                                                                   const ParameterPair& pair,
                                                                   const BootstrapConfig& config,
                                                                   std::optional<cd> initial) const {
  const Frozen fz = freeze(phi_t, pair, config.epsilon);
  const cd E1 = initial.value_or(report_.leading_energy(pair) * config.epsilon * config.epsilon);
  return energy_fixed_point(fz, correction, config, E1);
}

ModeResult BootstrapSolver::run(const ParameterPair& pair, const BootstrapConfig& config, BlochField correction,
                                std::optional<cd> E1_init) const {
  config.validate();
  if (std::abs(pair.norm() - 1.0) > 1e-12) throw DomainError("parameter pair is not normalized");
  const auto& basis = ws_->basis();
  const double eps = config.epsilon;

  ModeResult mode;
  mode.pair = pair;
  mode.epsilon = eps;
  if (eps == 0.0) {
    mode.phi = BlochField(ws_->index_set_ptr());
    mode.correction = mode.phi;
    mode.converged = true;
    mode.is_true_eigenpair = true;
    return mode;
  }

  const BlochField parallel = (eps * pair.a) * basis.phi_a() + (eps * pair.b) * basis.phi_b();
  BlochField c = project_perp(basis, correction);
  cd E1 = E1_init.value_or(report_.leading_energy(pair) * eps * eps);
  BlochField phi = parallel + c;

  for (int n = 1; n <= config.max_outer; ++n) {
    const Frozen fz = freeze(phi, pair, eps);
    auto [E_new, corr] = energy_fixed_point(fz, c, config, E1);
    E1 = E_new;
    mode.inner_iterations += corr.iterations;
    c = std::move(corr.field);
    BlochField next = parallel + c;
    const double step = (next - phi).norm();
    phi = std::move(next);
    mode.outer_steps.push_back(step);
    mode.outer_iterations = n;
    if (step <= config.outer_tol) {
      mode.converged = true;
      break;
    }
    const auto m = mode.outer_steps.size();
    if (m >= 3 && step >= mode.outer_steps[m - 2])
      throw ConvergenceError("bootstrap iteration diverges (epsilon too large)", n, step);
  }
  if (!mode.converged)
    throw ConvergenceError("bootstrap iteration did not converge in max_outer steps", config.max_outer,
                           mode.outer_steps.back());

  mode.phi = std::move(phi);
  mode.correction = std::move(c);
  mode.E_shift = E1;
  finish(mode, config);
  return mode;
}

void BootstrapSolver::finish(ModeResult& mode, const BootstrapConfig& config) const {
  const auto& basis = ws_->basis();
  const auto& grid = ws_->grid();
  mode.im_energy = mode.E_shift.imag();
  mode.residual = residual(mode.phi, basis.E0() + mode.E_shift.real());
  auto samples = grid.to_grid(mode.phi);
  const auto v = ws_->potential_of_samples(samples);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= v[p];
  const BlochField w = grid.from_grid(samples);
  mode.consistency_defect =
      mode.epsilon > 0.0
          ? std::abs(mode.pair.b * inner_product(basis.phi_a(), w) - mode.pair.a * inner_product(basis.phi_b(), w)) /
                mode.epsilon
          : 0.0;
  const double scale = std::pow(mode.epsilon, 4) * std::abs(report_.I_c_int);
  mode.is_true_eigenpair = std::abs(mode.im_energy) <= config.pseudo_tol * scale;
}

ModeResult BootstrapSolver::solve(const ParameterPair& pair, const BootstrapConfig& config,
                                  const ModeResult* warm) const {
  if (warm && warm->correction.size() == ws_->index_set().size() && warm->epsilon == config.epsilon)
    return run(pair, config, warm->correction, warm->E_shift);
  return run(pair, config, BlochField(ws_->index_set_ptr()), std::nullopt);
}

ModeResult BootstrapSolver::bootstrap_polar(bool a_pole, const BootstrapConfig& config) const {
  const auto pair = a_pole ? ParameterPair::a_pole() : ParameterPair::b_pole();
  ModeResult mode = solve(pair, config);
  if (config.epsilon == 0.0) return mode;

  // The opposite projection must cancel by rotation symmetry.
  const auto& basis = ws_->basis();
  auto samples = ws_->grid().to_grid(mode.phi);
  const auto v = ws_->potential_of_samples(samples);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= v[p];
  const BlochField w = ws_->grid().from_grid(samples);
  const cd other = inner_product(a_pole ? basis.phi_b() : basis.phi_a(), w);
  if (std::abs(other) > 1e-10 * std::pow(config.epsilon, 3))
    throw SymmetryError("second consistency integral does not cancel for a polar mode");
  if (std::abs(mode.E_shift.imag()) > 1e-10 * std::abs(mode.E_shift))
    throw SymmetryError("polar mode energy is not real");
  return mode;
}

ModeResult BootstrapSolver::bootstrap_equator(double beta, const BootstrapConfig& config,
                                              const ModeResult* warm) const {
  return solve(ParameterPair::equator(beta), config, warm);
}

double BootstrapSolver::residual(const BlochField& phi, double E) const {
  const auto& grid = ws_->grid();
  auto samples = grid.to_grid(phi);
  const auto v = ws_->potential_of_samples(samples);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= v[p];
  BlochField r = ws_->basis().apply_hamiltonian(phi) + grid.from_grid(samples);
  r -= E * phi;
  const double n = phi.norm();
  return n > 0.0 ? r.norm() / n : r.norm();
}

std::vector<CurvePoint> BootstrapSolver::scan_curve(const BootstrapConfig& config,
                                                    std::vector<ModeResult>* modes) const {
  std::vector<CurvePoint> curve;
  const ModeResult* warm = nullptr;
  ModeResult previous;
  for (int j = 0; j < config.beta_samples; ++j) {
    const double beta = -pi + 2.0 * pi * j / config.beta_samples;
    ModeResult m = bootstrap_equator(beta, config, warm);
    curve.push_back({beta, m.E_shift.imag(), m.E_shift.real()});
    previous = std::move(m);
    warm = &previous;
    if (modes) modes->push_back(previous);
  }
  return curve;
}

BifurcationResult BootstrapSolver::find_bifurcation_modes(const BootstrapConfig& config) const {
  config.validate();
  BifurcationResult result;
  result.epsilon = config.epsilon;
  result.modes.push_back(bootstrap_polar(true, config));
  result.modes.push_back(bootstrap_polar(false, config));

  std::vector<ModeResult> samples;
  result.curve = scan_curve(config, &samples);
  if (report_.prediction_void()) {
    result.status = BifurcationStatus::PredictionVoid;
    return result;
  }

  const auto n = result.curve.size();
  std::vector<std::size_t> brackets;
  for (std::size_t j = 0; j < n; ++j) {
    const double f0 = result.curve[j].im_energy;
    const double f1 = result.curve[(j + 1) % n].im_energy;
    if ((f0 < 0.0 && f1 >= 0.0) || (f0 > 0.0 && f1 <= 0.0)) brackets.push_back(j);
  }
  if (brackets.size() != 6)
    throw BifurcationCountError("expected 6 sign changes of Im E'(beta), found " + std::to_string(brackets.size()),
                                static_cast<int>(brackets.size()), result.curve);

  const double h = 2.0 * pi / static_cast<double>(n);
  const double stop = 1e-9 * std::pow(config.epsilon, 4) * std::abs(report_.I_c_int);
  std::vector<ModeResult> equator;
  for (auto j : brackets) {
    double lo = result.curve[j].beta;
    double hi = lo + h;
    ModeResult lo_mode = samples[j];
    ModeResult best = lo_mode;
    const bool lo_negative = lo_mode.im_energy < 0.0;
    while (hi - lo > config.bisection_tol && std::abs(best.im_energy) > stop) {
      const double mid = 0.5 * (lo + hi);
      ModeResult m = bootstrap_equator(mid, config, &lo_mode);
      if (std::abs(m.im_energy) < std::abs(best.im_energy)) best = m;
      if ((m.im_energy < 0.0) == lo_negative) {
        lo = mid;
        lo_mode = std::move(m);
      } else {
        hi = mid;
      }
    }
    // Re-gauge the root onto [-pi, pi).
    best.pair = ParameterPair::equator(wrap_angle(best.pair.beta()));
    equator.push_back(std::move(best));
  }
  std::sort(equator.begin(), equator.end(),
            [](const ModeResult& x, const ModeResult& y) { return x.pair.beta() < y.pair.beta(); });
  for (auto& m : equator) {
    const auto cert = certify_mode(m, config);
    m.is_true_eigenpair = cert.passed;
    result.modes.push_back(std::move(m));
  }
  return result;
}

Certificate BootstrapSolver::certify_mode(const ModeResult& mode, const BootstrapConfig& config) const {
  const auto& basis = ws_->basis();
  Certificate cert;
  if (mode.phi.size() != ws_->index_set().size()) throw StructuralError("certify_mode: field size mismatch");
  const double eps = mode.epsilon;
  const BlochField parallel = (eps * mode.pair.a) * basis.phi_a() + (eps * mode.pair.b) * basis.phi_b();
  const BlochField rest = mode.phi - parallel;
  cert.orthogonality = std::abs(inner_product(basis.phi_a(), rest)) + std::abs(inner_product(basis.phi_b(), rest));
  cert.parallel_defect = eps > 0.0 ? cert.orthogonality / eps : cert.orthogonality;
  cert.parallel_ok = cert.parallel_defect <= 1e-10;
  cert.residual = residual(mode.phi, basis.E0() + mode.E_shift.real());
  cert.residual_ok = cert.residual <= 10.0 * config.outer_tol;
  cert.im_energy = mode.E_shift.imag();
  cert.energy_ok = std::abs(cert.im_energy) <= config.pseudo_tol * std::pow(eps, 4) * std::abs(report_.I_c_int);
  cert.passed = cert.residual_ok && cert.energy_ok && cert.parallel_ok;
  return cert;
}

ModeResult BootstrapSolver::rotate_mode(const ModeResult& mode) const {
  const cd omega_bar = std::polar(1.0, -2.0 * pi / 3.0);
  ModeResult out = mode;
  out.phi = omega_bar * apply_rotation(mode.phi);
  const bool has_correction = mode.correction.size() == ws_->index_set().size();
  out.correction = omega_bar * apply_rotation(has_correction ? mode.correction : project_perp(ws_->basis(), mode.phi));
  out.pair = ParameterPair{mode.pair.a, mode.pair.b * std::conj(omega_bar)}.canonical();
  if (out.pair.on_equator()) out.pair = ParameterPair::equator(out.pair.beta());
  return out;
}

UniquenessReport BootstrapSolver::uniqueness_probe(const ModeResult& mode, const BootstrapConfig& config,
                                                   int n_restarts, double perturbation_scale, std::uint64_t seed,
                                                   std::optional<ParameterPair> nearby) const {
  const auto& basis = ws_->basis();
  UniquenessReport rep;
  rep.restarts = n_restarts;
  rep.tolerance = 10.0 * config.outer_tol;
  rep.lipschitz_ratio = std::numeric_limits<double>::quiet_NaN();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto D = static_cast<Eigen::Index>(ws_->index_set().size());
  for (int r = 0; r < n_restarts; ++r) {
    Eigen::VectorXcd noise(D);
    for (Eigen::Index i = 0; i < D; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      noise[i] = cd(re, im);
    }
    BlochField xi = project_perp(basis, BlochField(ws_->index_set_ptr(), noise));
    if (xi.norm() > 0.0) xi *= 1.0 / xi.norm();
    const BlochField start = mode.correction + (perturbation_scale * std::pow(mode.epsilon, 3)) * xi;
    const ModeResult again = run(mode.pair, config, start, mode.E_shift);
    rep.max_distance = std::max(rep.max_distance, (again.phi - mode.phi).norm());
  }
  rep.unique = rep.max_distance <= rep.tolerance;
  if (nearby) {
    const ModeResult other = run(*nearby, config, mode.correction, mode.E_shift);
    const double dpair = std::abs(nearby->a - mode.pair.a) + std::abs(nearby->b - mode.pair.b);
    rep.lipschitz_ratio = (other.correction - mode.correction).norm() / dpair;
  }
  return rep;
}

SeparabilityReport BootstrapSolver::radial_separability_probe(const BootstrapConfig& config,
                                                              const std::vector<double>& theta_grid,
                                                              int n_phase) const {
  SeparabilityReport rep;
  rep.epsilon = config.epsilon;
  rep.fitted_constant = std::numeric_limits<double>::infinity();
  const double eps2 = config.epsilon * config.epsilon;
  const double attain = std::pow(config.epsilon, 4) * std::max(std::abs(report_.I_c_int), kHypothesisThreshold);
  ModeResult previous;
  const ModeResult* warm = nullptr;
  for (double theta : theta_grid) {
    SeparabilitySample s;
    s.theta = theta;
    s.min_defect = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_phase; ++j) {
      const double phase = 2.0 * pi * j / n_phase;
      ModeResult m = solve(ParameterPair::from_angles(theta, phase), config, warm);
      if (m.consistency_defect < s.min_defect) {
        s.min_defect = m.consistency_defect;
        s.best_phase = phase;
      }
      previous = std::move(m);
      warm = &previous;
    }
    s.landscape = landscape_value(report_, ParameterPair::from_angles(theta, s.best_phase));
    s.attainable = s.min_defect <= attain;
    const auto p = ParameterPair::from_angles(theta, 0.0);
    const double factor = std::abs(p.a * p.b) * std::abs(std::norm(p.b) - std::norm(p.a));
    if (factor >= 0.05 && s.landscape > 0.0)
      rep.fitted_constant = std::min(rep.fitted_constant, s.min_defect / (eps2 * s.landscape));
    rep.samples.push_back(s);
  }
  if (!std::isfinite(rep.fitted_constant)) rep.fitted_constant = 0.0;
  return rep;
}

}  // namespace diracnls
