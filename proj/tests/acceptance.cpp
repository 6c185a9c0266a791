#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "diracnls/bootstrap.hpp"
#include "diracnls/errors.hpp"
#include "diracnls/model.hpp"
#include "diracnls/perturbation.hpp"
#include "diracnls_cli/commands.hpp"

using namespace diracnls;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelParameters defaults(int cutoff = 6) {
  ModelParameters p;
  p.cutoff = cutoff;
  return p;
}

const BootstrapSolver& solver() {
  static const BootstrapSolver s(std::make_shared<const Workspace>(defaults()));
  return s;
}

BootstrapConfig config(double eps) {
  BootstrapConfig c;
  c.epsilon = eps;
  return c;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) { return cli::loglog_slope(x, y); }

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

cd overlap(const RealGrid& grid, const std::vector<double>& M, const BlochField& g, const BlochField& h) {
  const auto gs = grid.to_grid(g);
  const auto hs = grid.to_grid(h);
  std::vector<cd> f(gs.size());
  for (std::size_t p = 0; p < gs.size(); ++p) f[p] = M[p] * std::conj(gs[p]) * hs[p];
  return grid.integrate(f);
}

Outcome free_degeneracy() {
  auto p = defaults();
  p.epsilon_V = 0.0;
  const auto problem = build_linear_problem(p);
  const auto& cs = problem.classified;
  const double E = 16.0 * pi * pi / 9.0;
  const auto& lowest = cs.clusters.front();
  double err = 0.0;
  for (auto n = lowest.begin; n < lowest.end; ++n)
    err = std::max(err, std::abs(cs.eigenvalues[static_cast<Eigen::Index>(n)] - E) / E);
  return {lowest.size() == 3 && err <= 1e-10, fmt("multiplicity %zu, relative error %.2e", lowest.size(), err)};
}

Outcome dirac_regime() {
  bool ok = true;
  std::string detail;
  for (double eV : {0.1, 0.5}) {
    auto p = defaults();
    p.epsilon_V = eV;
    const auto problem = build_linear_problem(p);
    const auto& cs = problem.classified;
    const auto basis = select_dirac_pair(cs);
    const double defect = (conj_invert(basis.phi_a()) - basis.phi_b()).norm();
    const bool classes = basis.spectrum().classes[0] == SymmetryClass::Omega &&
                         basis.spectrum().classes[1] == SymmetryClass::OmegaBar;
    const bool pass = cs.clusters.front().size() == 2 && classes && defect <= 1e-10;
    ok = ok && pass;
    detail += fmt("eps_V=%g: multiplicity %zu, classes %s/%s, conj_invert defect %.1e; ", eV,
                  cs.clusters.front().size(), to_string(basis.spectrum().classes[0]).c_str(),
                  to_string(basis.spectrum().classes[1]).c_str(), defect);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome symmetry_identities() {
  const auto& ws = solver().workspace();
  const auto& grid = ws.grid();
  const auto& basis = ws.basis();
  const auto& K = ws.expansion().K_field;

  double vanish = 0.0;
  for (const auto* M : {&ws.vl(), &K}) {
    const double scale = sup_abs(*M) * basis.phi_a().norm() * basis.phi_b().norm();
    vanish = std::max(vanish, std::abs(overlap(grid, *M, basis.phi_a(), basis.phi_b())) / scale);
  }
  for (std::size_t n = 2; n < 40; ++n) {
    const auto cls = basis.spectrum().classes[n];
    if (cls == SymmetryClass::One) continue;
    const auto g = basis.eigenfield(n);
    const BlochField& h = cls == SymmetryClass::Omega ? basis.phi_b() : basis.phi_a();
    vanish = std::max(vanish, std::abs(overlap(grid, K, g, h)) / (sup_abs(K) * g.norm() * h.norm()));
  }

  const auto q = quartic_integrals(grid, basis, K);
  const double iab = std::abs(q.I_a - q.I_b) / std::abs(q.I_one);
  const cd restricted = t2_sum(grid, basis, K, true).value;
  const cd full = t2_sum(grid, basis, K, false).value;
  const double t2 = std::abs(full - restricted) / std::abs(restricted);
  return {vanish <= 1e-10 && iab <= 1e-10 && t2 <= 1e-8,
          fmt("vanishing integral %.1e, |I_a - I_b|/I_one %.1e, T2 restricted vs full %.1e", vanish, iab, t2)};
}

Outcome contraction_and_scaling() {
  const auto& s = solver();
  const auto& r = s.report();
  const std::vector<double> eps{0.02, 0.04, 0.08};
  const double beta_ext = wrap_angle((pi / 2.0 - std::arg(r.I_c_int)) / 3.0);
  std::vector<double> C, corr, shift, im;
  for (double e : eps) {
    const auto polar = s.bootstrap_polar(true, config(e));
    const auto ratios = polar.contraction_ratios();
    C.push_back(ratios.empty() ? NAN : ratios.front() / (e * e));
    corr.push_back(polar.correction.norm());
    shift.push_back(std::abs(polar.E_shift.real()));
    im.push_back(std::abs(s.bootstrap_equator(beta_ext, config(e)).im_energy));
  }
  const double spread = *std::max_element(C.begin(), C.end()) / *std::min_element(C.begin(), C.end());
  const double pc = slope(eps, corr), pi_ = slope(eps, im), pe = slope(eps, shift);
  const bool ok = spread <= 2.0 && std::abs(pc - 3.0) <= 0.1 && std::abs(pi_ - 4.0) <= 0.1 &&
                  std::abs(pe - 2.0) <= 0.05;
  return {ok, fmt("C = %.4f %.4f %.4f (max/min %.3f), exponents: correction %.3f, Im E' %.3f, E' %.4f", C[0], C[1],
                  C[2], spread, pc, pi_, pe)};
}

Outcome eigenvalue_coefficients() {
  const auto& s = solver();
  const auto& r = s.report();
  const double e1 = 0.02, e2 = 0.04;
  auto richardson = [&](double f1, double f2) { return (4.0 * f1 - f2) / 3.0; };
  const double p1 = s.bootstrap_polar(true, config(e1)).E_shift.real() / (e1 * e1);
  const double p2 = s.bootstrap_polar(true, config(e2)).E_shift.real() / (e2 * e2);
  const double polar = richardson(p1, p2);
  auto cfg1 = config(e1), cfg2 = config(e2);
  const auto m1 = s.find_bifurcation_modes(cfg1);
  const auto m2 = s.find_bifurcation_modes(cfg2);
  const double q1 = m1.modes.at(2).E_shift.real() / (e1 * e1);
  const double q2 = m2.modes.at(2).E_shift.real() / (e2 * e2);
  const double equator = richardson(q1, q2);
  const double target = 0.5 * r.I_one + r.I_int;
  const double dp = std::abs(polar / r.I_one - 1.0);
  const double de = std::abs(equator / target - 1.0);
  const bool certified = s.certify_mode(m1.modes.at(2), cfg1).passed && s.certify_mode(m2.modes.at(2), cfg2).passed;
  return {dp <= 0.02 && de <= 0.02 && certified,
          fmt("polar %.8f vs I_one %.8f (%.1e), equator %.8f vs I_one/2 + I_int %.8f (%.1e)", polar, r.I_one, dp,
              equator, target, de)};
}

struct EightModes {
  BifurcationResult result;
  BootstrapConfig cfg = config(0.08);
};

const EightModes& eight_modes() {
  static const EightModes m = [] {
    EightModes out;
    out.result = solver().find_bifurcation_modes(out.cfg);
    return out;
  }();
  return m;
}

Outcome eight_mode_bifurcation() {
  const auto& s = solver();
  const auto& em = eight_modes();
  const auto& modes = em.result.modes;
  const double eps = em.cfg.epsilon;
  const double window = 5.0 * eps * eps;
  const double E0 = s.workspace().basis().E0();

  int certified = 0;
  double worst_residual = 0.0;
  for (const auto& m : modes) {
    if (s.certify_mode(m, em.cfg).passed) ++certified;
    worst_residual = std::max(worst_residual, m.residual);
  }

  std::vector<double> betas;
  for (std::size_t k = 2; k < modes.size(); ++k) betas.push_back(modes[k].pair.beta());
  std::sort(betas.begin(), betas.end());
  double spacing = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    const double next = k + 1 < betas.size() ? betas[k + 1] : betas[0] + 2.0 * pi;
    spacing = std::max(spacing, std::abs(next - betas[k] - pi / 3.0));
  }
  double position = 0.0;
  for (double b : betas) {
    double best = INFINITY;
    for (double root : s.report().predicted_roots()) best = std::min(best, std::abs(wrap_angle(b - root)));
    position = std::max(position, best);
  }

  double triple = 0.0;
  for (std::size_t k = 2; k < 4 && modes.size() == 8; ++k) {
    const double Ea = modes[k].energy(E0);
    for (std::size_t j : {k + 2, k + 4}) triple = std::max(triple, std::abs(modes[j].energy(E0) - Ea) / Ea);
  }
  const bool ok = modes.size() == 8 && certified == 8 && betas.size() == 6 && spacing <= window &&
                  position <= window && triple <= 1e-10 && worst_residual <= 1e-8;
  return {ok, fmt("%zu modes, %d certified, spacing error %.1e, root error %.1e (window %.1e), triple spread %.1e, "
                  "residual %.1e",
                  modes.size(), certified, spacing, position, window, triple, worst_residual)};
}

Outcome uniqueness_and_separability() {
  const auto& s = solver();
  const auto& em = eight_modes();
  double worst = 0.0;
  bool unique = em.result.modes.size() == 8;
  std::uint64_t seed = 1;
  for (const auto& m : em.result.modes) {
    const auto rep = s.uniqueness_probe(m, em.cfg, 5, 1.0, seed++);
    worst = std::max(worst, rep.max_distance);
    unique = unique && rep.unique && rep.restarts == 5;
  }
  unique = unique && worst <= 10.0 * em.cfg.outer_tol;
  std::vector<double> thetas;
  for (int k = 1; k < 8; ++k)
    if (k != 4) thetas.push_back(k * pi / 16.0);
  const auto sep = s.radial_separability_probe(em.cfg, thetas);
  return {unique && sep.fitted_constant > 0.0 && sep.fitted_constant >= 0.5,
          fmt("restart distance %.1e (bound %.1e), separability constant %.4f", worst, 10.0 * em.cfg.outer_tol,
              sep.fitted_constant)};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  const auto base = fs::temp_directory_path() / "diracnls_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  {
    std::ofstream cfg(base / "run.cfg");
    cfg << "epsilons = 0.04\nbeta_samples = 32\nrestarts = 2\nlandscape_theta = 9\nlandscape_phase = 8\n";
  }
  std::ostringstream log, err;
  int status = 0;
  for (const char* run : {"first", "second"}) {
    for (const char* command : {"spectrum", "integrals", "bifurcate", "verify"}) {
      cli::Invocation inv;
      inv.command = command;
      inv.config = base / "run.cfg";
      inv.out = base / run;
      inv.quiet = true;
      status = std::max(status, cli::run(inv, log, err));
    }
  }
  const auto a = tree(base / "first");
  const auto b = tree(base / "second");
  const bool same = a == b;
  fs::remove_all(base);
  return {status == 0 && same && !a.empty(),
          fmt("%zu files, exit status %d, trees %s", a.size(), status, same ? "identical" : "differ")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "free-particle degeneracy", free_degeneracy, 1.0},
      {2, "Dirac doublet regime", dirac_regime, 5.0},
      {3, "symmetry identities", symmetry_identities, 60.0},
      {4, "bootstrap contraction and scaling", contraction_and_scaling, 120.0},
      {5, "eigenvalue coefficients", eigenvalue_coefficients, 120.0},
      {6, "eight-mode bifurcation", eight_mode_bifurcation, 300.0},
      {7, "uniqueness and separability", uniqueness_and_separability, 300.0},
      {8, "determinism", determinism, 300.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool passed = o.passed && in_time;
    if (!passed) ++failures;
    std::printf("%s criterion %d (%s): %s; %.2f s of %.0f s\n", passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds, c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
