#include "diracnls_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "diracnls/bootstrap.hpp"
#include "diracnls/errors.hpp"
#include "diracnls/model.hpp"
#include "diracnls/version.hpp"

namespace diracnls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json metadata_json(const Metadata& meta) {
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

Metadata with(Metadata meta, std::initializer_list<std::pair<std::string, std::string>> extra) {
  meta.insert(meta.end(), extra.begin(), extra.end());
  return meta;
}

std::string mode_label(std::size_t i) {
  if (i == 0) return "a_pole";
  if (i == 1) return "b_pole";
  return "equator_" + std::to_string(i - 2);
}

std::string eps_dir(double eps) { return "eps_" + format_double(eps); }

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

Metadata run_metadata(const RunConfig& c, const GaugeRecord* gauge) {
  Metadata m{
      {"artifact", "diracnls"},
      {"version", kVersion},
      {"potential", c.potential},
      {"epsilon_V", format_double(c.epsilon_V)},
      {"nonlinearity", to_string(c.nonlinearity)},
      {"K0", format_double(c.K0)},
      {"cutoff", std::to_string(c.cutoff)},
      {"grid", std::to_string(c.grid_resolution)},
      {"inner_tol", format_double(c.inner_tol)},
      {"outer_tol", format_double(c.outer_tol)},
      {"pseudo_tol", format_double(c.pseudo_tol)},
      {"shift_mode", to_string(c.shift_mode)},
      {"seed", std::to_string(c.seed)},
  };
  if (c.nonlinearity == NonlinearityKind::Saturable) m.emplace_back("background", format_double(c.background));
  if (gauge) {
    m.emplace_back("gauge_anchor", std::to_string(gauge->anchor.m1) + " " + std::to_string(gauge->anchor.m2));
    m.emplace_back("gauge_gamma", format_double(gauge->gamma));
    m.emplace_back("gauge_convention", gauge->convention());
  } else {
    m.emplace_back("gauge_anchor", "none");
  }
  return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = std::min(x.size(), y.size());
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

int cmd_spectrum(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const LinearProblem problem = build_linear_problem(config.model_parameters());
  const auto& cs = problem.classified;
  const fs::path dir = out / "spectrum";

  json sym;
  sym["potential_symmetry"] = {{"periodicity", problem.potential_symmetry.periodicity},
                               {"realness", problem.potential_symmetry.realness},
                               {"inversion", problem.potential_symmetry.inversion},
                               {"rotation", problem.potential_symmetry.rotation},
                               {"passed", problem.potential_symmetry.passed}};
  sym["dimension"] = cs.size();
  sym["grid"] = problem.grid->n_x();
  sym["degeneracy_tolerance"] = cs.tolerance;
  const auto& lowest = cs.clusters.front();
  json lowest_classes = json::array();
  for (auto n = lowest.begin; n < lowest.end; ++n) lowest_classes.push_back(to_string(cs.classes[n]));
  sym["lowest_cluster"] = {{"size", lowest.size()},
                           {"eigenvalue", cs.eigenvalues[static_cast<Eigen::Index>(lowest.begin)]},
                           {"classes", lowest_classes}};

  std::optional<SpectralBasis> basis;
  try {
    basis.emplace(select_dirac_pair(cs));
  } catch (const DegeneracyError& e) {
    sym["dirac_pair"] = {{"present", false}, {"reason", e.what()}};
  }
  const Metadata meta = run_metadata(config, basis ? &basis->gauge() : nullptr);
  sym["metadata"] = metadata_json(meta);

  if (basis) {
    const auto& phi_a = basis->phi_a();
    const auto& phi_b = basis->phi_b();
    const double E0 = basis->E0();
    const double res_a = (basis->apply_hamiltonian(phi_a) - E0 * phi_a).norm();
    const double res_b = (basis->apply_hamiltonian(phi_b) - E0 * phi_b).norm();
    const double conj_defect = (conj_invert(phi_a) - phi_b).norm();
    sym["dirac_pair"] = {{"present", true},
                         {"E0", E0},
                         {"gap", basis->degeneracy_gap()},
                         {"classes", {to_string(basis->classes()[0]), to_string(basis->classes()[1])}},
                         {"rotation_a", {{"re", inner_product(phi_a, apply_rotation(phi_a)).real()},
                                         {"im", inner_product(phi_a, apply_rotation(phi_a)).imag()}}},
                         {"residual_a", res_a},
                         {"residual_b", res_b},
                         {"conj_invert_defect", conj_defect},
                         {"orthogonality", std::abs(inner_product(phi_a, phi_b))}};
    write_field_csv(dir / "phi_a.csv", phi_a, with(meta, {{"field", "phi_a"}}));
    write_field_csv(dir / "phi_b.csv", phi_b, with(meta, {{"field", "phi_b"}}));
    write_spectrum_csv(dir / "spectrum.csv", basis->spectrum(), meta);
    log << "E0 = " << format_double(E0) << ", gap = " << format_double(basis->degeneracy_gap()) << '\n';
  } else {
    write_spectrum_csv(dir / "spectrum.csv", cs, meta);
    log << "lowest cluster has size " << lowest.size() << "; no Dirac pair\n";
  }
  write_json(dir / "symmetry.json", sym);
  return kSuccess;
}

int cmd_integrals(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const Workspace ws(config.model_parameters());
  const PerturbationReport report = compute_report(ws);
  const Metadata meta = run_metadata(config, &report.gauge);
  const fs::path dir = out / "integrals";
  write_report_json(dir / "report.json", report, meta);
  write_landscape_csv(dir / "landscape.csv",
                      necessary_condition_landscape(report, config.landscape_theta, config.landscape_phase), meta);
  log << "I_one = " << format_double(report.I_one) << ", I_int = " << format_double(report.I_int)
      << ", |I_c_int| = " << format_double(std::abs(report.I_c_int)) << '\n';
  if (report.prediction_void()) log << "warning: a hypothesis of the eight-mode prediction fails\n";
  return kSuccess;
}

int cmd_bifurcate(const RunConfig& config, const fs::path& out, std::ostream& log) {
  auto ws = std::make_shared<const Workspace>(config.model_parameters());
  const BootstrapSolver solver(ws);
  const auto& report = solver.report();
  const Metadata meta = run_metadata(config, &report.gauge);
  const fs::path dir = out / "bifurcate";
  write_report_json(dir / "report.json", report, meta);

  int status = kSuccess;
  std::vector<double> eps_ok, corr, shift, im_amp, contraction;
  std::ostringstream summary;
  for (const auto& [k, v] : meta) summary << "# " << k << '=' << v << '\n';
  summary << "epsilon,label,a_re,a_im,b_re,b_im,beta,E_shift_re,E_shift_im,residual,certified\n";

  for (double eps : config.epsilons) {
    const BootstrapConfig bc = config.bootstrap_config(eps);
    const fs::path edir = dir / eps_dir(eps);
    const Metadata emeta = with(meta, {{"epsilon", format_double(eps)}});
    BifurcationResult result;
    try {
      result = solver.find_bifurcation_modes(bc);
    } catch (const BifurcationCountError& e) {
      write_curve_csv(edir / "curve.csv", e.curve(), emeta);
      write_json(edir / "diagnostic.json", {{"metadata", metadata_json(emeta)},
                                            {"error", e.what()},
                                            {"sign_changes", e.sign_changes()}});
      log << "eps " << format_double(eps) << ": " << e.what() << '\n';
      status = std::max<int>(status, kRegimeFailure);
      continue;
    }
    write_curve_csv(edir / "curve.csv", result.curve, emeta);
    bool all_certified = true;
    for (std::size_t i = 0; i < result.modes.size(); ++i) {
      const auto& m = result.modes[i];
      const std::string label = mode_label(i);
      const Certificate cert = solver.certify_mode(m, bc);
      all_certified = all_certified && cert.passed;
      write_mode(edir / ("mode_" + label + ".json"), edir / ("field_" + label + ".csv"), m, label,
                 with(emeta, {{"label", label}}));
      summary << format_double(eps) << ',' << label << ',' << format_double(m.pair.a.real()) << ','
              << format_double(m.pair.a.imag()) << ',' << format_double(m.pair.b.real()) << ','
              << format_double(m.pair.b.imag()) << ',' << format_double(m.pair.beta()) << ','
              << format_double(m.E_shift.real()) << ',' << format_double(m.E_shift.imag()) << ','
              << format_double(cert.residual) << ',' << (cert.passed ? "true" : "false") << '\n';
    }
    if (result.status == BifurcationStatus::PredictionVoid) {
      log << "eps " << format_double(eps) << ": prediction void, equator modes not searched\n";
      status = std::max<int>(status, kRegimeFailure);
      continue;
    }
    if (!all_certified) status = std::max<int>(status, kCertificationFailure);

    const auto& polar = result.modes.front();
    const auto ratios = polar.contraction_ratios();
    double amp = 0.0;
    for (const auto& p : result.curve) amp = std::max(amp, std::abs(p.im_energy));
    eps_ok.push_back(eps);
    corr.push_back(polar.correction.norm());
    shift.push_back(std::abs(polar.E_shift.real()));
    im_amp.push_back(amp);
    contraction.push_back(ratios.empty() ? std::nan("") : ratios.front() / (eps * eps));
    log << "eps " << format_double(eps) << ": " << result.modes.size() << " modes, "
        << (all_certified ? "all certified" : "certification failed") << '\n';
  }

  {
    std::ofstream f(dir / "summary.csv", std::ios::binary);
    f << summary.str();
  }
  json scaling;
  scaling["metadata"] = metadata_json(meta);
  scaling["epsilons"] = eps_ok;
  scaling["correction_norm"] = corr;
  scaling["energy_shift"] = shift;
  scaling["im_energy_amplitude"] = im_amp;
  json cc = json::array();
  for (double c : contraction) cc.push_back(nullable(c));
  scaling["contraction_constant"] = cc;
  scaling["exponents"] = {{"correction_norm", nullable(loglog_slope(eps_ok, corr))},
                          {"energy_shift", nullable(loglog_slope(eps_ok, shift))},
                          {"im_energy", nullable(loglog_slope(eps_ok, im_amp))}};
  write_json(dir / "scaling.json", scaling);
  return status;
}

namespace {

struct LoadedMode {
  std::string name;
  std::string label;
  ModeResult mode;
};

std::vector<std::pair<fs::path, std::string>> collect_mode_files(const std::vector<fs::path>& inputs) {
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::pair<fs::path, std::string>> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.starts_with("mode_") && e.path().extension() == ".json")
          found.emplace_back(e.path(), e.path().lexically_relative(in).generic_string());
      }
      std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.emplace_back(in, in.filename().generic_string());
    } else {
      throw ConfigError("no such mode file or directory: " + in.string());
    }
  }
  return files;
}

std::string read_label(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  try {
    return json::parse(in).value("label", std::string());
  } catch (const json::exception&) {
    return {};
  }
}

}  // namespace

int cmd_verify(const RunConfig& config, const fs::path& out, const std::vector<fs::path>& inputs, std::ostream& log) {
  auto ws = std::make_shared<const Workspace>(config.model_parameters());
  const BootstrapSolver solver(ws);
  const auto& basis = ws->basis();
  const Metadata meta = run_metadata(config, &solver.report().gauge);

  const auto files = collect_mode_files(inputs.empty() ? std::vector<fs::path>{out / "bifurcate"} : inputs);
  if (files.empty()) throw ConfigError("no mode files to verify");

  std::vector<LoadedMode> modes;
  for (const auto& [path, name] : files) {
    LoadedMode lm{name, read_label(path), read_mode(path, ws->index_set_ptr())};
    lm.mode.correction = project_perp(basis, lm.mode.phi);
    modes.push_back(std::move(lm));
  }

  bool all_passed = true;
  json entries = json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& [name, label, mode] = modes[i];
    const BootstrapConfig bc = config.bootstrap_config(mode.epsilon);
    const Certificate cert = solver.certify_mode(mode, bc);
    const UniquenessReport uniq =
        solver.uniqueness_probe(mode, bc, config.restarts, config.perturbation_scale, config.seed + i);
    json entry = {{"file", name},
                  {"label", label},
                  {"epsilon", mode.epsilon},
                  {"beta", mode.pair.beta()},
                  {"residual", cert.residual},
                  {"residual_ok", cert.residual_ok},
                  {"im_energy", cert.im_energy},
                  {"energy_ok", cert.energy_ok},
                  {"parallel_defect", cert.parallel_defect},
                  {"parallel_ok", cert.parallel_ok},
                  {"uniqueness", {{"restarts", uniq.restarts},
                                  {"max_distance", uniq.max_distance},
                                  {"tolerance", uniq.tolerance},
                                  {"unique", uniq.unique}}}};
    bool passed = cert.passed && uniq.unique;

    if (mode.pair.on_equator() && mode.epsilon > 0.0) {
      const ModeResult rotated = solver.rotate_mode(mode);
      const Certificate rcert = solver.certify_mode(rotated, bc);
      const double expected = wrap_angle(mode.pair.beta() + 2.0 * kPi / 3.0);
      const double shift_error = std::abs(wrap_angle(rotated.pair.beta() - expected));
      json rot = {{"beta", rotated.pair.beta()},
                  {"beta_shift_error", shift_error},
                  {"residual", rcert.residual},
                  {"certified", rcert.passed}};
      bool rot_ok = rcert.passed && shift_error <= 1e-12;
      const double window = 5.0 * mode.epsilon * mode.epsilon;
      for (std::size_t j = 0; j < modes.size(); ++j) {
        const auto& other = modes[j].mode;
        if (j == i || other.epsilon != mode.epsilon || !other.pair.on_equator()) continue;
        if (std::abs(wrap_angle(other.pair.beta() - rotated.pair.beta())) > window) continue;
        const double E = basis.E0() + mode.E_shift.real();
        const double defect = std::abs(other.E_shift.real() - mode.E_shift.real()) / std::abs(E);
        rot["partner"] = modes[j].name;
        rot["energy_defect"] = defect;
        rot["field_distance"] = (other.phi - rotated.phi).norm();
        rot_ok = rot_ok && defect <= 1e-10;
        break;
      }
      rot["passed"] = rot_ok;
      entry["rotation"] = rot;
      passed = passed && rot_ok;
    }
    entry["passed"] = passed;
    all_passed = all_passed && passed;
    log << name << ": " << (passed ? "pass" : "FAIL") << " (residual " << format_double(cert.residual) << ")\n";
    entries.push_back(std::move(entry));
  }

  json doc;
  doc["metadata"] = metadata_json(meta);
  doc["modes"] = entries;
  doc["passed"] = all_passed;
  write_json(out / "verify" / "verify.json", doc);
  return all_passed ? kSuccess : kCertificationFailure;
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
  std::ostream quiet_stream(nullptr);
  std::ostream& out_log = inv.quiet ? quiet_stream : log;
  try {
    RunConfig config = inv.config.empty() ? RunConfig{} : load_config(inv.config);
    if (inv.cutoff) config.cutoff = *inv.cutoff;
    config.validate();
    const fs::path out = inv.out ? *inv.out : config.output_dir;
    if (inv.command == "spectrum") return cmd_spectrum(config, out, out_log);
    if (inv.command == "integrals") return cmd_integrals(config, out, out_log);
    if (inv.command == "bifurcate") return cmd_bifurcate(config, out, out_log);
    if (inv.command == "verify") return cmd_verify(config, out, inv.inputs, out_log);
    throw ConfigError("unknown command '" + inv.command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kCertificationFailure;
  } catch (const StructuralError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kCertificationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRegimeFailure;
  } catch (const fs::filesystem_error& e) {
    err << "file system error: " << e.what() << '\n';
    return kRegimeFailure;
  }
}

}  // namespace diracnls::cli
