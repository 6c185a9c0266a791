#include "diracnls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "diracnls/errors.hpp"

namespace diracnls {

HoneycombPotential::HoneycombPotential(std::map<FourierIndex, cd> coeffs, double amplitude)
    : coeffs_(std::move(coeffs)), amplitude_(amplitude) {}

cd HoneycombPotential::coefficient(FourierIndex m) const {
  const auto it = coeffs_.find(m);
  return it == coeffs_.end() ? cd{} : it->second;
}

double HoneycombPotential::evaluate(const Vec2& x, const LatticeBasis& lattice) const {
  double sum = 0.0;
  for (const auto& [m, c] : coeffs_) sum += std::real(c * std::polar(1.0, dot(lattice.reciprocal(m), x)));
  return amplitude_ * sum;
}

std::vector<double> HoneycombPotential::sample(const RealGrid& grid) const {
  return grid.sample([&](const Vec2& x) { return evaluate(x, grid.lattice()); });
}

HoneycombPotential HoneycombPotential::parse_table(const std::string& text, double amplitude) {
  std::map<FourierIndex, cd> coeffs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    int m1 = 0, m2 = 0;
    double re = 0.0, im = 0.0;
    if (!(row >> m1)) continue;
    if (!(row >> m2 >> re)) throw DomainError("potential table line " + std::to_string(lineno) + ": expected m1 m2 re [im]");
    if (!(row >> im)) im = 0.0;
    std::string extra;
    if (row >> extra) throw DomainError("potential table line " + std::to_string(lineno) + ": trailing text");
    coeffs[{m1, m2}] += cd(re, im);
  }
  return {std::move(coeffs), amplitude};
}

HoneycombPotential HoneycombPotential::read_table(const std::filesystem::path& path, double amplitude) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open potential table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), amplitude);
}

HoneycombPotential standard_potential(double amplitude) {
  std::map<FourierIndex, cd> c;
  for (FourierIndex m : {FourierIndex{1, 0}, FourierIndex{0, 1}, FourierIndex{1, 1}}) {
    c[m] = 0.5;
    c[-m] = 0.5;
  }
  return {std::move(c), amplitude};
}

double SymmetryReport::worst() const { return std::max({periodicity, realness, inversion, rotation}); }

SymmetryReport validate_honeycomb(const HoneycombPotential& potential, double tol) {
  SymmetryReport report;
  std::set<FourierIndex> support;
  for (const auto& [m, c] : potential.fourier_coeffs()) {
    support.insert(m);
    support.insert(-m);
    support.insert(rotate_dual_index(m));
    support.insert(rotate_dual_index(rotate_dual_index(m)));
    report.scale = std::max(report.scale, std::abs(c));
  }
  for (const auto& m : support) {
    const cd c = potential.coefficient(m);
    report.realness = std::max(report.realness, std::abs(potential.coefficient(-m) - std::conj(c)));
    report.inversion = std::max(report.inversion, std::abs(potential.coefficient(-m) - c));
    report.rotation = std::max(report.rotation, std::abs(potential.coefficient(rotate_dual_index(m)) - c));
  }
  if (report.scale > 0.0) {
    report.realness /= report.scale;
    report.inversion /= report.scale;
    report.rotation /= report.scale;
  }
  report.passed = report.worst() <= tol;
  return report;
}

SymmetryReport validate_honeycomb(const RealGrid& grid, std::span<const double> samples, double tol) {
  if (samples.size() != grid.num_points()) throw StructuralError("validate_honeycomb: sample count mismatch");
  SymmetryReport report;
  for (double v : samples) report.scale = std::max(report.scale, std::abs(v));
  for (std::size_t p = 0; p < samples.size(); ++p) {
    if (!std::isfinite(samples[p])) report.realness = INFINITY;
    report.inversion = std::max(report.inversion, std::abs(samples[grid.inverted_point(p)] - samples[p]));
    report.rotation = std::max(report.rotation, std::abs(samples[grid.rotated_point(p)] - samples[p]));
  }
  if (report.scale > 0.0) {
    report.inversion /= report.scale;
    report.rotation /= report.scale;
  }
  report.passed = report.worst() <= tol;
  return report;
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Kerr: return "kerr";
    case NonlinearityKind::Saturable: return "saturable";
    case NonlinearityKind::Custom: return "custom";
  }
  return "unknown";
}

NonlinearityKind parse_nonlinearity_kind(const std::string& name) {
  if (name == "kerr") return NonlinearityKind::Kerr;
  if (name == "saturable") return NonlinearityKind::Saturable;
  if (name == "custom") return NonlinearityKind::Custom;
  throw DomainError("unknown nonlinearity '" + name + "'");
}

NonlinearityModel NonlinearityModel::kerr(double K0) {
  NonlinearityModel m;
  m.kind = NonlinearityKind::Kerr;
  m.K0 = K0;
  return m;
}

NonlinearityModel NonlinearityModel::saturable(double K0, double background) {
  NonlinearityModel m;
  m.kind = NonlinearityKind::Saturable;
  m.K0 = K0;
  m.background = background;
  return m;
}

namespace {

double saturable_base(double background, double vl) {
  const double c = background + vl;
  if (!(c > 0.0)) throw DomainError("saturable nonlinearity: 1 + V_L is not positive on the grid");
  return c;
}

}  // namespace

double NonlinearityModel::value(double vl, double s) const {
  switch (kind) {
    case NonlinearityKind::Kerr: return K0 * s;
    case NonlinearityKind::Saturable: {
      const double c = saturable_base(background, vl);
      // K0/(c+s) - K0/c without cancellation
      return -K0 * s / (c * (c + s));
    }
    case NonlinearityKind::Custom:
      if (!custom_v) throw DomainError("custom nonlinearity without a value function");
      return custom_v(vl, s);
  }
  return 0.0;
}

double NonlinearityModel::K_coefficient(double vl) const {
  switch (kind) {
    case NonlinearityKind::Kerr: return K0;
    case NonlinearityKind::Saturable: {
      const double c = saturable_base(background, vl);
      return -K0 / (c * c);
    }
    case NonlinearityKind::Custom:
      if (!custom_K) throw DomainError("custom nonlinearity without a K coefficient");
      return custom_K(vl);
  }
  return 0.0;
}

double NonlinearityModel::M_coefficient(double vl) const {
  switch (kind) {
    case NonlinearityKind::Kerr: return 0.0;
    case NonlinearityKind::Saturable: {
      const double c = saturable_base(background, vl);
      return K0 / (c * c * c);
    }
    case NonlinearityKind::Custom:
      if (!custom_M) throw DomainError("custom nonlinearity without an M coefficient");
      return custom_M(vl);
  }
  return 0.0;
}

ExpansionFields expand_coefficients(const NonlinearityModel& model, std::span<const double> vl) {
  ExpansionFields out;
  out.K_field.resize(vl.size());
  out.M_field.resize(vl.size());
  for (std::size_t p = 0; p < vl.size(); ++p) {
    out.K_field[p] = model.K_coefficient(vl[p]);
    out.M_field[p] = model.M_coefficient(vl[p]);
  }
  return out;
}

std::vector<double> evaluate_v(const NonlinearityModel& model, std::span<const double> vl,
                               std::span<const double> density) {
  if (vl.size() != density.size()) throw StructuralError("evaluate_v: sample count mismatch");
  std::vector<double> out(density.size());
  for (std::size_t p = 0; p < density.size(); ++p) {
    if (density[p] < 0.0) throw DomainError("evaluate_v: negative density");
    out[p] = model.value(vl[p], density[p]);
  }
  return out;
}

}  // namespace diracnls
