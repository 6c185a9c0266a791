#include "diracnls/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "diracnls/errors.hpp"

namespace diracnls {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  return in;
}

void write_header(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

json metadata_json(const Metadata& meta) {
  json m = json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

json complex_json(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }
cd complex_from(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw DomainError("not a number: '" + s + "'");
  return x;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_field_csv(const std::filesystem::path& path, const BlochField& field, const Metadata& meta) {
  auto out = open_out(path);
  write_header(out, meta);
  out << "m1,m2,re,im\n";
  const auto& set = field.index_set();
  for (std::size_t i = 0; i < field.size(); ++i)
    out << set[i].m1 << ',' << set[i].m2 << ',' << format_double(field[i].real()) << ','
        << format_double(field[i].imag()) << '\n';
}

BlochField read_field_csv(const std::filesystem::path& path, std::shared_ptr<const IndexSet> set) {
  auto in = open_in(path);
  BlochField f(set);
  std::vector<bool> seen(set->size(), false);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (!header) {
      if (cells.size() != 4 || cells[0] != "m1") throw StructuralError("field CSV lacks the m1,m2,re,im header");
      header = true;
      continue;
    }
    if (cells.size() != 4) throw StructuralError("field CSV row with " + std::to_string(cells.size()) + " cells");
    const FourierIndex idx{static_cast<int>(parse_double(cells[0])), static_cast<int>(parse_double(cells[1]))};
    const auto pos = set->find(idx);
    if (!pos) throw StructuralError("field CSV index outside the index set");
    f.coeffs()[static_cast<Eigen::Index>(*pos)] = cd(parse_double(cells[2]), parse_double(cells[3]));
    seen[*pos] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw StructuralError("field CSV does not cover the index set");
  return f;
}

void write_spectrum_csv(const std::filesystem::path& path, const ClassifiedSpectrum& spectrum, const Metadata& meta) {
  auto out = open_out(path);
  write_header(out, meta);
  out << "index,eigenvalue,class,residual\n";
  for (std::size_t n = 0; n < spectrum.size(); ++n)
    out << n << ',' << format_double(spectrum.eigenvalues[static_cast<Eigen::Index>(n)]) << ','
        << to_string(spectrum.classes[n]) << ',' << format_double(spectrum.residuals[static_cast<Eigen::Index>(n)])
        << '\n';
}

void write_report_json(const std::filesystem::path& path, const PerturbationReport& r, const Metadata& meta) {
  json j;
  j["metadata"] = metadata_json(meta);
  j["I_one"] = r.I_one;
  j["I_int"] = r.I_int;
  j["I_a_minus_I_b"] = r.I_a_minus_I_b;
  j["I_one_imag"] = r.I_one_imag;
  j["I_int_imag"] = r.I_int_imag;
  j["T2"] = complex_json(r.T2);
  j["M_integral"] = complex_json(r.M_integral);
  j["I_c_int"] = complex_json(r.I_c_int);
  j["abs_I_c_int"] = std::abs(r.I_c_int);
  j["theta_pred"] = r.theta_pred;
  j["nondegeneracy"] = r.nondegeneracy;
  j["n_terms_T2"] = r.n_terms_T2;
  j["nondegeneracy_warning"] = r.nondegeneracy_warning;
  j["interaction_warning"] = r.interaction_warning;
  j["gauge"] = {{"anchor", {r.gauge.anchor.m1, r.gauge.anchor.m2}},
                {"gamma", r.gauge.gamma},
                {"convention", r.gauge.convention()}};
  write_json(path, j);
}

PerturbationReport read_report_json(const std::filesystem::path& path) {
  const json j = read_json(path);
  PerturbationReport r;
  try {
    r.I_one = j.at("I_one").get<double>();
    r.I_int = j.at("I_int").get<double>();
    r.I_a_minus_I_b = j.at("I_a_minus_I_b").get<double>();
    r.I_one_imag = j.at("I_one_imag").get<double>();
    r.I_int_imag = j.at("I_int_imag").get<double>();
    r.T2 = complex_from(j.at("T2"));
    r.M_integral = complex_from(j.at("M_integral"));
    r.I_c_int = complex_from(j.at("I_c_int"));
    r.theta_pred = j.at("theta_pred").get<double>();
    r.nondegeneracy = j.at("nondegeneracy").get<double>();
    r.n_terms_T2 = j.at("n_terms_T2").get<int>();
    r.nondegeneracy_warning = j.at("nondegeneracy_warning").get<bool>();
    r.interaction_warning = j.at("interaction_warning").get<bool>();
    const auto& g = j.at("gauge");
    r.gauge.anchor = {g.at("anchor").at(0).get<int>(), g.at("anchor").at(1).get<int>()};
    r.gauge.gamma = g.at("gamma").get<double>();
  } catch (const json::exception& e) {
    throw DomainError("incomplete report " + path.string() + ": " + e.what());
  }
  return r;
}

void write_mode(const std::filesystem::path& json_path, const std::filesystem::path& field_path,
                const ModeResult& mode, const std::string& label, const Metadata& meta) {
  json j;
  j["metadata"] = metadata_json(meta);
  j["label"] = label;
  j["pair"] = {{"a", complex_json(mode.pair.a)}, {"b", complex_json(mode.pair.b)}, {"beta", mode.pair.beta()}};
  j["epsilon"] = mode.epsilon;
  j["E_shift"] = complex_json(mode.E_shift);
  j["residual"] = mode.residual;
  j["im_energy"] = mode.im_energy;
  j["consistency_defect"] = mode.consistency_defect;
  j["iterations"] = {{"inner", mode.inner_iterations}, {"outer", mode.outer_iterations}};
  j["outer_steps"] = mode.outer_steps;
  j["converged"] = mode.converged;
  j["is_true_eigenpair"] = mode.is_true_eigenpair;
  j["field_file"] = field_path.filename().string();
  write_json(json_path, j);
  write_field_csv(field_path, mode.phi, meta);
}

ModeResult read_mode(const std::filesystem::path& json_path, std::shared_ptr<const IndexSet> set) {
  const json j = read_json(json_path);
  ModeResult m;
  std::string field_file;
  try {
    m.pair.a = complex_from(j.at("pair").at("a"));
    m.pair.b = complex_from(j.at("pair").at("b"));
    m.epsilon = j.at("epsilon").get<double>();
    m.E_shift = complex_from(j.at("E_shift"));
    m.residual = j.at("residual").get<double>();
    m.im_energy = j.at("im_energy").get<double>();
    m.consistency_defect = j.at("consistency_defect").get<double>();
    m.inner_iterations = j.at("iterations").at("inner").get<int>();
    m.outer_iterations = j.at("iterations").at("outer").get<int>();
    m.outer_steps = j.at("outer_steps").get<std::vector<double>>();
    m.converged = j.at("converged").get<bool>();
    m.is_true_eigenpair = j.at("is_true_eigenpair").get<bool>();
    field_file = j.at("field_file").get<std::string>();
  } catch (const json::exception& e) {
    throw DomainError("incomplete mode file " + json_path.string() + ": " + e.what());
  }
  m.phi = read_field_csv(json_path.parent_path() / field_file, set);
  return m;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve, const Metadata& meta) {
  auto out = open_out(path);
  write_header(out, meta);
  out << "beta,im_E,re_E\n";
  for (const auto& p : curve)
    out << format_double(p.beta) << ',' << format_double(p.im_energy) << ',' << format_double(p.re_energy) << '\n';
}

void write_landscape_csv(const std::filesystem::path& path, const std::vector<LandscapePoint>& points,
                         const Metadata& meta) {
  auto out = open_out(path);
  write_header(out, meta);
  out << "theta,phase,a_re,a_im,b_re,b_im,value\n";
  for (const auto& p : points) {
    const auto pair = ParameterPair::from_angles(p.theta, p.phase);
    out << format_double(p.theta) << ',' << format_double(p.phase) << ',' << format_double(pair.a.real()) << ','
        << format_double(pair.a.imag()) << ',' << format_double(pair.b.real()) << ',' << format_double(pair.b.imag())
        << ',' << format_double(p.value) << '\n';
  }
}

}  // namespace diracnls
