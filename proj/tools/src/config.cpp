#include "diracnls_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace diracnls::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T x{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not a number: '" + value + "'");
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::string spaced = value;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string item;
  while (in >> item) out.push_back(parse_number<double>(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void require_positive(const std::string& key, double x) {
  if (!(x > 0.0)) throw ConfigError(key + " must be positive");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "potential",   "epsilon_V",  "nonlinearity",  "K0",           "background",
      "cutoff",      "grid",       "epsilons",      "beta_samples", "inner_tol",
      "outer_tol",   "pseudo_tol", "max_inner",     "max_outer",    "damping",
      "shift_mode",  "output_dir", "seed",          "restarts",     "perturbation_scale",
      "landscape_theta", "landscape_phase"};
  return keys;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");

    try {
      if (key == "potential") {
        c.potential = value;
        if (value != "standard") c.potential_path = base_dir / value;
      } else if (key == "epsilon_V") {
        c.epsilon_V = parse_number<double>(key, value);
      } else if (key == "nonlinearity") {
        c.nonlinearity = parse_nonlinearity_kind(value);
        if (c.nonlinearity == NonlinearityKind::Custom) throw ConfigError("nonlinearity: custom models are library-only");
      } else if (key == "K0") {
        c.K0 = parse_number<double>(key, value);
      } else if (key == "background") {
        c.background = parse_number<double>(key, value);
      } else if (key == "cutoff") {
        c.cutoff = parse_number<int>(key, value);
      } else if (key == "grid") {
        c.grid_resolution = parse_number<int>(key, value);
      } else if (key == "epsilons") {
        c.epsilons = parse_list(key, value);
      } else if (key == "beta_samples") {
        c.beta_samples = parse_number<int>(key, value);
      } else if (key == "inner_tol") {
        c.inner_tol = parse_number<double>(key, value);
      } else if (key == "outer_tol") {
        c.outer_tol = parse_number<double>(key, value);
      } else if (key == "pseudo_tol") {
        c.pseudo_tol = parse_number<double>(key, value);
      } else if (key == "max_inner") {
        c.max_inner = parse_number<int>(key, value);
      } else if (key == "max_outer") {
        c.max_outer = parse_number<int>(key, value);
      } else if (key == "damping") {
        c.damping = parse_number<double>(key, value);
      } else if (key == "shift_mode") {
        c.shift_mode = parse_shift_mode(value);
      } else if (key == "output_dir") {
        c.output_dir = value;
      } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "restarts") {
        c.restarts = parse_number<int>(key, value);
      } else if (key == "perturbation_scale") {
        c.perturbation_scale = parse_number<double>(key, value);
      } else if (key == "landscape_theta") {
        c.landscape_theta = parse_number<int>(key, value);
      } else if (key == "landscape_phase") {
        c.landscape_phase = parse_number<int>(key, value);
      }
    } catch (const diracnls::Error& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void RunConfig::validate() const {
  if (cutoff < 2) throw ConfigError("cutoff must be at least 2");
  if (grid_resolution < 0) throw ConfigError("grid must be nonnegative");
  if (!(epsilon_V >= 0.0)) throw ConfigError("epsilon_V must be nonnegative");
  require_positive("inner_tol", inner_tol);
  require_positive("outer_tol", outer_tol);
  require_positive("pseudo_tol", pseudo_tol);
  require_positive("damping", damping);
  if (damping > 1.0) throw ConfigError("damping must not exceed 1");
  if (max_inner < 1 || max_outer < 1) throw ConfigError("iteration caps must be positive");
  if (beta_samples < 12) throw ConfigError("beta_samples must be at least 12");
  if (epsilons.empty()) throw ConfigError("epsilons must not be empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require_positive("epsilons", epsilons[i]);
    if (i > 0 && !(epsilons[i] > epsilons[i - 1])) throw ConfigError("epsilons must be strictly ascending");
  }
  if (restarts < 0) throw ConfigError("restarts must be nonnegative");
  require_positive("perturbation_scale", perturbation_scale);
  if (landscape_theta < 2 || landscape_phase < 1) throw ConfigError("landscape grid too small");
  if (!(K0 != 0.0) || !std::isfinite(K0)) throw ConfigError("K0 must be finite and nonzero");
  require_positive("background", background);
}

ModelParameters RunConfig::model_parameters() const {
  ModelParameters p;
  if (potential != "standard") {
    try {
      p.potential = HoneycombPotential::read_table(potential_path);
    } catch (const diracnls::Error& e) {
      throw ConfigError(std::string("potential: ") + e.what());
    }
  }
  p.epsilon_V = epsilon_V;
  p.nonlinearity = nonlinearity == NonlinearityKind::Saturable ? NonlinearityModel::saturable(K0, background)
                                                               : NonlinearityModel::kerr(K0);
  p.cutoff = cutoff;
  p.grid_resolution = grid_resolution;
  return p;
}

BootstrapConfig RunConfig::bootstrap_config(double epsilon) const {
  BootstrapConfig b;
  b.epsilon = epsilon;
  b.inner_tol = inner_tol;
  b.outer_tol = outer_tol;
  b.pseudo_tol = pseudo_tol;
  b.max_inner = max_inner;
  b.max_outer = max_outer;
  b.damping = damping;
  b.shift_mode = shift_mode;
  b.beta_samples = beta_samples;
  return b;
}

}  // namespace diracnls::cli
