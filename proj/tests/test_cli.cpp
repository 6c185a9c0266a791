#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "diracnls/io.hpp"
#include "diracnls_cli/commands.hpp"
#include "diracnls_cli/config.hpp"
#include "support/oracles.hpp"

using namespace diracnls;
using namespace diracnls::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "diracnls_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

/// Data rows of a CSV file, split on commas.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int invoke(const std::string& command, const fs::path& config, const fs::path& out,
           std::vector<fs::path> inputs = {}, std::optional<int> cutoff = std::nullopt) {
  Invocation inv;
  inv.command = command;
  inv.config = config;
  inv.out = out;
  inv.cutoff = cutoff;
  inv.quiet = true;
  inv.inputs = std::move(inputs);
  std::ostringstream log, err;
  return run(inv, log, err);
}

/// Map from relative path to file contents.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return out;
}

const char* kFastBifurcate =
    "cutoff = 4\n"
    "epsilons = 0.04\n"
    "beta_samples = 24\n"
    "restarts = 2\n";

}  // namespace

TEST_CASE("config grammar") {
  const auto c = parse_config(
      "# comment\n"
      "\n"
      "epsilon_V = 0.25   # trailing comment\n"
      "epsilons = 0.01, 0.02 0.05\n"
      "nonlinearity = saturable\n"
      "background = 2\n"
      "shift_mode = zero\n"
      "seed = 42\n");
  CHECK(c.epsilon_V == 0.25);
  CHECK(c.epsilons == std::vector<double>{0.01, 0.02, 0.05});
  CHECK(c.nonlinearity == NonlinearityKind::Saturable);
  CHECK(c.background == 2.0);
  CHECK(c.shift_mode == ShiftMode::Zero);
  CHECK(c.seed == 42);
  CHECK(c.cutoff == 6);
  CHECK_NOTHROW(c.validate());

  const auto bc = c.bootstrap_config(0.02);
  CHECK(bc.epsilon == 0.02);
  CHECK(bc.shift_mode == ShiftMode::Zero);
  CHECK(bc.outer_tol == c.outer_tol);

  CHECK(config_keys().size() == 22);
  for (const char* bad : {"nope = 1\n", "cutoff = 4\ncutoff = 5\n", "cutoff\n", "cutoff = \n", "cutoff = four\n",
                          "= 3\n", "nonlinearity = cubic\n", "shift_mode = imag\n", "epsilons = 0.02 x\n"})
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("config invariants") {
  for (const char* bad : {"cutoff = 1\n", "epsilons = 0.04, 0.02\n", "epsilons = 0.02, 0.02\n", "epsilons = -0.1\n",
                          "inner_tol = 0\n", "outer_tol = -1\n", "pseudo_tol = 0\n", "damping = 0\n",
                          "damping = 1.5\n", "beta_samples = 6\n", "background = 0\n", "K0 = 0\n",
                          "epsilon_V = -1\n", "max_inner = 0\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_config(bad).validate(), ConfigError);
  }
}

TEST_CASE("config errors give exit status 2") {
  const auto dir = scratch("config_errors");
  spit(dir / "bad.cfg", "cutoff = 1\n");
  CHECK(invoke("spectrum", dir / "bad.cfg", dir / "out") == kConfigFailure);
  spit(dir / "unknown.cfg", "colour = blue\n");
  CHECK(invoke("spectrum", dir / "unknown.cfg", dir / "out") == kConfigFailure);
  spit(dir / "missing.cfg", "potential = nowhere.txt\n");
  CHECK(invoke("spectrum", dir / "missing.cfg", dir / "out") == kConfigFailure);
  CHECK(invoke("spectrum", dir / "absent.cfg", dir / "out") == kConfigFailure);
  spit(dir / "ok.cfg", "");
  CHECK(invoke("spectrum", dir / "ok.cfg", dir / "out", {}, 1) == kConfigFailure);
  CHECK_FALSE(fs::exists(dir / "out" / "spectrum"));
}

TEST_CASE("spectrum of the free problem") {
  const auto dir = scratch("spectrum_free");
  spit(dir / "run.cfg", "epsilon_V = 0\ncutoff = 4\n");
  REQUIRE(invoke("spectrum", dir / "run.cfg", dir / "out") == kSuccess);
  const auto rows = csv_rows(dir / "out" / "spectrum" / "spectrum.csv");
  REQUIRE(rows.size() >= 4);
  const double E = oracle::free_dirac_energy();
  for (int n = 0; n < 3; ++n) CHECK(std::abs(std::stod(rows[n][1]) - E) <= 1e-10 * E);
  CHECK(std::stod(rows[3][1]) > E + 1.0);
  const auto sym = read_json(dir / "out" / "spectrum" / "symmetry.json");
  CHECK(sym["lowest_cluster"]["size"] == 3);
  CHECK(sym["dirac_pair"]["present"] == false);
  CHECK_FALSE(fs::exists(dir / "out" / "spectrum" / "phi_a.csv"));
}

TEST_CASE("spectrum in the Dirac regime") {
  const auto dir = scratch("spectrum_dirac");
  spit(dir / "run.cfg", "epsilon_V = 0.5\n");
  REQUIRE(invoke("spectrum", dir / "run.cfg", dir / "out") == kSuccess);
  const auto sym = read_json(dir / "out" / "spectrum" / "symmetry.json");
  CHECK(sym["lowest_cluster"]["size"] == 2);
  CHECK(sym["dirac_pair"]["present"] == true);
  CHECK(sym["dirac_pair"]["classes"] == json::array({"omega", "omega_bar"}));
  CHECK(sym["dirac_pair"]["conj_invert_defect"].get<double>() <= 1e-10);
  CHECK(sym["metadata"]["cutoff"] == "6");

  const auto set = oracle::shared_workspace()->index_set_ptr();
  const auto a = read_field_csv(dir / "out" / "spectrum" / "phi_a.csv", set);
  const auto b = read_field_csv(dir / "out" / "spectrum" / "phi_b.csv", set);
  CHECK((conj_invert(a) - b).norm() <= 1e-10);
  CHECK((a - oracle::shared_workspace()->basis().phi_a()).norm() == 0.0);

  const auto text = slurp(dir / "out" / "spectrum" / "spectrum.csv");
  for (const char* key : {"# version=", "# cutoff=6", "# outer_tol=", "# gauge_anchor="})
    CHECK(text.find(key) != std::string::npos);
}

TEST_CASE("broken custom potential is rejected") {
  const auto dir = scratch("broken");
  spit(dir / "v.txt",
       "# m1 m2 re im\n"
       "1 0 0.5\n-1 0 0.5\n0 1 0.5\n0 -1 0.5\n1 1 0.5\n-1 -1 0.5\n"
       "1 -1 0.3\n-1 1 0.3\n");
  spit(dir / "run.cfg", "potential = v.txt\ncutoff = 3\n");
  CHECK(invoke("spectrum", dir / "run.cfg", dir / "out") == kRegimeFailure);

  spit(dir / "ok.txt", "1 0 0.5\n-1 0 0.5\n0 1 0.5\n0 -1 0.5\n1 1 0.5\n-1 -1 0.5\n");
  spit(dir / "ok.cfg", "potential = ok.txt\ncutoff = 3\n");
  CHECK(invoke("spectrum", dir / "ok.cfg", dir / "out2") == kSuccess);
}

TEST_CASE("integrals") {
  const auto dir = scratch("integrals");
  spit(dir / "run.cfg", "landscape_theta = 5\nlandscape_phase = 4\n");
  REQUIRE(invoke("integrals", dir / "run.cfg", dir / "out") == kSuccess);
  const auto path = dir / "out" / "integrals" / "report.json";
  const auto r = read_json(path);
  CHECK(r["M_integral"]["re"] == 0.0);
  CHECK(r["M_integral"]["im"] == 0.0);
  CHECK(r["I_c_int"]["re"].get<double>() == doctest::Approx(3.0 * r["T2"]["re"].get<double>()).epsilon(1e-15));
  CHECK(r["I_c_int"]["im"].get<double>() == doctest::Approx(3.0 * r["T2"]["im"].get<double>()).epsilon(1e-15));

  const auto report = read_report_json(path);
  const auto& expected = oracle::shared_solver().report();
  CHECK(report.I_one == expected.I_one);
  CHECK(report.I_c_int == expected.I_c_int);

  const auto rows = csv_rows(dir / "out" / "integrals" / "landscape.csv");
  CHECK(rows.size() == 20);
  int poles = 0;
  for (const auto& row : rows) {
    if (std::stod(row[0]) != 0.0) continue;
    ++poles;
    CHECK(std::stod(row[2]) == doctest::Approx(1.0));
    CHECK(std::stod(row[6]) == 0.0);
  }
  CHECK(poles == 4);
}

TEST_CASE("saturable integrals carry the quintic term") {
  const auto dir = scratch("integrals_sat");
  spit(dir / "run.cfg", "nonlinearity = saturable\ncutoff = 4\nlandscape_theta = 3\nlandscape_phase = 2\n");
  REQUIRE(invoke("integrals", dir / "run.cfg", dir / "out") == kSuccess);
  const auto r = read_json(dir / "out" / "integrals" / "report.json");
  CHECK(std::hypot(r["M_integral"]["re"].get<double>(), r["M_integral"]["im"].get<double>()) > 0.0);
  CHECK(r["metadata"]["background"] == "1");
}

TEST_CASE("bifurcate, verify and determinism") {
  const auto dir = scratch("bifurcate");
  spit(dir / "run.cfg", kFastBifurcate);
  REQUIRE(invoke("bifurcate", dir / "run.cfg", dir / "out") == kSuccess);
  const auto bif = dir / "out" / "bifurcate";

  const auto rows = csv_rows(bif / "summary.csv");
  REQUIRE(rows.size() == 8);
  for (const auto& row : rows) {
    CHECK(row.back() == "true");
    CHECK(std::stod(row[9]) <= 1e-8);
  }
  const auto scaling = read_json(bif / "scaling.json");
  CHECK(scaling["exponents"]["correction_norm"].is_null());

  // the same run twice
  REQUIRE(invoke("bifurcate", dir / "run.cfg", dir / "again") == kSuccess);
  CHECK(tree(bif) == tree(dir / "again" / "bifurcate"));

  SUBCASE("verify passes on fresh output") {
    REQUIRE(invoke("verify", dir / "run.cfg", dir / "out") == kSuccess);
    const auto v = read_json(dir / "out" / "verify" / "verify.json");
    CHECK(v["passed"] == true);
    CHECK(v["modes"].size() == 8);
  }

  SUBCASE("tampered field fails") {
    const auto mode_dir = dir / "tampered";
    fs::create_directories(mode_dir);
    fs::path source;
    for (const auto& e : fs::recursive_directory_iterator(bif))
      if (e.path().filename() == "mode_equator_1.json") source = e.path();
    REQUIRE_FALSE(source.empty());
    auto ws = std::make_shared<const Workspace>(parse_config(kFastBifurcate).model_parameters());
    auto m = read_mode(source, ws->index_set_ptr());
    oracle::Gen gen(77);
    m.phi += 1e-3 * gen.field(ws->index_set_ptr());
    write_mode(mode_dir / "mode_equator_1.json", mode_dir / "field_equator_1.csv", m, "equator_1", {});
    CHECK(invoke("verify", dir / "run.cfg", dir / "out_t", {mode_dir}) == kCertificationFailure);
    const auto v = read_json(dir / "out_t" / "verify" / "verify.json");
    CHECK(v["passed"] == false);
  }

  SUBCASE("rotated copy passes with shifted beta") {
    const auto mode_dir = dir / "rotated";
    fs::create_directories(mode_dir);
    fs::path source;
    for (const auto& e : fs::recursive_directory_iterator(bif))
      if (e.path().filename() == "mode_equator_0.json") source = e.path();
    REQUIRE_FALSE(source.empty());
    const BootstrapSolver s(std::make_shared<const Workspace>(parse_config(kFastBifurcate).model_parameters()));
    const auto m = read_mode(source, s.workspace().index_set_ptr());
    const auto r = s.rotate_mode(m);
    CHECK(std::abs(wrap_angle(r.pair.beta() - m.pair.beta() - 2.0 * oracle::pi / 3.0)) < 1e-12);
    write_mode(mode_dir / "mode_rotated.json", mode_dir / "field_rotated.csv", r, "rotated", {});
    CHECK(invoke("verify", dir / "run.cfg", dir / "out_r", {mode_dir / "mode_rotated.json"}) == kSuccess);
  }
}

TEST_CASE("unknown command") {
  const auto dir = scratch("unknown");
  spit(dir / "run.cfg", "");
  CHECK(invoke("plot", dir / "run.cfg", dir / "out") == kConfigFailure);
}
