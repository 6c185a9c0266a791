#include <iostream>

#include <CLI11.hpp>

#include "diracnls/version.hpp"
#include "diracnls_cli/commands.hpp"

int main(int argc, char** argv) {
  using diracnls::cli::Invocation;
  CLI::App app{"Nonlinear Dirac-point bifurcation solver for honeycomb lattices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", diracnls::kVersion);

  Invocation inv;
  std::string out;
  int cutoff = 0;
  app.add_option("--config", inv.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory (overrides output_dir)");
  app.add_option("--cutoff", cutoff, "Fourier cutoff N (overrides cutoff)");
  app.add_flag("--quiet,-q", inv.quiet, "Suppress progress output");

  app.add_subcommand("spectrum", "Linear spectrum, Dirac pair and symmetry report")->fallthrough();
  app.add_subcommand("integrals", "Perturbation integrals and necessary-condition landscape")->fallthrough();
  app.add_subcommand("bifurcate", "Bootstrap the eight bifurcating modes for every epsilon")->fallthrough();
  auto* verify = app.add_subcommand("verify", "Re-certify mode files from a previous run")->fallthrough();
  verify->add_option("modes", inv.inputs, "Mode JSON files or directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : diracnls::cli::kConfigFailure;
  }
  inv.command = app.get_subcommands().front()->get_name();
  if (!out.empty()) inv.out = out;
  if (app.count("--cutoff") > 0) inv.cutoff = cutoff;
  return diracnls::cli::run(inv, std::cout, std::cerr);
}
