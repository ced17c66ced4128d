// fdirac: spectra, nodes and nodal reconstruction for conformable Dirac systems.

#include <iostream>
#include <string>

#ifdef FDIRAC_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "fdirac/config.hpp"
#include "fdirac/errors.hpp"
#include "fdirac/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string nodes;
  std::string out;
  std::size_t jobs = 1;
  std::size_t grid = 0;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_config) {
  auto* opt = cmd->add_option("--config", f.config, "experiment config (native or JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides output.directory)");
  cmd->add_option("--jobs", f.jobs, "parallel workers for per-index solves")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", f.grid, "grid points (overrides solver.grid_points)")
      ->check(CLI::Range(std::size_t{3}, std::size_t{100'000'000}));
}

fdirac::RunOptions run_options(const Flags& f) {
  fdirac::RunOptions o;
  o.out_dir = f.out;
  o.jobs = f.jobs;
  if (f.grid > 0) o.grid_points = f.grid;
  o.out = &std::cout;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, nodal points and inverse nodal reconstruction for conformable "
               "fractional Dirac-type integro-differential systems"};
  app.require_subcommand(1);
  Flags flags;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and their asymptotic estimates");
  auto* nodes = app.add_subcommand("nodes", "nodal points and their asymptotic estimates");
  auto* invert = app.add_subcommand("invert", "reconstruct from a nodal dataset");
  auto* roundtrip = app.add_subcommand("roundtrip", "spectrum, nodes and reconstruction in one run");
  auto* selftest = app.add_subcommand("selftest", "conformable calculus identities");
  for (auto* cmd : {spectrum, nodes, invert, roundtrip}) add_common(cmd, flags, true);
  invert->add_option("--nodes", flags.nodes, "nodal dataset JSON")->required()->check(CLI::ExistingFile);
  add_common(selftest, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fdirac::exit_config_error;
  }

  try {
    const fdirac::RunOptions opts = run_options(flags);
    if (selftest->parsed()) return fdirac::cmd_selftest(opts);
    const fdirac::ExperimentConfig config = fdirac::load_config(flags.config);
    if (spectrum->parsed()) return fdirac::cmd_spectrum(config, opts);
    if (nodes->parsed()) return fdirac::cmd_nodes(config, opts);
    if (invert->parsed()) return fdirac::cmd_invert(config, flags.nodes, opts);
    return fdirac::cmd_roundtrip(config, opts);
  } catch (const fdirac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return fdirac::exit_code_for(e);
  } catch (const fdirac::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return fdirac::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fdirac::exit_code_for(e);
  }
}
