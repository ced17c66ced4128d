#include "fdirac/harness.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fdirac/asymptotics.hpp"
#include "fdirac/errors.hpp"
#include "fdirac/forward.hpp"
#include "fdirac/inverse.hpp"
#include "fdirac/io.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double interior_lo = 0.1 * pi;
constexpr double interior_hi = 0.9 * pi;

namespace fs = std::filesystem;

template <typename... Args>
void say(const RunOptions& opts, fmt::format_string<Args...> f, Args&&... args) {
  if (opts.out) {
    *opts.out << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
}

fs::path out_dir(const ExperimentConfig& c, const RunOptions& opts) {
  return opts.out_dir.empty() ? fs::path(c.output.directory) : opts.out_dir;
}

std::size_t grid_points(const ExperimentConfig& c, const RunOptions& opts) {
  return opts.grid_points.value_or(c.solver.grid_points);
}

GridFn from_function(const GridPtr& grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid->x(k));
  return GridFn(grid, std::move(v));
}

struct SpectrumRun {
  Spectrum spectrum;
  PotentialFunctionals functionals;
};

SpectrumRun run_spectrum(const Model& model, int n_lo, int n_hi, std::size_t jobs) {
  EigenOptions eo;
  eo.jobs = jobs;
  return SpectrumRun{find_eigenvalues(model, n_lo, n_hi, eo), potential_functionals(model)};
}

void write_spectrum(const ExperimentConfig& c, const Model& model, const SpectrumRun& run,
                    const fs::path& dir) {
  const auto& fn = run.functionals;
  CsvTable csv({"n", "lambda_n", "lambda_est_order1", "lambda_est_order2", "residual"});
  Json entries = Json::array();
  for (const auto& e : run.spectrum.entries) {
    const double est1 = eigenvalue_estimate(fn, model.theta(), model.beta(), e.n, 1);
    const double est2 = eigenvalue_estimate(fn, model.theta(), model.beta(), e.n, 2);
    csv.row({static_cast<double>(e.n), e.lambda, est1, est2, e.lambda - est2});
    Json j = Json::object();
    j["n"] = e.n;
    j["lambda_n"] = e.lambda;
    j["lambda_est_order1"] = est1;
    j["lambda_est_order2"] = est2;
    j["residual"] = e.lambda - est2;
    j["delta_at_root"] = e.delta_residual;
    entries.push_back(std::move(j));
  }
  Json failures = Json::array();
  for (const auto& f : run.spectrum.failures) {
    Json j = Json::object();
    j["n"] = f.n;
    j["reason"] = f.reason;
    failures.push_back(std::move(j));
  }
  Json doc = Json::object();
  doc["alpha"] = model.alpha().value();
  doc["theta"] = model.theta();
  doc["beta"] = model.beta();
  doc["grid_points"] = model.grid().size();
  doc["entries"] = std::move(entries);
  doc["failures"] = std::move(failures);
  if (c.wants("csv")) write_text(dir / "spectrum.csv", csv.str());
  if (c.wants("json")) write_text(dir / "spectrum.json", dump_json(doc));
}

void report_failures(const RunOptions& opts, const Spectrum& s) {
  for (const auto& f : s.failures) say(opts, "warning: eigenvalue n={} not found: {}", f.n, f.reason);
}

void write_nodes(const ExperimentConfig& c, const Model& model, const SpectrumRun& run,
                 const NodalSet& set, const fs::path& dir) {
  const NodalDataset data = NodalDataset::from_nodal_set(model.alpha(), set);
  if (c.wants("json")) write_nodal_dataset(dir / "nodes.json", data);
  if (c.wants("csv")) {
    CsvTable csv({"n", "j", "x_solver", "x_asymptotic", "n2_gap"});
    for (const auto& [n, xs] : data.nodes) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double est = node_estimate(run.functionals, model.theta(), model.beta(), n,
                                         static_cast<int>(j));
        csv.row({static_cast<double>(n), static_cast<double>(j), xs[j], est,
                 static_cast<double>(n) * n * std::abs(xs[j] - est)});
      }
    }
    write_text(dir / "nodes_vs_asymptotic.csv", csv.str());
  }
}

InverseOptions inverse_options(const ExperimentConfig& c) {
  InverseOptions o;
  o.extrapolation = c.inverse.extrapolation == "largest" ? Extrapolation::LargestN
                                                         : Extrapolation::Richardson;
  o.transfer = c.inverse.transfer == "nearest" ? Transfer::Nearest : Transfer::Interpolate;
  o.smoothing = c.inverse.smoothing;
  return o;
}

struct Verdict {
  std::string name;
  double value;
  double tolerance;
  bool pass() const { return value <= tolerance; }
};

struct InvertRun {
  ReconstructionResult result;
  std::vector<Verdict> verdicts;
};

InvertRun run_invert(const ExperimentConfig& c, const Model& model, NodalDataset data,
                     const RunOptions& opts, const fs::path& dir) {
  // Only indices up to inverse.n_max take part.
  for (auto it = data.nodes.begin(); it != data.nodes.end();) {
    it = it->first > c.inverse.n_max ? data.nodes.erase(it) : std::next(it);
  }
  if (data.alpha.value() != model.alpha().value()) {
    throw ConfigError(fmt::format("nodal data has alpha={} but the config has alpha={}",
                                  data.alpha.value(), model.alpha().value()));
  }
  const GridPtr& grid = model.grid_ptr();
  const PotentialFunctionals fn = potential_functionals(model);
  KnownData known = c.inverse.known == "pr" ? KnownData{KnownPotentials{model.p(), model.r()}}
                                            : KnownData{KnownL{fn.Lfn}};
  ReconstructionResult res = reconstruct(data, known, grid, inverse_options(c));

  std::vector<Verdict> verdicts;
  if (c.inverse.compare_truth) {
    const double theta = model.theta(), beta = model.beta();
    auto& resid = res.diagnostics.residuals;
    const GridFn f_true = from_function(grid, [&](double x) { return f_exact(fn, theta, beta, x); });
    const GridFn g_true = from_function(grid, [&](double x) { return g_exact(fn, theta, x); });
    const GridFn g_lim = from_function(grid, [&](double x) { return g_limit(fn, theta, beta, x); });
    const GridFn dmu_true = 0.5 * (model.p() + model.r());
    const GridFn ups_true = fn.upsilon.map([](double v) { return std::abs(v); });
    resid["theta"] = std::abs(res.theta_hat - theta);
    resid["beta"] = std::abs(res.beta_hat - beta);
    resid["f"] = (res.f_hat - f_true).sup_norm_on(interior_lo, interior_hi);
    resid["g"] = (res.g_hat - g_true).sup_norm_on(interior_lo, interior_hi);
    resid["g_vs_nodal_limit"] = (res.g_hat - g_lim).sup_norm_on(interior_lo, interior_hi);
    resid["dmu"] = (res.dmu_hat - dmu_true).sup_norm_on(interior_lo, interior_hi);
    resid["upsilon_abs"] = (res.upsilon_abs_hat - ups_true).sup_norm_on(interior_lo, interior_hi);
    if (std::abs(fn.mu.back()) > 1e-9) {
      res.diagnostics.warnings.push_back(fmt::format(
          "truth model has mu(pi) = {:.3g}; the reconstruction assumes mu(pi) = 0", fn.mu.back()));
    }

    const bool strict = model.alpha().value() == 1.0;
    const double angle_tol = strict ? 5e-3 : 5e-2;
    const double fn_tol = strict ? 2e-2 : 5e-2;
    verdicts.push_back({"theta", resid["theta"], angle_tol});
    verdicts.push_back({"beta", resid["beta"], angle_tol});
    if (res.p_hat) {
      resid["p"] = (*res.p_hat - model.p()).sup_norm_on(interior_lo, interior_hi);
      resid["r"] = (*res.r_hat - model.r()).sup_norm_on(interior_lo, interior_hi);
      verdicts.push_back({"p", resid["p"], fn_tol});
      verdicts.push_back({"r", resid["r"], fn_tol});
    }
    if (res.L_hat) {
      resid["L"] = (*res.L_hat - fn.Lfn).sup_norm_on(interior_lo, interior_hi);
      verdicts.push_back({"L", resid["L"], 2e-2});
    }
  }

  for (const auto& w : res.diagnostics.warnings) say(opts, "warning: {}", w);

  Json diag = Json::object();
  diag["n_max"] = res.diagnostics.n_max;
  diag["n_second"] = res.diagnostics.n_second;
  diag["clamped_radicands"] = res.diagnostics.clamped_radicands;
  diag["f_increment"] = res.diagnostics.f_increment;
  diag["g_increment"] = res.diagnostics.g_increment;
  diag["warnings"] = res.diagnostics.warnings;
  Json resid = Json::object();
  for (const auto& [k, v] : res.diagnostics.residuals) resid[k] = v;
  diag["residuals"] = std::move(resid);

  Json funcs = Json::object();
  std::vector<std::pair<std::string, const GridFn*>> outputs = {
      {"f_hat", &res.f_hat},
      {"g_hat", &res.g_hat},
      {"dmu_hat", &res.dmu_hat},
      {"upsilon_abs_hat", &res.upsilon_abs_hat},
  };
  if (res.p_hat) outputs.emplace_back("p_hat", &*res.p_hat);
  if (res.r_hat) outputs.emplace_back("r_hat", &*res.r_hat);
  if (res.L_hat) outputs.emplace_back("L_hat", &*res.L_hat);
  for (const auto& [name, f] : outputs) {
    funcs[name] = gridfn_values(*f);
    if (c.wants("csv")) write_text(dir / (name + ".csv"), gridfn_csv(*f));
  }

  Json doc = Json::object();
  doc["alpha"] = model.alpha().value();
  doc["known"] = c.inverse.known;
  doc["theta_hat"] = res.theta_hat;
  doc["beta_hat"] = res.beta_hat;
  doc["diagnostics"] = std::move(diag);
  Json g = Json::object();
  g["x"] = Json(std::vector<double>(grid->x_values().begin(), grid->x_values().end()));
  g["s"] = Json(std::vector<double>(grid->s_values().begin(), grid->s_values().end()));
  doc["grid"] = std::move(g);
  doc["functions"] = std::move(funcs);
  if (c.wants("json")) write_text(dir / "reconstruction.json", dump_json(doc));

  return InvertRun{std::move(res), std::move(verdicts)};
}

}  // namespace

Model build_model(const ExperimentConfig& config, const RunOptions& opts) {
  try {
    return Model::create(config.model, grid_points(config, opts));
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("model: {}", e.what()));
  } catch (const ParseError& e) {
    throw ConfigError(fmt::format("model: {} (offset {})", e.what(), e.offset()));
  }
}

ModelSpec with_mu_pi_zero(const ModelSpec& spec, std::size_t points, double* kappa) {
  const Model m = Model::create(spec, points);
  const double mu_pi = 0.5 * frac_integral_total(m.p() + m.r());
  const double k = std::abs(mu_pi) > 1e-12 ? -mu_pi / m.grid().s_end() : 0.0;
  if (kappa) *kappa = k;
  if (k == 0.0) return spec;
  ModelSpec out = spec;
  const std::string shift = fmt::format("{:.17g}", k);
  out.p = fmt::format("({}) + ({})", spec.p, shift);
  out.r = fmt::format("({}) + ({})", spec.r, shift);
  return out;
}

int cmd_spectrum(const ExperimentConfig& c, const RunOptions& opts) {
  const Model model = build_model(c, opts);
  const fs::path dir = out_dir(c, opts);
  say(opts, "spectrum: n = {}..{}, alpha = {}, {} grid points", c.spectrum.n_lo, c.spectrum.n_hi,
      model.alpha().value(), model.grid().size());
  const SpectrumRun run = run_spectrum(model, c.spectrum.n_lo, c.spectrum.n_hi, opts.jobs);
  write_spectrum(c, model, run, dir);
  report_failures(opts, run.spectrum);
  say(opts, "spectrum: {} eigenvalues, {} failures -> {}", run.spectrum.entries.size(),
      run.spectrum.failures.size(), dir.string());
  return run.spectrum.failures.empty() ? exit_ok : exit_partial_failure;
}

int cmd_nodes(const ExperimentConfig& c, const RunOptions& opts) {
  const Model model = build_model(c, opts);
  const fs::path dir = out_dir(c, opts);
  const SpectrumRun run = run_spectrum(model, c.spectrum.n_lo, c.spectrum.n_hi, opts.jobs);
  const NodalSet set = compute_nodal_set(model, run.spectrum, opts.jobs);
  write_spectrum(c, model, run, dir);
  write_nodes(c, model, run, set, dir);
  report_failures(opts, run.spectrum);
  for (int n : set.count_mismatch) {
    say(opts, "warning: n={} has {} nodes; left out of nodes.json", n, set.nodes.at(n).size());
  }
  say(opts, "nodes: exact node count from n = {} on -> {}", set.n_min, dir.string());
  return run.spectrum.failures.empty() ? exit_ok : exit_partial_failure;
}

int cmd_invert(const ExperimentConfig& c, const fs::path& nodes_path, const RunOptions& opts) {
  const Model model = build_model(c, opts);
  const fs::path dir = out_dir(c, opts);
  NodalDataset data = read_nodal_dataset(nodes_path);
  const InvertRun run = run_invert(c, model, std::move(data), opts, dir);
  say(opts, "invert: theta_hat = {:.6g}, beta_hat = {:.6g} -> {}", run.result.theta_hat,
      run.result.beta_hat, dir.string());
  for (const auto& [k, v] : run.result.diagnostics.residuals) say(opts, "  error {:<18} {:.3e}", k, v);
  return exit_ok;
}

int cmd_roundtrip(const ExperimentConfig& config, const RunOptions& opts) {
  ExperimentConfig c = config;
  double kappa = 0.0;
  try {
    c.model = with_mu_pi_zero(config.model, grid_points(config, opts), &kappa);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("model: {}", e.what()));
  }
  if (kappa != 0.0) say(opts, "roundtrip: shifted p and r by {:.6g} so that mu(pi) = 0", kappa);
  const Model model = build_model(c, opts);
  const fs::path dir = out_dir(c, opts);
  const int n_hi = std::max(c.spectrum.n_hi, c.inverse.n_max);
  const int n_lo = std::min(c.spectrum.n_lo, std::max(1, c.inverse.n_max / 4));
  const SpectrumRun run = run_spectrum(model, n_lo, n_hi, opts.jobs);
  const NodalSet set = compute_nodal_set(model, run.spectrum, opts.jobs);
  write_spectrum(c, model, run, dir);
  write_nodes(c, model, run, set, dir);
  report_failures(opts, run.spectrum);

  InvertRun inv =
      run_invert(c, model, NodalDataset::from_nodal_set(model.alpha(), set), opts, dir);

  Json rows = Json::array();
  say(opts, "{:<8} {:>12} {:>12}  {}", "check", "error", "tolerance", "verdict");
  for (const auto& v : inv.verdicts) {
    say(opts, "{:<8} {:>12.4e} {:>12.1e}  {}", v.name, v.value, v.tolerance,
        v.pass() ? "PASS" : "FAIL");
    Json j = Json::object();
    j["check"] = v.name;
    j["error"] = v.value;
    j["tolerance"] = v.tolerance;
    j["pass"] = v.pass();
    rows.push_back(std::move(j));
  }
  Json doc = Json::object();
  doc["model"] = Json::object();
  doc["model"]["alpha"] = c.model.alpha;
  doc["model"]["theta"] = c.model.theta;
  doc["model"]["beta"] = c.model.beta;
  doc["model"]["p"] = c.model.p;
  doc["model"]["r"] = c.model.r;
  doc["model"]["m11"] = c.model.m11;
  doc["model"]["m12"] = c.model.m12;
  doc["model"]["m21"] = c.model.m21;
  doc["model"]["m22"] = c.model.m22;
  doc["mu_shift"] = kappa;
  doc["n_min_exact_count"] = set.n_min;
  doc["eigenvalue_failures"] = run.spectrum.failures.size();
  doc["verdicts"] = std::move(rows);
  if (c.wants("json")) write_text(dir / "roundtrip.json", dump_json(doc));
  return run.spectrum.failures.empty() ? exit_ok : exit_partial_failure;
}

std::vector<CalculusCheck> calculus_suite(std::size_t points) {
  struct TestFn {
    const char* name;
    std::function<double(double, double)> f, df, integral;  // in (s, alpha)
  };
  const std::vector<TestFn> fns = {
      {"sin(s)", [](double s, double) { return std::sin(s); },
       [](double s, double) { return std::cos(s); },
       [](double s, double) { return 1.0 - std::cos(s); }},
      {"cos(s)", [](double s, double) { return std::cos(s); },
       [](double s, double) { return -std::sin(s); },
       [](double s, double) { return std::sin(s); }},
      {"exp(-s)", [](double s, double) { return std::exp(-s); },
       [](double s, double) { return -std::exp(-s); },
       [](double s, double) { return 1.0 - std::exp(-s); }},
      {"x^(2a)", [](double s, double a) { return a * a * s * s; },
       [](double s, double a) { return 2.0 * a * a * s; },
       [](double s, double a) { return a * a * s * s * s / 3.0; }},
      {"1/(2+x^a)", [](double s, double a) { return 1.0 / (2.0 + a * s); },
       [](double s, double a) { return -a / ((2.0 + a * s) * (2.0 + a * s)); },
       [](double s, double a) { return std::log1p(0.5 * a * s) / a; }},
  };
  constexpr double tol = 1e-6;
  std::vector<CalculusCheck> out;
  for (double a : {0.3, 0.5, 0.8, 1.0}) {
    const GridPtr grid = SGrid::make(AlphaOrder(a), points);
    auto on_grid = [&](const std::function<double(double, double)>& fn) {
      std::vector<double> v(grid->size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid->s(k), a);
      return GridFn(grid, std::move(v));
    };
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const TestFn& t = fns[i];
      const TestFn& u = fns[(i + 1) % fns.size()];
      const GridFn f = on_grid(t.f), df = on_grid(t.df), big_f = on_grid(t.integral);
      const GridFn g = on_grid(u.f);
      out.push_back({fmt::format("derivative {}", t.name), a, (frac_derivative(f) - df).sup_norm(), tol});
      out.push_back({fmt::format("integral {}", t.name), a, (frac_integral(f) - big_f).sup_norm(), tol});
      out.push_back({fmt::format("D I f = f, {}", t.name), a,
                     (frac_derivative(frac_integral(f)) - f).sup_norm(), tol});
      out.push_back({fmt::format("I D f = f - f(0), {}", t.name), a,
                     (frac_integral(frac_derivative(f)) - (f + (-f.front()))).sup_norm(), tol});
      const double parts = frac_integral_total(f * frac_derivative(g)) +
                           frac_integral_total(g * frac_derivative(f)) -
                           (f.back() * g.back() - f.front() * g.front());
      out.push_back({fmt::format("by parts {} / {}", t.name, u.name), a, std::abs(parts), tol});
    }
  }
  return out;
}

int cmd_selftest(const RunOptions& opts) {
  const auto checks = calculus_suite();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!c.pass()) ++failed;
    say(opts, "{}  alpha={:<4} {:<34} error={:.2e}", c.pass() ? "PASS" : "FAIL", c.alpha, c.name,
        c.error);
  }
  say(opts, "selftest: {} of {} checks passed", checks.size() - failed, checks.size());
  return failed == 0 ? exit_ok : exit_partial_failure;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) {
    return exit_config_error;
  }
  if (dynamic_cast<const InsufficientData*>(&e)) return exit_insufficient_data;
  return exit_partial_failure;
}

}  // namespace fdirac
