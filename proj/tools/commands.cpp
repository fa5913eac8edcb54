#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "laxflow/laxflow.hpp"

namespace laxflow::cli {

namespace {

namespace fs = std::filesystem;

json checks_to_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass},
                   {"sample", c.sample}});
  }
  return arr;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Check below(std::string name, double value, double tolerance, int sample) {
  return {std::move(name), value, tolerance, std::isfinite(value) && value < tolerance, sample};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

fs::path output_dir(const CommandOptions& opts) {
  fs::path dir(opts.config.output.dir);
  fs::create_directories(dir);
  return dir;
}

void write_verdict(const CommandOptions& opts, const std::string& command,
                   const std::vector<Check>& checks, json extra = json::object()) {
  json v = std::move(extra);
  v["command"] = command;
  v["pass"] = all_pass(checks);
  v["checks"] = checks_to_json(checks);
  write_text(output_dir(opts) / "verdict.json", v.dump(2) + "\n");
}

void log_checks(const Logger& log, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    std::ostringstream line;
    line << (c.pass ? "PASS " : "FAIL ") << c.name << " [sample " << c.sample
         << "] value=" << format_number(c.value) << " tol=" << format_number(c.tolerance);
    if (c.pass) {
      log.debug(line.str());
    } else {
      log.error(line.str());
    }
  }
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results keep index order.
template <class Result>
std::vector<Result> parallel_map(int count, int jobs, const std::function<Result(int)>& fn) {
  std::vector<Result> results(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
    return results;
  }
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < count; i += workers) results[static_cast<std::size_t>(i)] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();
  return results;
}

PhaseState sample_state(const CommandOptions& opts, int sample) {
  if (sample == 0) return opts.config.initial_state();
  return generate_state(opts.config.model, opts.config.generator,
                        opts.config.run.seed + static_cast<std::uint64_t>(sample));
}

IntegrateOptions integrate_options(const RunConfig& cfg, double t_start) {
  IntegrateOptions io;
  io.t_end = t_start + cfg.t_end();
  io.dt = cfg.run.dt;
  io.scheme = cfg.run.scheme;
  io.record_every = cfg.run.record_every;
  io.kmax = cfg.model.lax_supported() ? cfg.kmax() : 0;
  return io;
}

Check flow_order_check(std::string name, double coarse, double fine, int sample) {
  // Second order: halving h divides the residual by 4. Residuals at the
  // roundoff floor (exactly integrable entries) carry no order information.
  const double ratio = fine > 0.0 ? coarse / fine : 4.0;
  const double deviation = std::fabs(ratio / 4.0 - 1.0);
  const bool roundoff = coarse <= Tolerances::flow_roundoff_floor;
  return {std::move(name), ratio, Tolerances::flow_ratio_deviation,
          roundoff || deviation <= Tolerances::flow_ratio_deviation, sample};
}

}  // namespace

std::vector<Check> verify_sample(const ModelParams& params, const PhaseState& state,
                                 const CommandOptions& opts, int sample) {
  std::vector<Check> checks;
  auto lax = build_lax(params, state);
  if (opts.corrupt_m) lax.M = ComplexMatrix(lax.dim());

  checks.push_back(below("commutator_identity", check_commutator_identity(lax),
                         Tolerances::commutator_identity, sample));
  checks.push_back(below("N_identity", check_N_identity(lax), Tolerances::n_identity, sample));
  const auto herm = hermiticity_residuals(lax);
  checks.push_back(below("hermitian_L", herm.L, Tolerances::hermiticity, sample));
  checks.push_back(below("hermitian_iM", herm.iM, Tolerances::hermiticity, sample));
  checks.push_back(below("hermitian_N", herm.N, Tolerances::hermiticity, sample));

  std::vector<std::complex<double>> b(state.q.size());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = {state.p[j], -params.omega * state.q[j]};
  const auto substituted =
      lax_matrix_with_diagonal<double>(params, state.q, std::span<const std::complex<double>>(b));
  checks.push_back(
      below("substitution_b", max_abs_diff(substituted, lax.Ltilde), Tolerances::substitution, sample));

  const double h = Tolerances::flow_h;
  const auto fc = lax_flow_residual(params, state, 2.0 * h);
  const auto ff = lax_flow_residual(params, state, h);
  checks.push_back(flow_order_check("flow_Ltilde_order", fc.ltilde, ff.ltilde, sample));
  checks.push_back(flow_order_check("flow_N_order", fc.n, ff.n, sample));
  const auto pc = flow_residual_N1_N2(params, state, 2.0 * h);
  const auto pf = flow_residual_N1_N2(params, state, h);
  checks.push_back(flow_order_check("flow_N1_order", pc.n1, pf.n1, sample));
  checks.push_back(flow_order_check("flow_N2_order", pc.n2, pf.n2, sample));

  const double two_h = 2.0 * hamiltonian(params, state);
  const double i1 = compute_I(build_lax(params, state), 1).front();
  checks.push_back(below("I1_equals_2H", std::fabs(i1 - two_h) / std::max(std::fabs(two_h), 1e-300),
                         Tolerances::i1_equals_2h, sample));

  const int kmax = opts.config.kmax();
  auto io = integrate_options(opts.config, state.t);
  io.kmax = kmax;
  const auto traj = integrate(params, state, io);
  const double omega = opts.phase_omega.value_or(params.omega);
  const auto drift = drift_stats(traj);
  checks.push_back(below("phase_law", phase_evolution_check(traj, omega, kmax),
                         Tolerances::phase_law, sample));
  checks.push_back(below("B_modulus_drift", drift.max_B_modulus(), Tolerances::modulus_drift, sample));
  checks.push_back(below("I_drift", drift.max_I(), Tolerances::invariant_drift, sample));
  return checks;
}

int cmd_simulate(const CommandOptions& opts, const Logger& log) {
  const auto& cfg = opts.config;
  const auto state0 = cfg.initial_state();
  const auto io = integrate_options(cfg, state0.t);
  log.info("simulate: n=" + std::to_string(cfg.model.n) + " steps of dt=" + format_number(io.dt));
  const auto traj = integrate(cfg.model, state0, io);

  std::optional<double> period;
  if (cfg.model.lax_supported() && cfg.model.omega > 0.0 &&
      traj.duration() >= period_of(cfg.model.omega) - 1e-12)
    period = period_check(traj, cfg.model.omega);

  const auto dir = output_dir(opts);
  if (cfg.output.wants_csv()) {
    std::ostringstream t;
    write_trajectory_csv(t, traj);
    write_text(dir / "trajectory.csv", t.str());
    if (traj.kmax > 0) {
      std::ostringstream i;
      write_invariants_csv(i, traj);
      write_text(dir / "invariants.csv", i.str());
    }
  }
  const auto summary = trajectory_summary(traj, period);
  if (cfg.output.wants_json()) write_text(dir / "summary.json", summary.dump(2) + "\n");

  // Informational: simulate reports but does not gate on these.
  const auto drift = drift_stats(traj);
  std::vector<Check> checks;
  const double h_tol = traj.scheme == Scheme::Yoshida4 ? 1e-8 : 1e-5;
  checks.push_back(below("H_drift", drift.H, h_tol, 0));
  if (traj.kmax > 0) checks.push_back(below("I_drift", drift.max_I(), Tolerances::invariant_drift, 0));
  write_verdict(opts, "simulate", checks, {{"summary", summary}});
  log_checks(log, checks);
  return kExitPass;
}

int cmd_verify(const CommandOptions& opts, const Logger& log) {
  const auto& cfg = opts.config;
  if (!cfg.model.lax_supported()) throw UnsupportedModel();
  const auto per_sample = parallel_map<std::vector<Check>>(opts.samples, opts.jobs, [&](int i) {
    return verify_sample(cfg.model, sample_state(opts, i), opts, i);
  });
  std::vector<Check> checks;
  for (const auto& v : per_sample) checks.insert(checks.end(), v.begin(), v.end());
  json extra{{"model", cfg.model}, {"samples", opts.samples},
             {"hooks", {{"corrupt_m", opts.corrupt_m},
                        {"phase_omega", opts.phase_omega ? json(*opts.phase_omega) : json()}}}};
  write_verdict(opts, "verify", checks, extra);
  log_checks(log, checks);
  const bool ok = all_pass(checks);
  log.info(std::string("verify: ") + (ok ? "all checks passed" : "verification failed"));
  return ok ? kExitPass : kExitVerificationFailure;
}

int cmd_brackets(const CommandOptions& opts, const Logger& log) {
  const auto& cfg = opts.config;
  if (!cfg.model.lax_supported()) throw UnsupportedModel();
  const int kmax = cfg.kmax();

  struct SampleResult {
    std::vector<Check> checks;
    json matrices;
  };
  const auto results = parallel_map<SampleResult>(opts.samples, opts.jobs, [&](int i) {
    const auto state = sample_state(opts, i);
    auto grads = invariant_gradients<ExtendedReal>(cfg.model, state, kmax);
    if (opts.corrupt_gradients) {
      for (std::size_t k = 0; k < grads.B.size(); ++k) {
        const ExtendedReal scale = ExtendedReal(1) + ExtendedReal(0.01) * ExtendedReal(k + 1);
        for (auto& v : grads.B[k].dq) v *= scale;
        for (auto& v : grads.I[k].dq) v *= scale;
      }
    }
    const auto report = involution_from_gradients(grads);
    const auto fd = fd_invariant_gradients(cfg.model, state, kmax, Tolerances::gradient_fd_h);
    double grad_err = 0.0;
    for (std::size_t k = 0; k < grads.B.size(); ++k) {
      grad_err = std::max(grad_err, gradient_relative_error(gradient_cast<double>(grads.B[k]), fd.B[k]));
      grad_err = std::max(grad_err, gradient_relative_error(gradient_cast<double>(grads.I[k]), fd.I[k]));
    }
    SampleResult r;
    r.checks.push_back(below("B_involution", report.max_B(), Tolerances::involution, i));
    r.checks.push_back(below("I_involution", report.max_I(), Tolerances::involution, i));
    r.checks.push_back(below("gradient_fd_agreement", grad_err, Tolerances::gradient_agreement, i));
    r.matrices = {{"sample", i}, {"B_brackets", report.B}, {"I_brackets", report.I}};
    return r;
  });

  std::vector<Check> checks;
  json matrices = json::array();
  for (const auto& r : results) {
    checks.insert(checks.end(), r.checks.begin(), r.checks.end());
    matrices.push_back(r.matrices);
  }
  const auto dir = output_dir(opts);
  write_text(dir / "brackets.json", json{{"kmax", kmax}, {"samples", matrices}}.dump(2) + "\n");
  write_verdict(opts, "brackets", checks, {{"model", cfg.model}, {"kmax", kmax}});
  log_checks(log, checks);
  return all_pass(checks) ? kExitPass : kExitVerificationFailure;
}

int cmd_exact(const CommandOptions& opts, const Logger& log) {
  const auto& cfg = opts.config;
  if (!cfg.model.lax_supported()) throw UnsupportedModel();
  const auto state0 = cfg.initial_state();
  const auto numeric = integrate(cfg.model, state0, integrate_options(cfg, state0.t));
  const auto curve = exact_vs_numeric_curve(numeric);
  const double worst = max_discrepancy(curve);

  std::vector<double> times;
  times.reserve(numeric.samples.size());
  for (const auto& s : numeric.samples) times.push_back(s.state.t);
  const auto sol = SpectralSolution::from_state(cfg.model, state0);
  const auto exact = exact_trajectory(sol, times, numeric.kmax);

  const auto dir = output_dir(opts);
  if (cfg.output.wants_csv()) {
    std::ostringstream a;
    write_trajectory_csv(a, numeric);
    write_text(dir / "numeric_trajectory.csv", a.str());
    std::ostringstream b;
    write_trajectory_csv(b, exact);
    write_text(dir / "exact_trajectory.csv", b.str());
    std::ostringstream c;
    c << "t,discrepancy\n";
    for (const auto& pt : curve) c << format_number(pt.t) << ',' << format_number(pt.value) << '\n';
    write_text(dir / "discrepancy.csv", c.str());
  }
  if (cfg.output.wants_json()) {
    json j{{"numeric", trajectory_summary(numeric)}, {"exact", trajectory_summary(exact)},
           {"max_discrepancy", worst}};
    write_text(dir / "summary.json", j.dump(2) + "\n");
  }
  std::vector<Check> checks{below("exact_discrepancy", worst, Tolerances::exact_discrepancy, 0)};
  write_verdict(opts, "exact", checks, {{"model", cfg.model}, {"max_discrepancy", worst}});
  log_checks(log, checks);
  log.info("exact: max position discrepancy " + format_number(worst));
  return all_pass(checks) ? kExitPass : kExitVerificationFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Logger log(err, Logger::level_from_env());

  CLI::App app{"Calogero-Moser Lax-pair simulation and verification toolkit", "laxflow"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> n;
  std::optional<double> g2, g1sq, g2sq_single, omega, t_end, dt;
  std::optional<int> epsilon, kmax, record_every;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme, out_dir, format;
  CommandOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--n", n, "particle count");
    sub->add_option("--g2", g2, "pair coupling g^2");
    sub->add_option("--g1sq", g1sq, "single-particle coupling g1^2 (needs --epsilon 1)");
    sub->add_option("--g2sq-single", g2sq_single, "coupling g2^2 on V(2q) (needs --epsilon 1)");
    sub->add_option("--epsilon", epsilon, "reflection switch (0 or 1)");
    sub->add_option("--omega", omega, "trap frequency");
    sub->add_option("--t-end", t_end, "end time (default one trap period)");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--scheme", scheme, "leapfrog2 | yoshida4");
    sub->add_option("--kmax", kmax, "highest power trace recorded (default n)");
    sub->add_option("--record-every", record_every, "steps between recorded samples");
    sub->add_option("--seed", seed, "seed for generated initial states");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv | json | both");
    sub->add_option("--jobs", opts.jobs, "worker threads for independent samples")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "integrate and write trajectory CSV + JSON summary");
  auto* verify = app.add_subcommand("verify", "run the Lax identity and flow suite");
  auto* brackets = app.add_subcommand("brackets", "Poisson-bracket involution matrices");
  auto* exact = app.add_subcommand("exact", "compare the integrator with the spectral solution");
  for (auto* sub : {simulate, verify, brackets, exact}) add_common(sub);
  for (auto* sub : {verify, brackets})
    sub->add_option("--samples", opts.samples, "number of phase points to check")->check(CLI::PositiveNumber);
  verify->add_flag("--corrupt-m", opts.corrupt_m, "test hook: zero M before the identity checks");
  verify->add_option("--phase-omega", opts.phase_omega, "test hook: omega used in the phase law");
  brackets->add_flag("--corrupt-gradients", opts.corrupt_gradients,
                     "test hook: perturb the analytic gradients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (n) {
      cfg.model.n = *n;
      if (cfg.initial && cfg.initial->q.size() != static_cast<std::size_t>(*n))
        throw ConfigError("--n conflicts with the configured initial state");
    }
    if (g2) cfg.model.g2 = *g2;
    if (g1sq) cfg.model.g1sq = *g1sq;
    if (g2sq_single) cfg.model.g2sq_single = *g2sq_single;
    if (epsilon) cfg.model.epsilon = *epsilon;
    if (omega) cfg.model.omega = *omega;
    if (t_end) cfg.run.t_end = *t_end;
    if (dt) cfg.run.dt = *dt;
    if (scheme) cfg.run.scheme = parse_scheme(*scheme);
    if (kmax) cfg.run.kmax = *kmax;
    if (record_every) cfg.run.record_every = *record_every;
    if (seed) cfg.run.seed = *seed;
    if (out_dir) cfg.output.dir = *out_dir;
    if (format) cfg.output.format = *format;
    cfg.validate();
    opts.config = std::move(cfg);

    if (simulate->parsed()) return cmd_simulate(opts, log);
    if (verify->parsed()) return cmd_verify(opts, log);
    if (brackets->parsed()) return cmd_brackets(opts, log);
    return cmd_exact(opts, log);
  } catch (const UnsupportedModel& e) {
    log.error(e.what());
    return kExitConfigError;
  } catch (const ConfigError& e) {
    log.error(e.what());
    return kExitConfigError;
  } catch (const BadOrder& e) {
    log.error(e.what());
    return kExitConfigError;
  } catch (const DimensionMismatch& e) {
    log.error(e.what());
    return kExitConfigError;
  } catch (const SingularConfiguration& e) {
    log.error(e.what());
    return kExitRuntimeFailure;
  } catch (const std::exception& e) {
    log.error(e.what());
    return kExitRuntimeFailure;
  }
}

}  // namespace laxflow::cli
