#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swioss/conditions.hpp"
#include "swioss/envelope.hpp"
#include "swioss/error.hpp"
#include "swioss/io.hpp"
#include "swioss/random.hpp"
#include "swioss/signals.hpp"
#include "swioss/sim.hpp"

namespace swioss::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("malformed number '" + item + "' in list '" + text + "'");
    }
    out.push_back(value);
    pos = end + 1;
  }
  return out;
}

namespace {

// Absolute slack tolerance for trajectory checks; covers integrator round-off
// where a bound is attained exactly.
constexpr double kSlackTol = 1e-9;

SystemFamily load_source(const CommonOptions& o) {
  if (o.builtin.empty() == o.config.empty()) {
    throw ConfigError("exactly one of --builtin or --config is required");
  }
  return o.builtin.empty() ? load_family(o.config) : builtin_family(o.builtin);
}

void prepare_out(const fs::path& out) {
  if (out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out.string() + ": " + ec.message());
}

json parsed(const std::string& text) { return json::parse(text); }

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void write_manifest(const CommonOptions& o, const std::string& command, json extra) {
  json m{{"command", command},
         {"argv", o.argv},
         {"margin", o.margin},
         {"version", "0.1.0"}};
  if (!o.builtin.empty()) m["builtin"] = o.builtin;
  if (!o.config.empty()) m["config"] = o.config;
  if (o.dwell) m["dwell"] = {o.dwell->delta_check, o.dwell->Delta_hat};
  m.update(extra);
  write_json(o.out / "manifest.json", m);
}

template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kInputError;
  }
}

std::string list(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

std::string num(double v) { return format_double(v); }

DwellCertificate certify_and_report(const SystemFamily& family, const CommonOptions& o,
                                    std::ostream& log) {
  const DwellCertificate cert = certify(family, o.dwell, o.margin);
  log << "family: " << family.name() << " (" << family.subsystems().size()
      << " subsystems, stable " << list(family.stable_indices()) << ", unstable "
      << list(family.unstable_indices()) << ")\n";
  log << "delta = " << num(cert.delta) << ", Delta = " << num(cert.Delta)
      << ", delta_check = " << num(cert.delta_check) << ", Delta_hat = " << num(cert.Delta_hat)
      << '\n';
  log << "lhs9 = " << num(cert.lhs9) << '\n';
  return cert;
}

bool require_feasible(const DwellCertificate& cert, std::ostream& log) {
  if (cert.feasible()) return true;
  log << "verdict: infeasible (" << cert.reason << ")\n";
  return false;
}

SwitchingSignal obtain_signal(const SimOptions& o, const SystemFamily& family,
                              const DwellCertificate& cert, std::ostream& log) {
  if (!o.signal.empty()) return load_signal(o.signal);
  if (!cert.feasible()) {
    throw DomainError("cannot generate a signal without a feasible certificate (" + cert.reason +
                      ")");
  }
  log << "generating signal with seed " << o.seed << '\n';
  return generate_signal(family.rules(), cert.dwell(), o.horizon, derive_seed(o.seed, 0));
}

Eigen::VectorXd obtain_x0(const std::vector<double>& given, int dim, double box,
                          std::uint64_t seed) {
  Eigen::VectorXd x0(dim);
  if (!given.empty()) {
    if (static_cast<int>(given.size()) != dim) {
      throw ConfigError("--x0 has " + std::to_string(given.size()) + " entries, expected " +
                        std::to_string(dim));
    }
    for (int i = 0; i < dim; ++i) x0[i] = given[static_cast<std::size_t>(i)];
    return x0;
  }
  Rng rng(seed);
  for (int i = 0; i < dim; ++i) x0[i] = rng.uniform(-box, box);
  return x0;
}

InputSignal obtain_input(const SimOptions& o) {
  if (o.input == "zero") return InputSignal::zero();
  if (o.input == "uniform") {
    return InputSignal::uniform(o.input_lo, o.input_hi, derive_seed(o.seed, 2), o.input_period);
  }
  if (o.input.rfind("expr:", 0) == 0) {
    std::vector<Expression> parts;
    std::stringstream ss(o.input.substr(5));
    std::string item;
    while (std::getline(ss, item, ';')) parts.push_back(parse_expression(item));
    return InputSignal::expression(std::move(parts));
  }
  throw ConfigError("--input must be zero, uniform or expr:<e1>;<e2>...");
}

json x_json(const Eigen::VectorXd& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

json sidecar(const Trajectory& traj, std::uint64_t seed, const Eigen::VectorXd& x0,
             const std::string& input) {
  return json{{"seed", seed},
              {"h", traj.h},
              {"nodes", traj.size()},
              {"horizon", traj.size() ? traj.t.back() : 0.0},
              {"x0", x_json(x0)},
              {"input", input},
              {"diverged", traj.diverged},
              {"first_bad_index", traj.first_bad_index}};
}

void write_csv_file(const fs::path& path, const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  write_file(path, os.str());
}

double max_norm(const Trajectory& traj) {
  double m = 0.0;
  for (const auto& x : traj.x) m = std::max(m, x.norm());
  return m;
}

EstimatorEvaluation resolve_params(const std::string& spec, const DwellCertificate& cert,
                                   int grid_n, double margin, std::ostream& log) {
  if (spec == "auto") {
    const auto found = find_estimator_params(cert, grid_n, margin);
    if (!found) {
      EstimatorEvaluation none;
      none.violations.push_back({"search", 0.0, "no accepted parameters on the grid"});
      return none;
    }
    log << "estimator parameters found by grid search (grid_n = " << grid_n << ")\n";
    return eval_estimator_conditions(cert, found->candidate, margin);
  }
  const std::vector<double> v = parse_number_list(spec);
  if (v.size() != 4) throw ConfigError("--params needs auto or four numbers ls*,lu*,dt,Dt");
  return eval_estimator_conditions(cert, {v[0], v[1], v[2], v[3]}, margin);
}

void report_params(const EstimatorEvaluation& e, std::ostream& log) {
  const auto& p = e.params.candidate;
  const auto& v = e.params.values;
  log << "estimator: ls* = " << num(p.lambda_s_star) << ", lu* = " << num(p.lambda_u_star)
      << ", dt = " << num(p.delta_tilde) << ", Dt = " << num(p.Delta_tilde) << '\n';
  log << "conditions: (11) = " << num(v.c11) << ", (12) = " << num(v.c12)
      << ", (14) = " << num(v.c14) << ", (15) = " << num(v.c15)
      << ", rate slack = " << num(v.rate_slack) << '\n';
  for (const auto& x : e.violations) {
    log << "violated " << x.condition << ": " << x.message << " (value " << num(x.value) << ")\n";
  }
}

void envelope_csv(const fs::path& path, const Trajectory& traj, const EstimationEnvelope& env) {
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.size());
  const double x0 = traj.x.front().norm();
  const double z0 = traj.z.front();
  const double w0 = traj.w.front();
  double sup_v = 0.0;
  double sup_y = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    sup_v = std::max(sup_v, traj.v[k].norm());
    sup_y = std::max(sup_y, traj.y[k].norm());
    const double t = traj.t[k];
    const double xn = traj.x[k].norm();
    rows.push_back({t, xn, env.ioss.alpha_lower(xn),
                    env.ioss.beta(x0, t) + env.ioss.chi1(sup_v) + env.ioss.chi2(sup_y),
                    traj.z[k], traj.w[k], env.c_used() * traj.z[k],
                    env.beta_bar(x0 + std::abs(z0), t) + env.chi_bar(env.c_used() * traj.z[k]),
                    env.beta_bar(x0 + std::abs(w0), t) + env.chi_bar(traj.w[k])});
  }
  std::ostringstream os;
  write_csv(os, {"t", "norm_x", "ioss_lhs", "ioss_rhs", "z", "w", "c_z", "bound_z", "bound_w"},
            rows);
  write_file(path, os.str());
}

json report_json(const SlackReport& r) { return parsed(report_to_json(r)); }

}  // namespace

int run_check(const CheckOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const SystemFamily family = load_source(o);
    const DwellCertificate cert = certify_and_report(family, o, log);
    log << "necessary condition Delta < 2*delta: "
        << (cert.necessary_condition ? "holds" : "fails") << '\n';
    const Prop2Clauses& p = cert.sufficient;
    log << "sufficient conditions: (i) " << (p.i ? "holds" : "fails") << ", (ii) "
        << (p.ii ? "holds" : "fails") << ", (iii) " << (p.iii ? "holds" : "fails") << ", (iv) "
        << (p.iv ? "holds" : "fails") << '\n';
    const auto best = find_dwell_times(cert.lambda_s, cert.lambda_u, cert.mu, cert.delta,
                                       cert.Delta);
    if (best) {
      log << "optimal dwell pair: (" << num(best->delta_check) << ", " << num(best->Delta_hat)
          << "), lhs9 = " << num(best->lhs9) << '\n';
    } else {
      log << "no dwell pair in [delta, Delta]^2 makes lhs9 negative\n";
    }
    if (!o.out.empty()) {
      prepare_out(o.out);
      write_file(o.out / "certificate.json", certificate_to_json(cert));
      write_manifest(o, "check", json::object());
    }
    if (!require_feasible(cert, log)) return static_cast<int>(kFailed);
    log << "verdict: feasible\n";
    return static_cast<int>(kSuccess);
  });
}

int run_gen(const GenOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    if (o.n < 1) throw ConfigError("--n must be positive");
    const SystemFamily family = load_source(o);
    const DwellCertificate cert = certify_and_report(family, o, log);
    if (!require_feasible(cert, log)) return static_cast<int>(kFailed);
    prepare_out(o.out);
    write_file(o.out / "certificate.json", certificate_to_json(cert));
    int failures = 0;
    json seeds = json::array();
    for (int k = 0; k < o.n; ++k) {
      const std::uint64_t seed = derive_seed(o.seed, static_cast<std::uint64_t>(k));
      const SwitchingSignal s =
          generate_signal(family.rules(), cert.dwell(), o.horizon, seed, o.quantum);
      const ValidationReport r = validate_stabilizing(s, family.rules(), cert.dwell());
      const std::string name = "signal_" + std::to_string(k) + ".json";
      write_file(o.out / name, signal_to_json(s));
      log << name << ": " << s.switch_count() << " switches, " << r.summary() << '\n';
      if (!r.ok()) ++failures;
      seeds.push_back(seed);
    }
    write_manifest(o, "gen",
                   {{"n", o.n}, {"seed", o.seed}, {"signal_seeds", seeds}, {"horizon", o.horizon},
                    {"quantum", o.quantum}});
    return failures ? static_cast<int>(kFailed) : static_cast<int>(kSuccess);
  });
}

int run_sim(const SimOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const SystemFamily family = load_source(o);
    const DwellCertificate cert = certify_and_report(family, o, log);
    const SwitchingSignal signal = obtain_signal(o, family, cert, log);
    const Eigen::VectorXd x0 = obtain_x0(o.x0, family.state_dim(), 1.0, derive_seed(o.seed, 1));
    const InputSignal input = obtain_input(o);
    const double T = o.signal.empty() ? o.horizon : std::min(o.horizon, signal.horizon());
    prepare_out(o.out);
    const Trajectory traj = integrate_switched(family, signal, input, x0, o.step, T);
    write_file(o.out / "signal_0.json", signal_to_json(signal));
    write_csv_file(o.out / "run_0.csv", traj);
    json side = sidecar(traj, o.seed, x0, o.input);
    side["max_norm"] = max_norm(traj);
    bool ok = !traj.diverged;
    if (cert.feasible() && !traj.diverged) {
      const SlackReport ioss = check_ioss_inequality(traj, build_ioss_envelope(family, cert));
      side["ioss"] = report_json(ioss);
      ok = ok && ioss.holds(kSlackTol);
      log << "ioss inequality: min slack " << num(ioss.min_slack) << " at t = "
          << num(ioss.argmin_time) << '\n';
    }
    write_json(o.out / "run_0.json", side);
    write_manifest(o, "sim",
                   {{"seed", o.seed}, {"step", o.step}, {"horizon", T}, {"input", o.input},
                    {"x0", x_json(x0)}});
    log << "run_0: " << traj.size() << " nodes, max |x| = " << num(max_norm(traj))
        << (traj.diverged ? " (diverged)" : "") << '\n';
    return ok ? static_cast<int>(kSuccess) : static_cast<int>(kFailed);
  });
}

int run_estimate(const EstimateOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const SystemFamily family = load_source(o);
    const DwellCertificate cert = certify_and_report(family, o, log);
    if (!require_feasible(cert, log)) return static_cast<int>(kFailed);
    const EstimatorEvaluation params = resolve_params(o.params, cert, o.grid_n, o.margin, log);
    report_params(params, log);
    prepare_out(o.out);
    write_file(o.out / "certificate.json", certificate_to_json(cert));
    write_file(o.out / "estimator.json", estimator_to_json(params));
    if (!params.accepted()) return static_cast<int>(kFailed);

    const SwitchingSignal signal = obtain_signal(o, family, cert, log);
    const Eigen::VectorXd x0 = obtain_x0(o.x0, family.state_dim(), 1.0, derive_seed(o.seed, 1));
    const double T = o.signal.empty() ? o.horizon : std::min(o.horizon, signal.horizon());
    Trajectory traj = integrate_switched(family, signal, obtain_input(o), x0, o.step, T);
    const EstimatorCandidate& p = params.params.candidate;
    attach_estimators(traj, p, family, o.z0, o.w0);
    const EstimationEnvelope env = build_estimation_envelope(family, cert, p, o.alt_c);
    write_file(o.out / "envelope.json", envelope_to_json(env));
    write_file(o.out / "signal_0.json", signal_to_json(signal));
    write_csv_file(o.out / "run_0.csv", traj);

    json side = sidecar(traj, o.seed, x0, o.input);
    bool ok = !traj.diverged;
    if (ok) {
      const EstimatorBoundsReport b = check_estimator_bounds(traj, env);
      const SlackReport iss = check_estimator_iss(traj, family, p);
      side["checks"] = {report_json(b.a), report_json(b.b), report_json(b.c), report_json(iss)};
      ok = b.holds(kSlackTol) && iss.holds(kSlackTol);
      for (const SlackReport* r : {&b.a, &b.b, &b.c, &iss}) {
        log << r->name << ": " << (r->holds(kSlackTol) ? "holds" : "FAILS") << ", min slack "
            << num(r->min_slack) << '\n';
      }
      envelope_csv(o.out / "envelope_0.csv", traj, env);
    }
    write_json(o.out / "run_0.json", side);
    write_manifest(o, "estimate",
                   {{"seed", o.seed}, {"step", o.step}, {"horizon", T}, {"params", o.params},
                    {"z0", o.z0}, {"w0", o.w0}, {"alt_c", o.alt_c}});
    return ok ? static_cast<int>(kSuccess) : static_cast<int>(kFailed);
  });
}

int run_repro(const ReproOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    if (!(o.horizon > 0.0)) throw SimulationError("empty trajectory: horizon must be positive");
    if (o.seeds.empty()) throw ConfigError("--seeds needs at least one seed");
    CommonOptions source = o;
    if (source.builtin.empty() && source.config.empty()) source.builtin = "paper-example";
    const SystemFamily family = load_source(source);
    const DwellCertificate cert = certify_and_report(family, source, log);
    if (!require_feasible(cert, log)) return static_cast<int>(kFailed);
    const EstimatorEvaluation params = resolve_params(o.params, cert, o.grid_n, o.margin, log);
    report_params(params, log);
    if (!params.accepted()) return static_cast<int>(kFailed);
    const EstimatorCandidate& p = params.params.candidate;
    const EstimationEnvelope env = build_estimation_envelope(family, cert, p);

    prepare_out(o.out);
    write_file(o.out / "certificate.json", certificate_to_json(cert));
    write_file(o.out / "estimator.json", estimator_to_json(params));
    write_file(o.out / "envelope.json", envelope_to_json(env));

    json runs = json::array();
    json failing = json::array();
    for (std::size_t k = 0; k < o.seeds.size(); ++k) {
      const std::uint64_t seed = o.seeds[k];
      const std::string id = std::to_string(k + 1);
      const SwitchingSignal signal =
          generate_signal(family.rules(), cert.dwell(), o.horizon, derive_seed(seed, 0));
      const Eigen::VectorXd x0 = obtain_x0({}, family.state_dim(), o.x0_box, derive_seed(seed, 1));
      const InputSignal input = InputSignal::uniform(o.input_lo, o.input_hi, derive_seed(seed, 2));
      Trajectory traj = integrate_switched(family, signal, input, x0, o.step, o.horizon);
      attach_estimators(traj, p, family, o.z0, o.w0);

      write_file(o.out / ("signal_" + id + ".json"), signal_to_json(signal));
      write_csv_file(o.out / ("run_" + id + ".csv"), traj);

      json run{{"id", k + 1},
               {"seed", seed},
               {"x0", x_json(x0)},
               {"switches", signal.switch_count()},
               {"valid_signal", validate_stabilizing(signal, family.rules(), cert.dwell()).ok()},
               {"diverged", traj.diverged},
               {"max_norm", max_norm(traj)}};
      std::vector<std::string> failed;
      if (!run["valid_signal"].get<bool>()) failed.push_back("signal");
      if (traj.diverged) failed.push_back("diverged");
      if (!traj.diverged) {
        if (!(max_norm(traj) < o.bound)) failed.push_back("bounded");
        const SlackReport ioss = check_ioss_inequality(traj, env.ioss);
        const SlackReport chain = check_lyapunov_chain(traj, family, signal);
        const EstimatorBoundsReport b = check_estimator_bounds(traj, env);
        const SlackReport iss = check_estimator_iss(traj, family, p);
        run["checks"] = {report_json(ioss), report_json(chain), report_json(b.a),
                         report_json(b.b),  report_json(b.c),   report_json(iss)};
        for (const SlackReport* r : {&ioss, &chain, &b.a, &b.b, &b.c, &iss}) {
          if (!r->holds(kSlackTol)) failed.push_back(r->name);
        }
        envelope_csv(o.out / ("envelope_" + id + ".csv"), traj, env);
      }
      run["failed"] = failed;
      run["passed"] = failed.empty();
      if (!failed.empty()) failing.push_back(k + 1);
      log << "run " << id << " (seed " << seed << "): max |x| = " << num(max_norm(traj))
          << ", " << (failed.empty() ? "all checks hold" : "FAILED");
      for (const auto& f : failed) log << ' ' << f;
      log << '\n';
      runs.push_back(std::move(run));
    }
    write_json(o.out / "summary.json", json{{"all_passed", failing.empty()},
                                            {"failing_runs", failing},
                                            {"lhs9", cert.lhs9},
                                            {"params", parsed(estimator_to_json(params))},
                                            {"runs", runs}});
    write_manifest(source, "repro",
                   {{"seeds", o.seeds}, {"horizon", o.horizon}, {"step", o.step},
                    {"params", o.params}, {"z0", o.z0}, {"w0", o.w0}, {"x0_box", o.x0_box},
                    {"input_range", {o.input_lo, o.input_hi}}});
    if (!failing.empty()) {
      log << "failing runs:";
      for (const auto& id : failing) log << ' ' << id.get<int>();
      log << '\n';
      return static_cast<int>(kFailed);
    }
    return static_cast<int>(kSuccess);
  });
}

}  // namespace swioss::cli
