#include <iostream>
#include <string>
#include <vector>

#include <CLI/CLI11.hpp>

#include "commands.hpp"
#include "swioss/error.hpp"

namespace {

using swioss::cli::CommonOptions;

struct Raw {
  std::string dwell;
  std::string x0;
  std::string seeds;
};

void add_common(CLI::App* cmd, CommonOptions& o, Raw& raw, bool out_required) {
  auto* group = cmd->add_option_group("family");
  group->add_option("--builtin", o.builtin, "Builtin family tag (paper-example)");
  group->add_option("--config", o.config, "Family configuration file")->check(CLI::ExistingFile);
  group->require_option(0, 1);
  auto* out = cmd->add_option("--out", o.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--margin", o.margin, "Safety margin demanded of strict conditions")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--dwell", raw.dwell, "Dwell pair delta_check,Delta_hat");
}

void apply_common(CommonOptions& o, const Raw& raw, const std::vector<std::string>& argv) {
  o.argv = argv;
  if (!raw.dwell.empty()) {
    const auto v = swioss::cli::parse_number_list(raw.dwell);
    if (v.size() != 2) throw swioss::ConfigError("--dwell needs two numbers");
    o.dwell = swioss::DwellPair{v[0], v[1]};
  }
}

void add_sim(CLI::App* cmd, swioss::cli::SimOptions& o, Raw& raw) {
  cmd->add_option("--signal", o.signal, "Switching signal JSON (generated when omitted)");
  cmd->add_option("--x0", raw.x0, "Initial state, comma separated (random when omitted)");
  cmd->add_option("--input", o.input, "zero | uniform | expr:<e1>;<e2>...");
  cmd->add_option("--input-lo", o.input_lo, "Lower bound of uniform inputs");
  cmd->add_option("--input-hi", o.input_hi, "Upper bound of uniform inputs");
  cmd->add_option("--input-period", o.input_period, "Resampling period of uniform inputs");
  cmd->add_option("--seed", o.seed, "Seed for signal, x0 and input");
  cmd->add_option("--step", o.step, "Integration step h")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", o.horizon, "Simulation horizon");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dwell-time certification, simulation and state-norm estimation for switched systems"};
  app.require_subcommand(1);
  const std::vector<std::string> args(argv + 1, argv + argc);

  swioss::cli::CheckOptions check;
  swioss::cli::GenOptions gen;
  swioss::cli::SimOptions sim;
  swioss::cli::EstimateOptions est;
  swioss::cli::ReproOptions repro;
  Raw check_raw, gen_raw, sim_raw, est_raw, repro_raw;

  auto* c = app.add_subcommand("check", "Certify the dwell-time condition of a family");
  add_common(c, check, check_raw, false);

  auto* g = app.add_subcommand("gen", "Generate stabilizing switching signals");
  add_common(g, gen, gen_raw, true);
  g->add_option("--n", gen.n, "Number of signals");
  g->add_option("--horizon", gen.horizon, "Signal horizon");
  g->add_option("--seed", gen.seed, "Base seed");
  g->add_option("--quantum", gen.quantum, "Time quantum of switching instants");

  auto* s = app.add_subcommand("sim", "Simulate the switched system");
  add_common(s, sim, sim_raw, true);
  add_sim(s, sim, sim_raw);

  auto* e = app.add_subcommand("estimate", "Co-simulate the state-norm estimators");
  add_common(e, est, est_raw, true);
  add_sim(e, est, est_raw);
  e->add_option("--params", est.params, "auto | ls*,lu*,dt,Dt");
  e->add_option("--grid-n", est.grid_n, "Grid size of the parameter search");
  e->add_option("--z0", est.z0, "Initial estimator value");
  e->add_option("--w0", est.w0, "Initial reference estimator value");
  e->add_flag("--alt-c", est.alt_c, "Use the delta_tilde variant of the constant c");

  auto* r = app.add_subcommand("repro", "Ten-run experiment on the builtin example");
  add_common(r, repro, repro_raw, true);
  r->add_option("--seeds", repro_raw.seeds, "Comma separated seeds (default 1..10)");
  r->add_option("--horizon", repro.horizon, "Horizon of every run");
  r->add_option("--step", repro.step, "Integration step h")->check(CLI::PositiveNumber);
  r->add_option("--params", repro.params, "auto | ls*,lu*,dt,Dt");
  r->add_option("--grid-n", repro.grid_n, "Grid size of the parameter search");
  r->add_option("--z0", repro.z0, "Initial estimator value");
  r->add_option("--w0", repro.w0, "Initial reference estimator value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : swioss::cli::kInputError;
  }

  try {
    if (c->parsed()) {
      apply_common(check, check_raw, args);
      return swioss::cli::run_check(check, std::cout);
    }
    if (g->parsed()) {
      apply_common(gen, gen_raw, args);
      return swioss::cli::run_gen(gen, std::cout);
    }
    if (s->parsed()) {
      apply_common(sim, sim_raw, args);
      if (!sim_raw.x0.empty()) sim.x0 = swioss::cli::parse_number_list(sim_raw.x0);
      return swioss::cli::run_sim(sim, std::cout);
    }
    if (e->parsed()) {
      apply_common(est, est_raw, args);
      if (!est_raw.x0.empty()) est.x0 = swioss::cli::parse_number_list(est_raw.x0);
      return swioss::cli::run_estimate(est, std::cout);
    }
    apply_common(repro, repro_raw, args);
    if (!repro_raw.seeds.empty()) {
      repro.seeds.clear();
      for (double v : swioss::cli::parse_number_list(repro_raw.seeds)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
          throw swioss::ConfigError("--seeds must be non-negative integers");
        }
        repro.seeds.push_back(static_cast<std::uint64_t>(v));
      }
    }
    return swioss::cli::run_repro(repro, std::cout);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return swioss::cli::kInputError;
  }
}
