#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swioss/family.hpp"

namespace swioss::cli {

enum ExitCode : int { kSuccess = 0, kFailed = 1, kInputError = 2 };

struct CommonOptions {
  std::string builtin;  // builtin tag, or empty
  std::string config;   // config path, or empty
  std::filesystem::path out;
  double margin = 0.0;
  std::optional<DwellPair> dwell;
  std::vector<std::string> argv;  // recorded in the manifest
};

struct CheckOptions : CommonOptions {};

struct GenOptions : CommonOptions {
  int n = 1;
  double horizon = 15.0;
  std::uint64_t seed = 1;
  double quantum = 1e-3;
};

struct SimOptions : CommonOptions {
  std::string signal;            // signal JSON; generated from `seed` when empty
  std::vector<double> x0;        // uniform in [-1, 1]^d when empty
  std::string input = "uniform"; // zero | uniform | expr:<e1>;<e2>...
  double input_lo = -0.5;
  double input_hi = 0.5;
  double input_period = 0.0;
  std::uint64_t seed = 1;
  double step = 1e-3;
  double horizon = 15.0;
};

struct EstimateOptions : SimOptions {
  std::string params = "auto";  // auto | ls*,lu*,dt,Dt
  int grid_n = 20;
  double z0 = 2.0;
  double w0 = 2.0;
  bool alt_c = false;
};

struct ReproOptions : CommonOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double horizon = 15.0;
  double step = 1e-3;
  std::string params = "3,0.75,3,4.2";
  int grid_n = 20;
  double z0 = 2.0;
  double w0 = 2.0;
  double x0_box = 1.0;
  double input_lo = -0.5;
  double input_hi = 0.5;
  double bound = 10.0;  // runs must keep |x| below this
};

// Each command reports progress on `log` and returns an ExitCode.  Errors are
// caught and mapped: input/parse/I-O errors give 2, infeasibility and failed
// checks give 1.
int run_check(const CheckOptions& options, std::ostream& log);
int run_gen(const GenOptions& options, std::ostream& log);
int run_sim(const SimOptions& options, std::ostream& log);
int run_estimate(const EstimateOptions& options, std::ostream& log);
int run_repro(const ReproOptions& options, std::ostream& log);

// "a,b,c" -> {a, b, c}; throws ConfigError on malformed numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace swioss::cli
