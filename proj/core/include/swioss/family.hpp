#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swioss/expr.hpp"
#include "swioss/kinf.hpp"
#include "swioss/rules.hpp"

namespace swioss {

// Per-subsystem Lyapunov-like function V_p.  Either a symmetric positive
// definite quadratic form x'Qx (analytic gradient 2Qx) or a DSL expression in
// x1..xd (central-difference gradient).
class LyapunovFunction {
 public:
  LyapunovFunction() = default;
  static LyapunovFunction quadratic(Eigen::MatrixXd q);
  static LyapunovFunction expression(Expression e);

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd fd_gradient(const Eigen::VectorXd& x, double step = 1e-6) const;

  bool is_quadratic() const { return std::holds_alternative<Eigen::MatrixXd>(form_); }
  const Eigen::MatrixXd& matrix() const { return std::get<Eigen::MatrixXd>(form_); }
  std::string to_string() const;

 private:
  std::variant<Eigen::MatrixXd, Expression> form_{Eigen::MatrixXd()};
};

struct Subsystem {
  int index = 0;
  std::vector<Expression> dynamics;  // f_p, one entry per state component
  std::vector<Expression> output;    // h_p, one entry per output component
  StabilityClass stability = StabilityClass::Stable;
  LyapunovFunction V;

  // out := f_p(x, v)
  void eval_dynamics(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                     Eigen::VectorXd& out) const;
  Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  Eigen::VectorXd h(const Eigen::VectorXd& x) const;
};

// Constants shared by all subsystems.  gamma = gamma1(|v|) + gamma2(|y|) is
// common to every subsystem.  alpha_upper is stored with its identity floor,
// i.e. it evaluates as max(r, alpha_upper(r)).
struct LyapunovData {
  double lambda_s = 0.0;
  double lambda_u = 0.0;
  double mu = 1.0;
  KInfFunction gamma1;
  KInfFunction gamma2;
  KInfFunction alpha_lower;
  KInfFunction alpha_upper;
};

// Chosen stable/unstable dwell bounds (delta_check, Delta_hat).
struct DwellPair {
  double delta_check = 0.0;
  double Delta_hat = 0.0;
};

struct FamilyDefinition {
  std::string name;
  int inputs = -1;  // -1: infer from the highest v-index referenced
  std::vector<Subsystem> subsystems;
  LyapunovData lyapunov;
  std::set<std::pair<int, int>> edges;
  double delta = 0.0;
  double Delta = 0.0;
  std::optional<DwellPair> dwell;
};

// Validated, immutable family of subsystems.
class SystemFamily {
 public:
  // Throws ConfigError when any structural invariant or sampled probe fails.
  explicit SystemFamily(FamilyDefinition def);

  const std::string& name() const { return name_; }
  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  const Subsystem& subsystem(int index) const;
  std::vector<int> stable_indices() const;
  std::vector<int> unstable_indices() const;

  const LyapunovData& lyapunov() const { return lyapunov_; }
  const SwitchGraph& graph() const { return graph_; }
  double delta() const { return delta_; }
  double Delta() const { return Delta_; }
  const std::optional<DwellPair>& preset_dwell() const { return dwell_; }

  const SwitchingRules& rules() const { return rules_; }

 private:
  std::string name_;
  int state_dim_ = 0;
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<Subsystem> subsystems_;
  LyapunovData lyapunov_;
  SwitchGraph graph_;
  double delta_ = 0.0;
  double Delta_ = 0.0;
  std::optional<DwellPair> dwell_;
  SwitchingRules rules_;
};

// Configuration text -> family.  The format is documented in
// docs/config-format.md.
SystemFamily parse_family_config(std::string_view text, const std::string& origin = "<string>");
SystemFamily load_family(const std::filesystem::path& path);

// The three-subsystem planar example (P = {1,2,3}, P_S = {1}).
SystemFamily builtin_paper_example();
std::string_view paper_example_config();

// Builtin lookup by tag ("paper-example").  Throws ConfigError on unknown tags.
SystemFamily builtin_family(std::string_view tag);

// Sampled check of the decay/growth inequalities and the pairwise comparison
// inequality V_q <= mu V_p for (p, q) in E(P).  Slack is rhs - lhs; a
// non-negative minimum slack means no sample violated the inequality.
struct DissipationProbe {
  struct PerSubsystem {
    int index = 0;
    double min_slack = 0.0;
    Eigen::VectorXd worst_state;
    Eigen::VectorXd worst_input;
  };
  struct PerEdge {
    int from = 0;
    int to = 0;
    double min_slack = 0.0;
  };
  std::vector<PerSubsystem> subsystems;
  std::vector<PerEdge> edges;
  double max_gradient_rel_error = 0.0;  // analytic vs finite-difference (quadratic V only)

  double min_slack() const;
};

struct DissipationProbeOptions {
  int samples = 10000;
  double state_box = 5.0;
  double input_box = 0.5;
  double fd_step = 1e-6;
  bool use_fd_gradient = true;
  std::uint64_t seed = 2024;
};

DissipationProbe probe_dissipation(const SystemFamily& family,
                                   const DissipationProbeOptions& options = {});

std::string_view to_string(StabilityClass c);

}  // namespace swioss
