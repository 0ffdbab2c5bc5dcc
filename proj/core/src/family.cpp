#include "swioss/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swioss/error.hpp"
#include "swioss/random.hpp"

namespace swioss {

SwitchGraph::SwitchGraph(std::set<std::pair<int, int>> edges) : edges_(std::move(edges)) {}

std::vector<int> SwitchGraph::successors(int from) const {
  std::vector<int> out;
  for (auto it = edges_.lower_bound({from, std::numeric_limits<int>::min()});
       it != edges_.end() && it->first == from; ++it) {
    out.push_back(it->second);
  }
  return out;
}

bool SwitchingRules::is_stable(int index) const {
  auto it = classes.find(index);
  if (it == classes.end()) throw DomainError("unknown subsystem index " + std::to_string(index));
  return it->second == StabilityClass::Stable;
}

std::vector<int> SwitchingRules::indices() const {
  std::vector<int> out;
  out.reserve(classes.size());
  for (const auto& [index, cls] : classes) out.push_back(index);
  return out;
}

std::string_view to_string(StabilityClass c) {
  return c == StabilityClass::Stable ? "stable" : "unstable";
}

// ---------------------------------------------------------------------------

LyapunovFunction LyapunovFunction::quadratic(Eigen::MatrixXd q) {
  LyapunovFunction f;
  f.form_ = std::move(q);
  return f;
}

LyapunovFunction LyapunovFunction::expression(Expression e) {
  LyapunovFunction f;
  f.form_ = std::move(e);
  return f;
}

double LyapunovFunction::value(const Eigen::VectorXd& x) const {
  if (is_quadratic()) return x.dot(matrix() * x);
  const auto& e = std::get<Expression>(form_);
  return e.evaluate(Bindings{{x.data(), static_cast<std::size_t>(x.size())}, {}, 0.0, 0.0});
}

Eigen::VectorXd LyapunovFunction::gradient(const Eigen::VectorXd& x) const {
  if (is_quadratic()) {
    const Eigen::MatrixXd& q = matrix();
    return (q + q.transpose()) * x;
  }
  return fd_gradient(x);
}

Eigen::VectorXd LyapunovFunction::fd_gradient(const Eigen::VectorXd& x, double step) const {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = value(probe);
    probe[i] = x[i] - step;
    const double down = value(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

std::string LyapunovFunction::to_string() const {
  if (!is_quadratic()) return std::get<Expression>(form_).to_string();
  std::ostringstream os;
  os << "quadratic[";
  const Eigen::MatrixXd& q = matrix();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    os << (i ? "; " : "");
    for (Eigen::Index j = 0; j < q.cols(); ++j) os << (j ? ", " : "") << format_double(q(i, j));
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------

void Subsystem::eval_dynamics(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                              Eigen::VectorXd& out) const {
  const Bindings b{{x.data(), static_cast<std::size_t>(x.size())},
                   {v.data(), static_cast<std::size_t>(v.size())},
                   0.0,
                   0.0};
  out.resize(static_cast<Eigen::Index>(dynamics.size()));
  for (std::size_t i = 0; i < dynamics.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = dynamics[i].evaluate(b);
  }
}

Eigen::VectorXd Subsystem::f(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out;
  eval_dynamics(x, v, out);
  return out;
}

Eigen::VectorXd Subsystem::h(const Eigen::VectorXd& x) const {
  const Bindings b{{x.data(), static_cast<std::size_t>(x.size())}, {}, 0.0, 0.0};
  Eigen::VectorXd out(static_cast<Eigen::Index>(output.size()));
  for (std::size_t i = 0; i < output.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = output[i].evaluate(b);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string system_label(int index) { return "system " + std::to_string(index); }

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

void check_kinf(const KInfFunction& f, const std::string& name) {
  const MonotonicityReport report = probe_kinf(f);
  require(report.zero_at_origin,
          name + "(0) must be 0, got " + format_double(report.value_at_zero));
  require(report.strictly_increasing,
          name + " is not strictly increasing on [0, 1000] (fails near r = " +
              format_double(report.first_failure_r) + ")");
}

}  // namespace

SystemFamily::SystemFamily(FamilyDefinition def)
    : name_(std::move(def.name)),
      subsystems_(std::move(def.subsystems)),
      lyapunov_(std::move(def.lyapunov)),
      graph_(def.edges),
      delta_(def.delta),
      Delta_(def.Delta),
      dwell_(def.dwell) {
  require(!subsystems_.empty(), "family has no subsystems");
  std::sort(subsystems_.begin(), subsystems_.end(),
            [](const Subsystem& a, const Subsystem& b) { return a.index < b.index; });

  state_dim_ = static_cast<int>(subsystems_.front().dynamics.size());
  output_dim_ = static_cast<int>(subsystems_.front().output.size());
  require(state_dim_ > 0, system_label(subsystems_.front().index) + ": empty dynamics");

  int max_input = 0;
  for (std::size_t i = 0; i < subsystems_.size(); ++i) {
    const Subsystem& s = subsystems_[i];
    const std::string label = system_label(s.index);
    require(s.index > 0, label + ": index must be a positive integer");
    require(i == 0 || subsystems_[i - 1].index != s.index, label + ": duplicate index");
    require(static_cast<int>(s.dynamics.size()) == state_dim_,
            label + ": dimension mismatch, f has " + std::to_string(s.dynamics.size()) +
                " components but the state dimension is " + std::to_string(state_dim_));
    require(static_cast<int>(s.output.size()) == output_dim_,
            label + ": dimension mismatch, h has " + std::to_string(s.output.size()) +
                " components but the output dimension is " + std::to_string(output_dim_));
    for (const Expression& e : s.dynamics) {
      require(e.max_index(VariableKind::State) <= state_dim_,
              label + ": f references x" + std::to_string(e.max_index(VariableKind::State)) +
                  " beyond the state dimension " + std::to_string(state_dim_));
      require(!e.references(VariableKind::Scalar) && !e.references(VariableKind::Time),
              label + ": f may only reference x and v variables");
      max_input = std::max(max_input, e.max_index(VariableKind::Input));
    }
    for (const Expression& e : s.output) {
      require(e.max_index(VariableKind::State) <= state_dim_,
              label + ": h references a state beyond the state dimension");
      require(!e.references(VariableKind::Input) && !e.references(VariableKind::Scalar) &&
                  !e.references(VariableKind::Time),
              label + ": h may only reference x variables");
    }
    if (s.V.is_quadratic()) {
      const Eigen::MatrixXd& q = s.V.matrix();
      require(q.rows() == state_dim_ && q.cols() == state_dim_,
              label + ": Q must be " + std::to_string(state_dim_) + "x" +
                  std::to_string(state_dim_));
      require((q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12, label + ": Q is not symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(q);
      require(llt.info() == Eigen::Success, label + ": Q is not positive definite");
    }
  }

  if (def.inputs < 0) {
    input_dim_ = max_input;
  } else {
    require(def.inputs >= max_input, "inputs = " + std::to_string(def.inputs) +
                                         " but dynamics reference v" + std::to_string(max_input));
    input_dim_ = def.inputs;
  }

  const LyapunovData& ly = lyapunov_;
  require(std::isfinite(ly.lambda_s) && ly.lambda_s > 0.0, "lambda_s must be positive");
  require(std::isfinite(ly.lambda_u) && ly.lambda_u > 0.0, "lambda_u must be positive");
  require(std::isfinite(ly.mu) && ly.mu >= 1.0, "mu must be >= 1");
  require(std::isfinite(delta_) && delta_ > 0.0, "delta must be positive");
  require(std::isfinite(Delta_) && Delta_ >= delta_, "Delta must be >= delta");
  if (dwell_) {
    require(dwell_->delta_check >= delta_ && dwell_->delta_check <= Delta_,
            "delta_check must lie in [delta, Delta]");
    require(dwell_->Delta_hat >= delta_ && dwell_->Delta_hat <= Delta_,
            "Delta_hat must lie in [delta, Delta]");
  }
  require(ly.alpha_upper.identity_floor(), "alpha_upper must carry its identity floor");
  check_kinf(ly.gamma1, "gamma1");
  check_kinf(ly.gamma2, "gamma2");
  check_kinf(ly.alpha_lower, "alpha_lower");
  check_kinf(ly.alpha_upper, "alpha_upper");

  for (const auto& [from, to] : graph_.edges()) {
    const std::string edge = "edge (" + std::to_string(from) + ", " + std::to_string(to) + ")";
    require(from != to, edge + " is a self-loop");
    auto has = [this](int k) {
      return std::any_of(subsystems_.begin(), subsystems_.end(),
                         [k](const Subsystem& s) { return s.index == k; });
    };
    require(has(from) && has(to), edge + " references an unknown subsystem");
  }

  for (const Subsystem& s : subsystems_) rules_.classes[s.index] = s.stability;
  rules_.graph = graph_;
  rules_.delta = delta_;
  rules_.Delta = Delta_;

  // Every unstable subsystem needs a switch into some stable subsystem.
  for (const Subsystem& s : subsystems_) {
    if (s.stability != StabilityClass::Unstable) continue;
    const auto next = graph_.successors(s.index);
    const bool reaches_stable = std::any_of(next.begin(), next.end(),
                                            [this](int q) { return rules_.is_stable(q); });
    require(reaches_stable, "unstable subsystem " + std::to_string(s.index) +
                                " has no admissible switch to a stable subsystem");
  }

  // Equilibrium at the origin.
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(state_dim_);
  const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(input_dim_);
  for (const Subsystem& s : subsystems_) {
    const Eigen::VectorXd fx = s.f(x0, v0);
    require(fx.allFinite() && fx.cwiseAbs().maxCoeff() <= 1e-9,
            system_label(s.index) + ": f(0, 0) must vanish");
    if (output_dim_ > 0) {
      const Eigen::VectorXd hx = s.h(x0);
      require(hx.allFinite() && hx.cwiseAbs().maxCoeff() <= 1e-9,
              system_label(s.index) + ": h(0) must vanish");
    }
  }

  // Sandwich alpha_lower(|x|) <= V_p(x) <= alpha_upper(|x|) on sampled states,
  // with radii spread log-uniformly over [1e-3, 1e2].
  Rng rng(0x5eed'5a4d'0001ULL);
  Eigen::VectorXd x(state_dim_);
  for (int k = 0; k < 2000; ++k) {
    for (int i = 0; i < state_dim_; ++i) x[i] = rng.uniform(-1.0, 1.0);
    if (x.norm() == 0.0) continue;
    x *= std::pow(10.0, rng.uniform(-3.0, 2.0)) / x.norm();
    const double r = x.norm();
    const double lo = ly.alpha_lower(r);
    const double hi = ly.alpha_upper(r);
    for (const Subsystem& s : subsystems_) {
      const double v = s.V.value(x);
      const double tol = 1e-9 * std::max(1.0, std::abs(v));
      require(std::isfinite(v) && v >= 0.0, system_label(s.index) + ": V is negative or not finite");
      require(lo <= v + tol, system_label(s.index) + ": alpha_lower(|x|) > V(x) at |x| = " +
                                 format_double(r));
      require(v <= hi + tol, system_label(s.index) + ": V(x) > alpha_upper(|x|) at |x| = " +
                                 format_double(r));
    }
  }
}

const Subsystem& SystemFamily::subsystem(int index) const {
  auto it = std::lower_bound(subsystems_.begin(), subsystems_.end(), index,
                             [](const Subsystem& s, int k) { return s.index < k; });
  if (it == subsystems_.end() || it->index != index) {
    throw DomainError("unknown subsystem index " + std::to_string(index));
  }
  return *it;
}

std::vector<int> SystemFamily::stable_indices() const {
  std::vector<int> out;
  for (const Subsystem& s : subsystems_) {
    if (s.stability == StabilityClass::Stable) out.push_back(s.index);
  }
  return out;
}

std::vector<int> SystemFamily::unstable_indices() const {
  std::vector<int> out;
  for (const Subsystem& s : subsystems_) {
    if (s.stability == StabilityClass::Unstable) out.push_back(s.index);
  }
  return out;
}

// ---------------------------------------------------------------------------

double DissipationProbe::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : subsystems) m = std::min(m, s.min_slack);
  for (const auto& e : edges) m = std::min(m, e.min_slack);
  return m;
}

DissipationProbe probe_dissipation(const SystemFamily& family,
                                   const DissipationProbeOptions& options) {
  const LyapunovData& ly = family.lyapunov();
  const int d = family.state_dim();
  const int m = family.input_dim();
  Rng rng(options.seed);

  DissipationProbe probe;
  for (const Subsystem& s : family.subsystems()) {
    probe.subsystems.push_back({s.index, std::numeric_limits<double>::infinity(), {}, {}});
  }
  for (const auto& [from, to] : family.graph().edges()) {
    probe.edges.push_back({from, to, std::numeric_limits<double>::infinity()});
  }

  Eigen::VectorXd x(d), v(m), fx(d);
  for (int k = 0; k < options.samples; ++k) {
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(-options.state_box, options.state_box);
    for (int i = 0; i < m; ++i) v[i] = rng.uniform(-options.input_box, options.input_box);

    for (std::size_t j = 0; j < family.subsystems().size(); ++j) {
      const Subsystem& s = family.subsystems()[j];
      const Eigen::VectorXd grad =
          options.use_fd_gradient ? s.V.fd_gradient(x, options.fd_step) : s.V.gradient(x);
      if (s.V.is_quadratic() && options.use_fd_gradient) {
        const Eigen::VectorXd exact = s.V.gradient(x);
        const double rel = (grad - exact).norm() / std::max(exact.norm(), 1.0);
        probe.max_gradient_rel_error = std::max(probe.max_gradient_rel_error, rel);
      }
      s.eval_dynamics(x, v, fx);
      const double lhs = grad.dot(fx);
      const double vx = s.V.value(x);
      const double supply = ly.gamma1(v.norm()) + ly.gamma2(s.h(x).norm());
      const double rate = s.stability == StabilityClass::Stable ? -ly.lambda_s : ly.lambda_u;
      const double slack = rate * vx + supply - lhs;
      auto& entry = probe.subsystems[j];
      if (slack < entry.min_slack) {
        entry.min_slack = slack;
        entry.worst_state = x;
        entry.worst_input = v;
      }
    }
    for (auto& e : probe.edges) {
      const double slack = ly.mu * family.subsystem(e.from).V.value(x) -
                           family.subsystem(e.to).V.value(x);
      e.min_slack = std::min(e.min_slack, slack);
    }
  }
  return probe;
}

}  // namespace swioss
