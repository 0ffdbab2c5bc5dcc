#include "swioss/sim.hpp"

#include <cmath>
#include <string>

#include "swioss/error.hpp"
#include "swioss/random.hpp"

namespace swioss {

namespace {

constexpr double kAlignTol = 1e-9;
constexpr double kDivergence = 1e9;

bool bad_state(const Eigen::VectorXd& x) {
  return !x.allFinite() || x.norm() > kDivergence;
}

// Grid node of a time that must be aligned with the step.
std::int64_t node_of(double tau, double h, const char* what) {
  const auto k = static_cast<std::int64_t>(std::llround(tau / h));
  if (std::abs(static_cast<double>(k) * h - tau) > kAlignTol) {
    throw SimulationError(std::string(what) + " at t = " + format_double(tau) +
                          " is not aligned with step h = " + format_double(h));
  }
  return k;
}

class InputSampler {
 public:
  InputSampler(const InputSignal& input, int dim, double h) : input_(input), dim_(dim), h_(h) {
    if (input.kind == InputSignal::Kind::Uniform) {
      if (!(input.lo <= input.hi)) throw DomainError("input range needs lo <= hi");
      const double period = input.period > 0.0 ? input.period : h;
      steps_per_sample_ = node_of(period, h, "input resampling period");
      if (steps_per_sample_ < 1) throw DomainError("input resampling period shorter than h");
    }
    if (input.kind == InputSignal::Kind::Expression) {
      if (static_cast<int>(input.components.size()) != dim) {
        throw DomainError("input expression has " + std::to_string(input.components.size()) +
                          " components, family expects " + std::to_string(dim));
      }
      for (const auto& c : input.components) {
        if (c.references(VariableKind::State) || c.references(VariableKind::Input) ||
            c.references(VariableKind::Scalar)) {
          throw DomainError("input expressions may only reference t");
        }
      }
    }
  }

  // v(t_k + offset) with offset in [0, h]; uniform inputs ignore the offset.
  Eigen::VectorXd at(std::int64_t k, double offset) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    switch (input_.kind) {
      case InputSignal::Kind::Zero:
        break;
      case InputSignal::Kind::Uniform: {
        const std::int64_t j = k / steps_per_sample_;
        while (static_cast<std::int64_t>(samples_.size()) <= j) {
          Eigen::VectorXd s(dim_);
          for (int i = 0; i < dim_; ++i) s[i] = rng_.uniform(input_.lo, input_.hi);
          samples_.push_back(std::move(s));
        }
        v = samples_[static_cast<std::size_t>(j)];
        break;
      }
      case InputSignal::Kind::Expression: {
        Bindings b;
        b.t = static_cast<double>(k) * h_ + offset;
        for (int i = 0; i < dim_; ++i) v[i] = input_.components[static_cast<std::size_t>(i)].evaluate(b);
        break;
      }
    }
    return v;
  }

  bool held() const { return input_.kind != InputSignal::Kind::Expression; }

 private:
  const InputSignal& input_;
  int dim_;
  double h_;
  std::int64_t steps_per_sample_ = 1;
  Rng rng_{input_.seed};
  std::vector<Eigen::VectorXd> samples_;
};

std::int64_t grid_size(double h, double T) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step h must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw SimulationError("empty trajectory: horizon must be positive");
  const std::int64_t K = node_of(T, h, "horizon");
  if (K < 1) throw SimulationError("empty trajectory: horizon shorter than one step");
  return K;
}

}  // namespace

InputSignal InputSignal::uniform(double lo, double hi, std::uint64_t seed, double period) {
  InputSignal s;
  s.kind = Kind::Uniform;
  s.lo = lo;
  s.hi = hi;
  s.seed = seed;
  s.period = period;
  return s;
}

InputSignal InputSignal::expression(std::vector<swioss::Expression> components) {
  InputSignal s;
  s.kind = Kind::Expression;
  s.components = std::move(components);
  return s;
}

Trajectory integrate_switched(const SystemFamily& family, const SwitchingSignal& signal,
                              const InputSignal& input, const Eigen::VectorXd& x0, double h,
                              double T) {
  const std::int64_t K = grid_size(h, T);
  if (T > signal.horizon() + kAlignTol) {
    throw SimulationError("horizon " + format_double(T) + " exceeds the signal horizon " +
                          format_double(signal.horizon()));
  }
  if (x0.size() != family.state_dim()) {
    throw DomainError("x0 has dimension " + std::to_string(x0.size()) + ", expected " +
                      std::to_string(family.state_dim()));
  }
  for (const auto& e : signal.entries()) {
    if (!family.rules().contains(e.index)) {
      throw DomainError("signal uses unknown subsystem " + std::to_string(e.index));
    }
  }

  // Active subsystem at every node (right-continuous).
  std::vector<int> sigma(static_cast<std::size_t>(K + 1));
  {
    const auto& entries = signal.entries();
    std::size_t next = 1;
    std::int64_t next_node = K + 1;
    auto advance = [&] {
      next_node = K + 1;
      if (next < entries.size() && entries[next].tau <= T + kAlignTol) {
        next_node = node_of(entries[next].tau, h, "switching instant");
      }
    };
    int current = entries.front().index;
    advance();
    for (std::int64_t k = 0; k <= K; ++k) {
      while (k == next_node) {
        current = entries[next].index;
        ++next;
        advance();
      }
      sigma[static_cast<std::size_t>(k)] = current;
    }
  }

  InputSampler sampler(input, family.input_dim(), h);
  Trajectory out;
  out.h = h;
  const auto n = static_cast<std::size_t>(K + 1);
  out.t.reserve(n);
  out.x.reserve(n);
  out.y.reserve(n);
  out.v.reserve(n);
  out.sigma.reserve(n);

  Eigen::VectorXd x = x0;
  if (bad_state(x)) {
    out.diverged = true;
    out.first_bad_index = 0;
    return out;
  }
  const int d = family.state_dim();
  Eigen::VectorXd k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (std::int64_t k = 0;; ++k) {
    const Subsystem& sys = family.subsystem(sigma[static_cast<std::size_t>(k)]);
    Eigen::VectorXd v0 = sampler.at(k, 0.0);
    out.t.push_back(static_cast<double>(k) * h);
    out.x.push_back(x);
    out.y.push_back(sys.h(x));
    out.v.push_back(v0);
    out.sigma.push_back(sys.index);
    if (k == K) break;

    Eigen::VectorXd vm = sampler.held() ? v0 : sampler.at(k, 0.5 * h);
    Eigen::VectorXd v1 = sampler.held() ? v0 : sampler.at(k, h);
    sys.eval_dynamics(x, v0, k1);
    tmp = x + 0.5 * h * k1;
    sys.eval_dynamics(tmp, vm, k2);
    tmp = x + 0.5 * h * k2;
    sys.eval_dynamics(tmp, vm, k3);
    tmp = x + h * k3;
    sys.eval_dynamics(tmp, v1, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (bad_state(x)) {
      out.diverged = true;
      out.first_bad_index = static_cast<std::size_t>(k + 1);
      break;
    }
  }
  return out;
}

int zeta_schedule(double delta_tilde, double Delta_tilde, double t) {
  if (!(delta_tilde > 0.0) || !(Delta_tilde > 0.0)) {
    throw DomainError("schedule durations must be positive");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("schedule time must be non-negative");
  if (t == 0.0) return 0;
  const double period = delta_tilde + Delta_tilde;
  constexpr double kSnap = 1e-9;
  const double k = std::floor(t / period);
  const double phase = t - k * period;
  if (phase <= kSnap) return k > 0.0 ? 1 : 0;  // t = kP closes an unstable phase
  return phase <= delta_tilde + kSnap ? 0 : 1;
}

ScalarChannel integrate_scalar_modes(std::span<const int> step_modes,
                                     std::span<const double> forcing, double decay, double growth,
                                     double z0, double h) {
  if (step_modes.size() != forcing.size()) throw DomainError("modes and forcing differ in length");
  if (!(h > 0.0)) throw DomainError("step h must be positive");
  ScalarChannel out;
  out.values.reserve(step_modes.size() + 1);
  double z = z0;
  out.values.push_back(z);
  for (std::size_t k = 0; k < step_modes.size(); ++k) {
    const double a = step_modes[k] == 0 ? -decay : growth;
    const double g = forcing[k];
    auto f = [&](double s) { return a * s + g; };
    const double s1 = f(z);
    const double s2 = f(z + 0.5 * h * s1);
    const double s3 = f(z + 0.5 * h * s2);
    const double s4 = f(z + h * s3);
    z += (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    if (!std::isfinite(z) || std::abs(z) > kDivergence) {
      out.diverged = true;
      out.first_bad_index = k + 1;
      break;
    }
    out.values.push_back(z);
  }
  return out;
}

std::vector<double> estimator_forcing(const SystemFamily& family, const Trajectory& traj) {
  const LyapunovData& ly = family.lyapunov();
  std::vector<double> g(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    g[k] = ly.gamma1(traj.v[k].norm()) + ly.gamma2(traj.y[k].norm());
  }
  return g;
}

namespace {

ScalarChannel run_estimator(const std::vector<int>& node_modes, const std::vector<int>& step_modes,
                            const std::vector<double>& forcing, const EstimatorCandidate& p,
                            double z0, double h) {
  if (!(z0 >= 0.0)) throw DomainError("estimator initial value must be non-negative");
  std::span<const double> g(forcing.data(), step_modes.size());
  ScalarChannel out =
      integrate_scalar_modes(step_modes, g, p.lambda_s_star, p.lambda_u_star, z0, h);
  out.modes.assign(node_modes.begin(), node_modes.begin() + static_cast<std::ptrdiff_t>(out.values.size()));
  return out;
}

}  // namespace

ScalarChannel integrate_estimator(const EstimatorCandidate& params, const SystemFamily& family,
                                  const Trajectory& traj, double z0) {
  if (traj.size() == 0) throw SimulationError("empty trajectory");
  const std::size_t n = traj.size();
  std::vector<int> node_modes(n);
  std::vector<int> step_modes(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    node_modes[k] = zeta_schedule(params.delta_tilde, params.Delta_tilde, traj.t[k]);
    if (k + 1 < n) {
      step_modes[k] = zeta_schedule(params.delta_tilde, params.Delta_tilde, traj.t[k] + 0.5 * traj.h);
    }
  }
  return run_estimator(node_modes, step_modes, estimator_forcing(family, traj), params, z0, traj.h);
}

ScalarChannel integrate_reference_estimator(const EstimatorCandidate& params,
                                            const SystemFamily& family, const Trajectory& traj,
                                            double w0) {
  if (traj.size() == 0) throw SimulationError("empty trajectory");
  const std::size_t n = traj.size();
  std::vector<int> node_modes(n);
  for (std::size_t k = 0; k < n; ++k) {
    node_modes[k] = family.rules().is_stable(traj.sigma[k]) ? 0 : 1;
  }
  std::vector<int> step_modes(node_modes.begin(), node_modes.end() - 1);
  return run_estimator(node_modes, step_modes, estimator_forcing(family, traj), params, w0, traj.h);
}

void attach_estimators(Trajectory& traj, const EstimatorCandidate& params,
                       const SystemFamily& family, double z0, double w0) {
  ScalarChannel z = integrate_estimator(params, family, traj, z0);
  ScalarChannel w = integrate_reference_estimator(params, family, traj, w0);
  traj.z = std::move(z.values);
  traj.zeta = std::move(z.modes);
  traj.w = std::move(w.values);
  traj.upsilon = std::move(w.modes);
  if (z.diverged || w.diverged) {
    const std::size_t bad = std::min(z.diverged ? z.first_bad_index : traj.size(),
                                     w.diverged ? w.first_bad_index : traj.size());
    if (!traj.diverged || bad < traj.first_bad_index) {
      traj.diverged = true;
      traj.first_bad_index = bad;
    }
  }
}

}  // namespace swioss
