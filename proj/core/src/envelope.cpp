#include "swioss/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "swioss/error.hpp"

namespace swioss {

double IossEnvelope::decay(double t) const { return std::exp(c1 - c2 * t); }

namespace {

// (1/ls) e^{c1} / (e^{c2 d} - 1) + [unstable] (1/lu) e^{c1} (1 + 1/(e^{c2 d} - 1))
double psi_bar(double c1, double c2, double min_dwell, double ls, double lu, bool has_unstable) {
  const double tail = 1.0 / std::expm1(c2 * min_dwell);
  double value = std::exp(c1) * tail / ls;
  if (has_unstable) value += std::exp(c1) * (1.0 + tail) / lu;
  return value;
}

}  // namespace

IossEnvelope build_ioss_envelope(const SystemFamily& family, const DwellCertificate& cert) {
  if (!cert.feasible()) throw DomainError("IOSS envelope needs a feasible certificate: " + cert.reason);
  const LyapunovData& ly = family.lyapunov();
  IossEnvelope env;
  env.lambda_s = cert.lambda_s;
  env.lambda_u = cert.lambda_u;
  env.delta = cert.delta;
  env.has_unstable = cert.has_unstable;
  env.c1 = cert.lambda_s * cert.delta_check + cert.lambda_u * cert.Delta_hat;
  env.c2 = -cert.lhs9;
  env.psi2_bar = psi_bar(env.c1, env.c2, cert.delta, cert.lambda_s, cert.lambda_u, env.has_unstable);
  env.alpha_lower = ly.alpha_lower;
  env.alpha_upper = ly.alpha_upper;
  env.gamma1 = ly.gamma1;
  env.gamma2 = ly.gamma2;
  return env;
}

double EstimationEnvelope::beta_bar(double r, double t) const {
  return ioss.alpha_lower.inverse(ioss.decay(t) * ioss.alpha_upper(r));
}

double EstimationEnvelope::chi_bar(double r) const {
  return ioss.alpha_lower.inverse((1.0 + b_tilde) * r);
}

EstimationEnvelope build_estimation_envelope(const SystemFamily& family,
                                             const DwellCertificate& cert,
                                             const EstimatorCandidate& params, bool use_alt_c) {
  const EstimatorEvaluation eval = eval_estimator_conditions(cert, params);
  if (!eval.accepted()) {
    throw DomainError("estimation envelope needs parameters that pass condition " +
                      eval.violations.front().condition);
  }
  const EstimatorConditionValues& v = eval.params.values;
  EstimationEnvelope env;
  env.ioss = build_ioss_envelope(family, cert);
  env.c1_tilde = v.rate_slack * cert.Delta_hat;
  env.c2_tilde = -v.c12;
  env.b = std::exp(env.c1_tilde) * (1.0 + 1.0 / std::expm1(env.c2_tilde * cert.delta));
  env.b_tilde = (cert.mu - 1.0) * env.b;
  const double rates = params.lambda_u_star + params.lambda_s_star;
  env.c = std::exp(rates * (cert.delta_check * cert.Delta_hat / (2.0 * cert.delta) + cert.Delta_hat));
  env.c_alt =
      std::exp(rates * (params.delta_tilde * cert.Delta_hat / (2.0 * cert.delta) + cert.Delta_hat));
  env.use_alt_c = use_alt_c;
  return env;
}

SignalFunctionals::SignalFunctionals(const SwitchingSignal& signal, const SwitchingRules& rules,
                                     double lambda_s, double lambda_u, double mu)
    : horizon_(signal.horizon()),
      lambda_s_(lambda_s),
      lambda_u_(lambda_u),
      log_mu_(std::log(mu)) {
  const auto& e = signal.entries();
  tau_.reserve(e.size());
  stable_.reserve(e.size());
  base_.reserve(e.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i > 0) {
      const double rate = stable_[i - 1] ? -lambda_s_ : lambda_u_;
      acc += rate * (e[i].tau - e[i - 1].tau) + log_mu_;
    }
    tau_.push_back(e[i].tau);
    stable_.push_back(rules.is_stable(e[i].index));
    base_.push_back(acc);
  }
}

std::size_t SignalFunctionals::entry_at(double t) const {
  auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
  return static_cast<std::size_t>(it - tau_.begin()) - 1;
}

double SignalFunctionals::cumulative(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) throw DomainError("time outside the signal horizon");
  const std::size_t i = entry_at(t);
  const double rate = stable_[i] ? -lambda_s_ : lambda_u_;
  return base_[i] + rate * (t - tau_[i]);
}

double SignalFunctionals::psi1(double t) const { return std::exp(cumulative(t)); }

double SignalFunctionals::psi2(double t) const {
  const double at_t = cumulative(t);
  const std::size_t last = entry_at(t);
  double sum = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    const double next = i < last ? tau_[i + 1] : t;
    const double gap = next - tau_[i];
    const double weight = std::exp(at_t - (i < last ? base_[i + 1] : at_t));
    if (stable_[i]) {
      sum += weight * (-std::expm1(-lambda_s_ * gap)) / lambda_s_;
    } else {
      sum -= weight * (-std::expm1(lambda_u_ * gap)) / lambda_u_;
    }
  }
  return sum;
}

double xi_direct(const SwitchingSignal& signal, const SwitchingRules& rules, double lambda_s,
                 double lambda_u, double mu, double s, double t) {
  if (s == t) return 0.0;
  const SwitchCounts c = counts(signal, rules, s, t);
  return -lambda_s * c.T_S + lambda_u * c.T_U + std::log(mu) * c.N;
}

double psi2_direct(const SwitchingSignal& signal, const SwitchingRules& rules, double lambda_s,
                   double lambda_u, double mu, double t) {
  const auto& e = signal.entries();
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size() && e[i].tau <= t; ++i) {
    const double next = (i + 1 < e.size() && e[i + 1].tau <= t) ? e[i + 1].tau : t;
    const double weight = std::exp(xi_direct(signal, rules, lambda_s, lambda_u, mu, next, t));
    const double gap = next - e[i].tau;
    if (rules.is_stable(e[i].index)) {
      sum += weight * (1.0 - std::exp(-lambda_s * gap)) / lambda_s;
    } else {
      sum -= weight * (1.0 - std::exp(lambda_u * gap)) / lambda_u;
    }
  }
  return sum;
}

void SlackReport::update(std::size_t k, double t, double slack) {
  ++nodes;
  if (slack < min_slack || std::isnan(slack)) {
    min_slack = slack;
    argmin_time = t;
    argmin_index = k;
  }
}

SlackReport check_ioss_inequality(const Trajectory& traj, const IossEnvelope& env) {
  SlackReport r;
  r.name = "ioss";
  if (traj.size() == 0) return r;
  const double x0 = traj.x.front().norm();
  double sup_v = 0.0;
  double sup_y = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    sup_v = std::max(sup_v, traj.v[k].norm());
    sup_y = std::max(sup_y, traj.y[k].norm());
    const double lhs = env.alpha_lower(traj.x[k].norm());
    const double rhs = env.beta(x0, traj.t[k]) + env.chi1(sup_v) + env.chi2(sup_y);
    r.update(k, traj.t[k], rhs - lhs);
  }
  return r;
}

SlackReport check_lyapunov_chain(const Trajectory& traj, const SystemFamily& family,
                                 const SwitchingSignal& signal) {
  SlackReport r;
  r.name = "lyapunov_chain";
  if (traj.size() == 0) return r;
  const LyapunovData& ly = family.lyapunov();
  const SignalFunctionals fn(signal, family.rules(), ly.lambda_s, ly.lambda_u, ly.mu);
  const double v0 = family.subsystem(traj.sigma.front()).V.value(traj.x.front());
  double sup_v = 0.0;
  double sup_y = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    sup_v = std::max(sup_v, traj.v[k].norm());
    sup_y = std::max(sup_y, traj.y[k].norm());
    const double t = traj.t[k];
    const double lhs = family.subsystem(traj.sigma[k]).V.value(traj.x[k]);
    const double rhs = fn.psi1(t) * v0 + (ly.gamma1(sup_v) + ly.gamma2(sup_y)) * fn.psi2(t);
    r.update(k, t, rhs - lhs);
  }
  return r;
}

EstimatorBoundsReport check_estimator_bounds(const Trajectory& traj,
                                             const EstimationEnvelope& env) {
  if (traj.z.size() != traj.size() || traj.w.size() != traj.size()) {
    throw DomainError("estimator bounds need z and w on every node");
  }
  EstimatorBoundsReport rep;
  rep.a.name = "estimator_z";
  rep.b.name = "estimator_w";
  rep.c.name = "w_below_cz";
  if (traj.size() == 0) return rep;
  const double x0 = traj.x.front().norm();
  const double z0 = traj.z.front();
  const double w0 = traj.w.front();
  const double c = env.c_used();
  rep.c.applicable = w0 <= z0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.t[k];
    const double xn = traj.x[k].norm();
    rep.a.update(k, t, env.beta_bar(x0 + std::abs(z0), t) + env.chi_bar(c * traj.z[k]) - xn);
    rep.b.update(k, t, env.beta_bar(x0 + std::abs(w0), t) + env.chi_bar(traj.w[k]) - xn);
    if (rep.c.applicable) rep.c.update(k, t, c * traj.z[k] - traj.w[k]);
  }
  return rep;
}

EstimatorIssBound estimator_iss_bound(const EstimatorCandidate& p) {
  EstimatorIssBound b;
  const double ss = p.lambda_s_star;
  const double us = p.lambda_u_star;
  b.c_bar = ss - (ss + us) * p.Delta_tilde / (p.delta_tilde + p.Delta_tilde);
  b.c_bar1 = ss * p.delta_tilde + us * p.Delta_tilde;
  b.psi_bar_z =
      psi_bar(b.c_bar1, b.c_bar, std::min(p.delta_tilde, p.Delta_tilde), ss, us, true);
  return b;
}

SlackReport check_estimator_iss(const std::vector<double>& z, const std::vector<double>& gamma_bar,
                                double h, const EstimatorCandidate& params) {
  if (gamma_bar.size() < z.size()) throw DomainError("forcing shorter than the estimator channel");
  SlackReport r;
  r.name = "estimator_iss";
  if (z.empty()) return r;
  const EstimatorIssBound b = estimator_iss_bound(params);
  double sup_g = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (k > 0) sup_g = std::max(sup_g, gamma_bar[k - 1]);
    const double t = static_cast<double>(k) * h;
    r.update(k, t, std::exp(-b.c_bar * t) * z.front() + b.psi_bar_z * sup_g - z[k]);
  }
  return r;
}

SlackReport check_estimator_iss(const Trajectory& traj, const SystemFamily& family,
                                const EstimatorCandidate& params) {
  return check_estimator_iss(traj.z, estimator_forcing(family, traj), traj.h, params);
}

}  // namespace swioss
