#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "swioss/conditions.hpp"
#include "swioss/family.hpp"
#include "swioss/signals.hpp"
#include "swioss/sim.hpp"

namespace swioss {

// Constants and comparison functions of the IOSS estimate
//   alpha_lower(|x(t)|) <= beta(|x0|, t) + chi1(|v|_[0,t]) + chi2(|y|_[0,t]).
struct IossEnvelope {
  double c1 = 0.0;  // lambda_s * delta_check + lambda_u * Delta_hat
  double c2 = 0.0;  // minus the dwell-time condition value
  double psi2_bar = 0.0;
  double delta = 0.0;
  double lambda_s = 0.0;
  double lambda_u = 0.0;
  bool has_unstable = true;
  KInfFunction alpha_lower;
  KInfFunction alpha_upper;
  KInfFunction gamma1;
  KInfFunction gamma2;

  double decay(double t) const;  // exp(c1 - c2 t)
  double beta(double r, double s) const { return alpha_upper(r) * decay(s); }
  double chi1(double r) const { return gamma1(r) * psi2_bar; }
  double chi2(double r) const { return gamma2(r) * psi2_bar; }
};

// Throws DomainError for an infeasible certificate.
IossEnvelope build_ioss_envelope(const SystemFamily& family, const DwellCertificate& cert);

// Constants of the estimation bounds on top of the IOSS envelope.
struct EstimationEnvelope {
  IossEnvelope ioss;
  double c1_tilde = 0.0;  // (lambda_s - ls* + lambda_u - lu*) * Delta_hat
  double c2_tilde = 0.0;  // minus the value of condition (12)
  double b = 0.0;
  double b_tilde = 0.0;   // (mu - 1) b
  double c = 0.0;         // exp((lu* + ls*)(delta_check Delta_hat / (2 delta) + Delta_hat))
  double c_alt = 0.0;     // same with delta_tilde in place of delta_check
  bool use_alt_c = false;

  double c_used() const { return use_alt_c ? c_alt : c; }
  // alpha_lower^-1(exp(c1 - c2 t) alpha_upper(r))
  double beta_bar(double r, double t) const;
  // alpha_lower^-1((1 + b_tilde) r)
  double chi_bar(double r) const;
};

// Throws DomainError unless the certificate is feasible and the parameters
// pass the estimator conditions.
EstimationEnvelope build_estimation_envelope(const SystemFamily& family,
                                             const DwellCertificate& cert,
                                             const EstimatorCandidate& params,
                                             bool use_alt_c = false);

// Xi(s, t) = -lambda_s T_S(s,t) + lambda_u T_U(s,t) + ln(mu) N(s,t) and the
// functions psi1(t) = exp(Xi(0,t)) and psi2(t) built from it.  Xi is additive
// over adjacent intervals, so one pass over the signal serves every query.
class SignalFunctionals {
 public:
  SignalFunctionals(const SwitchingSignal& signal, const SwitchingRules& rules, double lambda_s,
                    double lambda_u, double mu);

  // Requires 0 <= s <= t <= horizon.
  double xi(double s, double t) const { return cumulative(t) - cumulative(s); }
  double psi1(double t) const;
  double psi2(double t) const;

 private:
  double cumulative(double t) const;  // Xi(0, t)
  std::size_t entry_at(double t) const;

  std::vector<double> tau_;
  std::vector<bool> stable_;
  std::vector<double> base_;  // Xi(0, tau_i), switch at tau_i included
  double horizon_;
  double lambda_s_;
  double lambda_u_;
  double log_mu_;
};

// Reference implementations that go through counts() for every term.
double xi_direct(const SwitchingSignal& signal, const SwitchingRules& rules, double lambda_s,
                 double lambda_u, double mu, double s, double t);
double psi2_direct(const SwitchingSignal& signal, const SwitchingRules& rules, double lambda_s,
                   double lambda_u, double mu, double t);

// Minimum of rhs - lhs over the grid.
struct SlackReport {
  std::string name;
  bool applicable = true;
  double min_slack = std::numeric_limits<double>::infinity();
  double argmin_time = 0.0;
  std::size_t argmin_index = 0;
  std::size_t nodes = 0;

  void update(std::size_t k, double t, double slack);
  bool holds(double tolerance = 0.0) const { return !applicable || min_slack >= -tolerance; }
};

// alpha_lower(|x_k|) <= beta(|x_0|, t_k) + chi1(max_{j<=k} |v_j|) + chi2(max_{j<=k} |y_j|).
SlackReport check_ioss_inequality(const Trajectory& traj, const IossEnvelope& env);

// V_{sigma(t)}(x(t)) <= psi1(t) V_{sigma(0)}(x0) + (gamma1(|v|) + gamma2(|y|)) psi2(t)
// with exact psi1, psi2 of the signal and running sup norms.
SlackReport check_lyapunov_chain(const Trajectory& traj, const SystemFamily& family,
                                 const SwitchingSignal& signal);

struct EstimatorBoundsReport {
  SlackReport a;  // |x| <= beta_bar(|x0| + |z0|, t) + chi_bar(c z)
  SlackReport b;  // |x| <= beta_bar(|x0| + |w0|, t) + chi_bar(w)
  SlackReport c;  // w <= c z, applicable when w0 <= z0

  bool holds(double tolerance = 0.0) const {
    return a.holds(tolerance) && b.holds(tolerance) && c.holds(tolerance);
  }
};

// Needs the z and w channels of the trajectory.
EstimatorBoundsReport check_estimator_bounds(const Trajectory& traj,
                                             const EstimationEnvelope& env);

// ISS estimate of the schedule-driven estimator:
//   z(t) <= exp(-c_bar t) z0 + psi_bar_z sup_{s<=t} gamma_bar(s)
struct EstimatorIssBound {
  double c_bar = 0.0;      // minus the value of condition (14)
  double c_bar1 = 0.0;     // ls* dt + lu* Dt
  double psi_bar_z = 0.0;  // built with mu = 1, rates (ls*, lu*), min dwell min(dt, Dt)
};

EstimatorIssBound estimator_iss_bound(const EstimatorCandidate& params);

// Checks the bound on z given per-node forcing gamma_bar (held over each step).
SlackReport check_estimator_iss(const std::vector<double>& z, const std::vector<double>& gamma_bar,
                                double h, const EstimatorCandidate& params);
SlackReport check_estimator_iss(const Trajectory& traj, const SystemFamily& family,
                                const EstimatorCandidate& params);

}  // namespace swioss
