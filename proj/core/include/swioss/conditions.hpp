#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swioss/family.hpp"

namespace swioss {

// Left-hand side of the dwell-time condition
//   -ls*dc/D + ls*dc/(2d) + lu*Dh/(2d) + ln(mu)/d.
// Throws DomainError unless ls > 0, lu >= 0, mu >= 1, d > 0 and dc, Dh lie in [d, D].
double eval_eq9(double lambda_s, double lambda_u, double mu, double delta, double Delta,
                double delta_check, double Delta_hat);

struct DwellChoice {
  double delta_check = 0.0;
  double Delta_hat = 0.0;
  double lhs9 = 0.0;
};

// True iff the necessary condition Delta < 2*delta holds.
inline bool necessary_condition_holds(double delta, double Delta) { return Delta < 2.0 * delta; }

// Minimizer of the dwell-time condition over [d, D]^2 (closed form: the
// expression is affine in each variable).  Returns nullopt when the minimum is
// not negative, and immediately when Delta >= 2*delta.
std::optional<DwellChoice> find_dwell_times(double lambda_s, double lambda_u, double mu,
                                            double delta, double Delta, int grid_n = 401);

// Exhaustive grid minimization on grid_n x grid_n points; always returns the
// best grid point.
DwellChoice grid_search_dwell_times(double lambda_s, double lambda_u, double mu, double delta,
                                    double Delta, int grid_n);

// Sufficient conditions for feasibility, each evaluated as stated, plus the
// dwell-time condition at the pair each clause designates.  Clauses (i) and
// (ii) designate every pair in the box, so the largest value over its corners
// is recorded.
struct Prop2Clauses {
  bool i = false;
  bool ii = false;
  bool iii = false;
  bool iv = false;
  double lhs9_i = 0.0;
  double lhs9_ii = 0.0;
  double lhs9_iii = 0.0;  // at (Delta, delta)
  double lhs9_iv = 0.0;   // at (delta, Delta)

  // Every true clause implies a negative value at its designated pair.
  bool consistent() const;
};

Prop2Clauses check_prop2(double lambda_s, double lambda_u, double mu, double delta, double Delta);

struct DwellCertificate {
  double lambda_s = 0.0;
  double lambda_u = 0.0;
  double mu = 1.0;
  double delta = 0.0;
  double Delta = 0.0;
  double delta_check = 0.0;
  double Delta_hat = 0.0;
  double lhs9 = 0.0;
  double margin = 0.0;
  bool has_stable = true;
  bool has_unstable = true;
  bool necessary_condition = true;  // Delta < 2*delta
  Prop2Clauses sufficient;
  std::string reason;  // empty when feasible

  bool feasible() const { return reason.empty(); }
  DwellPair dwell() const { return {delta_check, Delta_hat}; }
};

// Certifies a family.  The dwell pair is, in order of preference: `dwell`, the
// family's preset pair, the analytic minimizer.  Feasible iff a stable
// subsystem exists and lhs9 < -margin.
DwellCertificate certify(const SystemFamily& family, std::optional<DwellPair> dwell = std::nullopt,
                         double margin = 0.0);

struct EstimatorCandidate {
  double lambda_s_star = 0.0;
  double lambda_u_star = 0.0;
  double delta_tilde = 0.0;
  double Delta_tilde = 0.0;
};

struct EstimatorConditionValues {
  double rate_slack = 0.0;  // lambda_s - ls* + lambda_u - lu*
  double c11 = 0.0;
  double c12 = 0.0;
  double c14 = 0.0;
  double c15 = 0.0;

  // min of -c11, -c12, -c14, -c15
  double min_slack() const;
};

struct EstimatorParams {
  EstimatorCandidate candidate;
  EstimatorConditionValues values;
};

struct ConditionViolation {
  std::string condition;  // "10a", "10b", "10c", "11", "12", "13a", "13b", "14", "15"
  double value = 0.0;
  std::string message;
};

struct EstimatorEvaluation {
  EstimatorParams params;
  std::vector<ConditionViolation> violations;
  bool accepted() const { return violations.empty(); }
};

EstimatorConditionValues estimator_condition_values(const DwellCertificate& cert,
                                                    const EstimatorCandidate& candidate);

// Strict conditions require value < -margin, the non-strict ones value <= -margin.
// Throws DomainError for an infeasible certificate.
EstimatorEvaluation eval_estimator_conditions(const DwellCertificate& cert,
                                              const EstimatorCandidate& candidate,
                                              double margin = 0.0);

// Grid search over
//   ls* in (0, lambda_s), lu* in [lambda_u, lambda_u + lambda_s - ls*],
//   dt in (0, delta_check], Dt in [Delta_hat, 4 Delta_hat]
// with dt and Dt snapped to multiples of `quantum`.  Returns the accepted
// candidate with the largest minimum slack.  Throws DomainError for an
// infeasible certificate or grid_n < 2.
std::optional<EstimatorParams> find_estimator_params(const DwellCertificate& cert, int grid_n = 20,
                                                     double margin = 0.0, double quantum = 1e-3);

}  // namespace swioss
