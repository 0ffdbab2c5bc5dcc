#include "swioss/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "swioss/error.hpp"
#include "swioss/signals.hpp"

namespace swioss {

namespace {

constexpr double kBoxTol = 1e-12;

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

double lhs9_unchecked(double ls, double lu, double mu, double d, double D, double dc, double Dh) {
  return -ls * dc / D + ls * dc / (2.0 * d) + lu * Dh / (2.0 * d) + std::log(mu) / d;
}

}  // namespace

double eval_eq9(double lambda_s, double lambda_u, double mu, double delta, double Delta,
                double delta_check, double Delta_hat) {
  require(lambda_s > 0.0, "lambda_s must be positive");
  require(lambda_u >= 0.0, "lambda_u must be non-negative");
  require(mu >= 1.0, "mu must be at least 1");
  require(delta > 0.0 && delta <= Delta, "need 0 < delta <= Delta");
  require(delta_check >= delta - kBoxTol && delta_check <= Delta + kBoxTol,
          "delta_check must lie in [delta, Delta]");
  require(Delta_hat >= delta - kBoxTol && Delta_hat <= Delta + kBoxTol,
          "Delta_hat must lie in [delta, Delta]");
  return lhs9_unchecked(lambda_s, lambda_u, mu, delta, Delta, delta_check, Delta_hat);
}

std::optional<DwellChoice> find_dwell_times(double lambda_s, double lambda_u, double mu,
                                            double delta, double Delta, int grid_n) {
  require(grid_n >= 2, "grid_n must be at least 2");
  if (!necessary_condition_holds(delta, Delta)) return std::nullopt;
  const double dc = (1.0 / (2.0 * delta) - 1.0 / Delta) < 0.0 ? Delta : delta;
  const double Dh = delta;
  const double value = eval_eq9(lambda_s, lambda_u, mu, delta, Delta, dc, Dh);
  if (!(value < 0.0)) return std::nullopt;
  return DwellChoice{dc, Dh, value};
}

DwellChoice grid_search_dwell_times(double lambda_s, double lambda_u, double mu, double delta,
                                    double Delta, int grid_n) {
  require(grid_n >= 2, "grid_n must be at least 2");
  DwellChoice best{delta, delta, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < grid_n; ++i) {
    const double dc = delta + (Delta - delta) * i / (grid_n - 1);
    for (int j = 0; j < grid_n; ++j) {
      const double Dh = delta + (Delta - delta) * j / (grid_n - 1);
      const double v = eval_eq9(lambda_s, lambda_u, mu, delta, Delta, dc, Dh);
      if (v < best.lhs9) best = {dc, Dh, v};
    }
  }
  return best;
}

bool Prop2Clauses::consistent() const {
  return (!i || lhs9_i < 0.0) && (!ii || lhs9_ii < 0.0) && (!iii || lhs9_iii < 0.0) &&
         (!iv || lhs9_iv < 0.0);
}

Prop2Clauses check_prop2(double ls, double lu, double mu, double d, double D) {
  Prop2Clauses c;
  const double lnmu = std::log(mu);
  c.i = mu == 1.0 && D * D / (2.0 * d * d) < ls / (ls + lu);
  c.ii = lu * D / (2.0 * d) + lnmu / d < ls * (d / D - D / (2.0 * d));
  c.iii = lu / 2.0 + lnmu / d < ls * (1.0 - D / (2.0 * d));
  c.iv = lu * D / (2.0 * d) + lnmu / d < ls * (d / D - 0.5);

  double corner_max = -std::numeric_limits<double>::infinity();
  for (double dc : {d, D}) {
    for (double Dh : {d, D}) {
      corner_max = std::max(corner_max, lhs9_unchecked(ls, lu, mu, d, D, dc, Dh));
    }
  }
  c.lhs9_i = corner_max;
  c.lhs9_ii = corner_max;
  c.lhs9_iii = lhs9_unchecked(ls, lu, mu, d, D, D, d);
  c.lhs9_iv = lhs9_unchecked(ls, lu, mu, d, D, d, D);
  return c;
}

DwellCertificate certify(const SystemFamily& family, std::optional<DwellPair> dwell,
                         double margin) {
  require(margin >= 0.0, "margin must be non-negative");
  const LyapunovData& ly = family.lyapunov();
  DwellCertificate cert;
  cert.lambda_s = ly.lambda_s;
  cert.lambda_u = ly.lambda_u;
  cert.mu = ly.mu;
  cert.delta = family.delta();
  cert.Delta = family.Delta();
  cert.margin = margin;
  cert.has_stable = !family.stable_indices().empty();
  cert.has_unstable = !family.unstable_indices().empty();
  cert.necessary_condition = necessary_condition_holds(cert.delta, cert.Delta);
  cert.sufficient = check_prop2(cert.lambda_s, cert.lambda_u, cert.mu, cert.delta, cert.Delta);

  if (!dwell) dwell = family.preset_dwell();
  if (!dwell) {
    const double dc = (1.0 / (2.0 * cert.delta) - 1.0 / cert.Delta) < 0.0 ? cert.Delta : cert.delta;
    dwell = DwellPair{dc, cert.delta};
  }
  cert.delta_check = dwell->delta_check;
  cert.Delta_hat = dwell->Delta_hat;
  cert.lhs9 = eval_eq9(cert.lambda_s, cert.lambda_u, cert.mu, cert.delta, cert.Delta,
                       cert.delta_check, cert.Delta_hat);

  if (!cert.has_stable) {
    cert.reason = "no stable subsystem";
  } else if (!cert.necessary_condition) {
    cert.reason = "necessary condition Delta < 2*delta fails";
  } else if (!(cert.lhs9 < -margin)) {
    cert.reason = "dwell-time condition is not negative";
  }
  return cert;
}

double EstimatorConditionValues::min_slack() const {
  return std::min({-c11, -c12, -c14, -c15});
}

EstimatorConditionValues estimator_condition_values(const DwellCertificate& cert,
                                                    const EstimatorCandidate& p) {
  const double ls = cert.lambda_s;
  const double lu = cert.lambda_u;
  const double d = cert.delta;
  const double dc = cert.delta_check;
  const double Dh = cert.Delta_hat;
  const double ss = p.lambda_s_star;
  const double us = p.lambda_u_star;
  const double dt = p.delta_tilde;
  const double Dt = p.Delta_tilde;

  EstimatorConditionValues v;
  v.rate_slack = ls - ss + lu - us;
  v.c11 = -ss * dc / cert.Delta + ss * dc / (2.0 * d) + us * Dh / (2.0 * d);
  v.c12 = std::log(cert.mu) / d - (ls - ss) + v.rate_slack * Dh / (2.0 * d);
  v.c14 = -ss + (ss + us) * Dt / (dt + Dt);
  v.c15 = Dt * Dh / (2.0 * d) + dt * Dh / (2.0 * d) - Dt;
  return v;
}

EstimatorEvaluation eval_estimator_conditions(const DwellCertificate& cert,
                                              const EstimatorCandidate& candidate, double margin) {
  require(cert.feasible(), "estimator conditions need a feasible certificate");
  require(margin >= 0.0, "margin must be non-negative");
  EstimatorEvaluation out;
  out.params.candidate = candidate;
  const EstimatorConditionValues& v = out.params.values =
      estimator_condition_values(cert, candidate);
  auto fail = [&](const char* id, double value, const std::string& message) {
    out.violations.push_back({id, value, message});
  };
  const auto& p = candidate;
  if (!(p.lambda_s_star > 0.0)) fail("10a", p.lambda_s_star, "lambda_s_star must be positive");
  if (!(p.lambda_s_star < cert.lambda_s)) {
    fail("10a", p.lambda_s_star - cert.lambda_s, "lambda_s_star must be below lambda_s");
  }
  if (!(p.lambda_u_star >= cert.lambda_u)) {
    fail("10b", p.lambda_u_star - cert.lambda_u, "lambda_u_star must be at least lambda_u");
  }
  if (!(v.rate_slack >= 0.0)) fail("10c", v.rate_slack, "rate slack must be non-negative");
  if (!(v.c11 < -margin)) fail("11", v.c11, "condition (11) must be negative");
  if (!(v.c12 < -margin)) fail("12", v.c12, "condition (12) must be negative");
  if (!(p.delta_tilde > 0.0 && p.delta_tilde <= cert.delta_check + kBoxTol)) {
    fail("13a", p.delta_tilde, "delta_tilde must lie in (0, delta_check]");
  }
  if (!(p.Delta_tilde >= cert.Delta_hat - kBoxTol)) {
    fail("13b", p.Delta_tilde, "Delta_tilde must be at least Delta_hat");
  }
  if (!(v.c14 < -margin)) fail("14", v.c14, "condition (14) must be negative");
  if (!(v.c15 <= -margin)) fail("15", v.c15, "condition (15) must be non-positive");
  return out;
}

std::optional<EstimatorParams> find_estimator_params(const DwellCertificate& cert, int grid_n,
                                                     double margin, double quantum) {
  require(cert.feasible(), "estimator search needs a feasible certificate");
  require(grid_n >= 2, "grid_n must be at least 2");
  require(quantum > 0.0, "time quantum must be positive");
  const int n = grid_n;

  std::vector<double> dts;
  for (int k = 1; k <= n; ++k) {
    const double raw = cert.delta_check * k / n;
    const double snapped =
        ticks_to_time(static_cast<std::int64_t>(std::floor(raw / quantum + 1e-9)), quantum);
    if (snapped > 0.0 && (dts.empty() || snapped != dts.back())) dts.push_back(snapped);
  }
  std::vector<double> Dts;
  const double Dmax = ticks_to_time(
      static_cast<std::int64_t>(std::floor(4.0 * cert.Delta_hat / quantum + 1e-9)), quantum);
  for (int l = 0; l < n; ++l) {
    const double raw = cert.Delta_hat + 3.0 * cert.Delta_hat * l / (n - 1);
    const double snapped = std::min(
        ticks_to_time(static_cast<std::int64_t>(std::ceil(raw / quantum - 1e-9)), quantum), Dmax);
    if (snapped >= cert.Delta_hat - kBoxTol && (Dts.empty() || snapped != Dts.back())) {
      Dts.push_back(snapped);
    }
  }

  std::optional<EstimatorParams> best;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const double ss = cert.lambda_s * i / (n + 1);
    for (int j = 0; j < n; ++j) {
      const double us = cert.lambda_u + (cert.lambda_s - ss) * j / (n - 1);
      for (double dt : dts) {
        for (double Dt : Dts) {
          const EstimatorCandidate cand{ss, us, dt, Dt};
          const EstimatorConditionValues v = estimator_condition_values(cert, cand);
          const double slack = v.min_slack();
          if (!(slack > best_slack)) continue;
          const EstimatorEvaluation eval = eval_estimator_conditions(cert, cand, margin);
          if (!eval.accepted()) continue;
          best_slack = slack;
          best = eval.params;
        }
      }
    }
  }
  return best;
}

}  // namespace swioss
