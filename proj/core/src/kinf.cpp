#include "swioss/kinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swioss/error.hpp"

namespace swioss {

KInfFunction KInfFunction::parse(const std::string& src, bool identity_floor) {
  Expression e = parse_expression(src);
  if (e.references(VariableKind::State) || e.references(VariableKind::Input) ||
      e.references(VariableKind::Time)) {
    throw ConfigError("comparison function '" + src + "' may only reference r");
  }
  return KInfFunction(std::move(e), identity_floor);
}

double KInfFunction::operator()(double r) const {
  const double value = expr_(r);
  return identity_floor_ ? std::max(r, value) : value;
}

double KInfFunction::inverse(double y, double tol) const {
  if (std::isnan(y) || y < 0.0) throw DomainError("K-infinity inverse needs y >= 0");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return std::numeric_limits<double>::infinity();

  double hi = 1.0;
  int doublings = 0;
  while ((*this)(hi) < y) {
    hi *= 2.0;
    if (++doublings > 2000 || std::isinf(hi)) {
      return std::numeric_limits<double>::infinity();
    }
  }
  double lo = 0.0;
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::string KInfFunction::to_string() const {
  const std::string body = expr_.to_string();
  return identity_floor_ ? "max(r, " + body + ")" : body;
}

MonotonicityReport probe_kinf(const KInfFunction& f, int points, double r_max) {
  MonotonicityReport report;
  report.value_at_zero = f(0.0);
  report.zero_at_origin = std::abs(report.value_at_zero) <= 1e-12;
  report.strictly_increasing = true;
  double prev = report.value_at_zero;
  for (int k = 1; k < points; ++k) {
    const double r = r_max * static_cast<double>(k) / static_cast<double>(points - 1);
    const double value = f(r);
    if (!(value > prev) || !std::isfinite(value)) {
      report.strictly_increasing = false;
      report.first_failure_r = r;
      break;
    }
    prev = value;
  }
  return report;
}

}  // namespace swioss
