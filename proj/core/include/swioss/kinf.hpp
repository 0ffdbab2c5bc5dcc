#pragma once

#include <string>

#include "swioss/expr.hpp"

namespace swioss {

// A class-K-infinity comparison function r -> alpha(r), given as a DSL
// expression in `r`.  When `identity_floor` is set the function evaluates as
// max(r, alpha(r)), which makes alpha(r) >= r hold literally.
class KInfFunction {
 public:
  KInfFunction() = default;
  explicit KInfFunction(Expression expr, bool identity_floor = false)
      : expr_(std::move(expr)), identity_floor_(identity_floor) {}

  static KInfFunction parse(const std::string& src, bool identity_floor = false);

  double operator()(double r) const;

  // Bisection on [0, r_max]; r_max doubles from 1 until f(r_max) >= y.
  // Stops when the bracket is narrower than tol * max(1, r).
  double inverse(double y, double tol = 1e-10) const;

  const Expression& expression() const { return expr_; }
  bool identity_floor() const { return identity_floor_; }
  std::string to_string() const;

 private:
  Expression expr_;
  bool identity_floor_ = false;
};

struct MonotonicityReport {
  bool zero_at_origin = false;
  bool strictly_increasing = false;
  double value_at_zero = 0.0;
  double first_failure_r = 0.0;  // meaningful when !strictly_increasing
  bool ok() const { return zero_at_origin && strictly_increasing; }
};

// Samples `points` equally spaced radii on [0, r_max].
MonotonicityReport probe_kinf(const KInfFunction& f, int points = 1000, double r_max = 1000.0);

}  // namespace swioss
