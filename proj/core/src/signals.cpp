#include "swioss/signals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swioss/error.hpp"
#include "swioss/random.hpp"

namespace swioss {

namespace {

constexpr double kDwellTol = 1e-9;

std::string fmt(double v) { return format_double(v); }

}  // namespace

SwitchingSignal::SwitchingSignal(std::vector<SwitchEntry> entries, double horizon)
    : entries_(std::move(entries)), horizon_(horizon) {
  if (entries_.empty()) throw DomainError("switching signal needs at least one entry");
  if (entries_.front().tau != 0.0) throw DomainError("first switching instant must be 0");
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!(entries_[i].tau > entries_[i - 1].tau)) {
      throw DomainError("switching instants must strictly increase (entry " + std::to_string(i) +
                        ")");
    }
  }
  if (!std::isfinite(horizon_) || !(horizon_ > entries_.back().tau)) {
    throw DomainError("horizon must exceed the last switching instant");
  }
}

double SwitchingSignal::dwell(std::size_t k) const {
  const double end = k + 1 < entries_.size() ? entries_[k + 1].tau : horizon_;
  return end - entries_[k].tau;
}

int SwitchingSignal::evaluate(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw DomainError("t = " + fmt(t) + " outside [0, " + fmt(horizon_) + "]");
  }
  auto it = std::upper_bound(entries_.begin(), entries_.end(), t,
                             [](double value, const SwitchEntry& e) { return value < e.tau; });
  return std::prev(it)->index;
}

SwitchCounts counts(const SwitchingSignal& signal, const SwitchingRules& rules, double s, double t) {
  if (!(s >= 0.0 && s < t && t <= signal.horizon())) {
    throw DomainError("counts needs 0 <= s < t <= horizon, got ]" + fmt(s) + ", " + fmt(t) + "]");
  }
  SwitchCounts c;
  const auto& e = signal.entries();
  for (std::size_t k = 0; k < e.size(); ++k) {
    const bool stable = rules.is_stable(e[k].index);
    if (k > 0 && e[k].tau > s && e[k].tau <= t) {
      ++c.N;
      ++(stable ? c.N_S : c.N_U);
    }
    const double begin = std::max(e[k].tau, s);
    const double end = std::min(k + 1 < e.size() ? e[k + 1].tau : signal.horizon(), t);
    if (end > begin) (stable ? c.T_S : c.T_U) += end - begin;
  }
  return c;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    os << (i ? "; " : "") << violations[i].reason;
  }
  return os.str();
}

namespace {

void check_structure(const SwitchingSignal& signal, const SwitchingRules& rules,
                     ValidationReport& report) {
  const auto& e = signal.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!rules.contains(e[i].index)) {
      report.violations.push_back(
          {i, "unknown subsystem " + std::to_string(e[i].index) + " at " + std::to_string(i)});
    }
  }
}

void check_window(const SwitchingSignal& signal, std::size_t i, double lo, double hi,
                  bool final_partial, const std::string& what, ValidationReport& report) {
  const double gap = signal.dwell(i);
  if (!final_partial && gap < lo - kDwellTol) {
    report.violations.push_back({i, what + " dwell too short at " + std::to_string(i) + " (" +
                                        fmt(gap) + " < " + fmt(lo) + ")"});
  }
  if (gap > hi + kDwellTol) {
    report.violations.push_back({i, what + " dwell too long at " + std::to_string(i) + " (" +
                                        fmt(gap) + " > " + fmt(hi) + ")"});
  }
}

}  // namespace

ValidationReport validate_admissible(const SwitchingSignal& signal, const SwitchingRules& rules) {
  ValidationReport report;
  check_structure(signal, rules, report);
  if (!report.ok()) return report;

  const auto& e = signal.entries();
  const bool single = rules.classes.size() == 1;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool last = i + 1 == e.size();
    if (!(last && single)) {
      check_window(signal, i, rules.delta, rules.Delta, last, "admissible", report);
    }
    if (!last && !rules.graph.allows(e[i].index, e[i + 1].index)) {
      report.violations.push_back({i, "edge not allowed at " + std::to_string(i) + " (" +
                                          std::to_string(e[i].index) + " -> " +
                                          std::to_string(e[i + 1].index) + ")"});
    }
  }
  return report;
}

ValidationReport validate_stabilizing(const SwitchingSignal& signal, const SwitchingRules& rules,
                                      const DwellPair& dwell) {
  ValidationReport report;
  check_structure(signal, rules, report);
  if (!report.ok()) return report;
  report = validate_admissible(signal, rules);
  const auto& e = signal.entries();
  const bool single = rules.classes.size() == 1;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool last = i + 1 == e.size();
    const bool unstable = rules.is_unstable(e[i].index);
    if (!last && unstable && rules.is_unstable(e[i + 1].index)) {
      report.violations.push_back({i, "consecutive unstable activations at " +
                                          std::to_string(i) + " and " + std::to_string(i + 1)});
    }
    if (last && single) continue;
    if (unstable) {
      check_window(signal, i, rules.delta, dwell.Delta_hat, last, "unstable", report);
    } else {
      check_window(signal, i, dwell.delta_check, rules.Delta, last, "stable", report);
    }
  }
  return report;
}

double ticks_to_time(std::int64_t ticks, double quantum) {
  const double inv = std::round(1.0 / quantum);
  if (inv >= 1.0 && std::abs(inv * quantum - 1.0) < 1e-12) {
    return static_cast<double>(ticks) / inv;
  }
  return static_cast<double>(ticks) * quantum;
}

SwitchingSignal generate_signal(const SwitchingRules& rules, const DwellPair& dwell, double horizon,
                                std::uint64_t seed, double quantum) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (!(quantum > 0.0)) throw DomainError("time quantum must be positive");
  const std::vector<int> indices = rules.indices();
  if (indices.empty()) throw DomainError("no subsystems to switch between");

  struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
  };
  auto window = [&](double lo, double hi, const char* what) {
    Window w{static_cast<std::int64_t>(std::ceil(lo / quantum - 1e-9)),
             static_cast<std::int64_t>(std::floor(hi / quantum + 1e-9))};
    if (w.lo > w.hi || w.hi <= 0) {
      throw DomainError(std::string(what) + " dwell window [" + fmt(lo) + ", " + fmt(hi) +
                        "] contains no multiple of the time quantum " + fmt(quantum));
    }
    w.lo = std::max<std::int64_t>(w.lo, 1);
    return w;
  };
  const Window stable_window = window(dwell.delta_check, rules.Delta, "stable");
  const Window unstable_window = window(rules.delta, dwell.Delta_hat, "unstable");

  Rng rng(seed);
  int current = indices[rng.index(indices.size())];
  std::vector<SwitchEntry> entries{{0.0, current}};
  if (indices.size() == 1) return SwitchingSignal(std::move(entries), horizon);

  std::int64_t ticks = 0;
  for (;;) {
    const bool unstable = rules.is_unstable(current);
    const Window& w = unstable ? unstable_window : stable_window;
    ticks += rng.integer(w.lo, w.hi);
    const double tau = ticks_to_time(ticks, quantum);
    if (tau >= horizon - 1e-12) break;

    std::vector<int> next;
    for (int q : rules.graph.successors(current)) {
      if (!(unstable && rules.is_unstable(q))) next.push_back(q);
    }
    if (next.empty()) {
      throw DomainError("subsystem " + std::to_string(current) +
                        " has no admissible switch that avoids consecutive unstable activations");
    }
    current = next[rng.index(next.size())];
    entries.push_back({tau, current});
  }
  return SwitchingSignal(std::move(entries), horizon);
}

namespace {

std::int64_t snap(double value) { return std::llround(value * 1e9); }

// floor(a / b) for snapped, non-negative a and positive b.
std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b; }

}  // namespace

LemmaBounds check_lemma_bounds(const SwitchCounts& c, double s, double t,
                               const SwitchingRules& rules, const DwellPair& dwell) {
  const std::int64_t length = snap(t - s);
  LemmaBounds b;
  b.count_lower = floor_div(length, snap(rules.Delta)) <= c.N;
  b.count_upper = c.N <= floor_div(length, snap(rules.delta));
  b.unstable_count = c.N_U <= c.N / 2;
  b.stable_time = snap(c.T_S) >= static_cast<std::int64_t>(c.N_S) * snap(dwell.delta_check);
  b.unstable_time = snap(c.T_U) <= static_cast<std::int64_t>(c.N_U + 1) * snap(dwell.Delta_hat);
  return b;
}

LemmaBounds check_sharp_bounds(const SwitchCounts& c, double s, double t,
                               const SwitchingRules& rules, const DwellPair& dwell) {
  LemmaBounds b = check_lemma_bounds(c, s, t, rules, dwell);
  const std::int64_t length = snap(t - s);
  b.count_upper = c.N <= floor_div(length, snap(rules.delta)) + 1;
  b.unstable_count = c.N_U <= (c.N + 1) / 2;
  b.stable_time =
      snap(c.T_S) >= static_cast<std::int64_t>(std::max(c.N_S - 1, 0)) * snap(dwell.delta_check);
  return b;
}

}  // namespace swioss
