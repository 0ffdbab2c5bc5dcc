#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swioss/family.hpp"
#include "swioss/rules.hpp"

namespace swioss {

struct SwitchEntry {
  double tau = 0.0;
  int index = 0;

  friend bool operator==(const SwitchEntry&, const SwitchEntry&) = default;
};

// Piecewise-constant, right-continuous switching signal on [0, horizon]:
// sigma(t) = entries[i].index for t in [entries[i].tau, entries[i+1].tau).
class SwitchingSignal {
 public:
  // Throws DomainError unless entries[0].tau == 0, the instants strictly
  // increase and horizon exceeds the last instant.
  SwitchingSignal(std::vector<SwitchEntry> entries, double horizon);

  static SwitchingSignal constant(int index, double horizon) {
    return SwitchingSignal({{0.0, index}}, horizon);
  }

  const std::vector<SwitchEntry>& entries() const { return entries_; }
  double horizon() const { return horizon_; }
  std::size_t switch_count() const { return entries_.size() - 1; }

  // Time spent on entry k; the last entry is cut at the horizon.
  double dwell(std::size_t k) const;

  // Throws DomainError for t outside [0, horizon].
  int evaluate(double t) const;

  friend bool operator==(const SwitchingSignal&, const SwitchingSignal&) = default;

 private:
  std::vector<SwitchEntry> entries_;
  double horizon_ = 0.0;
};

// Switch counts and activation times on the half-open interval ]s, t].
struct SwitchCounts {
  int N = 0;
  int N_S = 0;  // switches that activate a stable subsystem
  int N_U = 0;  // switches that activate an unstable subsystem
  double T_S = 0.0;
  double T_U = 0.0;
};

// Requires 0 <= s < t <= horizon; throws DomainError otherwise.
SwitchCounts counts(const SwitchingSignal& signal, const SwitchingRules& rules, double s, double t);
inline SwitchCounts counts(const SwitchingSignal& signal, const SystemFamily& family, double s,
                           double t) {
  return counts(signal, family.rules(), s, t);
}

struct SignalViolation {
  std::size_t entry = 0;  // offending entry (for dwell checks, the dwell that starts there)
  std::string reason;
};

struct ValidationReport {
  std::vector<SignalViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

// Gaps between instants must lie in [delta, Delta] and each transition must be
// an edge of E(P).  The final partial dwell (last instant to horizon) is only
// capped at Delta.
ValidationReport validate_admissible(const SwitchingSignal& signal, const SwitchingRules& rules);

// Admissibility plus: no unstable-to-unstable switch; stable dwells in
// [delta_check, Delta]; unstable dwells in [delta, Delta_hat].
ValidationReport validate_stabilizing(const SwitchingSignal& signal, const SwitchingRules& rules,
                                      const DwellPair& dwell);

// ticks * quantum, computed as ticks / (1 / quantum) when 1 / quantum is an
// integer so that decimal quanta give the nearest double (2800 * 1e-3 -> 2.8).
double ticks_to_time(std::int64_t ticks, double quantum);

// Random element of the stabilizing class on [0, horizon].  Dwells are drawn
// uniformly from the class window restricted to multiples of `quantum`, so
// every switching instant is an exact multiple of the quantum.  Successors are
// drawn uniformly among out-edges that keep unstable activations apart.
// Throws DomainError when a subsystem has no usable out-edge.
SwitchingSignal generate_signal(const SwitchingRules& rules, const DwellPair& dwell, double horizon,
                                std::uint64_t seed, double quantum = 1e-3);

// Count/duration bounds on ]s, t] for signals of the stabilizing class, taken
// literally:
//   floor((t-s)/Delta) <= N <= floor((t-s)/delta),   N_U <= floor(N/2),
//   T_S >= N_S * delta_check,                          T_U <= (N_U + 1) * Delta_hat.
// Durations are snapped to a 1e-9 grid and compared in integer arithmetic.
struct LemmaBounds {
  bool count_lower = true;
  bool count_upper = true;
  bool unstable_count = true;
  bool stable_time = true;
  bool unstable_time = true;

  bool all() const {
    return count_lower && count_upper && unstable_count && stable_time && unstable_time;
  }
};

LemmaBounds check_lemma_bounds(const SwitchCounts& c, double s, double t,
                               const SwitchingRules& rules, const DwellPair& dwell);

// Sharp versions of the same bounds that hold for every subinterval:
//   N <= floor((t-s)/delta) + 1,   N_U <= ceil(N/2),   T_S >= (N_S - 1) * delta_check.
// The lower count bound and the unstable-time bound are unchanged.
LemmaBounds check_sharp_bounds(const SwitchCounts& c, double s, double t,
                               const SwitchingRules& rules, const DwellPair& dwell);

}  // namespace swioss
