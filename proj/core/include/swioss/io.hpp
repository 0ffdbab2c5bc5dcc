#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "swioss/conditions.hpp"
#include "swioss/envelope.hpp"
#include "swioss/signals.hpp"
#include "swioss/sim.hpp"

namespace swioss {

// JSON documents (pretty-printed, two-space indent, trailing newline).
std::string signal_to_json(const SwitchingSignal& signal);
// Throws ConfigError on malformed documents and DomainError on invalid signals.
SwitchingSignal signal_from_json(std::string_view text);
SwitchingSignal load_signal(const std::filesystem::path& path);

std::string certificate_to_json(const DwellCertificate& cert);
std::string estimator_to_json(const EstimatorEvaluation& eval);
std::string envelope_to_json(const IossEnvelope& env);
std::string envelope_to_json(const EstimationEnvelope& env);
std::string report_to_json(const SlackReport& report);

// CSV: '.' decimal separator, 17 significant digits, LF line endings.
// Columns t, x1..xd, y1..yp, v1..vm, sigma, z, w, zeta, upsilon; absent
// channels are left empty.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
// Columns t, sigma sampled at t_k = k h, k = 0..round(horizon / h).
void write_signal_csv(std::ostream& os, const SwitchingSignal& signal, double h);
// Generic numeric table.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Writes `content` to `path` in binary mode; throws Error on failure.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace swioss
