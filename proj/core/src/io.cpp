#include "swioss/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swioss/error.hpp"

namespace swioss {

using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const SlackReport& r) {
  return json{{"name", r.name},
              {"applicable", r.applicable},
              {"holds", r.holds()},
              {"min_slack", finite_or_null(r.min_slack)},
              {"argmin_time", r.argmin_time},
              {"argmin_index", r.argmin_index},
              {"nodes", r.nodes}};
}

json to_json(const IossEnvelope& e) {
  return json{{"c1", e.c1},
              {"c2", e.c2},
              {"psi2_bar", finite_or_null(e.psi2_bar)},
              {"has_unstable", e.has_unstable},
              {"alpha_lower", e.alpha_lower.to_string()},
              {"alpha_upper", "max(r, " + e.alpha_upper.expression().to_string() + ")"},
              {"gamma1", e.gamma1.to_string()},
              {"gamma2", e.gamma2.to_string()}};
}

}  // namespace

std::string signal_to_json(const SwitchingSignal& signal) {
  json entries = json::array();
  for (const auto& e : signal.entries()) entries.push_back(json::array({e.tau, e.index}));
  return dump(json{{"entries", entries}, {"horizon", signal.horizon()}});
}

SwitchingSignal signal_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("signal JSON: ") + e.what());
  }
  try {
    std::vector<SwitchEntry> entries;
    for (const auto& item : j.at("entries")) {
      if (!item.is_array() || item.size() != 2) {
        throw ConfigError("signal JSON: each entry must be [tau, index]");
      }
      entries.push_back({item.at(0).get<double>(), item.at(1).get<int>()});
    }
    return SwitchingSignal(std::move(entries), j.at("horizon").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("signal JSON: ") + e.what());
  }
}

SwitchingSignal load_signal(const std::filesystem::path& path) {
  return signal_from_json(read_file(path));
}

std::string certificate_to_json(const DwellCertificate& c) {
  const Prop2Clauses& p = c.sufficient;
  json sufficient{{"i", p.i},         {"ii", p.ii},         {"iii", p.iii},
                  {"iv", p.iv},       {"lhs9_i", p.lhs9_i}, {"lhs9_ii", p.lhs9_ii},
                  {"lhs9_iii", p.lhs9_iii}, {"lhs9_iv", p.lhs9_iv}};
  return dump(json{{"feasible", c.feasible()},
                   {"reason", c.reason},
                   {"lambda_s", c.lambda_s},
                   {"lambda_u", c.lambda_u},
                   {"mu", c.mu},
                   {"delta", c.delta},
                   {"Delta", c.Delta},
                   {"delta_check", c.delta_check},
                   {"Delta_hat", c.Delta_hat},
                   {"lhs9", c.lhs9},
                   {"margin", c.margin},
                   {"has_stable", c.has_stable},
                   {"has_unstable", c.has_unstable},
                   {"necessary_condition", c.necessary_condition},
                   {"sufficient_conditions", sufficient}});
}

std::string estimator_to_json(const EstimatorEvaluation& e) {
  const EstimatorCandidate& p = e.params.candidate;
  const EstimatorConditionValues& v = e.params.values;
  json violations = json::array();
  for (const auto& x : e.violations) {
    violations.push_back({{"condition", x.condition}, {"value", x.value}, {"message", x.message}});
  }
  return dump(json{{"accepted", e.accepted()},
                   {"lambda_s_star", p.lambda_s_star},
                   {"lambda_u_star", p.lambda_u_star},
                   {"delta_tilde", p.delta_tilde},
                   {"Delta_tilde", p.Delta_tilde},
                   {"values",
                    {{"rate_slack", v.rate_slack},
                     {"c11", v.c11},
                     {"c12", v.c12},
                     {"c14", v.c14},
                     {"c15", v.c15}}},
                   {"violations", violations}});
}

std::string envelope_to_json(const IossEnvelope& env) { return dump(to_json(env)); }

std::string envelope_to_json(const EstimationEnvelope& env) {
  return dump(json{{"ioss", to_json(env.ioss)},
                   {"c1_tilde", env.c1_tilde},
                   {"c2_tilde", env.c2_tilde},
                   {"b", finite_or_null(env.b)},
                   {"b_tilde", finite_or_null(env.b_tilde)},
                   {"c", finite_or_null(env.c)},
                   {"c_alt", finite_or_null(env.c_alt)},
                   {"use_alt_c", env.use_alt_c}});
}

std::string report_to_json(const SlackReport& report) { return dump(to_json(report)); }

namespace {

void put(std::ostream& os, double v) { os << format_double(v); }

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.size();
  const auto d = n ? traj.x.front().size() : 0;
  const auto p = n ? traj.y.front().size() : 0;
  const auto m = n ? traj.v.front().size() : 0;
  os << "t";
  for (Eigen::Index i = 1; i <= d; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= p; ++i) os << ",y" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",v" << i;
  os << ",sigma,z,w,zeta,upsilon\n";
  for (std::size_t k = 0; k < n; ++k) {
    put(os, traj.t[k]);
    for (Eigen::Index i = 0; i < d; ++i) os << ',', put(os, traj.x[k][i]);
    for (Eigen::Index i = 0; i < p; ++i) os << ',', put(os, traj.y[k][i]);
    for (Eigen::Index i = 0; i < m; ++i) os << ',', put(os, traj.v[k][i]);
    os << ',' << traj.sigma[k] << ',';
    if (k < traj.z.size()) put(os, traj.z[k]);
    os << ',';
    if (k < traj.w.size()) put(os, traj.w[k]);
    os << ',';
    if (k < traj.zeta.size()) os << traj.zeta[k];
    os << ',';
    if (k < traj.upsilon.size()) os << traj.upsilon[k];
    os << '\n';
  }
}

void write_signal_csv(std::ostream& os, const SwitchingSignal& signal, double h) {
  if (!(h > 0.0)) throw DomainError("sampling step must be positive");
  const auto K = static_cast<std::int64_t>(std::floor(signal.horizon() / h + 1e-9));
  os << "t,sigma\n";
  for (std::int64_t k = 0; k <= K; ++k) {
    const double t = std::min(static_cast<double>(k) * h, signal.horizon());
    put(os, t);
    os << ',' << signal.evaluate(t) << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      put(os, row[i]);
    }
    os << '\n';
  }
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace swioss
