#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include "swioss/error.hpp"
#include "swioss/family.hpp"

namespace swioss {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::map<std::string, Entry> keys;
  int line = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
  }
  return depth;
}

class ConfigReader {
 public:
  ConfigReader(std::string_view text, std::string origin) : origin_(std::move(origin)) {
    read(text);
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
  }

  const Section& global() const { return global_; }
  const std::map<int, Section>& systems() const { return systems_; }

 private:
  void read(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    Section* current = &global_;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
      if (line.empty()) continue;

      if (line.front() == '[' && line.find('=') == std::string::npos) {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        const std::string header = trim(std::string_view(line).substr(1, line.size() - 2));
        if (header == "global") {
          current = &global_;
          continue;
        }
        std::istringstream hs(header);
        std::string word;
        int index = 0;
        std::string rest;
        if (!(hs >> word >> index) || word != "system" || (hs >> rest)) {
          fail(line_no, "expected [global] or [system <index>], got [" + header + "]");
        }
        if (index <= 0) fail(line_no, "system index must be a positive integer");
        if (systems_.count(index)) fail(line_no, "duplicate section [system " + header.substr(7) + "]");
        current = &systems_[index];
        current->line = line_no;
        continue;
      }

      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      std::string key = trim(std::string_view(line).substr(0, eq));
      std::string value = trim(std::string_view(line).substr(eq + 1));
      const int key_line = line_no;
      // Bracketed values may continue over several lines.
      while (bracket_balance(value) > 0 && std::getline(in, raw)) {
        ++line_no;
        value += " " + trim(std::string_view(raw).substr(0, raw.find('#')));
      }
      if (bracket_balance(value) != 0) fail(key_line, "unbalanced brackets in value of '" + key + "'");
      if (key.empty()) fail(key_line, "empty key");
      if (value.empty()) fail(key_line, "empty value for '" + key + "'");
      if (current->keys.count(key)) fail(key_line, "duplicate key '" + key + "'");
      current->keys[key] = Entry{value, key_line};
    }
  }

  std::string origin_;
  Section global_;
  std::map<int, Section> systems_;
};

// Splits "[a, b(c, d), e]" into {"a", "b(c, d)", "e"}.  A value without
// enclosing brackets is a one-element list.
std::vector<std::string> split_list(const std::string& value) {
  std::string body = value;
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  if (trim(body).empty()) return items;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  items.push_back(trim(cur));
  return items;
}

class FamilyBuilder {
 public:
  FamilyBuilder(const ConfigReader& reader) : reader_(reader) {}

  FamilyDefinition build() {
    const Section& g = reader_.global();
    FamilyDefinition def;
    if (auto name = optional_entry(g, "name")) def.name = name->value;
    if (auto inputs = optional_entry(g, "inputs")) {
      def.inputs = static_cast<int>(number(*inputs, "inputs"));
      if (def.inputs < 0 || def.inputs != number(*inputs, "inputs")) {
        reader_.fail(inputs->line, "inputs must be a non-negative integer");
      }
    }
    def.delta = number(required(g, "delta", 1), "delta");
    def.Delta = number(required(g, "Delta", 1), "Delta");
    auto dc = optional_entry(g, "delta_check");
    auto dh = optional_entry(g, "Delta_hat");
    if (dc.has_value() != dh.has_value()) {
      reader_.fail((dc ? dc : dh)->line, "delta_check and Delta_hat must be given together");
    }
    if (dc) def.dwell = DwellPair{number(*dc, "delta_check"), number(*dh, "Delta_hat")};

    LyapunovData& ly = def.lyapunov;
    ly.lambda_s = number(required(g, "lambda_s", 1), "lambda_s");
    ly.lambda_u = number(required(g, "lambda_u", 1), "lambda_u");
    ly.mu = number(required(g, "mu", 1), "mu");
    ly.gamma1 = kinf(required(g, "gamma1", 1), false);
    ly.gamma2 = kinf(required(g, "gamma2", 1), false);
    ly.alpha_lower = kinf(required(g, "alpha_lower", 1), false);
    ly.alpha_upper = kinf(required(g, "alpha_upper", 1), true);

    if (auto edges = optional_entry(g, "edges")) def.edges = parse_edges(*edges);

    static const std::set<std::string> kGlobalKeys = {
        "name", "inputs", "delta", "Delta", "delta_check", "Delta_hat", "lambda_s", "lambda_u",
        "mu", "gamma1", "gamma2", "alpha_lower", "alpha_upper", "edges"};
    for (const auto& [key, entry] : g.keys) {
      if (!kGlobalKeys.count(key)) reader_.fail(entry.line, "unknown global key '" + key + "'");
    }

    if (reader_.systems().empty()) reader_.fail(1, "no [system <index>] sections");
    for (const auto& [index, section] : reader_.systems()) {
      def.subsystems.push_back(subsystem(index, section));
    }
    return def;
  }

 private:
  const Entry& required(const Section& s, const std::string& key, int line) const {
    auto it = s.keys.find(key);
    if (it == s.keys.end()) reader_.fail(s.line ? s.line : line, "missing key '" + key + "'");
    return it->second;
  }

  static std::optional<Entry> optional_entry(const Section& s, const std::string& key) {
    auto it = s.keys.find(key);
    if (it == s.keys.end()) return std::nullopt;
    return it->second;
  }

  double number(const Entry& e, const std::string& key) const {
    return parse_number(e.value, e.line, key);
  }

  double parse_number(const std::string& text, int line, const std::string& key) const {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      reader_.fail(line, "'" + key + "' must be a decimal number, got '" + text + "'");
    }
    return value;
  }

  Expression expression(const std::string& src, const Entry& e, const std::string& key) const {
    try {
      return parse_expression(src);
    } catch (const ParseError& err) {
      reader_.fail(e.line, "in '" + key + "': " + err.what());
    }
  }

  KInfFunction kinf(const Entry& e, bool identity_floor) const {
    try {
      return KInfFunction::parse(e.value, identity_floor);
    } catch (const Error& err) {
      reader_.fail(e.line, err.what());
    }
  }

  std::set<std::pair<int, int>> parse_edges(const Entry& e) const {
    std::set<std::pair<int, int>> edges;
    for (const std::string& item : split_list(e.value)) {
      if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
        reader_.fail(e.line, "edge '" + item + "' must look like (p, q)");
      }
      const auto parts = split_list(item.substr(1, item.size() - 2));
      if (parts.size() != 2) reader_.fail(e.line, "edge '" + item + "' must have two indices");
      const double p = parse_number(parts[0], e.line, "edges");
      const double q = parse_number(parts[1], e.line, "edges");
      if (p != static_cast<int>(p) || q != static_cast<int>(q)) {
        reader_.fail(e.line, "edge indices must be integers");
      }
      edges.insert({static_cast<int>(p), static_cast<int>(q)});
    }
    return edges;
  }

  Subsystem subsystem(int index, const Section& s) const {
    Subsystem sub;
    sub.index = index;
    const Entry& cls = required(s, "class", s.line);
    if (cls.value == "stable") {
      sub.stability = StabilityClass::Stable;
    } else if (cls.value == "unstable") {
      sub.stability = StabilityClass::Unstable;
    } else {
      reader_.fail(cls.line, "class must be 'stable' or 'unstable'");
    }

    const Entry& f = required(s, "f", s.line);
    for (const std::string& item : split_list(f.value)) sub.dynamics.push_back(expression(item, f, "f"));
    if (auto h = optional_entry(s, "h")) {
      for (const std::string& item : split_list(h->value)) {
        sub.output.push_back(expression(item, *h, "h"));
      }
    }

    auto v = optional_entry(s, "V");
    auto q = optional_entry(s, "Q");
    if (v.has_value() == q.has_value()) {
      reader_.fail(s.line, "system " + std::to_string(index) + " needs exactly one of V or Q");
    }
    if (v) {
      Expression e = expression(v->value, *v, "V");
      if (e.references(VariableKind::Input) || e.references(VariableKind::Scalar) ||
          e.references(VariableKind::Time)) {
        reader_.fail(v->line, "V may only reference x variables");
      }
      sub.V = LyapunovFunction::expression(std::move(e));
    } else {
      const auto rows = split_list(q->value);
      const auto n = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd m(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto cols = split_list(rows[static_cast<std::size_t>(i)]);
        if (static_cast<Eigen::Index>(cols.size()) != n) {
          reader_.fail(q->line, "Q must be a square matrix written as [[..], [..]]");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          m(i, j) = parse_number(cols[static_cast<std::size_t>(j)], q->line, "Q");
        }
      }
      sub.V = LyapunovFunction::quadratic(std::move(m));
    }

    static const std::set<std::string> kSystemKeys = {"class", "f", "h", "V", "Q"};
    for (const auto& [key, entry] : s.keys) {
      if (!kSystemKeys.count(key)) reader_.fail(entry.line, "unknown key '" + key + "'");
    }
    return sub;
  }

  const ConfigReader& reader_;
};

}  // namespace

SystemFamily parse_family_config(std::string_view text, const std::string& origin) {
  ConfigReader reader(text, origin);
  FamilyBuilder builder(reader);
  FamilyDefinition def = builder.build();
  try {
    return SystemFamily(std::move(def));
  } catch (const ConfigError& err) {
    throw ConfigError(origin + ": " + err.what());
  }
}

SystemFamily load_family(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_family_config(buf.str(), path.string());
}

}  // namespace swioss
