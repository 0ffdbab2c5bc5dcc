#include <string>

#include "swioss/error.hpp"
#include "swioss/family.hpp"

namespace swioss {

namespace {

// alpha_upper is written as r*r; the loader stores it as max(r, r*r).
constexpr std::string_view kPaperExample = R"(# Three planar subsystems: one stable, two unstable.
name = paper-example
inputs = 1

delta = 3.5
Delta = 4
delta_check = 3.5
Delta_hat = 4

lambda_s = 3.5
lambda_u = 0.73
mu = 2
gamma1 = 2*r*r
gamma2 = 2*r*r
alpha_lower = 0.5*r*r
alpha_upper = r*r

edges = [(1, 2), (1, 3), (2, 1), (3, 1)]

[system 1]
class = stable
f = [-2*x1 + sin(x1 - x2), -2*x2 + sin(x2 - x1) + 0.5*v1]
h = [x1 - x2]
Q = [[0.5, 0], [0, 0.5]]

[system 2]
class = unstable
f = [0.5*x2 + 0.25*abs(x1), sat(x1) + 0.5*v1]
h = [abs(x1)]
Q = [[0.5, 0], [0, 0.5]]

[system 3]
class = unstable
f = [0.2*x1 + 0.1*x2, 0.3*x1 + v1]
h = [x1]
Q = [[1, 0], [0, 1]]
)";

}  // namespace

std::string_view paper_example_config() { return kPaperExample; }

SystemFamily builtin_paper_example() {
  return parse_family_config(kPaperExample, "builtin:paper-example");
}

SystemFamily builtin_family(std::string_view tag) {
  if (tag == "paper-example") return builtin_paper_example();
  throw ConfigError("unknown builtin family '" + std::string(tag) + "'");
}

}  // namespace swioss
