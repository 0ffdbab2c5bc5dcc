#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace swioss {

enum class StabilityClass { Stable, Unstable };

// Admissible switches E(P): ordered pairs (p, q) with p != q.
class SwitchGraph {
 public:
  SwitchGraph() = default;
  explicit SwitchGraph(std::set<std::pair<int, int>> edges);

  bool allows(int from, int to) const { return edges_.count({from, to}) != 0; }
  std::vector<int> successors(int from) const;
  const std::set<std::pair<int, int>>& edges() const { return edges_; }

 private:
  std::set<std::pair<int, int>> edges_;
};

// Everything a switching signal is validated against: the index set with its
// stable/unstable labels, the switch graph and the admissible dwell window.
struct SwitchingRules {
  std::map<int, StabilityClass> classes;
  SwitchGraph graph;
  double delta = 0.0;
  double Delta = 0.0;

  bool contains(int index) const { return classes.count(index) != 0; }
  bool is_stable(int index) const;
  bool is_unstable(int index) const { return !is_stable(index); }
  std::vector<int> indices() const;
};

}  // namespace swioss
