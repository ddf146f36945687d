#include "arbor/geom/skeleton.hpp"

#include <string>

#include "arbor/common/error.hpp"

namespace arbor {

std::vector<std::vector<std::uint32_t>> SkeletonGraph::adjacency() const {
  std::vector<std::vector<std::uint32_t>> adj(nodes.size());
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

void SkeletonGraph::validate() const {
  require(!nodes.empty(), "skeleton: no nodes");
  require(edges.size() + 1 == nodes.size(), "skeleton: |E| != |V| - 1");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require(nodes[i].radius > 0 && nodes[i].position.allFinite(),
            "skeleton: node " + std::to_string(i) + " has invalid radius or position");
  }
  for (const auto& [a, b] : edges) {
    require(a < nodes.size() && b < nodes.size() && a != b, "skeleton: bad edge");
  }
  require(support.empty() || support.size() == nodes.size(), "skeleton: support length mismatch");

  const auto adj = adjacency();
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (auto m : adj[n]) {
      if (!seen[m]) {
        seen[m] = 1;
        ++reached;
        stack.push_back(m);
      }
    }
  }
  require(reached == nodes.size(), "skeleton: graph is not connected");

  require(!trunk_path.empty(), "skeleton: empty trunk path");
  std::vector<char> on_path(nodes.size(), 0);
  for (std::size_t i = 0; i < trunk_path.size(); ++i) {
    const auto n = trunk_path[i];
    require(n < nodes.size() && !on_path[n], "skeleton: trunk path is not simple");
    on_path[n] = 1;
    if (i > 0) {
      const auto prev = trunk_path[i - 1];
      bool linked = false;
      for (auto m : adj[prev]) linked = linked || m == n;
      require(linked, "skeleton: trunk path step without an edge");
    }
  }
  for (auto r : branch_roots) {
    require(r < nodes.size() && on_path[r], "skeleton: branch root not on trunk path");
  }
}

std::vector<double> SkeletonGraph::trunk_arc_length() const {
  std::vector<double> s(trunk_path.size(), 0.0);
  for (std::size_t i = 1; i < trunk_path.size(); ++i) {
    s[i] = s[i - 1] + (nodes[trunk_path[i]].position - nodes[trunk_path[i - 1]].position).norm();
  }
  return s;
}

SkeletonGraph transform(const SkeletonGraph& skeleton, const Rigid& t) {
  SkeletonGraph out = skeleton;
  for (auto& n : out.nodes) n.position = t.apply(n.position);
  return out;
}

}  // namespace arbor
