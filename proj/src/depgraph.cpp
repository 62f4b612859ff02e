#include "memload/depgraph.hpp"

#include <algorithm>

namespace memload {

DepGraph build_graph(const SentenceRecord& record) {
  const int n = static_cast<int>(record.tokens.size());
  DepGraph g;
  g.n = n;
  g.upos.assign(n + 1, {});
  g.deprel.assign(n + 1, {});
  g.head.assign(n + 1, 0);

  for (const TokenRow& t : record.tokens) {
    if (t.head < 0 || t.head > n)
      throw GraphError("sentence '" + record.sent_id + "': head " + std::to_string(t.head) +
                       " out of range (n=" + std::to_string(n) + ")");
    g.upos[t.id] = t.upos;
    g.deprel[t.id] = t.deprel;
    g.head[t.id] = t.head;
  }
  for (int i = 1; i <= n; ++i) {
    if (g.head[i] == 0) {
      if (g.root == 0) g.root = i;
    } else {
      g.arcs.emplace_back(g.head[i], i);
    }
  }
  if (g.root == 0)
    throw GraphError("sentence '" + record.sent_id + "': no token attaches to the root");
  return g;
}

ValidationReport validate(const DepGraph& graph, bool strict) {
  ValidationReport rep;
  const int n = graph.n;
  for (int i = 1; i <= n; ++i) {
    const int h = graph.head[i];
    if (h == 0) rep.roots.push_back(i);
    if (h == i) rep.self_loops.push_back(i);
    if (h < 0 || h > n) rep.out_of_range.push_back(i);
  }

  // Follow head chains; 0 = unvisited, 1 = on current chain, 2 = settled.
  std::vector<int> state(n + 1, 0);
  std::vector<int> chain;
  for (int start = 1; start <= n; ++start) {
    if (state[start] != 0) continue;
    chain.clear();
    int cur = start;
    while (cur >= 1 && cur <= n && state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      cur = graph.head[cur];
    }
    if (cur >= 1 && cur <= n && state[cur] == 1) {
      // Closed a loop inside the current chain: everything from `cur` onward cycles.
      auto it = std::find(chain.begin(), chain.end(), cur);
      for (; it != chain.end(); ++it) rep.cycle_nodes.push_back(*it);
    }
    for (int v : chain) state[v] = 2;
  }
  std::sort(rep.cycle_nodes.begin(), rep.cycle_nodes.end());

  if (strict && !rep.clean()) throw GraphError(rep.describe());
  return rep;
}

std::string ValidationReport::describe() const {
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s;
  };
  std::string msg;
  if (no_root()) msg += "no root; ";
  if (multi_root()) msg += "multiple roots at {" + join(roots) + "}; ";
  if (!self_loops.empty()) msg += "self-loops at {" + join(self_loops) + "}; ";
  if (!out_of_range.empty()) msg += "heads out of range at {" + join(out_of_range) + "}; ";
  if (has_cycle()) msg += "cycle through {" + join(cycle_nodes) + "}; ";
  if (msg.empty()) return "clean";
  msg.resize(msg.size() - 2);
  return msg;
}

std::vector<int> head_positions(const DepGraph& graph) {
  std::vector<char> is_head(graph.n + 1, 0);
  for (const auto& [h, d] : graph.arcs) {
    if (h >= 1 && h <= graph.n) is_head[h] = 1;
  }
  std::vector<int> out;
  for (int i = 1; i <= graph.n; ++i) {
    if (is_head[i]) out.push_back(i);
  }
  return out;
}

}  // namespace memload
