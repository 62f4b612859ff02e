#ifndef MEMLOAD_DEPGRAPH_HPP
#define MEMLOAD_DEPGRAPH_HPP

#include <string>
#include <utility>
#include <vector>

#include "memload/conllu.hpp"
#include "memload/errors.hpp"

namespace memload {

// Directed dependency tree over linear token positions 1..n. Root attachment
// (head 0) is kept out of `arcs`: the virtual root has no linear position, so
// distance- and span-based measures are defined over word pairs only.
struct DepGraph {
  int n = 0;
  std::vector<std::string> upos;    // index 0 unused; 1..n
  std::vector<std::string> deprel;  // index 0 unused; 1..n
  std::vector<int> head;            // index 0 unused; 1..n, 0 = root attachment
  std::vector<std::pair<int, int>> arcs;  // (head_pos, dep_pos), head_pos != 0
  int root = 0;  // first token with head 0
};

// Populates a DepGraph from a parsed record. Throws GraphError when no token
// attaches to the root or a head index is out of range. Multi-root and cyclic
// inputs construct fine; validate() reports them.
DepGraph build_graph(const SentenceRecord& record);

struct ValidationReport {
  std::vector<int> roots;        // all positions with head 0
  std::vector<int> self_loops;   // head[i] == i
  std::vector<int> out_of_range; // head[i] < 0 or > n
  std::vector<int> cycle_nodes;  // nodes on some head-chain cycle
  bool no_root() const { return roots.empty(); }
  bool multi_root() const { return roots.size() > 1; }
  bool has_cycle() const { return !cycle_nodes.empty(); }
  // Findings that corrupt the metrics even under the lenient policy.
  bool hard_error() const {
    return no_root() || has_cycle() || !self_loops.empty() || !out_of_range.empty();
  }
  bool clean() const { return !hard_error() && !multi_root(); }
  std::string describe() const;
};

// Diagnoses multi-root, self-loops, out-of-range heads and cycles. In strict
// mode any finding (including multi-root) throws GraphError; otherwise the
// report is returned for the caller's policy to act on.
ValidationReport validate(const DepGraph& graph, bool strict = false);

// Positions governing at least one dependent: { h : (h, d) in arcs }.
// Returned sorted ascending.
std::vector<int> head_positions(const DepGraph& graph);

}  // namespace memload

#endif  // MEMLOAD_DEPGRAPH_HPP
