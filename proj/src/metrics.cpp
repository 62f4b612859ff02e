#include "memload/metrics.hpp"

#include <cstdlib>
#include <map>

#include "memload/rng.hpp"

namespace memload {

std::string MetricConfig::digest() const {
  std::string canon = "nominal=";
  for (const auto& d : nominal_deprels) canon += d + ",";
  canon += ";clausal=";
  for (const auto& u : clausal_upos) canon += u + ",";
  canon += ";mode=";
  canon += (intervener_mode == IntervenerMode::kHeadsOnly) ? "heads_only" : "all_nodes";
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

long long dependency_length(const DepGraph& graph) {
  long long total = 0;
  for (const auto& [h, d] : graph.arcs) total += std::abs(h - d);
  return total;
}

long long intervener_complexity(const DepGraph& graph, const MetricConfig& cfg) {
  long long total = 0;
  if (cfg.intervener_mode == IntervenerMode::kAllNodes) {
    for (const auto& [h, d] : graph.arcs) total += std::abs(h - d) - 1;
    return total;
  }
  std::vector<char> is_head(graph.n + 1, 0);
  for (const auto& [h, d] : graph.arcs) is_head[h] = 1;
  for (const auto& [h, d] : graph.arcs) {
    const int lo = std::min(h, d);
    const int hi = std::max(h, d);
    for (int t = lo + 1; t < hi; ++t) total += is_head[t];
  }
  return total;
}

long long feature_interference(const DepGraph& graph) {
  std::map<std::string, int> deprel_counts;
  std::map<std::string, int> upos_counts;
  for (int i = 1; i <= graph.n; ++i) {
    ++deprel_counts[graph.deprel[i]];
    ++upos_counts[graph.upos[i]];
  }
  long long total = 0;
  for (const auto& [label, c] : deprel_counts) total += c - 1;
  for (const auto& [tag, c] : upos_counts) total += c - 1;
  return total;
}

long long feature_misbinding(const DepGraph& graph, const MetricConfig& cfg) {
  long long count = 0;
  for (int d = 1; d <= graph.n; ++d) {
    if (!cfg.nominal_deprels.count(graph.deprel[d])) continue;
    const int h = graph.head[d];
    if (h == 0) continue;  // attached to the virtual root itself
    if (h == graph.root) continue;
    if (cfg.clausal_upos.count(graph.upos[h])) continue;
    ++count;
  }
  return count;
}

long long memory_load(const DepGraph& graph, const MetricConfig& cfg) {
  return feature_interference(graph) + feature_misbinding(graph, cfg);
}

long long sentence_length(const DepGraph& graph) { return graph.n; }

FeatureRow featurize(const DepGraph& graph, const std::string& language,
                     const std::string& sent_id, const MetricConfig& cfg) {
  FeatureRow row;
  row.language = language;
  row.sent_id = sent_id;
  row.memory_load = memory_load(graph, cfg);
  row.dependency_length = dependency_length(graph);
  row.intervener_complexity = intervener_complexity(graph, cfg);
  row.sentence_length = sentence_length(graph);
  return row;
}

FeatureRow featurize(const SentenceRecord& record, const MetricConfig& cfg) {
  return featurize(build_graph(record), record.language, record.sent_id, cfg);
}

}  // namespace memload
