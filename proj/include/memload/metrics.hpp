#ifndef MEMLOAD_METRICS_HPP
#define MEMLOAD_METRICS_HPP

#include <set>
#include <string>

#include "memload/depgraph.hpp"

namespace memload {

enum class IntervenerMode {
  kHeadsOnly,  // count intervening tokens that govern at least one dependent
  kAllNodes,   // count every strictly-between token (= |h-d|-1 per arc)
};

struct MetricConfig {
  // Relation labels treated as nominal dependents. Includes both UD labels and
  // the older parser-style dobj/pobj so one config covers either inventory.
  std::set<std::string> nominal_deprels = {"nsubj", "obj", "iobj", "obl", "dobj", "pobj"};
  // POS tags whose bearers count as clausal heads.
  std::set<std::string> clausal_upos = {"VERB", "AUX"};
  IntervenerMode intervener_mode = IntervenerMode::kHeadsOnly;

  bool operator==(const MetricConfig&) const = default;

  // Stable digest of the configuration, recorded in dataset provenance.
  std::string digest() const;
};

// One analysis-table row: the response and the three predictors.
struct FeatureRow {
  std::string language;
  std::string sent_id;
  long long memory_load = 0;
  long long dependency_length = 0;
  long long intervener_complexity = 0;
  long long sentence_length = 0;

  bool operator==(const FeatureRow&) const = default;
};

// Sum over arcs (h, d) of |h - d|; root attachments contribute nothing.
long long dependency_length(const DepGraph& graph);

// Sum over arcs of the number of tokens strictly between head and dependent
// that are themselves heads (kHeadsOnly) or of all strictly-between tokens
// (kAllNodes).
long long intervener_complexity(const DepGraph& graph, const MetricConfig& cfg);

// Excess repetitions across the deprel histogram plus the upos histogram:
// sum over labels of max(0, count - 1), computed over all n tokens.
long long feature_interference(const DepGraph& graph);

// Nominal dependents attached to a head that is neither the root token nor
// clausal by UPOS.
long long feature_misbinding(const DepGraph& graph, const MetricConfig& cfg);

// feature_interference + feature_misbinding.
long long memory_load(const DepGraph& graph, const MetricConfig& cfg);

// Token count n (word rows only; range rows never count).
long long sentence_length(const DepGraph& graph);

FeatureRow featurize(const DepGraph& graph, const std::string& language,
                     const std::string& sent_id, const MetricConfig& cfg);
FeatureRow featurize(const SentenceRecord& record, const MetricConfig& cfg);

}  // namespace memload

#endif  // MEMLOAD_METRICS_HPP
