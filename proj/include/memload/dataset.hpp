#ifndef MEMLOAD_DATASET_HPP
#define MEMLOAD_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "memload/conllu.hpp"
#include "memload/metrics.hpp"

namespace memload {

struct CorpusManifest {
  // language code -> conllu files, resolved and sorted; codes unique.
  std::vector<std::pair<std::string, std::vector<std::filesystem::path>>> entries;
  std::size_t per_language_target = 500;
  std::uint64_t seed = 0;
};

// Loads a manifest JSON file: {"languages": {"code": ["glob", ...]}}.
// Globs are resolved relative to the manifest's directory; '*' and '?' are
// supported in the filename component only. A language whose patterns match
// no files is an error.
CorpusManifest load_manifest(const std::filesystem::path& path,
                             std::size_t per_language_target, std::uint64_t seed);

struct LanguageProvenance {
  std::size_t available = 0;  // candidate sentence blocks found
  std::size_t sampled = 0;    // blocks selected
  std::size_t skipped = 0;    // selected blocks dropped (parse/graph failures)
  bool shortfall = false;     // fewer blocks than the target
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::map<std::string, LanguageProvenance> per_language;  // keyed by code
  std::vector<std::string> warnings;
};

struct Dataset {
  std::vector<FeatureRow> rows;
  Provenance provenance;
};

// k records chosen uniformly without replacement with the pinned generator,
// returned in corpus order. Fewer than k records returns all of them (the
// caller records the shortfall). Empty input is an error; `language` only
// decorates the message.
std::vector<SentenceRecord> sample_language(const std::vector<SentenceRecord>& records,
                                            std::size_t k, std::uint64_t seed,
                                            const std::string& language = "");

// Full pipeline: per language (sorted by code) split files into sentence
// blocks, sample blocks, parse and featurize only the selected ones, then
// apply one seeded global shuffle. Sentences failing to parse or validate are
// skipped with a warning (lenient) or abort the run (strict).
Dataset assemble(const CorpusManifest& manifest, const MetricConfig& cfg,
                 ParsePolicy policy = ParsePolicy::kLenient);

// Same traversal as assemble, but keeps (language, sent_id, raw text) instead
// of featurizing. Backs the extract subcommand.
struct ExtractedSentence {
  std::string language;
  std::string sent_id;
  std::string text;
};
std::vector<ExtractedSentence> extract_sentences(const CorpusManifest& manifest,
                                                 ParsePolicy policy,
                                                 Provenance* provenance = nullptr);

// CSV persistence. Header is fixed:
//   language,sent_id,memory_load,dependency_length,intervener_complexity,sentence_length
// UTF-8, LF endings; read(write(d)) preserves rows and order.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);
std::string to_csv(const Dataset& dataset);
Dataset read_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text);

}  // namespace memload

#endif  // MEMLOAD_DATASET_HPP
