#include "memload/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "json.hpp"
#include "memload/csv.hpp"
#include "memload/rng.hpp"

namespace memload {
namespace {

namespace fs = std::filesystem;

// '*' and '?' glob over a single path component.
bool glob_match(std::string_view pat, std::string_view str) {
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < str.size()) {
    if (p < pat.size() && (pat[p] == '?' || pat[p] == str[s])) {
      ++p;
      ++s;
    } else if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = s;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

std::vector<fs::path> resolve_pattern(const fs::path& base, const std::string& pattern) {
  const fs::path pat_path(pattern);
  const std::string filename = pat_path.filename().string();
  const bool has_wildcard = filename.find_first_of("*?") != std::string::npos;
  const fs::path dir_rel = pat_path.parent_path();
  if (dir_rel.string().find_first_of("*?") != std::string::npos)
    throw DatasetError("manifest pattern '" + pattern +
                       "': wildcards are only supported in the filename component");
  const fs::path dir = dir_rel.is_absolute() ? dir_rel : base / dir_rel;

  std::vector<fs::path> out;
  if (!has_wildcard) {
    const fs::path direct = pat_path.is_absolute() ? pat_path : base / pat_path;
    if (!fs::exists(direct))
      throw DatasetError("manifest file does not exist: " + direct.string());
    out.push_back(direct);
    return out;
  }
  if (!fs::is_directory(dir))
    throw DatasetError("manifest pattern '" + pattern + "': directory not found: " +
                       dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(filename, entry.path().filename().string()))
      out.push_back(entry.path());
  }
  return out;
}

struct SampledCorpus {
  std::vector<SentenceRecord> records;  // language-sorted, corpus order within language
  Provenance provenance;
};

// Shared traversal for assemble/extract: per language, split files into
// blocks, sample block indices, parse only the selected blocks.
SampledCorpus sample_corpus(const CorpusManifest& manifest, ParsePolicy policy) {
  SampledCorpus out;
  out.provenance.seed = manifest.seed;

  auto entries = manifest.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (const auto& [language, files] : entries) {
    struct BlockRef {
      std::size_t file_index;
      SentenceBlock block;
      int ordinal;  // 1-based sentence index within its file
    };
    std::vector<std::string> file_texts(files.size());
    std::vector<std::string> doc_names(files.size());
    std::vector<BlockRef> blocks;
    for (std::size_t f = 0; f < files.size(); ++f) {
      file_texts[f] = read_text_file(files[f]);
      doc_names[f] = files[f].stem().string();
      int ordinal = 0;
      for (const SentenceBlock& b : split_blocks(file_texts[f])) {
        if (!b.has_rows) continue;
        blocks.push_back(BlockRef{f, b, ++ordinal});
      }
    }
    if (blocks.empty())
      throw DatasetError("language '" + language + "': no sentences found");

    LanguageProvenance& prov = out.provenance.per_language[language];
    prov.available = blocks.size();

    Rng rng(stream_seed(manifest.seed, "lang:" + language));
    const auto idx = rng.sample_indices(blocks.size(), manifest.per_language_target);
    prov.sampled = idx.size();
    if (idx.size() < manifest.per_language_target) {
      prov.shortfall = true;
      out.provenance.warnings.push_back(
          "language '" + language + "': only " + std::to_string(blocks.size()) +
          " sentences available, target " + std::to_string(manifest.per_language_target));
    }

    std::set<std::string> seen_ids;
    std::vector<ParseIssue> issues;
    for (std::size_t bi : idx) {
      const BlockRef& ref = blocks[bi];
      issues.clear();
      std::optional<SentenceRecord> rec;
      try {
        rec = parse_block(ref.block, language, doc_names[ref.file_index], ref.ordinal,
                          policy, &issues);
      } catch (const ParseError& e) {
        throw DatasetError("language '" + language + "', file " +
                           files[ref.file_index].string() + ": " + e.what());
      }
      if (!rec) {
        ++prov.skipped;
        for (const ParseIssue& is : issues)
          out.provenance.warnings.push_back("language '" + language + "', file " +
                                            files[ref.file_index].string() + ", line " +
                                            std::to_string(is.line) + ": " + is.message);
        continue;
      }
      if (rec->tokens.empty()) {
        ++prov.skipped;
        out.provenance.warnings.push_back("language '" + language + "': sentence '" +
                                          rec->sent_id + "' has no word rows, skipped");
        continue;
      }
      // Disambiguate duplicate ids across files so (language, sent_id) stays unique.
      if (!seen_ids.insert(rec->sent_id).second) {
        int suffix = 2;
        std::string candidate;
        do {
          candidate = rec->sent_id + "~" + std::to_string(suffix++);
        } while (!seen_ids.insert(candidate).second);
        out.provenance.warnings.push_back("language '" + language + "': duplicate sent_id '" +
                                          rec->sent_id + "' renamed to '" + candidate + "'");
        rec->sent_id = candidate;
      }
      out.records.push_back(std::move(*rec));
    }
  }
  return out;
}

long long parse_count_field(const std::string& field, const char* name, std::size_t line) {
  long long v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || v < 0)
    throw DatasetError("line " + std::to_string(line) + ": field '" + name +
                       "' is not a non-negative integer: '" + field + "'");
  return v;
}

constexpr const char* kCsvHeader =
    "language,sent_id,memory_load,dependency_length,intervener_complexity,sentence_length";

}  // namespace

CorpusManifest load_manifest(const std::filesystem::path& path,
                             std::size_t per_language_target, std::uint64_t seed) {
  if (!fs::exists(path)) throw IoError("manifest not found: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("manifest " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("languages") || !doc["languages"].is_object())
    throw DatasetError("manifest " + path.string() +
                       ": expected an object with a \"languages\" map");

  CorpusManifest manifest;
  manifest.per_language_target = per_language_target;
  manifest.seed = seed;
  const fs::path base = path.parent_path();
  for (const auto& [code, patterns] : doc["languages"].items()) {
    if (!patterns.is_array())
      throw DatasetError("manifest language '" + code + "': expected an array of patterns");
    std::vector<fs::path> files;
    for (const auto& p : patterns) {
      if (!p.is_string())
        throw DatasetError("manifest language '" + code + "': patterns must be strings");
      auto matched = resolve_pattern(base, p.get<std::string>());
      files.insert(files.end(), matched.begin(), matched.end());
    }
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    if (files.empty())
      throw DatasetError("manifest language '" + code + "': no files matched");
    manifest.entries.emplace_back(code, std::move(files));
  }
  if (manifest.entries.empty()) throw DatasetError("manifest lists no languages");
  return manifest;
}

std::vector<SentenceRecord> sample_language(const std::vector<SentenceRecord>& records,
                                            std::size_t k, std::uint64_t seed,
                                            const std::string& language) {
  if (records.empty()) {
    const std::string name = language.empty() ? std::string("<unknown>") : language;
    throw DatasetError("language '" + name + "': no sentences to sample");
  }
  Rng rng(seed);
  const auto idx = rng.sample_indices(records.size(), k);
  std::vector<SentenceRecord> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

Dataset assemble(const CorpusManifest& manifest, const MetricConfig& cfg, ParsePolicy policy) {
  SampledCorpus corpus = sample_corpus(manifest, policy);
  Dataset ds;
  ds.provenance = std::move(corpus.provenance);
  ds.provenance.config_digest = cfg.digest();

  for (const SentenceRecord& rec : corpus.records) {
    DepGraph graph;
    try {
      graph = build_graph(rec);
    } catch (const GraphError& e) {
      if (policy == ParsePolicy::kStrict)
        throw DatasetError("language '" + rec.language + "', sentence '" + rec.sent_id +
                           "': " + e.what());
      ++ds.provenance.per_language[rec.language].skipped;
      ds.provenance.warnings.push_back("language '" + rec.language + "': sentence '" +
                                       rec.sent_id + "' skipped: " + e.what());
      continue;
    }
    const ValidationReport rep = validate(graph, false);
    const bool reject = rep.hard_error() || (policy == ParsePolicy::kStrict && !rep.clean());
    if (reject) {
      if (policy == ParsePolicy::kStrict)
        throw DatasetError("language '" + rec.language + "', sentence '" + rec.sent_id +
                           "': " + rep.describe());
      ++ds.provenance.per_language[rec.language].skipped;
      ds.provenance.warnings.push_back("language '" + rec.language + "': sentence '" +
                                       rec.sent_id + "' skipped: " + rep.describe());
      continue;
    }
    ds.rows.push_back(featurize(graph, rec.language, rec.sent_id, cfg));
  }

  Rng shuffle_rng(stream_seed(manifest.seed, "shuffle"));
  shuffle_rng.shuffle(ds.rows);
  return ds;
}

std::vector<ExtractedSentence> extract_sentences(const CorpusManifest& manifest,
                                                 ParsePolicy policy, Provenance* provenance) {
  SampledCorpus corpus = sample_corpus(manifest, policy);
  std::vector<ExtractedSentence> out;
  out.reserve(corpus.records.size());
  for (const SentenceRecord& rec : corpus.records)
    out.push_back(ExtractedSentence{rec.language, rec.sent_id, sentence_text(rec)});
  Rng shuffle_rng(stream_seed(manifest.seed, "shuffle"));
  shuffle_rng.shuffle(out);
  if (provenance) *provenance = std::move(corpus.provenance);
  return out;
}

std::string to_csv(const Dataset& dataset) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const FeatureRow& r : dataset.rows) {
    out += csv_escape(r.language);
    out += ',';
    out += csv_escape(r.sent_id);
    out += ',';
    out += std::to_string(r.memory_load);
    out += ',';
    out += std::to_string(r.dependency_length);
    out += ',';
    out += std::to_string(r.intervener_complexity);
    out += ',';
    out += std::to_string(r.sentence_length);
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << to_csv(dataset);
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset parse_csv(const std::string& text) {
  Dataset ds;
  std::size_t pos = 0;
  std::size_t line_no = 1;
  std::vector<std::string> fields;

  if (!csv_read_record(text, pos, line_no, fields))
    throw DatasetError("empty CSV: missing header");
  {
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) joined += ',';
      joined += fields[i];
    }
    if (joined != kCsvHeader)
      throw DatasetError("line 1: unexpected header '" + joined + "'");
  }

  while (true) {
    const std::size_t row_line = line_no;
    if (!csv_read_record(text, pos, line_no, fields)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != 6)
      throw DatasetError("line " + std::to_string(row_line) + ": expected 6 fields, got " +
                         std::to_string(fields.size()));
    FeatureRow r;
    r.language = fields[0];
    r.sent_id = fields[1];
    r.memory_load = parse_count_field(fields[2], "memory_load", row_line);
    r.dependency_length = parse_count_field(fields[3], "dependency_length", row_line);
    r.intervener_complexity = parse_count_field(fields[4], "intervener_complexity", row_line);
    r.sentence_length = parse_count_field(fields[5], "sentence_length", row_line);
    ds.rows.push_back(std::move(r));
  }
  return ds;
}

Dataset read_csv(const std::filesystem::path& path) {
  if (!fs::exists(path)) throw IoError("CSV not found: " + path.string());
  return parse_csv(read_text_file(path));
}

}  // namespace memload
