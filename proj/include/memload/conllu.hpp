#ifndef MEMLOAD_CONLLU_HPP
#define MEMLOAD_CONLLU_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memload/errors.hpp"

namespace memload {

// Sentinel used when a treebank leaves UPOS or DEPREL underspecified ("_").
inline constexpr const char* kUnknownLabel = "unknown";

// One word row of a CoNLL-U sentence. Range rows (multiword tokens) and
// decimal-id rows (empty nodes) never become TokenRows.
struct TokenRow {
  int id = 0;    // 1-based linear position
  std::string form;
  std::string lemma;
  std::string upos;    // never "_"; normalized to kUnknownLabel
  std::string xpos;    // "_" kept verbatim, may be empty-equivalent
  std::string feats;
  int head = 0;  // 0 = attached to the (virtual) root
  std::string deprel;  // never "_"; normalized to kUnknownLabel
  std::string deps;
  std::string misc;

  bool operator==(const TokenRow&) const = default;
};

struct SentenceRecord {
  std::string language;
  std::string sent_id;  // from metadata, or synthesized "<doc>:<index>"
  // Comment lines in file order, split at the first '=' ("# key = value").
  // Comments without '=' are stored with an empty value under the full text.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<TokenRow> tokens;                 // word rows only, ids 1..n
  std::vector<std::pair<int, int>> mwt_spans;   // from range-id rows like "3-4"
  int empty_nodes = 0;                          // count of decimal-id rows

  bool operator==(const SentenceRecord&) const = default;

  const std::string* find_metadata(std::string_view key) const;
};

enum class ParsePolicy {
  kLenient,  // skip malformed sentences, record an issue
  kStrict,   // throw ParseError on the first malformed sentence
};

// One skipped sentence (or block-level problem) under the lenient policy.
struct ParseIssue {
  std::size_t line = 0;  // 1-based line of the offending row
  std::string sent_id;   // best-effort id of the affected sentence
  std::string message;
};

// A blank-line-delimited block of a CoNLL-U document, before deep parsing.
// Sampling operates on these so unselected sentences are never fully parsed.
struct SentenceBlock {
  std::string_view text;   // the block's lines, without the trailing blank line
  std::size_t first_line = 0;  // 1-based line number of the block's first line
  bool has_rows = false;       // at least one non-comment line
};

// Splits a document into candidate sentence blocks. Blocks made of comments
// only are returned with has_rows=false and are not sentences.
std::vector<SentenceBlock> split_blocks(std::string_view text);

// Parses one block into a record. Returns std::nullopt (lenient) or throws
// ParseError (strict) when the block is malformed; `ordinal` is the 1-based
// sentence index used to synthesize missing sent_ids as "<doc>:<ordinal>".
std::optional<SentenceRecord> parse_block(const SentenceBlock& block,
                                          std::string_view language,
                                          std::string_view doc_name, int ordinal,
                                          ParsePolicy policy,
                                          std::vector<ParseIssue>* issues = nullptr);

// Parses a whole document (UTF-8 text, LF or CRLF, blank-line separated).
std::vector<SentenceRecord> parse_document(std::string_view text,
                                           std::string_view language,
                                           ParsePolicy policy = ParsePolicy::kLenient,
                                           std::vector<ParseIssue>* issues = nullptr,
                                           std::string_view doc_name = "doc");

std::vector<SentenceRecord> parse_file(const std::filesystem::path& path,
                                       std::string_view language,
                                       ParsePolicy policy = ParsePolicy::kLenient,
                                       std::vector<ParseIssue>* issues = nullptr);

// metadata["text"] if present, else space-joined forms ("" for empty records).
std::string sentence_text(const SentenceRecord& record);

// Re-emits metadata and word rows as CoNLL-U (round-trip counterpart of
// parse_document for records without mwt/empty rows; used by tests).
std::string write_record(const SentenceRecord& record);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace memload

#endif  // MEMLOAD_CONLLU_HPP
