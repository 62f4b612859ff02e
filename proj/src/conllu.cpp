#include "memload/conllu.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace memload {
namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

std::string normalize_label(std::string_view raw) {
  if (raw == "_") return kUnknownLabel;
  return std::string(raw);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ParseError(line, msg);
}

}  // namespace

const std::string* SentenceRecord::find_metadata(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<SentenceBlock> split_blocks(std::string_view text) {
  // Strip a UTF-8 BOM so the first comment line is recognized.
  if (text.size() >= 3 && text.substr(0, 3) == "\xef\xbb\xbf") text.remove_prefix(3);

  std::vector<SentenceBlock> blocks;
  std::size_t pos = 0;
  std::size_t line_no = 1;
  std::size_t block_start_pos = std::string_view::npos;
  std::size_t block_start_line = 0;
  std::size_t block_end_pos = 0;
  bool has_rows = false;

  auto flush = [&](void) {
    if (block_start_pos == std::string_view::npos) return;
    blocks.push_back(SentenceBlock{
        text.substr(block_start_pos, block_end_pos - block_start_pos),
        block_start_line, has_rows});
    block_start_pos = std::string_view::npos;
    has_rows = false;
  };

  while (pos <= text.size()) {
    if (pos == text.size()) {
      flush();
      break;
    }
    std::size_t eol = text.find('\n', pos);
    std::size_t next = (eol == std::string_view::npos) ? text.size() : eol + 1;
    std::string_view raw = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    std::string_view line = strip_cr(raw);

    if (is_blank(line)) {
      flush();
    } else {
      if (block_start_pos == std::string_view::npos) {
        block_start_pos = pos;
        block_start_line = line_no;
      }
      block_end_pos = pos + line.size();
      if (line.front() != '#') has_rows = true;
    }
    pos = next;
    ++line_no;
  }
  return blocks;
}

std::optional<SentenceRecord> parse_block(const SentenceBlock& block,
                                          std::string_view language,
                                          std::string_view doc_name, int ordinal,
                                          ParsePolicy policy,
                                          std::vector<ParseIssue>* issues) {
  SentenceRecord rec;
  rec.language = std::string(language);

  auto report = [&](std::size_t line, const std::string& msg) -> std::optional<SentenceRecord> {
    if (policy == ParsePolicy::kStrict) fail(line, msg);
    if (issues) {
      std::string id = rec.sent_id;
      if (id.empty()) {
        if (const std::string* s = rec.find_metadata("sent_id")) id = *s;
      }
      issues->push_back(ParseIssue{line, id, msg});
    }
    return std::nullopt;
  };

  std::size_t line_no = block.first_line;
  std::string_view text = block.text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    std::string_view line = strip_cr(raw);
    const std::size_t this_line = line_no++;
    if (is_blank(line)) continue;

    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) {
        rec.metadata.emplace_back(std::string(body), std::string());
      } else {
        rec.metadata.emplace_back(std::string(trim(body.substr(0, eq))),
                                  std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }

    auto cols = split_tabs(line);
    if (cols.size() != 10)
      return report(this_line, "expected 10 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    for (std::size_t c = 0; c < 10; ++c) {
      if (cols[c].empty())
        return report(this_line, "empty column " + std::to_string(c + 1));
    }

    std::string_view id_col = cols[0];
    if (std::size_t dash = id_col.find('-'); dash != std::string_view::npos) {
      // Multiword-token range row, e.g. "3-4  don't ...": recorded, not a token.
      int a = 0, b = 0;
      if (!parse_int(id_col.substr(0, dash), a) || !parse_int(id_col.substr(dash + 1), b) ||
          a < 1 || b < a)
        return report(this_line, "malformed token range id '" + std::string(id_col) + "'");
      rec.mwt_spans.emplace_back(a, b);
      continue;
    }
    if (id_col.find('.') != std::string_view::npos) {
      // Empty node (enhanced dependencies), e.g. "5.1": counted, never a token.
      ++rec.empty_nodes;
      continue;
    }

    TokenRow tok;
    if (!parse_int(id_col, tok.id) || tok.id < 1)
      return report(this_line, "non-integer or non-positive id '" + std::string(id_col) + "'");
    if (!parse_int(cols[6], tok.head) || tok.head < 0)
      return report(this_line, "non-integer head '" + std::string(cols[6]) + "'");
    if (tok.head == tok.id)
      return report(this_line, "token " + std::to_string(tok.id) + " is its own head");

    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = normalize_label(cols[3]);
    tok.xpos = std::string(cols[4]);
    tok.feats = std::string(cols[5]);
    tok.deprel = normalize_label(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = std::string(cols[9]);
    rec.tokens.push_back(std::move(tok));
  }

  // Word ids must be exactly 1..n and heads must stay in range.
  const int n = static_cast<int>(rec.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (rec.tokens[i].id != i + 1)
      return report(block.first_line, "token ids not contiguous: expected " +
                                          std::to_string(i + 1) + ", got " +
                                          std::to_string(rec.tokens[i].id));
    if (rec.tokens[i].head > n)
      return report(block.first_line, "head " + std::to_string(rec.tokens[i].head) +
                                          " out of range for sentence of " +
                                          std::to_string(n) + " tokens");
  }

  if (const std::string* id = rec.find_metadata("sent_id"); id && !id->empty()) {
    rec.sent_id = *id;
  } else {
    rec.sent_id = std::string(doc_name) + ":" + std::to_string(ordinal);
  }
  return rec;
}

std::vector<SentenceRecord> parse_document(std::string_view text, std::string_view language,
                                           ParsePolicy policy, std::vector<ParseIssue>* issues,
                                           std::string_view doc_name) {
  std::vector<SentenceRecord> records;
  int ordinal = 0;
  for (const SentenceBlock& block : split_blocks(text)) {
    if (!block.has_rows) continue;  // comments-only block, not a sentence
    ++ordinal;
    auto rec = parse_block(block, language, doc_name, ordinal, policy, issues);
    if (rec) records.push_back(std::move(*rec));
  }
  return records;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<SentenceRecord> parse_file(const std::filesystem::path& path,
                                       std::string_view language, ParsePolicy policy,
                                       std::vector<ParseIssue>* issues) {
  const std::string text = read_text_file(path);
  return parse_document(text, language, policy, issues, path.stem().string());
}

std::string sentence_text(const SentenceRecord& record) {
  if (const std::string* t = record.find_metadata("text")) return *t;
  std::string out;
  for (std::size_t i = 0; i < record.tokens.size(); ++i) {
    if (i) out += ' ';
    out += record.tokens[i].form;
  }
  return out;
}

std::string write_record(const SentenceRecord& record) {
  std::string out;
  for (const auto& [k, v] : record.metadata) {
    out += "# ";
    out += k;
    if (!v.empty() || k == "text") {
      out += " = ";
      out += v;
    }
    out += '\n';
  }
  for (const TokenRow& t : record.tokens) {
    out += std::to_string(t.id);
    out += '\t';
    out += t.form;
    out += '\t';
    out += t.lemma;
    out += '\t';
    out += t.upos;
    out += '\t';
    out += t.xpos;
    out += '\t';
    out += t.feats;
    out += '\t';
    out += std::to_string(t.head);
    out += '\t';
    out += t.deprel;
    out += '\t';
    out += t.deps;
    out += '\t';
    out += t.misc;
    out += '\n';
  }
  out += '\n';
  return out;
}

}  // namespace memload
