#include "memload/csv.hpp"

#include "memload/errors.hpp"

namespace memload {

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line, std::size_t line_no) {
  std::size_t pos = 0;
  std::size_t ln = line_no;
  std::vector<std::string> fields;
  if (!csv_read_record(line, pos, ln, fields) || pos != line.size())
    throw DatasetError("line " + std::to_string(line_no) + ": malformed CSV record");
  return fields;
}

bool csv_read_record(std::string_view text, std::size_t& pos, std::size_t& line_no,
                     std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;

  std::string cur;
  bool in_quotes = false;
  const std::size_t start_line = line_no;
  while (pos < text.size()) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur += '"';
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        if (c == '\n') ++line_no;
        cur += c;
        ++pos;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cur.empty())
          throw DatasetError("line " + std::to_string(line_no) +
                             ": stray quote inside unquoted field");
        in_quotes = true;
        ++pos;
        break;
      case ',':
        fields.push_back(std::move(cur));
        cur.clear();
        ++pos;
        break;
      case '\r':
        ++pos;
        break;
      case '\n':
        fields.push_back(std::move(cur));
        ++pos;
        ++line_no;
        return true;
      default:
        cur += c;
        ++pos;
        break;
    }
  }
  if (in_quotes)
    throw DatasetError("line " + std::to_string(start_line) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace memload
