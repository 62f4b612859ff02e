#ifndef MEMLOAD_CSV_HPP
#define MEMLOAD_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace memload {

// Minimal RFC 4180 CSV support: fields containing comma, quote, CR or LF are
// quoted, embedded quotes doubled. Output always uses LF line endings.

std::string csv_escape(std::string_view field);

// Splits one logical CSV line into fields. The line must not contain an
// unterminated quoted field (multi-line fields are read by csv_read_line).
std::vector<std::string> csv_split(std::string_view line, std::size_t line_no);

// Reads the next logical CSV record from `text` starting at `pos`, advancing
// `pos` and `line_no`. Returns false at end of input. Handles quoted newlines.
bool csv_read_record(std::string_view text, std::size_t& pos, std::size_t& line_no,
                     std::vector<std::string>& fields);

}  // namespace memload

#endif  // MEMLOAD_CSV_HPP
