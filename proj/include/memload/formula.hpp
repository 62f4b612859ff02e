#ifndef MEMLOAD_FORMULA_HPP
#define MEMLOAD_FORMULA_HPP

#include <string>
#include <vector>

#include "memload/errors.hpp"

namespace memload {

// Parsed model formula: response ~ term + ... + (1|group). Exactly one
// intercept-only random clause; the fixed intercept is implicit and always
// present.
struct ModelSpec {
  std::string response;
  std::vector<std::string> fixed_terms;  // duplicate-free, in formula order
  std::string group;

  bool operator==(const ModelSpec&) const = default;
};

// Grammar: ident '~' ident ('+' ident)* '+' '(' '1' '|' ident ')'
// Whitespace-insensitive. Identifiers may contain internal spaces, which
// normalize to underscores ("Memory Load" -> "Memory_Load"); matching against
// column names is case-sensitive. Throws FormulaError with the character
// offset of the problem.
ModelSpec parse_formula(const std::string& text);

// Canonical rendering; parse_formula(render_formula(s)) == s.
std::string render_formula(const ModelSpec& spec);

}  // namespace memload

#endif  // MEMLOAD_FORMULA_HPP
