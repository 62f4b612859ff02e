#include "memload/formula.hpp"

#include <algorithm>
#include <cctype>

namespace memload {
namespace {

struct Token {
  enum Kind { kIdent, kTilde, kPlus, kLParen, kRParen, kPipe, kEnd } kind;
  std::string text;
  std::size_t pos;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    switch (c) {
      case '~': out.push_back({Token::kTilde, "~", i++}); continue;
      case '+': out.push_back({Token::kPlus, "+", i++}); continue;
      case '(': out.push_back({Token::kLParen, "(", i++}); continue;
      case ')': out.push_back({Token::kRParen, ")", i++}); continue;
      case '|': out.push_back({Token::kPipe, "|", i++}); continue;
      default: break;
    }
    if (!is_word_char(c)) throw FormulaError(i, std::string("unexpected character '") + c + "'");
    // An identifier is one or more words; internal runs of spaces join as '_'
    // so column names like "Memory Load" read as "Memory_Load".
    const std::size_t start = i;
    std::string ident;
    for (;;) {
      while (i < s.size() && is_word_char(s[i])) ident += s[i++];
      std::size_t j = i;
      while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
      if (j < s.size() && is_word_char(s[j]) && j > i) {
        ident += '_';
        i = j;
        continue;
      }
      break;
    }
    out.push_back({Token::kIdent, ident, start});
  }
  out.push_back({Token::kEnd, "", s.size()});
  return out;
}

}  // namespace

ModelSpec parse_formula(const std::string& text) {
  const std::vector<Token> toks = lex(text);
  std::size_t i = 0;
  auto peek = [&]() -> const Token& { return toks[i]; };
  auto expect = [&](Token::Kind k, const char* what) -> const Token& {
    if (toks[i].kind != k)
      throw FormulaError(toks[i].pos, std::string("expected ") + what);
    return toks[i++];
  };

  ModelSpec spec;
  spec.response = expect(Token::kIdent, "response column name").text;
  expect(Token::kTilde, "'~'");

  bool have_group = false;
  for (;;) {
    if (peek().kind == Token::kLParen) {
      const std::size_t clause_pos = peek().pos;
      ++i;
      const Token& one = expect(Token::kIdent, "'1' (intercept-only random clause)");
      if (one.text != "1")
        throw FormulaError(one.pos, "only intercept-only random clauses '(1|group)' are supported");
      expect(Token::kPipe, "'|'");
      spec.group = expect(Token::kIdent, "grouping column name").text;
      expect(Token::kRParen, "')'");
      if (have_group)
        throw FormulaError(clause_pos, "more than one random-effect clause");
      have_group = true;
    } else {
      const Token& term = expect(Token::kIdent, "fixed-term column name");
      if (have_group)
        throw FormulaError(term.pos, "the random-intercept clause must be the last term");
      if (term.text == spec.response)
        throw FormulaError(term.pos, "response '" + term.text + "' cannot be a fixed term");
      if (std::find(spec.fixed_terms.begin(), spec.fixed_terms.end(), term.text) !=
          spec.fixed_terms.end())
        throw FormulaError(term.pos, "duplicate fixed term '" + term.text + "'");
      spec.fixed_terms.push_back(term.text);
    }
    if (peek().kind == Token::kPlus) {
      ++i;
      continue;
    }
    break;
  }
  expect(Token::kEnd, "end of formula");

  if (!have_group)
    throw FormulaError(text.size(), "random-intercept clause '(1|group)' required");
  if (spec.fixed_terms.empty())
    throw FormulaError(text.size(), "at least one fixed term required");
  if (std::find(spec.fixed_terms.begin(), spec.fixed_terms.end(), spec.group) !=
      spec.fixed_terms.end())
    throw FormulaError(text.size(), "grouping factor '" + spec.group + "' cannot be a fixed term");
  if (spec.group == spec.response)
    throw FormulaError(text.size(), "grouping factor '" + spec.group + "' cannot be the response");

  return spec;
}

std::string render_formula(const ModelSpec& spec) {
  std::string out = spec.response + " ~ ";
  for (const std::string& t : spec.fixed_terms) out += t + " + ";
  out += "(1|" + spec.group + ")";
  return out;
}

}  // namespace memload
