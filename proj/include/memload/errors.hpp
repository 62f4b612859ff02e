#ifndef MEMLOAD_ERRORS_HPP
#define MEMLOAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace memload {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed CoNLL-U input. Carries the 1-based line number of the offending row.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Structurally broken dependency graph (no root, head out of range, cycle).
class GraphError : public Error {
 public:
  using Error::Error;
};

// Formula syntax error. Carries the 0-based character offset into the formula string.
class FormulaError : public Error {
 public:
  FormulaError(std::size_t pos, const std::string& msg)
      : Error("formula position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

// Corpus/dataset assembly failures (empty language, duplicate rows, bad CSV).
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Model construction or fitting failures (missing column, rank deficiency,
// optimizer non-convergence).
class FitError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate in a numerical routine. Carries the variance ratio
// at which the failure occurred when applicable.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg, double theta = -1.0)
      : Error(msg), theta_(theta) {}
  double theta() const { return theta_; }

 private:
  double theta_;
};

// Filesystem / IO failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace memload

#endif  // MEMLOAD_ERRORS_HPP
