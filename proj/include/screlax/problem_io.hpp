#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "screlax/core.hpp"

namespace screlax {

/// Malformed problem text. `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Problem data as read from text, before any validation.
struct ProblemData {
  Matrix A;
  Vector y;
  Vector lambda;
  double epsilon = 0.0;
};

// Text layout:
//   m n
//   m lines of n entries (A, row-major)
//   one line of m entries (y)
//   one line of n entries (lambda)
//   one line with epsilon
// Blank lines are skipped. Numbers use '.' as decimal separator whatever
// the global locale is.
ProblemData parse_problem(std::istream& in);
ProblemData read_problem_file(const std::string& path);

/// Writes `p` in the layout accepted by parse_problem, with 17 significant digits.
void write_problem(std::ostream& out, const Problem& p);

}  // namespace screlax
