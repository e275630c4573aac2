#include "screlax/problem_io.hpp"

#include "screlax/format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace screlax {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

long parse_dimension(std::string_view field, std::size_t line) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value <= 0) {
    throw ParseError(line, "expected a positive integer dimension, got '" + std::string(field) + "'");
  }
  return value;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line split into fields; throws at end of input.
  std::vector<std::string_view> next(const char* what) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      auto fields = split_fields(buffer_);
      if (!fields.empty()) return fields;
    }
    throw ParseError(line_ + 1, std::string("unexpected end of input, expected ") + what);
  }

  bool has_more() {
    while (std::getline(in_, buffer_)) {
      ++line_;
      if (!split_fields(buffer_).empty()) return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

Vector read_row(LineReader& reader, Index expected, const char* what) {
  const auto fields = reader.next(what);
  if (static_cast<Index>(fields.size()) != expected) {
    throw ParseError(reader.line(), std::string(what) + ": expected " + std::to_string(expected) +
                                        " entries, found " + std::to_string(fields.size()));
  }
  Vector row(expected);
  for (Index i = 0; i < expected; ++i) row(i) = parse_real(fields[static_cast<std::size_t>(i)], reader.line());
  return row;
}

}  // namespace

ProblemData parse_problem(std::istream& in) {
  LineReader reader(in);
  const auto header = reader.next("header 'm n'");
  if (header.size() != 2) {
    throw ParseError(reader.line(), "header must contain exactly two integers 'm n'");
  }
  const Index m = parse_dimension(header[0], reader.line());
  const Index n = parse_dimension(header[1], reader.line());

  ProblemData data;
  data.A.resize(m, n);
  for (Index i = 0; i < m; ++i) data.A.row(i) = read_row(reader, n, "dictionary row").transpose();
  data.y = read_row(reader, m, "observation");
  data.lambda = read_row(reader, n, "lambda");
  data.epsilon = read_row(reader, 1, "epsilon")(0);
  if (reader.has_more()) throw ParseError(reader.line(), "trailing content after epsilon");
  return data;
}

ProblemData read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_problem(in);
}

void write_problem(std::ostream& out, const Problem& p) {
  auto put = [&](double v) { out << format_real(v); };
  out << p.rows() << ' ' << p.cols() << '\n';
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      if (j) out << ' ';
      put(p.A()(i, j));
    }
    out << '\n';
  }
  for (Index i = 0; i < p.rows(); ++i) {
    if (i) out << ' ';
    put(p.y()(i));
  }
  out << '\n';
  for (Index j = 0; j < p.cols(); ++j) {
    if (j) out << ' ';
    put(p.lambda()(j));
  }
  out << '\n';
  put(p.epsilon());
  out << '\n';
}

}  // namespace screlax
