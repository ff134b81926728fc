#include "nystrom/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nystrom/errors.hpp"

namespace nystrom {

namespace {

using Kind = InputDataError::Kind;

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool blank(std::string_view line) { return split_ws(line).empty(); }

}  // namespace

SymMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputDataError(Kind::malformed_header, 1, "missing dimension header");
  const auto header = split_ws(line);
  long long n = 0;
  if (header.size() != 1) throw InputDataError(Kind::malformed_header, 1, "header must be a single integer n");
  {
    const auto tok = header[0];
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || n < 1) {
      throw InputDataError(Kind::malformed_header, 1, "header must be a positive integer, got '" + std::string(tok) + "'");
    }
  }

  Matrix m(n, n);
  for (long long i = 0; i < n; ++i) {
    const std::size_t lineno = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) {
      throw InputDataError(Kind::wrong_count, lineno,
                           "expected " + std::to_string(n) + " rows, found " + std::to_string(i));
    }
    const auto tokens = split_ws(line);
    if (static_cast<long long>(tokens.size()) != n) {
      throw InputDataError(Kind::wrong_count, lineno,
                           "expected " + std::to_string(n) + " entries, found " + std::to_string(tokens.size()));
    }
    for (long long j = 0; j < n; ++j) {
      const auto tok = tokens[static_cast<std::size_t>(j)];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec == std::errc::result_out_of_range) {
        throw InputDataError(Kind::non_finite, lineno, "value '" + std::string(tok) + "' overflows a double");
      }
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw InputDataError(Kind::bad_number, lineno, "cannot parse '" + std::string(tok) + "' as a real number");
      }
      if (!std::isfinite(value)) {
        throw InputDataError(Kind::non_finite, lineno, "non-finite value '" + std::string(tok) + "'");
      }
      m(i, j) = value;
    }
  }
  std::size_t lineno = static_cast<std::size_t>(n) + 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) throw InputDataError(Kind::wrong_count, lineno, "unexpected data after " + std::to_string(n) + " rows");
  }

  try {
    return SymMatrix(m);
  } catch (const std::invalid_argument& e) {
    throw InputDataError(Kind::asymmetric, 0, e.what());
  }
}

SymMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputDataError(Kind::io, 0, "cannot open matrix file '" + path.string() + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const SymMatrix& a) {
  out << a.n() << '\n';
  char buf[40];
  for (Index i = 0; i < a.n(); ++i) {
    for (Index j = 0; j < a.n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void save_matrix(const std::filesystem::path& path, const SymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_matrix(out, a);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace nystrom
