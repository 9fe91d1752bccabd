#include "mbmp/matrix_io.hpp"

#include "mbmp/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mbmp::io {

namespace {

double parse_real(std::string_view text, std::string_view token) {
  const std::string buf(text);
  if (buf.empty()) throw Error(ErrorCode::ParseError, "bad complex entry '" + std::string(token) + "'");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, "bad complex entry '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

std::complex<double> parse_complex(std::string_view token) {
  if (token.empty()) throw Error(ErrorCode::ParseError, "empty complex entry");
  const char last = token.back();
  if (last != 'j' && last != 'J') return {parse_real(token, token), 0.0};

  const std::string_view body = token.substr(0, token.size() - 1);
  // The imaginary part starts at the last sign that is not leading and not an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_real(body, token)};
  return {parse_real(body.substr(0, split), token), parse_real(body.substr(split), token)};
}

std::string format_complex(std::complex<double> z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

ComplexMatrix read_matrix(std::istream& in) {
  long long m = 0, n = 0;
  std::string header;
  while (std::getline(in, header)) {
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream hs(header);
  if (!(hs >> m >> n) || m < 1 || n < 1) throw Error(ErrorCode::ParseError, "bad matrix header '" + header + "'");

  ComplexMatrix M(m, n);
  std::string token;
  for (long long i = 0; i < m; ++i) {
    for (long long j = 0; j < n; ++j) {
      if (!(in >> token)) throw Error(ErrorCode::ParseError, "matrix truncated at row " + std::to_string(i));
      M(i, j) = parse_complex(token);
    }
  }
  if (in >> token) throw Error(ErrorCode::ParseError, "trailing data after " + std::to_string(m) + "x" + std::to_string(n) + " matrix");
  return M;
}

ComplexMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const ComplexMatrix& M) {
  out << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << format_complex(M(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const ComplexMatrix& M) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  write_matrix(out, M);
}

}  // namespace mbmp::io
