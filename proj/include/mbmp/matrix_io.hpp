#pragma once

#include "mbmp/numlin.hpp"

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mbmp::io {

// Text format: a header line "m n", then m lines of n whitespace-separated
// complex entries written re{sign}imj, e.g. 0.5-0.25j. Pure reals ("2.5") are
// accepted on input.

std::complex<double> parse_complex(std::string_view token);
std::string format_complex(std::complex<double> z);

ComplexMatrix read_matrix(std::istream& in);
ComplexMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const ComplexMatrix& M);
void write_matrix(const std::filesystem::path& path, const ComplexMatrix& M);

}  // namespace mbmp::io
