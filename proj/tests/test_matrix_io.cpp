#include "mbmp/error.hpp"
#include "mbmp/matrix_io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mbmp;

TEST(MatrixIo, ParsesComplexTokens) {
  EXPECT_EQ(io::parse_complex("0.5-0.25j"), std::complex<double>(0.5, -0.25));
  EXPECT_EQ(io::parse_complex("-1e-3+2E+2j"), std::complex<double>(-1e-3, 200.0));
  EXPECT_EQ(io::parse_complex("2.5"), std::complex<double>(2.5, 0.0));
  EXPECT_EQ(io::parse_complex("-3"), std::complex<double>(-3.0, 0.0));
  EXPECT_THROW(io::parse_complex("abc"), Error);
  EXPECT_THROW(io::parse_complex("1+2"), Error);
}

TEST(MatrixIo, RoundTripIsExact) {
  const ComplexMatrix M = mbmp::testing::random_matrix(5, 7, 99);
  std::stringstream buffer;
  io::write_matrix(buffer, M);
  EXPECT_EQ(io::read_matrix(buffer), M);
}

TEST(MatrixIo, ReadsHandWrittenMatrix) {
  std::istringstream in("2 2\n1+0j 0-1j\n 2.5 -0.5+0.5j\n");
  const ComplexMatrix M = io::read_matrix(in);
  EXPECT_EQ(M(0, 1), std::complex<double>(0, -1));
  EXPECT_EQ(M(1, 0), std::complex<double>(2.5, 0));
  EXPECT_EQ(M(1, 1), std::complex<double>(-0.5, 0.5));
}

TEST(MatrixIo, RejectsMalformedInput) {
  std::istringstream truncated("2 2\n1 2\n3\n");
  EXPECT_THROW(io::read_matrix(truncated), Error);
  std::istringstream extra("1 1\n1 2\n");
  EXPECT_THROW(io::read_matrix(extra), Error);
  std::istringstream header("x 2\n");
  EXPECT_THROW(io::read_matrix(header), Error);
}
