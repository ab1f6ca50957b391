#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bglue/numeric/big_scalar.hpp"
#include "bglue/numeric/log_scalar.hpp"

namespace bglue::geometry {

using numeric::BigScalar;
using numeric::LogScalar;

/// One coordinate of a point: an ordinary BigScalar, or a LogScalar for
/// transverse values produced by stretch maps that may lie far below the
/// binary exponent range.
class Coord {
 public:
  Coord() : v_(BigScalar()) {}
  Coord(BigScalar v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Coord(LogScalar v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Coord(double v) : v_(BigScalar(v)) {}     // NOLINT(google-explicit-constructor)
  Coord(int v) : v_(BigScalar(v)) {}        // NOLINT(google-explicit-constructor)

  bool is_log() const noexcept { return std::holds_alternative<LogScalar>(v_); }
  int sign() const;
  bool is_zero() const { return sign() == 0; }

  /// Log-form value whose magnitude is below 2^tiny_log2 (never materialized).
  bool is_tiny(long tiny_log2) const;

  /// Value as BigScalar (decodes log form; may underflow to zero).
  BigScalar big() const;
  /// Value as LogScalar (encodes binary form).
  LogScalar log() const;

  /// Compare against an ordinary scalar, exact in both representations.
  int compare(const BigScalar& rhs) const;

  std::string to_string(int digits = 0) const;

 private:
  std::variant<BigScalar, LogScalar> v_;
};

struct Point {
  std::string chart;
  std::vector<Coord> x;

  Point() = default;
  Point(std::string chart_id, std::vector<Coord> coords)
      : chart(std::move(chart_id)), x(std::move(coords)) {}
  Point(std::string chart_id, std::initializer_list<double> coords);

  size_t dim() const { return x.size(); }
  std::vector<BigScalar> values() const;
  /// Index of the single tiny coordinate, or -1. Throws if several are tiny.
  int tiny_index(long tiny_log2) const;
  std::string to_string(int digits = 12) const;
};

Point make_point(std::string chart, const std::vector<BigScalar>& values);

using Matrix = std::vector<std::vector<BigScalar>>;

Matrix identity_matrix(size_t n);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<BigScalar> matvec(const Matrix& a, const std::vector<BigScalar>& v);
/// Gauss-Jordan with partial pivoting; throws DomainError when singular.
Matrix inverse_matrix(const Matrix& a);
BigScalar norm2(const std::vector<BigScalar>& v);

}  // namespace bglue::geometry
