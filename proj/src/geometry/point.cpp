#include "bglue/geometry/point.hpp"

#include <sstream>

#include "bglue/errors.hpp"

namespace bglue::geometry {

int Coord::sign() const {
  if (auto* b = std::get_if<BigScalar>(&v_)) return b->sign() > 0 ? 1 : (b->sign() < 0 ? -1 : 0);
  return std::get<LogScalar>(v_).sign();
}

bool Coord::is_tiny(long tiny_log2) const {
  auto* l = std::get_if<LogScalar>(&v_);
  if (!l || l->is_zero()) return false;
  return l->logmag() < BigScalar(tiny_log2) * BigScalar::ln2();
}

BigScalar Coord::big() const {
  if (auto* b = std::get_if<BigScalar>(&v_)) return *b;
  return std::get<LogScalar>(v_).decode();
}

LogScalar Coord::log() const {
  if (auto* l = std::get_if<LogScalar>(&v_)) return *l;
  return LogScalar::encode(std::get<BigScalar>(v_));
}

int Coord::compare(const BigScalar& rhs) const {
  if (auto* b = std::get_if<BigScalar>(&v_)) {
    auto c = *b <=> rhs;
    return c == std::partial_ordering::less ? -1 : (c == std::partial_ordering::greater ? 1 : 0);
  }
  auto c = std::get<LogScalar>(v_) <=> LogScalar::encode(rhs);
  return c == std::partial_ordering::less ? -1 : (c == std::partial_ordering::greater ? 1 : 0);
}

std::string Coord::to_string(int digits) const {
  if (auto* b = std::get_if<BigScalar>(&v_)) return b->to_string(digits);
  return std::get<LogScalar>(v_).to_string(digits);
}

Point::Point(std::string chart_id, std::initializer_list<double> coords) : chart(std::move(chart_id)) {
  for (double c : coords) x.emplace_back(BigScalar(c));
}

std::vector<BigScalar> Point::values() const {
  std::vector<BigScalar> out;
  out.reserve(x.size());
  for (const auto& c : x) out.push_back(c.big());
  return out;
}

int Point::tiny_index(long tiny_log2) const {
  int found = -1;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_tiny(tiny_log2)) {
      if (found >= 0) throw DomainError("point has more than one sub-range coordinate: " + to_string());
      found = static_cast<int>(i);
    }
  }
  return found;
}

std::string Point::to_string(int digits) const {
  std::ostringstream os;
  os << chart << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i].to_string(digits);
  os << ")";
  return os.str();
}

Point make_point(std::string chart, const std::vector<BigScalar>& values) {
  std::vector<Coord> c(values.begin(), values.end());
  return Point(std::move(chart), std::move(c));
}

Matrix identity_matrix(size_t n) {
  Matrix m(n, std::vector<BigScalar>(n));
  for (size_t i = 0; i < n; ++i) m[i][i] = BigScalar(1);
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size()) throw DomainError("matmul: shape mismatch");
  Matrix out(a.size(), std::vector<BigScalar>(b[0].size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b[0].size(); ++j) {
      BigScalar acc;
      for (size_t k = 0; k < b.size(); ++k) acc += a[i][k] * b[k][j];
      out[i][j] = acc;
    }
  return out;
}

std::vector<BigScalar> matvec(const Matrix& a, const std::vector<BigScalar>& v) {
  if (a.empty() || a[0].size() != v.size()) throw DomainError("matvec: shape mismatch");
  std::vector<BigScalar> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    BigScalar acc;
    for (size_t k = 0; k < v.size(); ++k) acc += a[i][k] * v[k];
    out[i] = acc;
  }
  return out;
}

Matrix inverse_matrix(const Matrix& a) {
  const size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw DomainError("inverse_matrix: matrix is not square");
  Matrix m = a;
  Matrix inv = identity_matrix(n);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (abs(m[r][col]) > abs(m[piv][col])) piv = r;
    if (m[piv][col].is_zero()) throw DomainError("inverse_matrix: singular matrix");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    BigScalar d = m[col][col];
    for (size_t j = 0; j < n; ++j) {
      m[col][j] /= d;
      inv[col][j] /= d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].is_zero()) continue;
      BigScalar f = m[r][col];
      for (size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

BigScalar norm2(const std::vector<BigScalar>& v) {
  BigScalar acc;
  for (const auto& c : v) acc += c * c;
  return sqrt(acc);
}

}  // namespace bglue::geometry
