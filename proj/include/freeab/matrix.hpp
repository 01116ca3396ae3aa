#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freeab/error.hpp"
#include "freeab/integer.hpp"

namespace freeab {

/// Dense exact-integer matrix, row-major storage.
///
/// Matrices act on column vectors: column j holds the image of e_j.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
      if (r.size() != cols_) fail(ErrorKind::Dimension, "ragged matrix literal");
      for (long v : r) data_.emplace_back(v);
    }
  }

  static auto identity(std::size_t n) -> IntMatrix {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static auto zero(std::size_t rows, std::size_t cols) -> IntMatrix {
    return IntMatrix(rows, cols);
  }
  static auto column(const std::vector<Integer> &v) -> IntMatrix {
    IntMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }
  static auto unit(std::size_t n, std::size_t i) -> IntMatrix {
    IntMatrix m(n, 1);
    m(i, 0) = 1;
    return m;
  }

  [[nodiscard]] auto rows() const noexcept -> std::size_t { return rows_; }
  [[nodiscard]] auto cols() const noexcept -> std::size_t { return cols_; }
  [[nodiscard]] auto is_square() const noexcept -> bool { return rows_ == cols_; }

  auto operator()(std::size_t i, std::size_t j) -> Integer & {
    return data_[i * cols_ + j];
  }
  auto operator()(std::size_t i, std::size_t j) const -> const Integer & {
    return data_[i * cols_ + j];
  }
  [[nodiscard]] auto at(std::size_t i, std::size_t j) const -> const Integer & {
    if (i >= rows_ || j >= cols_) fail(ErrorKind::Dimension, "index out of range");
    return (*this)(i, j);
  }

  [[nodiscard]] auto entries() const -> const std::vector<Integer> & { return data_; }

  friend auto operator==(const IntMatrix &a, const IntMatrix &b) -> bool {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend auto operator*(const IntMatrix &a, const IntMatrix &b) -> IntMatrix {
    if (a.cols_ != b.rows_)
      fail(ErrorKind::Dimension, "product of " + a.shape() + " and " + b.shape());
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Integer &aik = a(i, k);
        if (sgn(aik) == 0) continue;
        const Integer *brow = &b.data_[k * b.cols_];
        Integer *crow = &c.data_[i * c.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) {
          if (sgn(brow[j]) == 0) continue;
          mpz_addmul(crow[j].get_mpz_t(), aik.get_mpz_t(), brow[j].get_mpz_t());
        }
      }
    }
    return c;
  }

  friend auto operator+(IntMatrix a, const IntMatrix &b) -> IntMatrix {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend auto operator-(IntMatrix a, const IntMatrix &b) -> IntMatrix {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend auto operator-(IntMatrix a) -> IntMatrix {
    for (auto &v : a.data_) v = -v;
    return a;
  }
  friend auto operator*(const Integer &s, IntMatrix a) -> IntMatrix {
    for (auto &v : a.data_) v *= s;
    return a;
  }

  [[nodiscard]] auto transpose() const -> IntMatrix {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  [[nodiscard]] auto block(std::size_t r0, std::size_t c0, std::size_t nr,
                           std::size_t nc) const -> IntMatrix {
    if (r0 + nr > rows_ || c0 + nc > cols_)
      fail(ErrorKind::Dimension, "submatrix out of range");
    IntMatrix s(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) s(i, j) = (*this)(r0 + i, c0 + j);
    return s;
  }

  void set_block(std::size_t r0, std::size_t c0, const IntMatrix &s) {
    if (r0 + s.rows_ > rows_ || c0 + s.cols_ > cols_)
      fail(ErrorKind::Dimension, "block placement out of range");
    for (std::size_t i = 0; i < s.rows_; ++i)
      for (std::size_t j = 0; j < s.cols_; ++j) (*this)(r0 + i, c0 + j) = s(i, j);
  }

  [[nodiscard]] auto col(std::size_t j) const -> IntMatrix {
    return block(0, j, rows_, 1);
  }

  [[nodiscard]] auto is_zero() const -> bool {
    for (const auto &v : data_)
      if (v != 0) return false;
    return true;
  }

  [[nodiscard]] auto is_identity() const -> bool {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    return true;
  }

  // gcd of all entries (0 for the zero matrix)
  [[nodiscard]] auto content() const -> Integer {
    Integer g = 0;
    for (const auto &v : data_) {
      if (v == 0) continue;
      g = gcd(g, v);
      if (g == 1) break;
    }
    return g;
  }

  [[nodiscard]] auto shape() const -> std::string {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

private:
  void require_same_shape(const IntMatrix &b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      fail(ErrorKind::Dimension, "shape mismatch " + shape() + " vs " + b.shape());
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> data_;
};

inline auto hcat(const IntMatrix &a, const IntMatrix &b) -> IntMatrix {
  if (a.rows() != b.rows()) fail(ErrorKind::Dimension, "hcat row mismatch");
  IntMatrix c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

inline auto block_diag(const std::vector<IntMatrix> &blocks) -> IntMatrix {
  std::size_t r = 0, c = 0;
  for (const auto &b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  IntMatrix m(r, c);
  r = c = 0;
  for (const auto &b : blocks) {
    m.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return m;
}

// k copies of b along the diagonal
inline auto repeat_diag(const IntMatrix &b, std::size_t k) -> IntMatrix {
  return block_diag(std::vector<IntMatrix>(k, b));
}

inline auto matrix_power(IntMatrix base, unsigned long e) -> IntMatrix {
  if (!base.is_square()) fail(ErrorKind::Dimension, "power of non-square matrix");
  IntMatrix r = IntMatrix::identity(base.rows());
  while (e) {
    if (e & 1UL) r = r * base;
    e >>= 1UL;
    if (e) base = base * base;
  }
  return r;
}

struct EntryDiff {
  std::size_t row, col;
  Integer got, expected;
};

inline auto first_difference(const IntMatrix &got, const IntMatrix &expected)
    -> std::optional<EntryDiff> {
  if (got.rows() != expected.rows() || got.cols() != expected.cols())
    fail(ErrorKind::Dimension, "comparing " + got.shape() + " with " + expected.shape());
  for (std::size_t i = 0; i < got.rows(); ++i)
    for (std::size_t j = 0; j < got.cols(); ++j)
      if (got(i, j) != expected(i, j)) return EntryDiff{i, j, got(i, j), expected(i, j)};
  return std::nullopt;
}

/// Text format: a "rows cols" header line, then one line per row.
inline auto format_matrix(const IntMatrix &m) -> std::string {
  std::ostringstream out;
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).get_str();
    }
    out << '\n';
  }
  return out.str();
}

inline auto parse_matrix(const std::string &text) -> IntMatrix {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  if (tokens.size() < 2) fail(ErrorKind::Parse, "matrix text: missing 'rows cols' header");
  auto dim = [&](std::size_t i) -> std::size_t {
    auto v = parse_integer(tokens[i]);
    if (!v || *v < 0 || !v->fits_ulong_p())
      fail(ErrorKind::Parse, "matrix text: bad dimension '" + tokens[i] + "'");
    return v->get_ui();
  };
  std::size_t r = dim(0), c = dim(1);
  if (tokens.size() != 2 + r * c)
    fail(ErrorKind::Parse, "matrix text: expected " + std::to_string(r * c) +
                               " entries, found " + std::to_string(tokens.size() - 2));
  IntMatrix m(r, c);
  for (std::size_t k = 0; k < r * c; ++k) {
    auto v = parse_integer(tokens[2 + k]);
    if (!v)
      fail(ErrorKind::Parse, "matrix text: bad entry '" + tokens[2 + k] + "' at row " +
                                 std::to_string(k / (c ? c : 1)) + ", column " +
                                 std::to_string(c ? k % c : 0));
    m(k / c, k % c) = *v;
  }
  return m;
}

} // namespace freeab
