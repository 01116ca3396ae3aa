#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "freeab/error.hpp"
#include "freeab/integer.hpp"
#include "freeab/matrix.hpp"

namespace freeab {

/// U * M * V == D with D diagonal; entries nonnegative, d_1 | d_2 | ...
///
/// The inverses of U and V are tracked alongside so callers that need them
/// (basis completion, inversion) never re-derive them.
struct SnfResult {
  IntMatrix U, D, V;
  IntMatrix U_inv, V_inv;

  [[nodiscard]] auto invariant_factors() const -> std::vector<Integer> {
    std::vector<Integer> f;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) f.push_back(D(i, i));
    return f;
  }
  [[nodiscard]] auto rank() const -> std::size_t {
    std::size_t r = 0;
    for (const auto &f : invariant_factors())
      if (f != 0) ++r;
    return r;
  }
};

namespace detail {

struct SnfWork {
  IntMatrix A, U, Ui, V, Vi;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < A.cols(); ++c) std::swap(A(i, c), A(j, c));
    for (std::size_t c = 0; c < U.cols(); ++c) std::swap(U(i, c), U(j, c));
    for (std::size_t r = 0; r < Ui.rows(); ++r) std::swap(Ui(r, i), Ui(r, j));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < A.rows(); ++r) std::swap(A(r, i), A(r, j));
    for (std::size_t r = 0; r < V.rows(); ++r) std::swap(V(r, i), V(r, j));
    for (std::size_t c = 0; c < Vi.cols(); ++c) std::swap(Vi(i, c), Vi(j, c));
  }
  // row i += q * row t
  void add_row(std::size_t i, std::size_t t, const Integer &q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < A.cols(); ++c)
      mpz_addmul(A(i, c).get_mpz_t(), q.get_mpz_t(), A(t, c).get_mpz_t());
    for (std::size_t c = 0; c < U.cols(); ++c)
      mpz_addmul(U(i, c).get_mpz_t(), q.get_mpz_t(), U(t, c).get_mpz_t());
    // inverse: col t -= q * col i
    for (std::size_t r = 0; r < Ui.rows(); ++r)
      mpz_submul(Ui(r, t).get_mpz_t(), q.get_mpz_t(), Ui(r, i).get_mpz_t());
  }
  // col j += q * col t
  void add_col(std::size_t j, std::size_t t, const Integer &q) {
    if (q == 0) return;
    for (std::size_t r = 0; r < A.rows(); ++r)
      mpz_addmul(A(r, j).get_mpz_t(), q.get_mpz_t(), A(r, t).get_mpz_t());
    for (std::size_t r = 0; r < V.rows(); ++r)
      mpz_addmul(V(r, j).get_mpz_t(), q.get_mpz_t(), V(r, t).get_mpz_t());
    // inverse: row t -= q * row j
    for (std::size_t c = 0; c < Vi.cols(); ++c)
      mpz_submul(Vi(t, c).get_mpz_t(), q.get_mpz_t(), Vi(j, c).get_mpz_t());
  }
  void negate_col(std::size_t j) {
    for (std::size_t r = 0; r < A.rows(); ++r) A(r, j) = -A(r, j);
    for (std::size_t r = 0; r < V.rows(); ++r) V(r, j) = -V(r, j);
    for (std::size_t c = 0; c < Vi.cols(); ++c) Vi(j, c) = -Vi(j, c);
  }
};

inline auto truncated_quotient(const Integer &a, const Integer &b) -> Integer {
  Integer q;
  mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

} // namespace detail

/// Smith normal form. Pivot: minimal absolute value in the trailing
/// submatrix, first in row-major order. Signs are pushed into V.
inline auto snf(const IntMatrix &M) -> SnfResult {
  const std::size_t r = M.rows(), c = M.cols();
  detail::SnfWork w{M, IntMatrix::identity(r), IntMatrix::identity(r),
                    IntMatrix::identity(c), IntMatrix::identity(c)};
  IntMatrix &A = w.A;
  for (std::size_t t = 0; t < std::min(r, c); ++t) {
    for (;;) {
      std::optional<std::pair<std::size_t, std::size_t>> piv;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j) {
          if (A(i, j) == 0) continue;
          if (!piv || mpz_cmpabs(A(i, j).get_mpz_t(), A(piv->first, piv->second).get_mpz_t()) < 0) piv = {i, j};
        }
      if (!piv) return {w.U, A, w.V, w.Ui, w.Vi};
      w.swap_rows(t, piv->first);
      w.swap_cols(t, piv->second);

      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (A(i, t) == 0) continue;
        w.add_row(i, t, -detail::truncated_quotient(A(i, t), A(t, t)));
        if (A(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (A(t, j) == 0) continue;
        w.add_col(j, t, -detail::truncated_quotient(A(t, j), A(t, t)));
        if (A(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      std::optional<std::size_t> bad_row;
      for (std::size_t i = t + 1; i < r && !bad_row; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (!divides(A(t, t), A(i, j))) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      w.add_row(t, *bad_row, 1);
    }
    if (A(t, t) < 0) w.negate_col(t);
  }
  return {w.U, A, w.V, w.Ui, w.Vi};
}

/// Fraction-free (Bareiss) determinant.
inline auto determinant(const IntMatrix &M) -> Integer {
  if (!M.is_square()) fail(ErrorKind::Dimension, "determinant of " + M.shape() + " matrix");
  const std::size_t n = M.rows();
  if (n == 0) return 1;
  IntMatrix A = M;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (A(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && A(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = A(i, j) * A(k, k) - A(i, k) * A(k, j);
        mpz_divexact(A(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = A(k, k);
  }
  return sign * A(n - 1, n - 1);
}

inline auto is_unimodular(const IntMatrix &M) -> bool {
  if (!M.is_square()) return false;
  Integer d = determinant(M);
  return d == 1 || d == -1;
}

/// Inverse of a unimodular matrix, exact. Throws a validation error otherwise.
inline auto inverse(const IntMatrix &M) -> IntMatrix {
  if (!M.is_square()) fail(ErrorKind::Dimension, "inverse of " + M.shape() + " matrix");
  auto s = snf(M);
  if (!s.D.is_identity()) fail(ErrorKind::Validation, "matrix is not unimodular");
  return s.V * s.U;
}

/// True iff the columns of M extend to a basis of Z^rows.
inline auto is_unimodular_set(const IntMatrix &M) -> bool {
  if (M.cols() == 0) fail(ErrorKind::Dimension, "unimodular-set test needs at least one column");
  if (M.cols() > M.rows())
    fail(ErrorKind::Dimension, "unimodular set of " + std::to_string(M.cols()) +
                                   " vectors in rank " + std::to_string(M.rows()));
  auto s = snf(M);
  for (const auto &f : s.invariant_factors())
    if (f != 1) return false;
  return true;
}

/// Unimodular n x n matrix whose first k columns are the columns of M.
inline auto complete_to_basis(const IntMatrix &M) -> IntMatrix {
  if (M.cols() > M.rows())
    fail(ErrorKind::Dimension, "cannot complete " + std::to_string(M.cols()) +
                                   " vectors in rank " + std::to_string(M.rows()));
  if (M.cols() == 0) return IntMatrix::identity(M.rows());
  auto s = snf(M);
  for (const auto &f : s.invariant_factors())
    if (f != 1) fail(ErrorKind::NotCompletable, "columns do not form a unimodular set");
  const std::size_t n = M.rows(), k = M.cols();
  if (k == n) return M;
  return hcat(M, s.U_inv.block(0, k, n, n - k));
}

} // namespace freeab
