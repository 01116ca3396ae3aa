#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "freeab/error.hpp"
#include "freeab/integer.hpp"
#include "freeab/linalg.hpp"
#include "freeab/matrix.hpp"
#include "freeab/primes.hpp"

namespace freeab {

// Inverse of a matrix that must be unimodular; the error names the matrix.
inline auto checked_inverse(const IntMatrix &M, const std::string &name) -> IntMatrix {
  if (!M.is_square())
    fail(ErrorKind::Validation, name + " must be square, got " + M.shape());
  Integer det = determinant(M);
  if (det != 1 && det != -1)
    fail(ErrorKind::Validation,
         name + " is not unimodular (determinant " + det.get_str() + ")");
  return inverse(M);
}

struct BlockSpec {
  std::size_t d = 0;
  IntMatrix B, B_inv;

  static auto make(const IntMatrix &B) -> BlockSpec {
    if (B.rows() == 0) fail(ErrorKind::Validation, "block B must be nonempty");
    return {B.rows(), B, checked_inverse(B, "block B")};
  }
  friend auto operator==(const BlockSpec &, const BlockSpec &) -> bool = default;
};

struct Finitary {
  std::vector<std::size_t> support; // strictly increasing
  IntMatrix M, M_inv;
  friend auto operator==(const Finitary &, const Finitary &) -> bool = default;
};

struct EventuallyUniform {
  std::size_t window = 0; // multiple of block.d
  IntMatrix M_window, M_window_inv;
  BlockSpec block;
  friend auto operator==(const EventuallyUniform &, const EventuallyUniform &)
      -> bool = default;
};

// Pairs (2n, 2n+1) hold (y_n, x_n); block n is [[1, e*P_n],[0,1]] with
// P_n = m_0 * ... * m_n. Beyond the prefix, m_n runs through the primes
// outside `excluded` that divide no prefix multiplier, in increasing order.
// An optional head matrix replaces the first head_pairs blocks.
struct GradedBlock {
  std::vector<Integer> prefix;
  std::vector<long> excluded; // sorted, distinct primes
  Integer exponent = 1;
  std::size_t head_pairs = 0;
  IntMatrix head, head_inv;

  friend auto operator==(const GradedBlock &, const GradedBlock &) -> bool = default;

  [[nodiscard]] auto same_shape(const GradedBlock &o) const -> bool {
    return prefix == o.prefix && excluded == o.excluded;
  }

  [[nodiscard]] auto is_tail_prime(long p) const -> bool {
    if (!is_prime(p)) return false;
    if (std::binary_search(excluded.begin(), excluded.end(), p)) return false;
    for (const auto &m : prefix)
      if (divides(Integer(p), m)) return false;
    return true;
  }

  // first `count` tail primes
  [[nodiscard]] auto tail_primes(std::size_t count) const -> std::vector<long> {
    std::vector<long> out;
    for (long p = 2; out.size() < count; ++p)
      if (is_tail_prime(p)) out.push_back(p);
    return out;
  }

  [[nodiscard]] auto multipliers(std::size_t count) const -> std::vector<Integer> {
    std::vector<Integer> out(prefix.begin(),
                             prefix.begin() + std::min(count, prefix.size()));
    if (count > prefix.size())
      for (long p : tail_primes(count - prefix.size())) out.emplace_back(p);
    return out;
  }

  // P_0, ..., P_{count-1}
  [[nodiscard]] auto products(std::size_t count) const -> std::vector<Integer> {
    std::vector<Integer> out;
    Integer acc = 1;
    for (const auto &m : multipliers(count)) out.push_back(acc *= m);
    return out;
  }

  [[nodiscard]] auto prefix_product() const -> Integer {
    Integer acc = 1;
    for (const auto &m : prefix) acc *= m;
    return acc;
  }
};

class RepAut {
public:
  using Variant = std::variant<Finitary, EventuallyUniform, GradedBlock>;

  RepAut() : v_(Finitary{}) {}
  explicit RepAut(Variant v) : v_(std::move(v)) {}

  static auto identity() -> RepAut { return RepAut(Finitary{}); }

  static auto finitary(std::vector<std::size_t> support, const IntMatrix &M) -> RepAut {
    for (std::size_t i = 1; i < support.size(); ++i)
      if (support[i] <= support[i - 1])
        fail(ErrorKind::Validation, "finitary support must be strictly increasing");
    if (M.rows() != support.size() || M.cols() != support.size())
      fail(ErrorKind::Validation, "finitary M is " + M.shape() + " but support has " +
                                      std::to_string(support.size()) + " indices");
    IntMatrix inv = support.empty() ? IntMatrix() : checked_inverse(M, "finitary M");
    return RepAut(Finitary{std::move(support), M, std::move(inv)});
  }

  static auto uniform(const IntMatrix &B) -> RepAut {
    return RepAut(EventuallyUniform{0, IntMatrix(), IntMatrix(), BlockSpec::make(B)});
  }

  static auto eventually_uniform(const IntMatrix &M_window, const IntMatrix &B) -> RepAut {
    auto block = BlockSpec::make(B);
    if (!M_window.is_square())
      fail(ErrorKind::Validation, "window matrix must be square, got " + M_window.shape());
    if (M_window.rows() % block.d != 0)
      fail(ErrorKind::Validation, "window size " + std::to_string(M_window.rows()) +
                                      " is not a multiple of block size " +
                                      std::to_string(block.d));
    IntMatrix inv = M_window.rows() ? checked_inverse(M_window, "window matrix") : IntMatrix();
    return RepAut(EventuallyUniform{M_window.rows(), M_window, std::move(inv), std::move(block)});
  }

  static auto graded(std::vector<Integer> prefix, std::vector<long> excluded,
                     const Integer &exponent = 1) -> RepAut {
    return graded_with_head(std::move(prefix), std::move(excluded), exponent, IntMatrix());
  }

  static auto graded_with_head(std::vector<Integer> prefix, std::vector<long> excluded,
                               const Integer &exponent, const IntMatrix &head) -> RepAut {
    for (const auto &m : prefix)
      if (m < 2) fail(ErrorKind::Validation, "graded multiplier " + m.get_str() + " < 2");
    std::sort(excluded.begin(), excluded.end());
    if (std::adjacent_find(excluded.begin(), excluded.end()) != excluded.end())
      fail(ErrorKind::Validation, "graded exclusion set has duplicates");
    for (long p : excluded)
      if (!is_prime(p))
        fail(ErrorKind::Validation, "graded exclusion " + std::to_string(p) + " is not prime");
    if (head.rows() % 2 != 0 || !head.is_square())
      fail(ErrorKind::Validation, "graded head must be square of even size, got " + head.shape());
    GradedBlock g{std::move(prefix), std::move(excluded), exponent, head.rows() / 2,
                  head, head.rows() ? checked_inverse(head, "graded head") : IntMatrix()};
    return RepAut(std::move(g));
  }

  [[nodiscard]] auto variant() const -> const Variant & { return v_; }
  template <class T> [[nodiscard]] auto holds() const -> bool {
    return std::holds_alternative<T>(v_);
  }
  template <class T> [[nodiscard]] auto get() const -> const T & { return std::get<T>(v_); }

  [[nodiscard]] auto kind_name() const -> std::string {
    if (holds<Finitary>()) return "finitary";
    if (holds<GradedBlock>()) return "graded";
    return get<EventuallyUniform>().window == 0 ? "uniform" : "eventually_uniform";
  }

  friend auto operator==(const RepAut &, const RepAut &) -> bool = default;

private:
  Variant v_;
};

namespace detail {

inline void require_window(bool ok, const std::string &msg) {
  if (!ok) fail(ErrorKind::WindowAlignment, msg);
}

inline auto graded_pair_block(const Integer &increment) -> IntMatrix {
  IntMatrix b = IntMatrix::identity(2);
  b(0, 1) = increment;
  return b;
}

// Smallest window at which phi is described exactly, and its block size
// (1 for finitary, 2 for graded).
inline auto min_window(const RepAut &phi) -> std::size_t {
  if (phi.holds<Finitary>()) {
    const auto &f = phi.get<Finitary>();
    return f.support.empty() ? 0 : f.support.back() + 1;
  }
  if (phi.holds<EventuallyUniform>()) return phi.get<EventuallyUniform>().window;
  return 2 * phi.get<GradedBlock>().head_pairs;
}

} // namespace detail

/// N x N matrix of phi on coordinates [0, N).
inline auto window_matrix(const RepAut &phi, std::size_t N) -> IntMatrix {
  IntMatrix W = IntMatrix::identity(N);
  if (phi.holds<Finitary>()) {
    const auto &f = phi.get<Finitary>();
    detail::require_window(f.support.empty() || N > f.support.back(),
                           "window " + std::to_string(N) + " does not cover finitary support");
    for (std::size_t a = 0; a < f.support.size(); ++a)
      for (std::size_t b = 0; b < f.support.size(); ++b) W(f.support[a], f.support[b]) = f.M(a, b);
    return W;
  }
  if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    detail::require_window(N >= e.window && N % e.block.d == 0,
                           "window " + std::to_string(N) + " not aligned (window " +
                               std::to_string(e.window) + ", block " +
                               std::to_string(e.block.d) + ")");
    if (e.window) W.set_block(0, 0, e.M_window);
    for (std::size_t s = e.window; s < N; s += e.block.d) W.set_block(s, s, e.block.B);
    return W;
  }
  const auto &g = phi.get<GradedBlock>();
  detail::require_window(N % 2 == 0 && N >= 2 * g.head_pairs,
                         "graded window " + std::to_string(N) + " must be even and cover the head");
  if (g.head_pairs) W.set_block(0, 0, g.head);
  auto P = g.products(N / 2);
  for (std::size_t n = g.head_pairs; n < N / 2; ++n)
    W.set_block(2 * n, 2 * n, detail::graded_pair_block(g.exponent * P[n]));
  return W;
}

/// Whether a window size is aligned for phi.
inline auto window_aligned(const RepAut &phi, std::size_t N) -> bool {
  if (phi.holds<Finitary>()) return N >= detail::min_window(phi);
  if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    return N >= e.window && N % e.block.d == 0;
  }
  return N % 2 == 0 && N >= detail::min_window(phi);
}

inline auto invert(const RepAut &phi) -> RepAut {
  if (phi.holds<Finitary>()) {
    auto f = phi.get<Finitary>();
    std::swap(f.M, f.M_inv);
    return RepAut(std::move(f));
  }
  if (phi.holds<EventuallyUniform>()) {
    auto e = phi.get<EventuallyUniform>();
    std::swap(e.M_window, e.M_window_inv);
    std::swap(e.block.B, e.block.B_inv);
    return RepAut(std::move(e));
  }
  auto g = phi.get<GradedBlock>();
  g.exponent = -g.exponent;
  std::swap(g.head, g.head_inv);
  return RepAut(std::move(g));
}

namespace detail {

// coordinate i is untouched by M (row i and column i are unit vectors)
inline auto acts_trivially(const IntMatrix &M, std::size_t i) -> bool {
  for (std::size_t j = 0; j < M.rows(); ++j) {
    Integer want = (i == j) ? 1 : 0;
    if (M(i, j) != want || M(j, i) != want) return false;
  }
  return true;
}

// Square block [s, s+k) decoupled from the rest of M and equal to B.
inline auto trailing_block_is(const IntMatrix &M, std::size_t s, const IntMatrix &B) -> bool {
  const std::size_t k = B.rows(), n = M.rows();
  for (std::size_t i = s; i < s + k; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool inside = j >= s && j < s + k;
      if (inside) {
        if (M(i, j) != B(i - s, j - s)) return false;
      } else if (M(i, j) != 0 || M(j, i) != 0) {
        return false;
      }
    }
  return true;
}

inline auto normalize_finitary(const IntMatrix &W) -> RepAut {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < W.rows(); ++i)
    if (!acts_trivially(W, i)) keep.push_back(i);
  IntMatrix M(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) M(a, b) = W(keep[a], keep[b]);
  return RepAut::finitary(std::move(keep), M);
}

inline auto normalize_uniform(IntMatrix W, const IntMatrix &B) -> RepAut {
  std::size_t N = W.rows(), d = B.rows();
  while (N >= d && trailing_block_is(W, N - d, B)) N -= d;
  return RepAut::eventually_uniform(W.block(0, 0, N, N), B);
}

inline auto normalize_graded(const GradedBlock &shape, const Integer &exponent, IntMatrix head)
    -> RepAut {
  std::size_t h = head.rows() / 2;
  auto P = shape.products(h);
  while (h > 0 && trailing_block_is(head, 2 * (h - 1), graded_pair_block(exponent * P[h - 1])))
    --h;
  return RepAut::graded_with_head(shape.prefix, shape.excluded, exponent,
                                  head.block(0, 0, 2 * h, 2 * h));
}

inline auto block_size(const RepAut &phi) -> std::size_t {
  if (phi.holds<EventuallyUniform>()) return phi.get<EventuallyUniform>().block.d;
  if (phi.holds<GradedBlock>()) return 2;
  return 1;
}

inline auto uniform_block(const RepAut &phi, std::size_t d) -> IntMatrix {
  if (phi.holds<EventuallyUniform>()) {
    const auto &b = phi.get<EventuallyUniform>().block;
    return repeat_diag(b.B, d / b.d);
  }
  return IntMatrix::identity(d);
}

inline auto round_up(std::size_t n, std::size_t d) -> std::size_t {
  return (n + d - 1) / d * d;
}

} // namespace detail

/// Symbolic product phi * psi (psi applied first).
inline auto compose(const RepAut &phi, const RepAut &psi) -> RepAut {
  const bool gp = phi.holds<GradedBlock>(), gq = psi.holds<GradedBlock>();
  const bool ep = phi.holds<EventuallyUniform>(), eq = psi.holds<EventuallyUniform>();

  if (!gp && !gq && !ep && !eq) {
    std::size_t N = std::max(detail::min_window(phi), detail::min_window(psi));
    return detail::normalize_finitary(window_matrix(phi, N) * window_matrix(psi, N));
  }
  if (ep || eq) {
    if (gp || gq)
      fail(ErrorKind::CompositionUnsupported,
           "graded automorphisms do not compose symbolically with block-uniform ones");
    std::size_t d = std::lcm(detail::block_size(phi), detail::block_size(psi));
    std::size_t N = detail::round_up(std::max(detail::min_window(phi), detail::min_window(psi)), d);
    IntMatrix B = detail::uniform_block(phi, d) * detail::uniform_block(psi, d);
    return detail::normalize_uniform(window_matrix(phi, N) * window_matrix(psi, N), B);
  }
  if (gp && gq) {
    const auto &a = phi.get<GradedBlock>(), &b = psi.get<GradedBlock>();
    if (!a.same_shape(b))
      fail(ErrorKind::CompositionUnsupported,
           "graded automorphisms with different multiplier shapes");
    std::size_t N = std::max(detail::min_window(phi), detail::min_window(psi));
    return detail::normalize_graded(a, a.exponent + b.exponent,
                                    window_matrix(phi, N) * window_matrix(psi, N));
  }
  // graded with finitary
  const auto &g = gp ? phi.get<GradedBlock>() : psi.get<GradedBlock>();
  std::size_t N = detail::round_up(std::max(detail::min_window(phi), detail::min_window(psi)), 2);
  return detail::normalize_graded(g, g.exponent, window_matrix(phi, N) * window_matrix(psi, N));
}

/// True iff phi is the identity automorphism.
inline auto is_identity(const RepAut &phi) -> bool {
  if (phi.holds<Finitary>()) return phi.get<Finitary>().M.is_identity();
  if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    return e.block.B.is_identity() && e.M_window.is_identity();
  }
  const auto &g = phi.get<GradedBlock>();
  return g.exponent == 0 && g.head.is_identity();
}

/// Re-describe a uniform automorphism with blocks of size k*d.
inline auto direct_sum_and_reblock(const RepAut &phi, std::size_t k) -> RepAut {
  if (k < 1) fail(ErrorKind::Argument, "reblock factor must be >= 1");
  if (!phi.holds<EventuallyUniform>() || phi.get<EventuallyUniform>().window != 0)
    fail(ErrorKind::Argument, "direct_sum_and_reblock needs a uniform automorphism");
  if (k == 1) return phi;
  return RepAut::uniform(repeat_diag(phi.get<EventuallyUniform>().block.B, k));
}

} // namespace freeab
