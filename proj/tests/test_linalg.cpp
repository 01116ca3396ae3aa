#include <gtest/gtest.h>

#include "freeab/linalg.hpp"
#include "freeab/primes.hpp"
#include "freeab/sampling.hpp"

using namespace freeab;

namespace {

// gcd of all k x k minors, by cofactor expansion over row/column subsets
auto minor_det(const IntMatrix &M, const std::vector<std::size_t> &r, const std::vector<std::size_t> &c)
    -> Integer {
  if (r.size() == 1) return M(r[0], c[0]);
  Integer acc = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<std::size_t> rr(r.begin() + 1, r.end()), cc;
    for (std::size_t t = 0; t < c.size(); ++t)
      if (t != j) cc.push_back(c[t]);
    Integer sub = M(r[0], c[j]) * minor_det(M, rr, cc);
    acc += (j % 2 ? -sub : sub);
  }
  return acc;
}

auto subsets(std::size_t n, std::size_t k) -> std::vector<std::vector<std::size_t>> {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

auto maximal_minor_gcd(const IntMatrix &M) -> Integer {
  std::vector<std::size_t> cols(M.cols());
  for (std::size_t j = 0; j < M.cols(); ++j) cols[j] = j;
  Integer g = 0;
  for (const auto &r : subsets(M.rows(), M.cols())) g = gcd(g, minor_det(M, r, cols));
  return g;
}

auto is_diagonal(const IntMatrix &D) -> bool {
  for (std::size_t i = 0; i < D.rows(); ++i)
    for (std::size_t j = 0; j < D.cols(); ++j)
      if (i != j && D(i, j) != 0) return false;
  return true;
}

void expect_snf_contract(const IntMatrix &M, const SnfResult &s) {
  EXPECT_EQ(s.U * M * s.V, s.D);
  EXPECT_TRUE(is_diagonal(s.D));
  EXPECT_TRUE(is_unimodular(s.U));
  EXPECT_TRUE(is_unimodular(s.V));
  std::size_t k = std::min(s.D.rows(), s.D.cols());
  for (std::size_t i = 0; i < k; ++i) {
    EXPECT_GE(s.D(i, i), 0);
    if (i + 1 < k) {
      EXPECT_TRUE(divides(s.D(i, i), s.D(i + 1, i + 1))) << format_matrix(s.D);
    }
  }
}

} // namespace

TEST(Snf, DiagonalTwoThree) {
  IntMatrix M{{2, 0}, {0, 3}};
  auto s = snf(M);
  EXPECT_EQ(s.D, (IntMatrix{{1, 0}, {0, 6}}));
  expect_snf_contract(M, s);
}

TEST(Snf, ZeroMatrix) {
  auto s = snf(IntMatrix::zero(2, 2));
  EXPECT_TRUE(s.D.is_zero());
  EXPECT_EQ(s.U, IntMatrix::identity(2));
  EXPECT_EQ(s.V, IntMatrix::identity(2));
}

TEST(Snf, UnimodularInputGivesIdentity) {
  IntMatrix M{{1, 1}, {0, 1}};
  auto s = snf(M);
  EXPECT_EQ(s.D, IntMatrix::identity(2));
  expect_snf_contract(M, s);
}

TEST(Snf, StoredInversesAreInverses) {
  IntMatrix M{{4, 6, 2}, {2, 3, 9}, {0, 12, 1}};
  auto s = snf(M);
  EXPECT_EQ(s.U * s.U_inv, IntMatrix::identity(3));
  EXPECT_EQ(s.V * s.V_inv, IntMatrix::identity(3));
}

TEST(Snf, RandomRoundTrip) {
  sampling::Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    auto r = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 8));
    auto c = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 8));
    IntMatrix M = sampling::random_matrix(rng, r, c, -20, 20);
    expect_snf_contract(M, snf(M));
  }
}

TEST(Snf, InvariantFactorProductMatchesMinorGcd) {
  // d_1 * ... * d_k = gcd of k x k minors, for full column rank k
  sampling::Rng rng(12);
  for (int it = 0; it < 60; ++it) {
    auto c = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 3));
    auto r = c + static_cast<std::size_t>(sampling::uniform_int(rng, 0, 2));
    IntMatrix M = sampling::random_matrix(rng, r, c, -6, 6);
    Integer prod = 1;
    for (const auto &d : snf(M).invariant_factors()) prod *= d;
    if (snf(M).rank() < c) prod = 0;
    EXPECT_EQ(prod, maximal_minor_gcd(M)) << format_matrix(M);
  }
}

TEST(UnimodularSet, Examples) {
  EXPECT_TRUE(is_unimodular_set(IntMatrix{{1, 1}, {0, 1}}));
  EXPECT_FALSE(is_unimodular_set(IntMatrix{{2}, {0}}));
  IntMatrix M{{1, 0}, {0, 2}, {0, 1}};
  EXPECT_TRUE(is_unimodular_set(M));
  EXPECT_EQ(maximal_minor_gcd(M), 1);
}

TEST(UnimodularSet, TooManyColumnsIsDimensionError) {
  try {
    is_unimodular_set(IntMatrix{{1, 0, 0}, {0, 1, 0}});
    FAIL() << "no error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(CompleteToBasis, SingleColumn) {
  IntMatrix e2{{0}, {1}};
  IntMatrix C = complete_to_basis(e2);
  EXPECT_EQ(abs(determinant(C)), 1);
  EXPECT_EQ(C.col(0), e2);
}

TEST(CompleteToBasis, TwoColumnsInRankThree) {
  IntMatrix M{{1, 0}, {0, 2}, {0, 1}};
  IntMatrix C = complete_to_basis(M);
  EXPECT_EQ(abs(determinant(C)), 1);
  EXPECT_EQ(C.block(0, 0, 3, 2), M);
}

TEST(CompleteToBasis, FullBasisReturnsInput) {
  IntMatrix M{{2, 1}, {1, 1}};
  EXPECT_EQ(complete_to_basis(M), M);
}

TEST(CompleteToBasis, NonPrimitiveIsNotCompletable) {
  try {
    complete_to_basis(IntMatrix{{2}, {4}});
    FAIL() << "no error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCompletable);
  }
}

TEST(CompleteToBasis, AgreesWithInvariantFactors) {
  sampling::Rng rng(13);
  for (int it = 0; it < 150; ++it) {
    auto n = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 5));
    auto k = static_cast<std::size_t>(sampling::uniform_int(rng, 1, static_cast<long>(n)));
    IntMatrix M = sampling::random_matrix(rng, n, k, -3, 3);
    bool ones = snf(M).rank() == k;
    for (const auto &d : snf(M).invariant_factors()) ones = ones && d == 1;
    EXPECT_EQ(is_unimodular_set(M), ones);
    if (ones) {
      IntMatrix C = complete_to_basis(M);
      EXPECT_EQ(abs(determinant(C)), 1);
      EXPECT_EQ(C.block(0, 0, n, k), M);
    } else {
      EXPECT_THROW(complete_to_basis(M), Error);
    }
  }
}

TEST(Inverse, RandomUnimodular) {
  sampling::Rng rng(14);
  for (int it = 0; it < 100; ++it) {
    auto n = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 6));
    IntMatrix M = sampling::random_unimodular(rng, n, 10, 3);
    EXPECT_EQ(abs(determinant(M)), 1);
    EXPECT_EQ(M * inverse(M), IntMatrix::identity(n));
    EXPECT_EQ(inverse(M) * M, IntMatrix::identity(n));
  }
}

TEST(Determinant, Multiplicative) {
  sampling::Rng rng(15);
  for (int it = 0; it < 100; ++it) {
    auto n = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 4));
    IntMatrix A = sampling::random_matrix(rng, n, n, -5, 5), B = sampling::random_matrix(rng, n, n, -5, 5);
    EXPECT_EQ(determinant(A * B), determinant(A) * determinant(B));
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    EXPECT_EQ(determinant(A), minor_det(A, all, all));
  }
}

TEST(Matrix, ParseFormatRoundTrip) {
  IntMatrix M{{1, -2}, {30000000000, 4}};
  EXPECT_EQ(parse_matrix(format_matrix(M)), M);
  EXPECT_THROW(parse_matrix("[[1,2],[3]]"), Error);
}

TEST(Primes, SmallFacts) {
  EXPECT_EQ(euler_phi(12), 4);
  EXPECT_EQ(prime_divisors(60), (std::set<long>{2, 3, 5}));
  EXPECT_EQ(p_valuation(Integer(72), 2), 3u);
  EXPECT_TRUE(is_prime(97L));
  EXPECT_FALSE(is_prime(91L));
}
