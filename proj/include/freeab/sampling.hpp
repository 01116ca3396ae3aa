#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/integer.hpp"
#include "freeab/linalg.hpp"
#include "freeab/matrix.hpp"
#include "freeab/word.hpp"

// Seeded generators for tests and the CLI. Everything here is deterministic
// given the seed.
namespace freeab::sampling {

using Rng = std::mt19937_64;

inline auto uniform_int(Rng &rng, long lo, long hi) -> long {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

inline auto random_matrix(Rng &rng, std::size_t rows, std::size_t cols, long lo, long hi) -> IntMatrix {
  IntMatrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = uniform_int(rng, lo, hi);
  return M;
}

/// Product of `ops` elementary operations with coefficients in [-coef, coef],
/// plus a random signed permutation. Always invertible over Z.
inline auto random_unimodular(Rng &rng, std::size_t n, int ops = 6, long coef = 2) -> IntMatrix {
  IntMatrix M = IntMatrix::identity(n);
  if (n == 0) return M;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  IntMatrix P(n, n);
  for (std::size_t i = 0; i < n; ++i) P(perm[i], i) = uniform_int(rng, 0, 1) ? 1 : -1;
  M = P;
  if (n < 2) return M;
  for (int k = 0; k < ops; ++k) {
    auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(n) - 1));
    auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(n) - 2));
    if (j >= i) ++j;
    long c = uniform_int(rng, -coef, coef);
    if (c == 0) c = 1;
    // row i += c * row j
    for (std::size_t t = 0; t < n; ++t) M(i, t) += c * M(j, t);
  }
  return M;
}

/// A d x d block with scalar defect exactly g: a conjugate of
/// diag(s, ..., s, [[k, g], [g t, k']]) with k k' - g^2 t = 1 and s = k mod g.
inline auto defect_block(Rng &rng, std::size_t d, long g) -> IntMatrix {
  long k = 0;
  do k = uniform_int(rng, -3 * g, 3 * g);
  while (k == 0 || gcd(Integer(k), Integer(g)) != 1);
  const Integer g2 = Integer(g) * g;
  Integer kp = mod(extended_gcd(Integer(k), g2).a, g2);
  Integer t = (Integer(k) * kp - 1) / g2;
  IntMatrix S = IntMatrix::identity(d);
  // units mod g in {2,3,4,6} square to 1, so k' = k mod g and s = +-1 works
  Integer s = mod(Integer(k), g) == 1 ? 1 : -1;
  for (std::size_t i = 0; i + 2 < d; ++i) S(i, i) = s;
  S(d - 2, d - 2) = k;
  S(d - 2, d - 1) = g;
  S(d - 1, d - 2) = g * t;
  S(d - 1, d - 1) = kp;
  IntMatrix R = random_unimodular(rng, d, 3, 1);
  return R * S * inverse(R);
}

/// Pairs (k_s, m_s) with m_s in [2, bound] and gcd(k_s, m_s) = 1.
inline auto random_coprime_pairs(Rng &rng, std::size_t count, long bound)
    -> std::vector<std::pair<Integer, Integer>> {
  std::vector<std::pair<Integer, Integer>> out;
  while (out.size() < count) {
    Integer m = uniform_int(rng, 2, bound);
    Integer k = uniform_int(rng, -bound, bound);
    if (k != 0 && gcd(k, m) == 1) out.emplace_back(k, m);
  }
  return out;
}

/// Corpus of automorphisms over all three variants. EventuallyUniform items
/// with a nontrivial scalar defect use g in {2, 3, 4, 6}.
inline auto corpus(std::uint64_t seed, std::size_t count) -> std::vector<RepAut> {
  Rng rng(seed);
  std::vector<RepAut> out;
  out.reserve(count);
  const long defects[] = {2, 3, 4, 6};
  while (out.size() < count) {
    long kind = uniform_int(rng, 0, 19);
    if (kind < 4) {
      // finitary
      std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 4));
      std::vector<std::size_t> pool(8);
      for (std::size_t i = 0; i < 8; ++i) pool[i] = i;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::vector<std::size_t> support(pool.begin(), pool.begin() + static_cast<long>(n));
      std::sort(support.begin(), support.end());
      out.push_back(RepAut::finitary(support, random_unimodular(rng, n)));
    } else if (kind < 13) {
      std::size_t d = static_cast<std::size_t>(uniform_int(rng, 1, 3));
      IntMatrix B;
      long flavour = uniform_int(rng, 0, 5);
      if (flavour == 0 || d == 1) {
        B = IntMatrix::identity(d);
        if (uniform_int(rng, 0, 1)) B = -B;
      } else if (flavour <= 2) {
        B = random_unimodular(rng, d);
      } else {
        B = defect_block(rng, d, defects[uniform_int(rng, 0, 3)]);
      }
      std::size_t reps = static_cast<std::size_t>(uniform_int(rng, 0, 2));
      if (reps == 0) out.push_back(RepAut::uniform(B));
      else out.push_back(RepAut::eventually_uniform(random_unimodular(rng, d * reps), B));
    } else {
      std::vector<Integer> prefix;
      long len = uniform_int(rng, 0, 3);
      for (long i = 0; i < len; ++i) prefix.emplace_back(uniform_int(rng, 2, 7));
      std::vector<long> E;
      for (long p : {2L, 3L, 5L, 7L, 11L})
        if (uniform_int(rng, 0, 3) == 0) E.push_back(p);
      long e = uniform_int(rng, -2, 3);
      if (uniform_int(rng, 0, 2) == 0) {
        std::size_t pairs = static_cast<std::size_t>(uniform_int(rng, 1, 2));
        out.push_back(RepAut::graded_with_head(prefix, E, e, random_unimodular(rng, 2 * pairs)));
      } else {
        out.push_back(RepAut::graded(prefix, E, e));
      }
    }
  }
  return out;
}

/// Random word over the given names, depth-bounded.
inline auto random_word(Rng &rng, const std::vector<std::string> &names, int depth) -> Word {
  long pick = depth <= 0 ? 0 : uniform_int(rng, 0, 4);
  auto leaf = [&] { return W(names[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(names.size()) - 1))]); };
  switch (pick) {
  case 1: return Word::inverse(random_word(rng, names, depth - 1));
  case 2: return Word::power(random_word(rng, names, depth - 1), uniform_int(rng, -3, 3));
  case 3: return Word::conj(random_word(rng, names, depth - 1), random_word(rng, names, depth - 1));
  case 4: {
    std::vector<Word> fs;
    long n = uniform_int(rng, 0, 3);
    for (long i = 0; i < n; ++i) fs.push_back(random_word(rng, names, depth - 1));
    return Word::product(fs);
  }
  default: return leaf();
  }
}

} // namespace freeab::sampling
