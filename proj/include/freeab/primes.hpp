#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "freeab/error.hpp"
#include "freeab/integer.hpp"

namespace freeab {

inline auto is_prime(long n) -> bool {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (long p = 3; p * p <= n; p += 2)
    if (n % p == 0) return false;
  return true;
}

inline auto is_prime(const Integer &n) -> bool {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

inline auto primes_up_to(long bound) -> std::vector<long> {
  std::vector<long> out;
  if (bound < 2) return out;
  std::vector<bool> sieve(static_cast<std::size_t>(bound) + 1, true);
  for (long p = 2; p <= bound; ++p) {
    if (!sieve[p]) continue;
    out.push_back(p);
    for (long q = p * p; q <= bound; q += p) sieve[q] = false;
  }
  return out;
}

/// Prime factorization of |n| by trial division; n != 0.
/// Only used on moduli and small level queries.
inline auto factorize(const Integer &n) -> std::map<Integer, unsigned> {
  if (n == 0) fail(ErrorKind::Argument, "factorization of zero");
  std::map<Integer, unsigned> f;
  Integer m = abs(n);
  for (Integer p = 2; p * p <= m; ++p) {
    while (divides(p, m)) {
      ++f[p];
      m /= p;
    }
  }
  if (m > 1) ++f[m];
  return f;
}

inline auto prime_divisors(const Integer &n) -> std::set<long> {
  std::set<long> out;
  if (n == 0) return out;
  for (const auto &[p, e] : factorize(n)) out.insert(to_long(p));
  return out;
}

inline auto p_valuation(Integer n, long p) -> unsigned {
  if (n == 0) fail(ErrorKind::Argument, "valuation of zero");
  unsigned v = 0;
  while (divides(Integer(p), n)) {
    n /= p;
    ++v;
  }
  return v;
}

inline auto euler_phi(const Integer &m) -> Integer {
  if (m < 1) fail(ErrorKind::Argument, "Euler phi needs m >= 1");
  Integer r = m;
  for (const auto &[p, e] : factorize(m)) r = r / p * (p - 1);
  return r;
}

inline auto divisors(long n) -> std::vector<long> {
  std::vector<long> d;
  for (long k = 1; k * k <= n; ++k)
    if (n % k == 0) {
      d.push_back(k);
      if (k != n / k) d.push_back(n / k);
    }
  std::sort(d.begin(), d.end());
  return d;
}

} // namespace freeab
