#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freeab/error.hpp"

namespace freeab {

using Integer = mpz_class;

inline auto gcd(const Integer &a, const Integer &b) -> Integer {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline auto lcm(const Integer &a, const Integer &b) -> Integer {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline auto abs(const Integer &a) -> Integer { return ::abs(a); }

// true iff d divides a; every d divides 0 and 0 divides only 0
inline auto divides(const Integer &d, const Integer &a) -> bool {
  if (d == 0) return a == 0;
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

// floor-mod, result in [0, |m|)
inline auto mod(const Integer &a, const Integer &m) -> Integer {
  Integer r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline auto powm(const Integer &base, const Integer &exp, const Integer &m)
    -> Integer {
  Integer r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

struct ExtendedGcd {
  Integer g, a, b; // a*x + b*y = g >= 0
};

// Iterative extended Euclid; deterministic coefficients.
inline auto extended_gcd(const Integer &x, const Integer &y) -> ExtendedGcd {
  Integer old_r = x, r = y, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), old_r.get_mpz_t(), r.get_mpz_t());
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

inline auto to_string(const Integer &a) -> std::string { return a.get_str(); }

inline auto parse_integer(std::string_view text) -> std::optional<Integer> {
  if (text.empty()) return std::nullopt;
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) return std::nullopt;
  for (std::size_t j = i; j < text.size(); ++j)
    if (text[j] < '0' || text[j] > '9') return std::nullopt;
  Integer v;
  std::string s(text[0] == '+' ? text.substr(1) : text);
  if (v.set_str(s, 10) != 0) return std::nullopt;
  return v;
}

inline auto to_long(const Integer &a) -> long {
  if (!a.fits_slong_p())
    fail(ErrorKind::Argument, "integer " + a.get_str() + " out of range");
  return a.get_si();
}

} // namespace freeab
