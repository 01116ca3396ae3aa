#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/integer.hpp"
#include "freeab/linalg.hpp"
#include "freeab/matrix.hpp"
#include "freeab/primes.hpp"

namespace freeab {

/// gcd of all entries of (phi - id); phi lies in Gamma(m) iff m | result.
inline auto congruence_gcd(const RepAut &phi) -> Integer {
  auto defect = [](const IntMatrix &M) {
    return M.rows() ? (M - IntMatrix::identity(M.rows())).content() : Integer(0);
  };
  if (phi.holds<Finitary>()) return defect(phi.get<Finitary>().M);
  if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    return gcd(defect(e.M_window), defect(e.block.B));
  }
  // blocks past the head carry e*P_n, and P_h divides every later P_n
  const auto &g = phi.get<GradedBlock>();
  Integer first = abs(g.exponent) * g.products(g.head_pairs + 1).back();
  return gcd(defect(g.head), first);
}

/// Largest modulus making B scalar: gcd of off-diagonal entries and
/// diagonal differences. 0 iff B is scalar.
inline auto scalar_defect(const IntMatrix &B) -> Integer {
  if (!B.is_square()) fail(ErrorKind::Dimension, "scalar defect of " + B.shape() + " matrix");
  Integer g = 0;
  for (std::size_t i = 0; i < B.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j)
      if (i != j) g = gcd(g, B(i, j));
  for (std::size_t i = 1; i < B.rows(); ++i) g = gcd(g, B(i, i) - B(0, 0));
  return g;
}

/// The set {m >= 2 : phi in Lambda(m)}.
struct LambdaLevels {
  enum class Kind { AllLevels, DivisorsOf, OnlyTrivial, RuleBased };
  Kind kind = Kind::AllLevels;
  Integer g;                    // DivisorsOf
  Integer base;                 // RuleBased: |e| * prefix product
  std::optional<GradedBlock> rule; // RuleBased: supplies the tail primes

  // m >= 1; every automorphism lies in Lambda(1)
  [[nodiscard]] auto contains(const Integer &m) const -> bool {
    if (m < 1) fail(ErrorKind::Argument, "level must be >= 1");
    if (m == 1) return true;
    switch (kind) {
    case Kind::AllLevels: return true;
    case Kind::OnlyTrivial: return false;
    case Kind::DivisorsOf: return divides(m, g);
    case Kind::RuleBased:
      // each p^a || m needs a <= v_p(base) + [p is a tail prime]
      for (const auto &[p, a] : factorize(m)) {
        unsigned have = p_valuation(base, to_long(p));
        if (p.fits_slong_p() && rule->is_tail_prime(p.get_si())) ++have;
        if (a > have) return false;
      }
      return true;
    }
    return false;
  }

  [[nodiscard]] auto describe() const -> std::string {
    switch (kind) {
    case Kind::AllLevels: return "all levels";
    case Kind::OnlyTrivial: return "only trivial";
    case Kind::DivisorsOf: return "divisors of " + g.get_str();
    case Kind::RuleBased: {
      std::string s = "rule: m | " + base.get_str() + " * (distinct tail primes)";
      if (!rule->excluded.empty()) {
        s += ", tail excludes {";
        for (std::size_t i = 0; i < rule->excluded.size(); ++i)
          s += (i ? "," : "") + std::to_string(rule->excluded[i]);
        s += "}";
      }
      return s;
    }
    }
    return "?";
  }
};

inline auto lambda_levels(const RepAut &phi) -> LambdaLevels {
  using K = LambdaLevels::Kind;
  if (phi.holds<Finitary>()) return {K::AllLevels, 0, 0, std::nullopt};
  if (phi.holds<EventuallyUniform>()) {
    Integer g = scalar_defect(phi.get<EventuallyUniform>().block.B);
    if (g == 0) return {K::AllLevels, 0, 0, std::nullopt};
    if (g == 1) return {K::OnlyTrivial, 0, 0, std::nullopt};
    return {K::DivisorsOf, g, 0, std::nullopt};
  }
  const auto &gb = phi.get<GradedBlock>();
  if (gb.exponent == 0) return {K::AllLevels, 0, 0, std::nullopt};
  return {K::RuleBased, 0, abs(gb.exponent) * gb.prefix_product(), gb};
}

inline auto lambda_member(const RepAut &phi, const Integer &m) -> bool {
  return lambda_levels(phi).contains(m);
}

inline auto is_almost_radiation(const RepAut &phi) -> bool {
  if (phi.holds<Finitary>()) return true;
  if (phi.holds<EventuallyUniform>()) {
    const auto &B = phi.get<EventuallyUniform>().block.B;
    return B.is_identity() || (-B).is_identity();
  }
  return phi.get<GradedBlock>().exponent == 0;
}

struct GeneratorVerdict {
  bool generator = false;
  bool almost_radiation = false;
  std::optional<Integer> modulus; // some m >= 2 with phi in Lambda(m)
  std::optional<IntMatrix> witness; // columns w, phi(w) on one or two blocks
  std::string evidence;
};

namespace detail {

// Unit vectors first, then the box [-r, r]^n by increasing r.
template <class F> auto search_box(std::size_t n, int radius, F &&accept) -> std::optional<IntMatrix> {
  for (std::size_t i = 0; i < n; ++i) {
    IntMatrix w = IntMatrix::unit(n, i);
    if (accept(w)) return w;
  }
  std::vector<int> v(n);
  for (int r = 1; r <= radius; ++r) {
    std::fill(v.begin(), v.end(), -r);
    while (true) {
      int mx = 0;
      for (int x : v) mx = std::max(mx, x < 0 ? -x : x);
      if (mx == r) {
        IntMatrix w(n, 1);
        for (std::size_t i = 0; i < n; ++i) w(i, 0) = v[i];
        if (accept(w)) return w;
      }
      std::size_t k = 0;
      while (k < n && v[k] == r) v[k++] = -r;
      if (k == n) break;
      ++v[k];
    }
  }
  return std::nullopt;
}

} // namespace detail

/// Search w with {w, Bw} unimodular: one block, coefficients in [-3,3];
/// then two adjacent blocks when that box stays small (2d <= 4).
inline auto moietous_witness(const IntMatrix &B) -> std::optional<IntMatrix> {
  auto try_block = [](const IntMatrix &C) {
    return detail::search_box(C.rows(), 3, [&](const IntMatrix &w) {
      return C.rows() >= 2 && is_unimodular_set(hcat(w, C * w));
    });
  };
  if (auto w = try_block(B)) return hcat(*w, B * *w);
  if (2 * B.rows() <= 4) {
    IntMatrix B2 = repeat_diag(B, 2);
    if (auto w = try_block(B2)) return hcat(*w, B2 * *w);
  }
  return std::nullopt;
}

inline auto is_normal_generator(const RepAut &phi) -> GeneratorVerdict {
  GeneratorVerdict v;
  v.almost_radiation = is_almost_radiation(phi);
  auto levels = lambda_levels(phi);
  using K = LambdaLevels::Kind;
  v.generator = levels.kind == K::OnlyTrivial;
  if (v.generator) {
    v.witness = moietous_witness(phi.get<EventuallyUniform>().block.B);
    v.evidence = v.witness ? "unimodular pair {w, phi w} on the repeated block"
                           : "dichotomy only (no witness in the search box)";
    return v;
  }
  if (v.almost_radiation) {
    v.evidence = "almost-radiation";
    return v;
  }
  if (levels.kind == K::DivisorsOf) v.modulus = levels.g;
  else if (levels.kind == K::RuleBased) {
    // first tail prime is always a level
    v.modulus = levels.base > 1 ? levels.base : Integer(levels.rule->tail_primes(1)[0]);
  } else v.modulus = 2;
  v.evidence = "member of Lambda(" + v.modulus->get_str() + ")";
  return v;
}

/// Prime sets: Finite(S) | AllPrimes | AllExcept(E) | UnionWithPrefix(S, E).
struct PrimeSet {
  enum class Kind { Finite, AllPrimes, AllExcept, UnionWithPrefix };
  Kind kind = Kind::Finite;
  std::set<long> finite, except;

  static auto finite_set(std::set<long> s) -> PrimeSet { return {Kind::Finite, std::move(s), {}}; }
  static auto all_primes() -> PrimeSet { return {Kind::AllPrimes, {}, {}}; }
  static auto all_except(std::set<long> e) -> PrimeSet { return {Kind::AllExcept, {}, std::move(e)}; }
  static auto union_with_prefix(std::set<long> s, std::set<long> e) -> PrimeSet {
    return {Kind::UnionWithPrefix, std::move(s), std::move(e)};
  }

  [[nodiscard]] auto contains(long p) const -> bool {
    if (!is_prime(p)) return false;
    switch (kind) {
    case Kind::Finite: return finite.count(p) > 0;
    case Kind::AllPrimes: return true;
    case Kind::AllExcept: return except.count(p) == 0;
    case Kind::UnionWithPrefix: return finite.count(p) > 0 || except.count(p) == 0;
    }
    return false;
  }

  [[nodiscard]] auto cofinite() const -> bool { return kind != Kind::Finite; }

  // Normal form: (cofinite?, S) where S is the set itself or its complement.
  [[nodiscard]] auto normal_form() const -> std::pair<bool, std::set<long>> {
    switch (kind) {
    case Kind::Finite: return {false, finite};
    case Kind::AllPrimes: return {true, {}};
    case Kind::AllExcept: return {true, except};
    case Kind::UnionWithPrefix: {
      std::set<long> e;
      for (long p : except)
        if (!finite.count(p)) e.insert(p);
      return {true, e};
    }
    }
    return {false, {}};
  }

  [[nodiscard]] auto same_set(const PrimeSet &o) const -> bool {
    return normal_form() == o.normal_form();
  }

  friend auto operator==(const PrimeSet &, const PrimeSet &) -> bool = default;

  [[nodiscard]] auto describe() const -> std::string {
    auto list = [](const std::set<long> &s) {
      std::string out = "{";
      bool first = true;
      for (long p : s) {
        out += (first ? "" : ",") + std::to_string(p);
        first = false;
      }
      return out + "}";
    };
    switch (kind) {
    case Kind::Finite: return list(finite);
    case Kind::AllPrimes: return "all primes";
    case Kind::AllExcept: return "all primes except " + list(except);
    case Kind::UnionWithPrefix: return list(finite) + " + all primes except " + list(except);
    }
    return "?";
  }
};

/// nu(phi) = {p : phi in Lambda(p)}.
inline auto nu_set(const RepAut &phi) -> PrimeSet {
  auto lv = lambda_levels(phi);
  using K = LambdaLevels::Kind;
  switch (lv.kind) {
  case K::AllLevels: return PrimeSet::all_primes();
  case K::OnlyTrivial: return PrimeSet::finite_set({});
  case K::DivisorsOf: return PrimeSet::finite_set(prime_divisors(lv.g));
  case K::RuleBased: {
    // tail primes are everything outside E except primes of the prefix,
    // and those divide the base anyway
    std::set<long> e(lv.rule->excluded.begin(), lv.rule->excluded.end());
    if (lv.rule->prefix.empty() && lv.base == 1) return PrimeSet::all_except(e);
    return PrimeSet::union_with_prefix(prime_divisors(lv.base), e);
  }
  }
  return PrimeSet::finite_set({});
}

struct CommonLevel {
  enum class Kind { None, AllLevels, Level };
  Kind kind = Kind::None;
  Integer m;
  std::optional<Integer> search_bound; // set when rule-based operands were searched
  std::string note;
};

/// Largest m >= 2 with every phi_i in Lambda(m).
inline auto common_lambda_level(const std::vector<RepAut> &phis, long horizon = 50) -> CommonLevel {
  if (phis.empty()) fail(ErrorKind::Argument, "common level of an empty list");
  using K = LambdaLevels::Kind;
  std::vector<LambdaLevels> rules;
  std::optional<Integer> g;
  for (const auto &phi : phis) {
    auto lv = lambda_levels(phi);
    if (lv.kind == K::OnlyTrivial) return {CommonLevel::Kind::None, 0, std::nullopt, "a normal generator is present"};
    if (lv.kind == K::DivisorsOf) g = g ? gcd(*g, lv.g) : lv.g;
    if (lv.kind == K::RuleBased) rules.push_back(lv);
  }
  auto all_rules = [&](const Integer &m) {
    return std::all_of(rules.begin(), rules.end(), [&](const auto &r) { return r.contains(m); });
  };
  if (g) {
    std::vector<long> ds = divisors(to_long(*g));
    for (auto it = ds.rbegin(); it != ds.rend(); ++it)
      if (*it >= 2 && all_rules(*it)) return {CommonLevel::Kind::Level, *it, std::nullopt, ""};
    return {CommonLevel::Kind::None, 0, std::nullopt, "no common divisor >= 2"};
  }
  if (rules.empty()) return {CommonLevel::Kind::AllLevels, 0, std::nullopt, "every level"};
  Integer bound = primes_up_to(horizon).back();
  for (const auto &r : rules) bound *= r.base;
  for (Integer m = bound; m >= 2; --m)
    if (all_rules(m))
      return {CommonLevel::Kind::Level, m, bound, "largest common level up to the search bound"};
  return {CommonLevel::Kind::None, 0, bound, "no common level up to the search bound"};
}

/// Explicit finite check that phi acts as a scalar k mod m on a summand
/// past every finite part: the tail coordinates [t, t + span) are mapped
/// into themselves and the restriction is k*I mod m. Returns k.
inline auto explicit_lambda_check(const RepAut &phi, const Integer &m) -> std::optional<Integer> {
  std::size_t t = 0, span = 0;
  if (phi.holds<Finitary>()) {
    const auto &f = phi.get<Finitary>();
    t = f.support.empty() ? 0 : f.support.back() + 1;
    span = 2;
  } else if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    t = e.window;
    span = 2 * e.block.d;
  } else {
    const auto &gb = phi.get<GradedBlock>();
    // first pair index past the head whose increment m divides
    std::size_t n = gb.head_pairs;
    const std::size_t limit = gb.head_pairs + gb.prefix.size() + 64;
    auto P = gb.products(limit);
    while (n < limit && !divides(m, gb.exponent * P[n])) ++n;
    if (n == limit) return std::nullopt;
    t = 2 * n;
    span = 4;
  }
  IntMatrix W = window_matrix(phi, t + span);
  Integer k = mod(W(t, t), m);
  for (std::size_t j = t; j < t + span; ++j)
    for (std::size_t i = 0; i < t + span; ++i) {
      bool inside = i >= t;
      if (!inside && W(i, j) != 0) return std::nullopt;
      if (inside && !divides(m, W(i, j) - (i == j ? k : Integer(0)))) return std::nullopt;
    }
  return k;
}

} // namespace freeab
