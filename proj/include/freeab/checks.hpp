#pragma once

#include <chrono>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freeab/freeab.hpp"
#include "freeab/sampling.hpp"

// Property checks shared by `selftest` and the acceptance runner. Expected
// values are rebuilt here from the defining formulas, not from the code
// under test.
namespace freeab::checks {

struct Result {
  std::string name;
  std::string statement;
  bool ok = true;
  std::string detail;
  double seconds = 0;
  double budget = 0; // seconds; 0 = none
  [[nodiscard]] auto within_budget() const -> bool { return budget <= 0 || seconds < budget; }
  [[nodiscard]] auto passed() const -> bool { return ok && within_budget(); }
};

namespace oracle {

inline auto tau_window(const Integer &c, std::size_t N, std::size_t from = 0) -> IntMatrix {
  IntMatrix M = IntMatrix::identity(N);
  for (std::size_t i = from; i + 1 < N; i += 2) M(i, i + 1) = c;
  return M;
}

// tau^c in the 2d-block layout: y_i at b + i, x_i at b + d + i
inline auto tau_blocks(const Integer &c, std::size_t d, std::size_t N) -> IntMatrix {
  IntMatrix M = IntMatrix::identity(N);
  for (std::size_t b = 0; b + 2 * d <= N; b += 2 * d)
    for (std::size_t i = 0; i < d; ++i) M(b + i, b + d + i) = c;
  return M;
}

inline auto scalar_mod(const IntMatrix &B, const Integer &p) -> bool {
  for (std::size_t i = 0; i < B.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j) {
      Integer want = i == j ? B(0, 0) : Integer(0);
      if (!divides(p, B(i, j) - want)) return false;
    }
  return true;
}

inline auto prime(long n) -> bool {
  if (n < 2) return false;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

// per-pair increments e*P_n past the head, for n < count
inline auto graded_increments(const GradedBlock &g, std::size_t count) -> std::vector<Integer> {
  std::vector<Integer> mult(g.prefix.begin(), g.prefix.end());
  for (long p = 2; mult.size() < count; ++p) {
    if (!prime(p)) continue;
    bool skip = std::find(g.excluded.begin(), g.excluded.end(), p) != g.excluded.end();
    for (const auto &m : g.prefix) skip = skip || divides(Integer(p), m);
    if (!skip) mult.emplace_back(p);
  }
  std::vector<Integer> out;
  Integer acc = 1;
  for (std::size_t n = 0; n < count; ++n) out.push_back(g.exponent * (acc *= mult[n]));
  return out;
}

inline auto lambda(const RepAut &phi, const Integer &m) -> bool {
  if (phi.holds<Finitary>()) return true;
  if (phi.holds<EventuallyUniform>()) return scalar_mod(phi.get<EventuallyUniform>().block.B, m);
  const auto &g = phi.get<GradedBlock>();
  for (const auto &inc : graded_increments(g, g.head_pairs + 80))
    if (divides(m, inc)) return true;
  return false;
}

inline auto almost_radiation(const RepAut &phi) -> bool {
  if (phi.holds<Finitary>()) return true;
  if (phi.holds<EventuallyUniform>()) {
    const IntMatrix &B = phi.get<EventuallyUniform>().block.B;
    const auto I = IntMatrix::identity(B.rows());
    return B == I || B == -I;
  }
  return phi.get<GradedBlock>().exponent == 0;
}

} // namespace oracle

namespace detail {

template <class F>
auto timed(std::string name, std::string statement, double budget, F &&body) -> Result {
  Result r;
  r.name = std::move(name);
  r.statement = std::move(statement);
  r.budget = budget;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception &e) {
    r.ok = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline void refute(Result &r, const std::string &why) {
  if (r.ok) r.detail = why;
  r.ok = false;
}

} // namespace detail

/// order_n_shear against the printed n = 3 matrices and the order/shear contract.
inline auto shear(long n_max = 8, long m_max = 10) -> Result {
  return detail::timed("shear", "an order-n matrix conjugates e_1 to e_1 + m(e_n - e_{n+1})", 1.0,
                       [&](Result &r) {
    long cases = 0;
    for (long m = 2; m <= m_max; ++m) {
      auto t = order_n_shear(3, m);
      IntMatrix lam{{0, -1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
      IntMatrix sig{{0, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
      sig(0, 0) = -m;
      if (!(t.lambda == lam)) detail::refute(r, "lambda differs at m = " + std::to_string(m));
      if (!(t.sigma == sig)) detail::refute(r, "sigma differs at m = " + std::to_string(m));
    }
    for (long n = 2; n <= n_max; ++n)
      for (long m = 2; m <= m_max; ++m) {
        auto t = order_n_shear(n, m);
        const std::size_t rk = 2 * n - 2;
        IntMatrix G = t.gamma, P = IntMatrix::identity(rk);
        std::string at = " (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")";
        for (long j = 1; j <= n; ++j) {
          P = P * G;
          bool id = P == IntMatrix::identity(rk);
          if (j == n && !id) detail::refute(r, "gamma^n != I" + at);
          if (j < n && n % j == 0 && id) detail::refute(r, "gamma^" + std::to_string(j) + " = I" + at);
        }
        IntMatrix e1(rk, 1);
        e1(0, 0) = 1;
        IntMatrix want = e1;
        want(n - 1, 0) += m;
        if (static_cast<std::size_t>(n) < rk) want(n, 0) -= m;
        if (!(G * e1 == want)) detail::refute(r, "gamma e_1 wrong" + at);
        if (!(t.sigma * G == t.lambda * t.sigma)) detail::refute(r, "gamma != sigma^-1 lambda sigma" + at);
        if (!verify_certificate(shear_order_certificate(t)).ok) detail::refute(r, "order certificate" + at);
        ++cases;
      }
    r.detail = r.ok ? std::to_string(cases) + " (n, m) pairs; n = 3 matrices match the printed ones" : r.detail;
  });
}

/// pi rho^-1 tau^-1 rho tau pi fixes X and sends y_i to y_i + x_i - rho x_i.
inline auto zaushko(std::uint64_t seed = 1, int count = 200) -> Result {
  return detail::timed("zaushko", "pi rho^-1 tau^-1 rho tau pi fixes X and sends y to y + x - rho x",
                       5.0, [&](Result &r) {
    sampling::Rng rng(seed);
    for (int it = 0; it < count; ++it) {
      const std::size_t d = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 4));
      IntMatrix rho = sampling::random_unimodular(rng, d);
      auto z = zaushko_commutator(rho);
      for (std::size_t N : {2 * d, 4 * d}) {
        IntMatrix got = evaluate_word(z.word, z.cert.env, N);
        IntMatrix want = IntMatrix::identity(N);
        for (std::size_t b = 0; b < N; b += 2 * d)
          for (std::size_t j = 0; j < d; ++j) // column of y_j
            for (std::size_t i = 0; i < d; ++i)
              want(b + d + i, b + j) = (i == j ? 1 : 0) - rho(i, j);
        if (!(got == want)) detail::refute(r, "case " + std::to_string(it) + " window " + std::to_string(N));
      }
      if (!verify_certificate(z.cert).ok) detail::refute(r, "certificate " + std::to_string(it));
    }
    if (r.ok) r.detail = std::to_string(count) + " random rho, windows 2d and 4d";
  });
}

/// Every even square matrix is the window sum of three automorphisms whose tails cancel.
inline auto wans(std::uint64_t seed = 2, int count = 200) -> Result {
  return detail::timed("wans", "every square matrix is a sum of three automorphisms", 5.0, [&](Result &r) {
    sampling::Rng rng(seed);
    const std::size_t dims[] = {2, 4, 6};
    for (int it = 0; it < count; ++it) {
      const std::size_t d = dims[sampling::uniform_int(rng, 0, 2)];
      IntMatrix f = sampling::random_matrix(rng, d, d, -9, 9);
      auto w = wans_three(f);
      IntMatrix sum(d, d), tails(2, 2);
      for (std::size_t k = 0; k < 3; ++k) {
        const auto &eu = w.sigma[k].get<EventuallyUniform>();
        sum = sum + eu.M_window;
        tails = tails + eu.block.B;
        if (!(eu.M_window * eu.M_window_inv == IntMatrix::identity(d)) ||
            !(eu.M_window_inv * eu.M_window == IntMatrix::identity(d)) ||
            !(eu.block.B * eu.block.B_inv == IntMatrix::identity(2)))
          detail::refute(r, "inverse witness fails, case " + std::to_string(it));
      }
      if (!(sum == f)) detail::refute(r, "window sum != f, case " + std::to_string(it));
      if (!tails.is_zero()) detail::refute(r, "tail sum != 0, case " + std::to_string(it));
    }
    if (r.ok) r.detail = std::to_string(count) + " random f, d in {2,4,6}";
  });
}

/// beta = [[I, mZ], [0, I]] is a product of exactly three conjugates of tau^m.
inline auto three_conjugates(std::uint64_t seed = 3, int count = 100) -> Result {
  return detail::timed("three-conjugates", "a block-unitriangular beta in Gamma(m) is a product of three conjugates of tau^m",
                       10.0, [&](Result &r) {
    sampling::Rng rng(seed);
    const long ms[] = {2, 3, 4, 6};
    for (int it = 0; it < count; ++it) {
      const long m = ms[it % 4];
      const std::size_t d = sampling::uniform_int(rng, 0, 1) ? 4 : 2;
      IntMatrix Z = sampling::random_matrix(rng, d, d, -5, 5);
      auto f = factor_block_unitriangular(m, Z);
      std::string at = " (case " + std::to_string(it) + ")";
      // shape: a product of three Conj(tau_m, s_k), tau_m bound to tau^m
      const auto *prod = std::get_if<Product>(&f.word.node().v);
      bool shaped = prod && prod->factors.size() == 3;
      for (std::size_t k = 0; shaped && k < 3; ++k) {
        const auto *c = std::get_if<Conj>(&prod->factors[k].node().v);
        const auto *g = c ? std::get_if<Named>(&c->g.node().v) : nullptr;
        shaped = g && f.cert.env.count(g->id) &&
                 window_matrix(f.cert.env.at(g->id), 4 * d) == oracle::tau_blocks(m, d, 4 * d);
      }
      if (!shaped) detail::refute(r, "word is not three conjugates of tau^m" + at);
      for (std::size_t N : {2 * d, 4 * d}) {
        IntMatrix want = IntMatrix::identity(N);
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) want(i, d + j) = m * Z(i, j);
        if (!(evaluate_word(f.word, f.cert.env, N) == want))
          detail::refute(r, "word != beta on window " + std::to_string(N) + at);
      }
      for (const auto &fac : f.factors) {
        IntMatrix D = window_matrix(fac, 4 * d) - IntMatrix::identity(4 * d);
        for (std::size_t i = 0; i < 4 * d; ++i)
          for (std::size_t j = 0; j < 4 * d; ++j)
            if (!divides(Integer(m), D(i, j))) detail::refute(r, "factor not in Gamma(m)" + at);
        if (!divides(Integer(m), congruence_gcd(fac))) detail::refute(r, "congruence gcd not a multiple of m" + at);
      }
    }
    if (r.ok) r.detail = std::to_string(count) + " random Z, m in {2,3,4,6}";
  });
}

/// Normal generators are exactly the non-almost-radiations outside every Lambda(m).
inline auto dichotomy(std::uint64_t seed = 4, std::size_t count = 500) -> Result {
  return detail::timed("dichotomy", "phi normally generates iff it is not an almost-radiation and lies in no Lambda(m)",
                       10.0, [&](Result &r) {
    auto corpus = sampling::corpus(seed, count);
    std::size_t gens = 0, defects = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto &phi = corpus[i];
      std::string at = " (item " + std::to_string(i) + ", " + phi.kind_name() + ")";
      bool gen = is_normal_generator(phi).generator;
      bool ar = is_almost_radiation(phi);
      bool lam = false;
      for (long m = 2; m <= 60; ++m) {
        bool member = lambda_member(phi, m);
        if (member != oracle::lambda(phi, m))
          detail::refute(r, "Lambda(" + std::to_string(m) + ") membership disagrees with the rule" + at);
        lam = lam || member;
      }
      if (ar != oracle::almost_radiation(phi)) detail::refute(r, "almost-radiation flag" + at);
      if (gen != (!ar && !lam)) detail::refute(r, "dichotomy fails" + at);
      gens += gen;
      if (phi.holds<EventuallyUniform>()) {
        const IntMatrix &B = phi.get<EventuallyUniform>().block.B;
        Integer g = scalar_defect(B);
        for (long p = 2; p <= 50; ++p) {
          if (!oracle::prime(p)) continue;
          if (divides(Integer(p), g) != oracle::scalar_mod(B, p))
            detail::refute(r, "scalar defect vs B mod " + std::to_string(p) + at);
        }
        ++defects;
      }
    }
    if (r.ok)
      r.detail = std::to_string(count) + " items, " + std::to_string(gens) + " generators, " +
                 std::to_string(defects) + " scalar defects checked against primes <= 50";
  });
}

/// gcd of the conjugate-product coefficients equals gcd of the m_s.
inline auto gcd_identity(std::uint64_t seed = 5, int count = 500) -> Result {
  return detail::timed("gcd-identity", "the product of conjugates has x-shift gcd equal to gcd(m_1, ..., m_l)",
                       2.0, [&](Result &r) {
    sampling::Rng rng(seed);
    for (int it = 0; it < count; ++it) {
      auto l = static_cast<std::size_t>(sampling::uniform_int(rng, 1, 5));
      auto pairs = sampling::random_coprime_pairs(rng, l, 30);
      auto red = conjugate_product_reduce(pairs);
      // apply the factors right to left: x -> k x + m y_s on the running x-coefficient
      Integer a = 1;
      std::vector<Integer> b(l);
      for (std::size_t s = l; s-- > 0;) {
        b[s] = a * pairs[s].second;
        a *= pairs[s].first;
      }
      Integer gb = 0, gm = 0;
      for (std::size_t s = 0; s < l; ++s) {
        gb = gcd(gb, b[s]);
        gm = gcd(gm, pairs[s].second);
      }
      if (red.coefficients != b) detail::refute(r, "coefficients differ, case " + std::to_string(it));
      if (gb != gm || red.m != gm) detail::refute(r, "gcd identity fails, case " + std::to_string(it));
      if (red.k != a) detail::refute(r, "x coefficient differs, case " + std::to_string(it));
    }
    if (r.ok) r.detail = std::to_string(count) + " coprime tuples";
  });
}

/// (tau^{m n1})^a (tau^{m n2})^b = tau^m for coprime n1, n2.
inline auto bezout(long n_max = 12, long m_max = 6) -> Result {
  return detail::timed("bezout", "coprime powers tau^{m n1}, tau^{m n2} combine to tau^m", 2.0, [&](Result &r) {
    long cases = 0;
    for (long n1 = 2; n1 <= n_max; ++n1)
      for (long n2 = 2; n2 <= n_max; ++n2) {
        if (std::gcd(n1, n2) != 1) continue;
        for (long m = 1; m <= m_max; ++m) {
          auto bz = bezout_combine(m, n1, n2);
          std::string at = " (m=" + std::to_string(m) + ", n=" + std::to_string(n1) + "," + std::to_string(n2) + ")";
          for (const auto &[name, val] : bz.cert.env) {
            IntMatrix w = window_matrix(val, 4);
            if (!(w == oracle::tau_window(m * n1, 4)) && !(w == oracle::tau_window(m * n2, 4)))
              detail::refute(r, "'" + name + "' is not tau^{m n_i}" + at);
          }
          if (!(evaluate_word(bz.word, bz.cert.env, 4) == oracle::tau_window(m, 4)))
            detail::refute(r, "word != tau^m on window 4" + at);
          ++cases;
        }
      }
    if (r.ok) r.detail = std::to_string(cases) + " (m, n1, n2) triples";
  });
}

/// Rung(g) with certified evidence for block-uniform phi; "no maximal level"
/// exactly for rule-based graded levels.
inline auto ladder(std::uint64_t seed = 4, std::size_t count = 500) -> Result {
  return detail::timed("ladder", "Gamma(g) <= nc(phi) <= Lambda(g) for g the scalar defect", 5.0, [&](Result &r) {
    auto corpus = sampling::corpus(seed, count);
    std::size_t rungs = 0, graded = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto &phi = corpus[i];
      std::string at = " (item " + std::to_string(i) + ")";
      if (phi.holds<EventuallyUniform>()) {
        Integer g = scalar_defect(phi.get<EventuallyUniform>().block.B);
        if (g < 2) continue;
        auto rep = ladder_report(phi);
        if (rep.kind != LadderReport::Kind::Rung || rep.rung != g) {
          detail::refute(r, "report is not Rung(" + g.get_str() + ")" + at);
          continue;
        }
        if (!rep.evidence || !rep.evidence_verified || !(rep.evidence->input == phi)) {
          detail::refute(r, "evidence missing or unverified" + at);
          continue;
        }
        const RepAut &t = rep.evidence->target;
        std::size_t lead = t.holds<EventuallyUniform>() ? t.get<EventuallyUniform>().window : 0;
        if (lead % 2 || !(window_matrix(t, lead + 8) == oracle::tau_window(g, lead + 8, lead)))
          detail::refute(r, "chain target is not tau^g past a finite window" + at);
        if (!explicit_lambda_check(phi, g)) detail::refute(r, "explicit Lambda(g) check fails" + at);
        ++rungs;
      } else if (phi.holds<GradedBlock>()) {
        auto rep = ladder_report(phi);
        const auto &gb = phi.get<GradedBlock>();
        // the level set is unbounded when the increments keep growing
        bool unbounded = false;
        if (gb.exponent != 0) {
          auto inc = oracle::graded_increments(gb, gb.head_pairs + 12);
          unbounded = abs(inc.back()) > abs(inc[gb.head_pairs]) && oracle::lambda(phi, inc.back());
        }
        bool says = rep.kind == LadderReport::Kind::NoMaximalLevel &&
                    rep.annotation.find("no maximal level") != std::string::npos;
        if (says != unbounded) detail::refute(r, "no-maximal-level statement disagrees" + at);
        ++graded;
      }
    }
    if (r.ok)
      r.detail = std::to_string(rungs) + " rungs certified, " + std::to_string(graded) + " graded reports";
  });
}

/// phi_p = graded((), {p}) lies in Lambda(2) and Lambda(q).
inline auto counterexample(const std::vector<long> &primes = {3, 5}, long q = 7) -> Result {
  return detail::timed("counterexample", "finitely many phi_p lie in Lambda(2) and Lambda(q), so Gamma(2) is not reached",
                       1.0, [&](Result &r) {
    auto rep = counterexample_demo(primes, q);
    for (const auto &l : rep.lines)
      if (!l.member || !l.explicit_ok || !oracle::lambda(graded_construct({}, {l.p}), l.level))
        detail::refute(r, "phi_" + std::to_string(l.p) + " not in Lambda(" + l.level.get_str() + ")");
    if (!rep.all_verified) detail::refute(r, "report not verified");
    if (r.ok) r.detail = std::to_string(rep.lines.size()) + " memberships";
  });
}

namespace detail {

inline auto sample_certificate(sampling::Rng &rng) -> Certificate {
  switch (sampling::uniform_int(rng, 0, 4)) {
  case 0: return shear_order_certificate(order_n_shear(sampling::uniform_int(rng, 2, 6), sampling::uniform_int(rng, 2, 9)));
  case 1: return zaushko_commutator(sampling::random_unimodular(rng, static_cast<std::size_t>(sampling::uniform_int(rng, 1, 3)))).cert;
  case 2: return bezout_combine(sampling::uniform_int(rng, 1, 6), 2, 3).cert;
  case 3: {
    auto Z = sampling::random_matrix(rng, 2, 2, -4, 4);
    return factor_block_unitriangular(sampling::uniform_int(rng, 2, 6), Z).cert;
  }
  default: {
    Certificate c;
    c.label = "action " + std::to_string(sampling::uniform_int(rng, 0, 999));
    c.claim = ClaimKind::ActionOnVector;
    auto corpus = sampling::corpus(rng(), 2);
    c.env = {{"a", corpus[0]}, {"b", corpus[1]}};
    c.word = sampling::random_word(rng, {"a", "b"}, 2);
    c.windows = {12};
    c.vectors = sampling::random_matrix(rng, 4, 2, -3, 3);
    c.images = sampling::random_matrix(rng, 4, 2, -3, 3);
    return c;
  }
  }
}

} // namespace detail

/// parse(serialize(x)) == x and serialize is byte-stable.
inline auto serialization(std::uint64_t seed = 6, int count = 1000) -> Result {
  return detail::timed("serialization", "aut, word and certificate files round-trip exactly", 5.0, [&](Result &r) {
    sampling::Rng rng(seed);
    auto check = [&](const auto &x, auto ser, auto parse, const std::string &what) {
      std::string text = ser(x);
      auto y = parse(text);
      if (!(y == x)) detail::refute(r, what + " not structurally equal after round-trip");
      if (ser(y) != text) detail::refute(r, what + " re-serialization differs");
      if (ser(x) != text) detail::refute(r, what + " serialization is not deterministic");
    };
    for (int it = 0; it < count; ++it) {
      switch (it % 3) {
      case 0: {
        auto phi = sampling::corpus(rng(), 1)[0];
        check(phi, serialize_aut, parse_aut, "aut");
        break;
      }
      case 1: {
        auto c = sampling::corpus(rng(), 3);
        WordDocument d{sampling::random_word(rng, {"f", "g", "h"}, 3), {{"f", c[0]}, {"g", c[1]}, {"h", c[2]}}};
        check(d, serialize_word, parse_word, "word");
        break;
      }
      default:
        check(detail::sample_certificate(rng), serialize_certificate, parse_certificate, "certificate");
      }
    }
    if (r.ok) r.detail = std::to_string(count) + " round-trips";
  });
}

/// The suite at the given scale (1 = full).
inline auto all(std::uint64_t seed, double scale = 1.0) -> std::vector<Result> {
  auto n = [&](int full) { return std::max(1, static_cast<int>(full * scale)); };
  return {shear(),
          zaushko(seed + 1, n(200)),
          wans(seed + 2, n(200)),
          three_conjugates(seed + 3, n(100)),
          dichotomy(seed + 4, static_cast<std::size_t>(n(500))),
          gcd_identity(seed + 5, n(500)),
          bezout(),
          ladder(seed + 4, static_cast<std::size_t>(n(500))),
          counterexample(),
          serialization(seed + 6, n(1000))};
}

} // namespace freeab::checks
