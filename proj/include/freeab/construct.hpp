#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/certificate.hpp"
#include "freeab/classify.hpp"
#include "freeab/error.hpp"
#include "freeab/integer.hpp"
#include "freeab/linalg.hpp"
#include "freeab/matrix.hpp"
#include "freeab/primes.hpp"
#include "freeab/word.hpp"

namespace freeab {

/// Uniform shear x -> x + m y on every pair (y at 2i, x at 2i+1).
inline auto tau_power(const Integer &m) -> RepAut {
  IntMatrix B = IntMatrix::identity(2);
  B(0, 1) = m;
  return RepAut::uniform(B);
}

namespace detail {

inline auto swap_matrix(std::size_t n, std::size_t i, std::size_t j) -> IntMatrix {
  IntMatrix P = IntMatrix::identity(n);
  P(i, i) = P(j, j) = 0;
  P(i, j) = P(j, i) = 1;
  return P;
}

// [[I, top_right], [0, I]] and friends for 2d-blocks (Y-half first)
inline auto upper_block(const IntMatrix &R) -> IntMatrix {
  const std::size_t d = R.rows();
  IntMatrix M = IntMatrix::identity(2 * d);
  M.set_block(0, d, R);
  return M;
}

inline auto window_identity(std::string label, Word w, Environment env, RepAut target,
                            std::vector<std::size_t> windows) -> Certificate {
  Certificate c;
  c.label = std::move(label);
  c.claim = ClaimKind::WindowIdentity;
  c.word = std::move(w);
  c.env = std::move(env);
  c.windows = std::move(windows);
  c.target_aut = std::move(target);
  return c;
}

inline void require_verified(const Certificate &c) {
  auto r = verify_certificate(c);
  if (!r.ok) fail(ErrorKind::Validation, "internal certificate '" + c.label + "' failed: " + r.failure);
}

} // namespace detail

// ---- order-n shear ------------------------------------------------------------

struct ShearTriple {
  long n = 0;
  Integer m;
  IntMatrix lambda, sigma, gamma;
};

/// Checks the shear contract; returns a description of the first failure.
inline auto shear_violation(const ShearTriple &t) -> std::optional<std::string> {
  const std::size_t r = t.gamma.rows();
  if (r != static_cast<std::size_t>(2 * t.n - 2)) return "gamma has rank " + std::to_string(r);
  IntMatrix I = IntMatrix::identity(r);
  if (!(matrix_power(t.gamma, t.n) == I)) return "gamma^n != I";
  for (long j : divisors(t.n))
    if (j < t.n && matrix_power(t.gamma, j) == I)
      return "gamma^" + std::to_string(j) + " = I";
  // gamma e_1 = e_1 + m (e_n - e_{n+1}), 1-based; e_{n+1} absent when n = 2
  IntMatrix want = IntMatrix::unit(r, 0);
  want(t.n - 1, 0) += t.m;
  if (static_cast<std::size_t>(t.n) < r) want(t.n, 0) -= t.m;
  if (!(t.gamma.col(0) == want)) return "gamma e_1 has the wrong image";
  if (!(t.sigma * t.gamma == t.lambda * t.sigma)) return "gamma != sigma^-1 lambda sigma";
  // lambda stabilizes sigma<e_i : i > 1>  <=>  gamma fixes <e_i : i > 1>
  for (std::size_t j = 1; j < r; ++j)
    if (t.gamma(0, j) != 0) return "lambda does not stabilize sigma<e_i : i > 1>";
  return std::nullopt;
}

/// gamma = sigma^-1 lambda sigma of order n with gamma e_1 = e_1 + m(e_n - e_{n+1}).
inline auto order_n_shear(long n, const Integer &m) -> ShearTriple {
  if (n < 2) fail(ErrorKind::Argument, "shear order must be >= 2");
  if (m < 2) fail(ErrorKind::Argument, "shear modulus must be >= 2");
  ShearTriple t{n, m, {}, {}, {}};
  if (n == 2) {
    // rank 2: gamma = [[1,0],[m,-1]]
    IntMatrix sigma_inv;
    if (divides(2, m)) {
      t.lambda = IntMatrix{{1, 0}, {0, -1}};
      sigma_inv = IntMatrix{{1, 0}, {0, 1}};
      sigma_inv(1, 0) = m / 2;
    } else {
      t.lambda = IntMatrix{{0, 1}, {1, 0}};
      sigma_inv = IntMatrix{{1, 1}, {0, 0}};
      sigma_inv(1, 0) = (m + 1) / 2;
      sigma_inv(1, 1) = (m - 1) / 2;
    }
    t.sigma = inverse(sigma_inv);
    t.gamma = sigma_inv * t.lambda * t.sigma;
  } else {
    const std::size_t r = 2 * n - 2, h = n - 1; // 0-based: e_i -> index i-1
    t.lambda = IntMatrix::identity(r);
    for (std::size_t i = 0; i < h; ++i) t.lambda(i, i) = 0;
    for (std::size_t i = 0; i + 1 < h; ++i) t.lambda(i + 1, i) = 1;
    for (std::size_t i = 0; i < h; ++i) t.lambda(i, h - 1) = -1;
    t.sigma = IntMatrix(r, r);
    t.sigma(0, 0) = -m;
    t.sigma(h, 0) = 1;
    for (std::size_t i = 1; i < h; ++i) {
      t.sigma(i, i) = 1;
      t.sigma(i + h, i) = 1;
    }
    for (std::size_t i = h; i < r; ++i) t.sigma(i - h, i) = 1;
    t.gamma = inverse(t.sigma) * t.lambda * t.sigma;
  }
  if (auto bad = shear_violation(t)) fail(ErrorKind::Validation, "order_n_shear: " + *bad);
  return t;
}

/// Order certificate for gamma, as a finitary automorphism.
inline auto shear_order_certificate(const ShearTriple &t) -> Certificate {
  const std::size_t r = t.gamma.rows();
  std::vector<std::size_t> support(r);
  for (std::size_t i = 0; i < r; ++i) support[i] = i;
  Certificate c;
  c.label = "gamma has order " + std::to_string(t.n);
  c.claim = ClaimKind::Order;
  c.word = W("gamma");
  c.env = {{"gamma", RepAut::finitary(support, t.gamma)}};
  c.windows = {r, 2 * r};
  c.order = t.n;
  return c;
}

// ---- commutator acting identically on X ----------------------------------------

struct ZaushkoResult {
  RepAut sigma;
  Word word;
  Certificate cert;
};

/// sigma = pi rho^-1 tau^-1 rho tau pi on 2d-blocks (Y-half first): fixes X and
/// sends y -> y + x - rho x.
inline auto zaushko_commutator(const IntMatrix &rho_X) -> ZaushkoResult {
  if (!rho_X.is_square() || !is_unimodular(rho_X))
    fail(ErrorKind::Argument, "rho_X must be a unimodular square matrix");
  const std::size_t d = rho_X.rows();
  IntMatrix I = IntMatrix::identity(d);
  IntMatrix pi(2 * d, 2 * d);
  pi.set_block(0, d, I);
  pi.set_block(d, 0, I);
  Environment env{{"pi", RepAut::uniform(pi)},
                  {"rho", RepAut::uniform(block_diag({I, rho_X}))},
                  {"tau", RepAut::uniform(detail::upper_block(I))}};
  Word w = Word::product({W("pi"), Word::inverse(W("rho")), Word::inverse(W("tau")), W("rho"),
                          W("tau"), W("pi")});
  IntMatrix S = IntMatrix::identity(2 * d);
  S.set_block(d, 0, I - rho_X);
  RepAut sigma = RepAut::uniform(S);
  auto cert = detail::window_identity("pi rho^-1 tau^-1 rho tau pi fixes X, y -> y + x - rho x",
                                      w, env, sigma, {2 * d, 4 * d});
  return {sigma, w, cert};
}

// ---- sum of three automorphisms -------------------------------------------------

struct WansResult {
  std::array<RepAut, 3> sigma;       // window d, blocks of size 2
  std::array<IntMatrix, 3> window;   // the d x d window parts
  std::array<IntMatrix, 3> tail;     // the 2 x 2 tail blocks
};

inline auto companion_P() -> IntMatrix { return IntMatrix{{0, -1}, {1, 1}}; }

/// Three automorphisms whose window parts sum to f and whose tails sum to 0.
inline auto wans_three(const IntMatrix &f) -> WansResult {
  if (!f.is_square() || f.rows() < 2 || f.rows() % 2 != 0)
    fail(ErrorKind::Dimension, "wans_three needs an even square matrix, got " + f.shape());
  const std::size_t d = f.rows();
  const IntMatrix I = IntMatrix::identity(d), P = companion_P();
  const IntMatrix Phat = repeat_diag(P, d / 2);
  IntMatrix A, B;
  if (is_unimodular(f + I)) {
    A = -I;
    B = f + I;
  } else {
    // f = L * D * R with D diagonal; pair entries diag(a,b) =
    // [[a,1],[1,0]] + [[0,-1],[-1,b]]
    IntMatrix L = I, D = f, R = I;
    bool diagonal = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j && f(i, j) != 0) diagonal = false;
    if (!diagonal) {
      auto s = snf(f);
      L = s.U_inv;
      D = s.D;
      R = s.V_inv;
    }
    IntMatrix D1(d, d), D2(d, d);
    for (std::size_t i = 0; i < d; i += 2) {
      D1(i, i) = D(i, i);
      D1(i, i + 1) = D1(i + 1, i) = 1;
      D2(i, i + 1) = D2(i + 1, i) = -1;
      D2(i + 1, i + 1) = D(i + 1, i + 1);
    }
    A = L * D1 * R;
    B = L * D2 * R;
  }
  WansResult out;
  out.window = {B * Phat, A, B * (I - Phat)};
  out.tail = {P, -IntMatrix::identity(2), IntMatrix::identity(2) - P};
  for (std::size_t k = 0; k < 3; ++k)
    out.sigma[k] = RepAut::eventually_uniform(out.window[k], out.tail[k]);
  return out;
}

// ---- block-unitriangular factorization -------------------------------------------

struct FactorResult {
  RepAut beta;
  Word word;
  Certificate cert;
  std::array<RepAut, 3> factors; // sigma_k tau^m sigma_k^-1
};

/// beta = [[I, mZ],[0, I]] on the first 2d-block, identity beyond, written
/// as a product of three conjugates of tau^m.
inline auto factor_block_unitriangular(const Integer &m, const IntMatrix &Z) -> FactorResult {
  if (m < 2) fail(ErrorKind::Argument, "factor_block_unitriangular needs m >= 2");
  auto parts = wans_three(Z);
  const std::size_t d = Z.rows();
  const IntMatrix I = IntMatrix::identity(d);
  Environment env{{"tau_m", RepAut::uniform(detail::upper_block(m * I))}};
  std::vector<Word> conj;
  FactorResult out;
  for (std::size_t k = 0; k < 3; ++k) {
    std::string name = "s" + std::to_string(k + 1);
    IntMatrix tail = repeat_diag(parts.tail[k], d / 2);
    env[name] = RepAut::eventually_uniform(block_diag({parts.window[k], I}), block_diag({tail, I}));
    conj.push_back(Word::conj(W("tau_m"), W(name)));
    out.factors[k] = word_value(conj.back(), env);
  }
  out.word = Word::product(conj);
  out.beta = RepAut::eventually_uniform(detail::upper_block(m * Z), IntMatrix::identity(2 * d));
  out.cert = detail::window_identity("three conjugates of tau^" + m.get_str() + " give beta",
                                     out.word, env, out.beta, {2 * d, 4 * d});
  return out;
}

// ---- reductions -------------------------------------------------------------------

struct ConjugateProduct {
  Integer k, m;
  std::vector<Integer> coefficients;
};

/// Coefficients of x_i's y-terms in a product of conjugates x -> k_s x + m_s y_s.
inline auto conjugate_product_reduce(const std::vector<std::pair<Integer, Integer>> &pairs)
    -> ConjugateProduct {
  if (pairs.empty()) fail(ErrorKind::Argument, "conjugate_product_reduce needs a pair");
  for (const auto &[k, m] : pairs) {
    if (m < 2) fail(ErrorKind::Argument, "each m_s must be >= 2");
    if (gcd(k, m) != 1)
      fail(ErrorKind::Argument, "pair (" + k.get_str() + "," + m.get_str() + ") is not coprime");
  }
  ConjugateProduct out;
  out.k = 1;
  for (const auto &pr : pairs) out.k *= pr.first;
  const std::size_t l = pairs.size();
  out.coefficients.resize(l);
  Integer suffix = 1; // product of k_t for t > s
  for (std::size_t s = l; s-- > 0;) {
    out.coefficients[s] = suffix * pairs[s].second;
    suffix *= pairs[s].first;
  }
  Integer gc = 0, gm = 0;
  for (std::size_t s = 0; s < l; ++s) {
    gc = gcd(gc, out.coefficients[s]);
    gm = gcd(gm, pairs[s].second);
  }
  if (gc != gm) fail(ErrorKind::Validation, "coefficient gcd differs from gcd of the m_s");
  out.m = gc;
  return out;
}

/// l = phi(m), with k^l = 1 mod m checked.
inline auto euler_reduce(const Integer &k, const Integer &m) -> Integer {
  if (m < 2) fail(ErrorKind::Argument, "euler_reduce needs m >= 2");
  if (gcd(k, m) != 1) fail(ErrorKind::Argument, "k and m must be coprime");
  Integer l = euler_phi(m);
  if (powm(mod(k, m), l, m) != 1) fail(ErrorKind::Validation, "k^phi(m) != 1 mod m");
  return l;
}

struct BezoutResult {
  Integer a, b;
  Word word;
  Certificate cert;
};

/// (tau^{m n1})^a (tau^{m n2})^b = tau^m with a n1 + b n2 = 1.
inline auto bezout_combine(const Integer &m, const Integer &n1, const Integer &n2) -> BezoutResult {
  if (m < 1) fail(ErrorKind::Argument, "bezout_combine needs m >= 1");
  if (n1 < 2 || n2 < 2) fail(ErrorKind::Argument, "n1, n2 must be >= 2");
  auto eg = extended_gcd(n1, n2);
  if (eg.g != 1) fail(ErrorKind::Argument, "n1 and n2 must be coprime");
  const Integer mn1 = m * n1, mn2 = m * n2;
  const std::string t1 = "tau_" + mn1.get_str(), t2 = "tau_" + mn2.get_str();
  Environment env{{t1, tau_power(mn1)}, {t2, tau_power(mn2)}};
  Word w = Word::product({Word::power(W(t1), to_long(eg.a)), Word::power(W(t2), to_long(eg.b))});
  auto cert = detail::window_identity("coprime powers combine to tau^" + m.get_str(), w, env,
                                      tau_power(m), {4, 8});
  return {eg.a, eg.b, w, cert};
}

// ---- the shear pipeline -----------------------------------------------------------

struct PipelineOptions {
  long n1 = 2, n2 = 3;
  std::optional<IntMatrix> frame; // columns (y, x, ...) on one repeated block group
  std::string input_name = "phi";
  bool check_steps = true; // off when the caller runs verify_chain anyway
};

namespace detail {

// blocks of size D past an identity lead of the given length
inline auto lifted(const IntMatrix &block, std::size_t lead) -> RepAut {
  if (lead == 0) return RepAut::uniform(block);
  return RepAut::eventually_uniform(IntMatrix::identity(lead), block);
}

inline auto shear_pair_block(std::size_t D, const Integer &c) -> IntMatrix {
  IntMatrix M = IntMatrix::identity(D);
  M(0, 1) = c;
  return M;
}

inline auto tau_on_tail(const Integer &c, std::size_t lead) -> RepAut {
  IntMatrix t = IntMatrix::identity(2);
  t(0, 1) = c;
  return lifted(t, lead);
}

inline auto tail_block(const RepAut &phi, std::size_t lead, std::size_t D) -> IntMatrix {
  return window_matrix(phi, lead + D).block(lead, lead, D, D);
}

inline auto shifted(const IntMatrix &v, std::size_t offset, std::size_t n) -> IntMatrix {
  IntMatrix out(n, 1);
  out.set_block(offset, 0, v);
  return out;
}

class ChainBuilder {
public:
  ChainBuilder(WitnessChain &ch, std::vector<std::size_t> windows, bool check = true)
      : ch_(ch), windows_(std::move(windows)), check_(check) {}

  // certify `word` = target and record it as a step
  auto step(const std::string &name, const Word &w, Environment env, const RepAut &target)
      -> const RepAut & {
    auto cert = window_identity(name, w, std::move(env), target, windows_);
    if (check_) require_verified(cert);
    ch_.steps.push_back({name, std::move(cert)});
    return *ch_.steps.back().cert.target_aut;
  }

  auto value(const std::string &name) const -> RepAut {
    if (name == ch_.input_name) return ch_.input;
    for (const auto &s : ch_.steps)
      if (s.name == name) return *s.cert.target_aut;
    fail(ErrorKind::UnresolvedName, "no step named " + name);
  }

private:
  WitnessChain &ch_;
  std::vector<std::size_t> windows_;
  bool check_;
};

} // namespace detail

/// From phi with phi x = k x + m y on every repeated block (x = coordinate 1,
/// y = coordinate 0 of the block, after the optional frame) to a tau^m-type
/// element, every step window-certified.
inline auto km_pipeline(const RepAut &phi, const PipelineOptions &opt = {}) -> WitnessChain {
  using detail::lifted;
  if (!phi.holds<EventuallyUniform>())
    fail(ErrorKind::Shape, "km_pipeline needs a block-uniform automorphism");
  if (opt.n1 < 2 || opt.n2 < 2 || gcd(Integer(opt.n1), Integer(opt.n2)) != 1)
    fail(ErrorKind::Argument, "coprime pair must be coprime and >= 2");

  WitnessChain ch;
  ch.input_name = opt.input_name;
  ch.input = phi;
  std::string cur_name = opt.input_name;
  RepAut cur = phi;

  if (opt.frame) {
    const IntMatrix &F = *opt.frame;
    std::size_t df = F.rows(), d0 = phi.get<EventuallyUniform>().block.d;
    if (df % d0 != 0) fail(ErrorKind::Shape, "frame size must be a multiple of the block size");
    std::size_t lead = detail::round_up(phi.get<EventuallyUniform>().window, df);
    RepAut finv = lifted(checked_inverse(F, "frame"), lead);
    Environment env{{cur_name, cur}, {"frame_inv", finv}};
    Word w = Word::conj(W(cur_name), W("frame_inv"));
    RepAut framed = word_value(w, env);
    detail::ChainBuilder b(ch, {lead + df, lead + 2 * df}, opt.check_steps);
    cur = b.step("framed", w, env, framed);
    cur_name = "framed";
    ch.notes.push_back("frame: conjugated by the inverse of a basis whose first columns are y, x");
  }

  const auto &eu = cur.get<EventuallyUniform>();
  const std::size_t d = eu.block.d;
  const IntMatrix &B = eu.block.B;
  if (d < 2) fail(ErrorKind::Shape, "block too small to carry an x, y pair");
  const Integer m = B(0, 1), k = B(1, 1);
  for (std::size_t i = 2; i < d; ++i)
    if (B(i, 1) != 0) fail(ErrorKind::Shape, "x image leaves the (y, x) pair");
  if (m < 2) fail(ErrorKind::Shape, "shear coefficient must be >= 2, got " + m.get_str());
  if (gcd(k, m) != 1) fail(ErrorKind::Shape, "k and m not coprime");

  const long l = to_long(euler_reduce(k, m));
  const long nmax = std::max(opt.n1, opt.n2);
  std::size_t P = static_cast<std::size_t>(std::max<long>(l, nmax - 1));
  if ((P * d) % 2) ++P;
  const std::size_t sub = P * d, D = 3 * sub;
  const std::size_t lead = detail::round_up(eu.window, D);
  const std::vector<std::size_t> windows{lead + D, lead + 2 * D};
  detail::ChainBuilder b(ch, windows, opt.check_steps);
  ch.notes.push_back("k = " + k.get_str() + ", m = " + m.get_str() + ", l = phi(m) = " +
                     std::to_string(l));
  ch.notes.push_back("working block D = " + std::to_string(D) + " as three sub-blocks of " +
                     std::to_string(sub) + ", identity lead of " + std::to_string(lead));

  // (1) psi = phi_0 phi_1 ... phi_{l-1}, phi_s = t_s phi t_s^-1, t_s swapping
  // y of d-block 0 with y of d-block s inside each sub-block
  Environment env{{cur_name, cur}};
  std::vector<Word> factors{W(cur_name)};
  for (long s = 1; s < l; ++s) {
    IntMatrix t = IntMatrix::identity(D);
    for (std::size_t o = 0; o < D; o += sub)
      t = t * detail::swap_matrix(D, o, o + static_cast<std::size_t>(s) * d);
    std::string tn = "t" + std::to_string(s);
    env[tn] = lifted(t, lead);
    factors.push_back(Word::conj(W(cur_name), W(tn)));
  }
  Word wpsi = Word::product(factors);
  RepAut psi = b.step("psi", wpsi, env, word_value(wpsi, env));

  const IntMatrix Psi = detail::tail_block(psi, lead, D);
  IntMatrix zcol = Psi.col(1) - IntMatrix::unit(D, 1);
  for (std::size_t i = 0; i < D; ++i) {
    if (!divides(m, zcol(i, 0))) {
      ch.out_of_scope = "psi x - x is not divisible by m";
      ch.target = psi;
      return ch;
    }
    zcol(i, 0) /= m;
  }
  IntMatrix z = zcol.block(0, 0, sub, 1);
  if (!zcol.block(sub, 0, D - sub, 1).is_zero() || !is_unimodular_set(hcat(IntMatrix::unit(sub, 1), z))) {
    ch.out_of_scope = "no unimodular pair {x, z} with psi x = x + m z";
    ch.target = psi;
    return ch;
  }
  const IntMatrix Csub = complete_to_basis(hcat(IntMatrix::unit(sub, 1), z));

  auto xs = [&](std::size_t part) { return IntMatrix::unit(D, part * sub + 1); };
  const std::size_t xa = 1, xb = sub + 1, xc = 2 * sub + 1;

  // (2) for each n: lambda of order n with lambda psi x_a = x_a + m x_b and
  // lambda psi fixing x_b, x_c; phi1 = (lambda psi)^n; xi = [phi1, rho]
  std::vector<std::pair<long, Integer>> shears;
  for (long n : {opt.n1, opt.n2}) {
    const std::string sn = std::to_string(n);
    ShearTriple tri = order_n_shear(n, m);
    IntMatrix ginv = inverse(tri.gamma);
    const std::size_t r = 2 * n - 2;
    IntMatrix foot(D, 3 * r);
    for (std::size_t part = 0; part < 3; ++part) {
      const std::size_t o = part * sub;
      IntMatrix x = xs(part), y = detail::shifted(z, o, D);
      if (part == 0) {
        x = x + m * xs(1);
        y = y - xs(1);
      }
      std::vector<IntMatrix> cols(r);
      cols[0] = x;
      if (n == 2) {
        cols[1] = y;
      } else {
        std::size_t next = 3; // Csub columns 2.. are the complement
        auto w = [&](std::size_t i) { return detail::shifted(Csub.col(i), o, D); };
        IntMatrix w1 = w(2);
        cols[n - 1] = y + w1;
        cols[n] = w1;
        for (std::size_t slot = 1; slot < r; ++slot)
          if (slot != static_cast<std::size_t>(n - 1) && slot != static_cast<std::size_t>(n))
            cols[slot] = w(next++);
      }
      for (std::size_t j = 0; j < r; ++j) foot.set_block(0, part * r + j, cols[j]);
    }
    IntMatrix G;
    try {
      G = complete_to_basis(foot);
    } catch (const Error &) {
      ch.out_of_scope = "shear footprint for n = " + sn + " is not a unimodular set";
      ch.target = psi;
      return ch;
    }
    IntMatrix core = IntMatrix::identity(D);
    for (std::size_t part = 0; part < 3; ++part) core.set_block(part * r, part * r, ginv);
    IntMatrix Lam = G * core * inverse(G);
    std::string ln = "lambda_" + sn;
    Environment e1{{"psi", psi}, {ln, lifted(Lam, lead)}};
    Word wphi1 = Word::power(Word::product({W(ln), W("psi")}), n);
    RepAut phi1 = b.step("phi1_" + sn, wphi1, e1, word_value(wphi1, e1));

    IntMatrix F1 = detail::tail_block(phi1, lead, D);
    IntMatrix want_a = xs(0) + (m * n) * xs(1);
    if (!(F1.col(xa) == want_a) || !(F1.col(xb) == xs(1)) || !(F1.col(xc) == xs(2))) {
      ch.out_of_scope = "phi1 for n = " + sn + " does not act as x_a -> x_a + mn x_b on X";
      ch.target = phi1;
      return ch;
    }

    Environment e2{{"phi1_" + sn, phi1}, {"rho", lifted(detail::swap_matrix(D, xb, xc), lead)}};
    Word wxi = Word::product({W("phi1_" + sn), W("rho"), Word::inverse(W("phi1_" + sn)),
                              Word::inverse(W("rho"))});
    RepAut xi = b.step("xi_" + sn, wxi, e2, word_value(wxi, e2));

    // xi = I + u w^T with u = x_b - x_c, w^T u = 0
    IntMatrix X = detail::tail_block(xi, lead, D) - IntMatrix::identity(D);
    IntMatrix u = xs(1) - xs(2);
    IntMatrix wrow = X.block(xb, 0, 1, D);
    if (!(X == u * wrow) || !(wrow * u).is_zero()) {
      ch.out_of_scope = "commutator for n = " + sn + " is not a transvection";
      ch.target = xi;
      return ch;
    }
    Integer c = wrow.content();
    IntMatrix w0 = wrow.transpose();
    for (std::size_t i = 0; i < D; ++i) w0(i, 0) /= c;

    // frame Q with Q e_0 = u and e_1^T Q^-1 = w0^T
    IntMatrix M = complete_to_basis(w0);
    IntMatrix K = inverse(M).transpose(); // w0^T K = e_0^T
    IntMatrix Kker = K.block(0, 1, D, D - 1);
    // coordinates of u in the kernel basis: solve K a = u, a_0 = 0
    IntMatrix a = inverse(K) * u;
    IntMatrix ak = a.block(1, 0, D - 1, 1);
    IntMatrix Kp = Kker * complete_to_basis(ak);
    IntMatrix Q(D, D);
    Q.set_block(0, 0, u);
    Q.set_block(0, 1, K.col(0));
    Q.set_block(0, 2, Kp.block(0, 1, D, D - 2));
    std::string qn = "Qinv_" + sn;
    Environment e3{{"xi_" + sn, xi}, {qn, lifted(inverse(Q), lead)}};
    Word ws = Word::conj(W("xi_" + sn), W(qn));
    b.step("S_" + sn, ws, e3, lifted(detail::shear_pair_block(D, c), lead));
    shears.emplace_back(n, c);
    ch.notes.push_back("n = " + sn + ": commutator transvection content " + c.get_str());
  }

  // (3) Bezout on the two contents
  auto eg = extended_gcd(shears[0].second, shears[1].second);
  const Integer c = eg.g;
  const std::string s1 = "S_" + std::to_string(shears[0].first);
  const std::string s2 = "S_" + std::to_string(shears[1].first);
  Environment e4{{s1, b.value(s1)}, {s2, b.value(s2)}};
  Word wb = Word::product({Word::power(W(s1), to_long(eg.a)), Word::power(W(s2), to_long(eg.b))});
  RepAut one_pair = b.step("bezout", wb, e4, lifted(detail::shear_pair_block(D, c), lead));

  // (4) spread the single-pair shear over every pair of the block
  Environment e5{{"bezout", one_pair}};
  std::vector<Word> spread{W("bezout")};
  for (std::size_t j = 1; j < D / 2; ++j) {
    IntMatrix Pi = detail::swap_matrix(D, 0, 2 * j) * detail::swap_matrix(D, 1, 2 * j + 1);
    std::string pn = "pi_" + std::to_string(j);
    e5[pn] = lifted(Pi, lead);
    spread.push_back(Word::conj(W("bezout"), W(pn)));
  }
  RepAut tc = b.step("spread", Word::product(spread), e5, detail::tau_on_tail(c, lead));

  // (5) up to tau^m
  if (c != m) {
    Environment e6{{"spread", tc}};
    Integer q = m / c;
    tc = b.step("tau_m", Word::power(W("spread"), to_long(q)), e6, detail::tau_on_tail(m, lead));
  }
  ch.target = tc;
  return ch;
}

} // namespace freeab
