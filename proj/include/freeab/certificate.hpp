#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/error.hpp"
#include "freeab/matrix.hpp"
#include "freeab/primes.hpp"
#include "freeab/word.hpp"

namespace freeab {

enum class ClaimKind { WindowIdentity, Order, ActionOnVector };

inline auto to_string(ClaimKind k) -> const char * {
  switch (k) {
  case ClaimKind::WindowIdentity: return "window-identity";
  case ClaimKind::Order: return "order";
  case ClaimKind::ActionOnVector: return "action-on-vector";
  }
  return "?";
}

/// A claim about a word, rechecked by exact arithmetic on each listed window.
///   window-identity: word equals target_aut (or target_matrix) on the window
///   order:           word^order = I, word^j != I for proper divisors j
///   action-on-vector: word * vectors = images (columns, zero-padded)
struct Certificate {
  std::string label;
  ClaimKind claim = ClaimKind::WindowIdentity;
  Word word;
  Environment env;
  std::vector<std::size_t> windows;
  std::optional<RepAut> target_aut;
  std::optional<IntMatrix> target_matrix;
  long order = 0;
  IntMatrix vectors, images;

  friend auto operator==(const Certificate &, const Certificate &) -> bool = default;
};

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines; // one per window checked
  std::string failure;            // first failure, empty when ok
};

namespace detail {

inline auto describe(const EntryDiff &d) -> std::string {
  return "entry (" + std::to_string(d.row) + "," + std::to_string(d.col) + ") is " +
         d.got.get_str() + ", expected " + d.expected.get_str();
}

inline auto pad_rows(const IntMatrix &v, std::size_t N) -> IntMatrix {
  IntMatrix out(N, v.cols());
  out.set_block(0, 0, v);
  return out;
}

[[noreturn]] inline void malformed(const Certificate &c, const std::string &why) {
  fail(ErrorKind::Parse,
       "malformed certificate" + (c.label.empty() ? "" : " '" + c.label + "'") + ": " + why);
}

inline void check_shape(const Certificate &c) {
  if (c.windows.empty()) malformed(c, "no windows listed");
  for (auto N : c.windows)
    if (N == 0) malformed(c, "window size 0");
  switch (c.claim) {
  case ClaimKind::WindowIdentity:
    if (c.target_aut.has_value() == c.target_matrix.has_value())
      malformed(c, "window-identity needs exactly one target");
    if (c.target_matrix)
      for (auto N : c.windows)
        if (c.target_matrix->rows() != N || c.target_matrix->cols() != N)
          malformed(c, "target matrix " + c.target_matrix->shape() + " does not match window " +
                           std::to_string(N));
    break;
  case ClaimKind::Order:
    if (c.order < 1) malformed(c, "order must be >= 1");
    break;
  case ClaimKind::ActionOnVector:
    if (c.vectors.rows() != c.images.rows() || c.vectors.cols() != c.images.cols() ||
        c.vectors.cols() == 0)
      malformed(c, "vectors and images must have the same nonzero shape");
    for (auto N : c.windows)
      if (N < c.vectors.rows()) malformed(c, "vectors longer than window " + std::to_string(N));
    break;
  }
  for (const auto &n : c.word.names())
    if (!c.env.count(n)) malformed(c, "unresolved name '" + n + "'");
}

} // namespace detail

/// Pure recheck of a certificate. Structural problems throw a parse error;
/// a false claim returns ok = false with the first differing entry.
inline auto verify_certificate(const Certificate &c) -> VerifyReport {
  detail::check_shape(c);
  VerifyReport rep;
  auto refute = [&](std::size_t N, const std::string &why) {
    std::string line = "window " + std::to_string(N) + ": " + why;
    if (rep.ok) rep.failure = line;
    rep.ok = false;
    rep.lines.push_back(line);
  };
  for (auto N : c.windows) {
    IntMatrix got;
    try {
      got = evaluate_word(c.word, c.env, N);
    } catch (const Error &e) {
      detail::malformed(c, e.what());
    }
    switch (c.claim) {
    case ClaimKind::WindowIdentity: {
      IntMatrix want;
      if (c.target_matrix) {
        want = *c.target_matrix;
      } else {
        try {
          want = window_matrix(*c.target_aut, N);
        } catch (const Error &e) {
          detail::malformed(c, e.what());
        }
      }
      if (auto d = first_difference(got, want)) refute(N, detail::describe(*d));
      else rep.lines.push_back("window " + std::to_string(N) + ": identity holds");
      break;
    }
    case ClaimKind::Order: {
      IntMatrix full = matrix_power(got, static_cast<unsigned long>(c.order));
      if (auto d = first_difference(full, IntMatrix::identity(N))) {
        refute(N, "word^" + std::to_string(c.order) + " is not I: " + detail::describe(*d));
        break;
      }
      bool good = true;
      for (long j : divisors(c.order)) {
        if (j == c.order) continue;
        if (matrix_power(got, static_cast<unsigned long>(j)).is_identity()) {
          refute(N, "word^" + std::to_string(j) + " = I for proper divisor " + std::to_string(j));
          good = false;
          break;
        }
      }
      if (good)
        rep.lines.push_back("window " + std::to_string(N) + ": order " + std::to_string(c.order));
      break;
    }
    case ClaimKind::ActionOnVector: {
      IntMatrix img = got * detail::pad_rows(c.vectors, N);
      if (auto d = first_difference(img, detail::pad_rows(c.images, N)))
        refute(N, "image " + detail::describe(*d));
      else
        rep.lines.push_back("window " + std::to_string(N) + ": action holds");
      break;
    }
    }
  }
  return rep;
}

struct ChainStep {
  std::string name;
  Certificate cert; // window-identity with target_aut = the step's result

  friend auto operator==(const ChainStep &, const ChainStep &) -> bool = default;
};

/// Derivation from an input automorphism (bound to `input_name`) to a final
/// target. Each step may refer to the input and to earlier steps by name.
struct WitnessChain {
  std::string input_name = "phi";
  RepAut input;
  std::vector<ChainStep> steps;
  RepAut target;
  std::vector<std::string> notes; // concrete choices made, in order
  std::optional<std::string> out_of_scope; // set when the chain stopped early

  friend auto operator==(const WitnessChain &, const WitnessChain &) -> bool = default;
};

struct ChainReport {
  bool ok = true;
  std::vector<std::string> lines;
};

/// Each certificate verifies; names bound to the input or to earlier steps
/// carry exactly those values; and every step word collapses to I once the
/// input and earlier results are replaced by the identity, so each result
/// lies in the normal closure of the input.
inline auto verify_chain(const WitnessChain &ch) -> ChainReport {
  ChainReport rep;
  auto bad = [&](const std::string &s) {
    rep.ok = false;
    rep.lines.push_back("FAIL " + s);
  };
  if (ch.out_of_scope) bad("chain stopped: " + *ch.out_of_scope);
  std::map<std::string, const RepAut *> known{{ch.input_name, &ch.input}};
  for (const auto &st : ch.steps) {
    const auto &c = st.cert;
    if (c.claim != ClaimKind::WindowIdentity || !c.target_aut) {
      bad(st.name + ": step certificate must be a window identity with an automorphism target");
      continue;
    }
    if (known.count(st.name)) bad(st.name + ": name reused");
    bool linked = true;
    for (const auto &[name, val] : c.env) {
      auto it = known.find(name);
      if (it != known.end() && !(*it->second == val)) {
        bad(st.name + ": binding '" + name + "' differs from the certified value");
        linked = false;
      }
    }
    auto r = verify_certificate(c);
    if (!r.ok) bad(st.name + ": " + r.failure);
    // normal-closure shadow
    Environment shadow = c.env;
    for (auto &[name, val] : shadow)
      if (known.count(name)) val = RepAut::identity();
    bool collapses = true;
    for (auto N : c.windows)
      if (!evaluate_word(c.word, shadow, N).is_identity()) collapses = false;
    if (!collapses) bad(st.name + ": word does not vanish modulo the input");
    if (r.ok && linked && collapses)
      rep.lines.push_back("ok   " + st.name + " (" + std::to_string(c.windows.size()) +
                          " windows)");
    known[st.name] = &*c.target_aut;
  }
  if (ch.steps.empty()) {
    if (!(ch.target == ch.input)) bad("empty chain but target differs from input");
  } else if (!(*ch.steps.back().cert.target_aut == ch.target)) {
    bad("final step does not produce the chain target");
  }
  return rep;
}

} // namespace freeab
