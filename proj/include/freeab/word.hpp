#pragma once

#include <map>
#include <optional>
#include <memory>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/error.hpp"
#include "freeab/matrix.hpp"

namespace freeab {

using Environment = std::map<std::string, RepAut>;

struct WordNode;

/// Immutable group word: Named | Inverse | Power | Conj | Product.
/// Conj(g, h) stands for h * g * h^-1; products read left to right.
class Word {
public:
  Word(); // empty product

  static auto named(std::string id) -> Word;
  static auto inverse(Word w) -> Word;
  static auto power(Word w, long e) -> Word;
  static auto conj(Word g, Word h) -> Word;
  static auto product(std::vector<Word> f) -> Word;

  [[nodiscard]] auto node() const -> const WordNode & { return *node_; }
  [[nodiscard]] auto key() const -> const void * { return node_.get(); }

  friend auto operator==(const Word &a, const Word &b) -> bool;

  // names referenced anywhere in the word
  [[nodiscard]] auto names() const -> std::set<std::string>;
  // number of tokens, for reporting
  [[nodiscard]] auto size() const -> std::size_t;

private:
  explicit Word(std::shared_ptr<const WordNode> n) : node_(std::move(n)) {}
  void collect(std::set<std::string> &out) const;

  std::shared_ptr<const WordNode> node_;
};

struct Named { std::string id; };
struct Inverse { Word inner; };
struct Power { Word base; long exponent; };
struct Conj { Word g, h; };
struct Product { std::vector<Word> factors; };

struct WordNode {
  std::variant<Named, Inverse, Power, Conj, Product> v;
};

inline Word::Word() : node_(std::make_shared<const WordNode>(WordNode{Product{}})) {}

inline auto Word::named(std::string id) -> Word {
  return Word(std::make_shared<const WordNode>(WordNode{Named{std::move(id)}}));
}
inline auto Word::inverse(Word w) -> Word {
  return Word(std::make_shared<const WordNode>(WordNode{Inverse{std::move(w)}}));
}
inline auto Word::power(Word w, long e) -> Word {
  return Word(std::make_shared<const WordNode>(WordNode{Power{std::move(w), e}}));
}
inline auto Word::conj(Word g, Word h) -> Word {
  return Word(std::make_shared<const WordNode>(WordNode{Conj{std::move(g), std::move(h)}}));
}
inline auto Word::product(std::vector<Word> f) -> Word {
  return Word(std::make_shared<const WordNode>(WordNode{Product{std::move(f)}}));
}

inline auto operator==(const Word &a, const Word &b) -> bool {
  if (a.node_ == b.node_) return true;
  const auto &x = a.node_->v, &y = b.node_->v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto &p) -> bool {
        using T = std::decay_t<decltype(p)>;
        const auto &q = std::get<T>(y);
        if constexpr (std::is_same_v<T, Named>) return p.id == q.id;
        else if constexpr (std::is_same_v<T, Inverse>) return p.inner == q.inner;
        else if constexpr (std::is_same_v<T, Power>)
          return p.exponent == q.exponent && p.base == q.base;
        else if constexpr (std::is_same_v<T, Conj>) return p.g == q.g && p.h == q.h;
        else return p.factors == q.factors;
      },
      x);
}

inline auto Word::names() const -> std::set<std::string> {
  std::set<std::string> out;
  collect(out);
  return out;
}

inline void Word::collect(std::set<std::string> &out) const {
  std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Named>) out.insert(x.id);
        else if constexpr (std::is_same_v<T, Inverse>) x.inner.collect(out);
        else if constexpr (std::is_same_v<T, Power>) x.base.collect(out);
        else if constexpr (std::is_same_v<T, Conj>) {
          x.g.collect(out);
          x.h.collect(out);
        } else
          for (const auto &f : x.factors) f.collect(out);
      },
      node_->v);
}

inline auto Word::size() const -> std::size_t {
  return std::visit(
      [](const auto &x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Named>) return 1;
        else if constexpr (std::is_same_v<T, Inverse>) return 1 + x.inner.size();
        else if constexpr (std::is_same_v<T, Power>) return 1 + x.base.size();
        else if constexpr (std::is_same_v<T, Conj>) return 1 + x.g.size() + x.h.size();
        else {
          std::size_t s = 1;
          for (const auto &f : x.factors) s += f.size();
          return s;
        }
      },
      node_->v);
}

// shorthand used by the construct module
inline auto W(const std::string &id) -> Word { return Word::named(id); }

namespace detail {

// Evaluates words on one window. Inverses come from the stored witnesses,
// so no matrix is ever inverted here. Shared subwords are computed once.
class WordEvaluator {
public:
  using Ptr = std::shared_ptr<const IntMatrix>;

  WordEvaluator(const Environment &env, std::size_t N) : env_(env), N_(N) {}

  auto eval(const Word &w, bool inverted) -> Ptr {
    auto key = std::make_pair(w.key(), inverted);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Ptr r = compute(w, inverted);
    keep_.push_back(w); // pins the node so its address stays unique
    memo_.emplace(key, r);
    return r;
  }

private:
  // results are shared, never copied; identities collapse to one matrix
  auto identity() -> Ptr {
    if (!identity_) identity_ = std::make_shared<const IntMatrix>(IntMatrix::identity(N_));
    return identity_;
  }
  auto trivial(const Ptr &m) -> bool { return m == identity_ || m->is_identity(); }

  auto atom(const std::string &id, bool inverted) -> Ptr {
    auto key = std::make_pair(id, inverted);
    if (auto c = atoms_.find(key); c != atoms_.end()) return c->second;
    auto it = env_.find(id);
    if (it == env_.end()) fail(ErrorKind::UnresolvedName, "unresolved name '" + id + "'");
    auto m = std::make_shared<const IntMatrix>(
        window_matrix(inverted ? invert(it->second) : it->second, N_));
    atoms_.emplace(key, m);
    return m;
  }

  auto compute(const Word &w, bool inv) -> Ptr {
    const auto &n = w.node().v;
    if (auto *a = std::get_if<Named>(&n)) return atom(a->id, inv);
    if (auto *a = std::get_if<Inverse>(&n)) return eval(a->inner, !inv);
    if (auto *a = std::get_if<Power>(&n)) {
      bool flip = a->exponent < 0;
      unsigned long e = flip ? -static_cast<unsigned long>(a->exponent)
                             : static_cast<unsigned long>(a->exponent);
      if (e == 0) return identity();
      Ptr b = eval(a->base, inv != flip);
      if (e == 1 || trivial(b)) return b;
      return std::make_shared<const IntMatrix>(matrix_power(*b, e));
    }
    if (auto *a = std::get_if<Conj>(&n)) {
      // (h g h^-1)^-1 = h g^-1 h^-1; a conjugate of I is I, so h is skipped
      Ptr g = eval(a->g, inv);
      if (trivial(g)) return g;
      IntMatrix r = *eval(a->h, false) * *g;
      return std::make_shared<const IntMatrix>(r * *eval(a->h, true));
    }
    const auto &f = std::get<Product>(n).factors;
    Ptr r;
    auto take = [&](const Word &x, bool i) {
      Ptr m = eval(x, i);
      if (trivial(m)) return;
      r = r ? std::make_shared<const IntMatrix>(*r * *m) : m;
    };
    if (!inv) {
      for (const auto &x : f) take(x, false);
    } else {
      for (auto it = f.rbegin(); it != f.rend(); ++it) take(*it, true);
    }
    return r ? r : identity();
  }

  const Environment &env_;
  std::size_t N_;
  Ptr identity_;
  std::map<std::pair<const void *, bool>, Ptr> memo_;
  std::vector<Word> keep_;
  std::map<std::pair<std::string, bool>, Ptr> atoms_;
};

} // namespace detail

/// N x N matrix of the word's value.
inline auto evaluate_word(const Word &w, const Environment &env, std::size_t N) -> IntMatrix {
  detail::WordEvaluator ev(env, N);
  return *ev.eval(w, false);
}

/// Symbolic value of a word via compose/invert; fails where compose does.
inline auto word_value(const Word &w, const Environment &env) -> RepAut {
  const auto &n = w.node().v;
  if (auto *a = std::get_if<Named>(&n)) {
    auto it = env.find(a->id);
    if (it == env.end()) fail(ErrorKind::UnresolvedName, "unresolved name '" + a->id + "'");
    return it->second;
  }
  if (auto *a = std::get_if<Inverse>(&n)) return invert(word_value(a->inner, env));
  if (auto *a = std::get_if<Power>(&n)) {
    RepAut base = word_value(a->base, env);
    if (a->exponent < 0) base = invert(base);
    unsigned long e = a->exponent < 0 ? -static_cast<unsigned long>(a->exponent)
                                      : static_cast<unsigned long>(a->exponent);
    RepAut r = RepAut::identity();
    while (e) {
      if (e & 1) r = compose(r, base);
      e >>= 1;
      if (e) base = compose(base, base);
    }
    return r;
  }
  if (auto *a = std::get_if<Conj>(&n)) {
    RepAut h = word_value(a->h, env);
    return compose(compose(h, word_value(a->g, env)), invert(h));
  }
  RepAut r = RepAut::identity();
  for (const auto &f : std::get<Product>(n).factors) r = compose(r, word_value(f, env));
  return r;
}

} // namespace freeab
