#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/classify.hpp"
#include "freeab/error.hpp"
#include "freeab/primes.hpp"
#include "freeab/serialize.hpp"

namespace freeab {

/// phi in Lambda(p) for every p in P.
inline auto omega_member(const RepAut &phi, const std::set<long> &P) -> bool {
  for (long p : P)
    if (!is_prime(p)) fail(ErrorKind::Argument, "omega_member: " + std::to_string(p) + " is not prime");
  return std::all_of(P.begin(), P.end(), [&](long p) { return lambda_member(phi, Integer(p)); });
}

struct CenteredWitness {
  std::vector<std::size_t> subfamily; // indices into the input
  long prime = 0;
};

struct CenteredFamilyReport {
  std::vector<PrimeSet> input;
  std::size_t s = 0;
  bool verdict = true;
  std::vector<CenteredWitness> witnesses;       // one per subfamily checked, while verdict holds
  std::optional<std::vector<std::size_t>> empty; // first subfamily with empty intersection
};

/// Smallest prime in the intersection, or nullopt if it is empty.
inline auto intersection_witness(const std::vector<const PrimeSet *> &sets) -> std::optional<long> {
  std::optional<std::set<long>> finite;
  std::set<long> excluded;
  for (const auto *s : sets) {
    auto [cofinite, elems] = s->normal_form();
    if (cofinite) {
      excluded.insert(elems.begin(), elems.end());
    } else if (!finite) {
      finite = elems;
    } else {
      std::set<long> both;
      std::set_intersection(finite->begin(), finite->end(), elems.begin(), elems.end(),
                            std::inserter(both, both.begin()));
      finite = both;
    }
  }
  if (finite) {
    for (long p : *finite)
      if (!excluded.count(p)) return p;
    return std::nullopt;
  }
  // cofinite: some prime among the first |excluded| + 1 survives
  for (long p = 2;; ++p)
    if (is_prime(p) && !excluded.count(p)) return p;
}

/// Every subfamily of size <= s has a common prime.
inline auto centered_check(const std::vector<PrimeSet> &family, std::size_t s) -> CenteredFamilyReport {
  if (s > family.size())
    fail(ErrorKind::Argument, "subfamily size " + std::to_string(s) + " exceeds family size " +
                                  std::to_string(family.size()));
  CenteredFamilyReport rep{family, s, true, {}, std::nullopt};
  for (std::size_t k = 1; k <= s; ++k) {
    std::vector<bool> pick(family.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
    do {
      std::vector<std::size_t> idx;
      std::vector<const PrimeSet *> sets;
      for (std::size_t i = 0; i < family.size(); ++i)
        if (pick[i]) {
          idx.push_back(i);
          sets.push_back(&family[i]);
        }
      auto p = intersection_witness(sets);
      if (!p) {
        rep.verdict = false;
        rep.empty = idx;
        return rep;
      }
      rep.witnesses.push_back({idx, *p});
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return rep;
}

/// Graded-block automorphism with nu = prefix + all primes outside E.
inline auto graded_construct(const std::vector<long> &prefix, const std::set<long> &E) -> RepAut {
  std::set<long> seen;
  for (long p : prefix) {
    if (!is_prime(p)) fail(ErrorKind::Argument, "prefix entry " + std::to_string(p) + " is not prime");
    if (!seen.insert(p).second) fail(ErrorKind::Argument, "prefix prime " + std::to_string(p) + " repeated");
    if (E.count(p)) fail(ErrorKind::Argument, "prefix prime " + std::to_string(p) + " is also excluded");
  }
  for (long p : E)
    if (!is_prime(p)) fail(ErrorKind::Argument, "excluded entry " + std::to_string(p) + " is not prime");
  std::vector<Integer> pre(prefix.begin(), prefix.end());
  return RepAut::graded(pre, std::vector<long>(E.begin(), E.end()));
}

struct DemoLine {
  long p = 0;
  Integer level;
  bool member = false;
  bool explicit_ok = false; // finite summand check agrees
};

struct CounterexampleReport {
  std::vector<long> primes;
  long probe = 0;
  std::vector<DemoLine> lines;
  bool all_verified = true;
  std::string conclusion;
};

/// phi_p = graded_construct((), {p}) for each p: each lies in Lambda(2) and
/// Lambda(q), so their normal closure sits inside Lambda(q) and cannot
/// contain Gamma(2).
inline auto counterexample_demo(const std::vector<long> &primes, long q) -> CounterexampleReport {
  if (primes.empty()) fail(ErrorKind::Argument, "need at least one prime");
  for (long p : primes)
    if (!is_prime(p) || p == 2) fail(ErrorKind::Argument, std::to_string(p) + " is not an odd prime");
  if (!is_prime(q)) fail(ErrorKind::Argument, "probe " + std::to_string(q) + " is not prime");
  long pmax = *std::max_element(primes.begin(), primes.end());
  if (q <= pmax)
    fail(ErrorKind::Argument, "probe " + std::to_string(q) + " must exceed " + std::to_string(pmax));
  CounterexampleReport rep;
  rep.primes = primes;
  rep.probe = q;
  for (long p : primes) {
    RepAut phi = graded_construct({}, {p});
    for (long level : {2L, q}) {
      DemoLine l{p, level, lambda_member(phi, level), explicit_lambda_check(phi, level).has_value()};
      rep.all_verified = rep.all_verified && l.member && l.explicit_ok;
      rep.lines.push_back(l);
    }
  }
  rep.conclusion = rep.all_verified
                       ? "every phi_p lies in Lambda(2) and Lambda(" + std::to_string(q) +
                             "); a tau^2-type element in their normal closure would force "
                             "Gamma(2) <= Lambda(" + std::to_string(q) + "), which fails"
                       : "some membership failed";
  return rep;
}

// descriptor files

inline auto prime_set_to_json(const PrimeSet &s) -> Json {
  using K = PrimeSet::Kind;
  switch (s.kind) {
  case K::Finite: return {{"kind", "finite"}, {"primes", s.finite}};
  case K::AllPrimes: return {{"kind", "all"}};
  case K::AllExcept: return {{"kind", "all_except"}, {"except", s.except}};
  case K::UnionWithPrefix:
    return {{"kind", "union_with_prefix"}, {"primes", s.finite}, {"except", s.except}};
  }
  return {};
}

inline auto prime_set_from_json(const Json &j) -> PrimeSet {
  auto primes = [&](const char *key) {
    if (!j.contains(key) || !j[key].is_array())
      fail(ErrorKind::Parse, std::string("prime set: missing array '") + key + "'");
    std::set<long> out;
    for (const auto &v : j[key]) {
      if (!v.is_number_integer()) fail(ErrorKind::Parse, std::string("prime set: non-integer in '") + key + "'");
      long p = v.get<long>();
      if (!is_prime(p)) fail(ErrorKind::Parse, "prime set: " + std::to_string(p) + " is not prime");
      out.insert(p);
    }
    return out;
  };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::Parse, "prime set: expected an object with a 'kind'");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "finite") return PrimeSet::finite_set(primes("primes"));
  if (kind == "all") return PrimeSet::all_primes();
  if (kind == "all_except") return PrimeSet::all_except(primes("except"));
  if (kind == "union_with_prefix") return PrimeSet::union_with_prefix(primes("primes"), primes("except"));
  fail(ErrorKind::Parse, "prime set: unknown kind '" + kind + "'");
}

struct DescriptorFamily {
  std::vector<PrimeSet> family;
  std::optional<std::size_t> s; // defaults to the family size
};

inline auto serialize_descriptors(const DescriptorFamily &f) -> std::string {
  Json body = Json::object();
  Json arr = Json::array();
  for (const auto &s : f.family) arr.push_back(prime_set_to_json(s));
  body["family"] = arr;
  if (f.s) body["s"] = *f.s;
  return to_text(document("descriptors", body));
}

inline auto parse_descriptors(const std::string &text) -> DescriptorFamily {
  Json j = parse_document(text, "descriptors");
  if (!j.contains("family") || !j["family"].is_array())
    fail(ErrorKind::Parse, "descriptors: missing array 'family'");
  DescriptorFamily f;
  for (const auto &e : j["family"]) f.family.push_back(prime_set_from_json(e));
  if (j.contains("s")) {
    if (!j["s"].is_number_unsigned()) fail(ErrorKind::Parse, "descriptors: 's' must be a nonnegative integer");
    f.s = j["s"].get<std::size_t>();
  }
  return f;
}

} // namespace freeab
