#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "freeab/aut.hpp"
#include "freeab/certificate.hpp"
#include "freeab/error.hpp"
#include "freeab/matrix.hpp"
#include "freeab/word.hpp"

namespace freeab {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// ---- writing ----------------------------------------------------------------

inline auto integer_to_json(const Integer &v) -> Json {
  if (mpz_sizeinbase(v.get_mpz_t(), 2) <= 62) return Json(static_cast<std::int64_t>(v.get_si()));
  return Json(v.get_str());
}

inline auto matrix_to_json(const IntMatrix &m) -> Json {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(integer_to_json(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline auto aut_to_json(const RepAut &phi) -> Json {
  Json j;
  j["variant"] = phi.kind_name();
  if (phi.holds<Finitary>()) {
    const auto &f = phi.get<Finitary>();
    j["support"] = f.support;
    j["M"] = matrix_to_json(f.M);
    j["M_inv"] = matrix_to_json(f.M_inv);
  } else if (phi.holds<EventuallyUniform>()) {
    const auto &e = phi.get<EventuallyUniform>();
    j["d"] = e.block.d;
    j["B"] = matrix_to_json(e.block.B);
    j["B_inv"] = matrix_to_json(e.block.B_inv);
    if (e.window) {
      j["window"] = e.window;
      j["M_window"] = matrix_to_json(e.M_window);
      j["M_window_inv"] = matrix_to_json(e.M_window_inv);
    }
  } else {
    const auto &g = phi.get<GradedBlock>();
    Json pre = Json::array();
    for (const auto &m : g.prefix) pre.push_back(integer_to_json(m));
    j["prefix"] = pre;
    j["excluded"] = g.excluded;
    j["exponent"] = integer_to_json(g.exponent);
    if (g.head_pairs) {
      j["head"] = matrix_to_json(g.head);
      j["head_inv"] = matrix_to_json(g.head_inv);
    }
  }
  return j;
}

inline auto word_to_json(const Word &w) -> Json {
  const auto &n = w.node().v;
  if (auto *a = std::get_if<Named>(&n)) return {{"name", a->id}};
  if (auto *a = std::get_if<Inverse>(&n)) return {{"inv", word_to_json(a->inner)}};
  if (auto *a = std::get_if<Power>(&n)) return {{"pow", word_to_json(a->base)}, {"exp", a->exponent}};
  if (auto *a = std::get_if<Conj>(&n)) return {{"conj", word_to_json(a->g)}, {"by", word_to_json(a->h)}};
  Json f = Json::array();
  for (const auto &x : std::get<Product>(n).factors) f.push_back(word_to_json(x));
  return {{"prod", f}};
}

inline auto env_to_json(const Environment &env) -> Json {
  Json j = Json::object();
  for (const auto &[k, v] : env) j[k] = aut_to_json(v);
  return j;
}

inline auto certificate_to_json(const Certificate &c) -> Json {
  Json j;
  j["label"] = c.label;
  j["claim"] = to_string(c.claim);
  j["word"] = word_to_json(c.word);
  j["env"] = env_to_json(c.env);
  j["windows"] = c.windows;
  if (c.target_aut) j["target"] = aut_to_json(*c.target_aut);
  if (c.target_matrix) j["target_matrix"] = matrix_to_json(*c.target_matrix);
  if (c.claim == ClaimKind::Order) j["order"] = c.order;
  if (c.claim == ClaimKind::ActionOnVector) {
    j["vectors"] = matrix_to_json(c.vectors);
    j["images"] = matrix_to_json(c.images);
  }
  return j;
}

inline auto chain_to_json(const WitnessChain &ch) -> Json {
  Json j;
  j["input_name"] = ch.input_name;
  j["input"] = aut_to_json(ch.input);
  Json steps = Json::array();
  for (const auto &s : ch.steps)
    steps.push_back({{"name", s.name}, {"certificate", certificate_to_json(s.cert)}});
  j["steps"] = steps;
  j["target"] = aut_to_json(ch.target);
  j["notes"] = ch.notes;
  if (ch.out_of_scope) j["out_of_scope"] = *ch.out_of_scope;
  return j;
}

inline auto document(const std::string &kind, Json body) -> Json {
  body["format_version"] = kFormatVersion;
  body["kind"] = kind;
  return body;
}

namespace detail {

inline auto is_scalar(const Json &j) -> bool { return !j.is_array() && !j.is_object(); }

inline auto all_scalar(const Json &arr) -> bool {
  for (const auto &x : arr)
    if (!is_scalar(x)) return false;
  return true;
}

inline void emit(const Json &j, std::size_t indent, std::string &out) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(it.key()).dump() + ": ";
      emit(it.value(), indent + 2, out);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    if (all_scalar(j)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += inner;
      emit(j[i], indent + 2, out);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

} // namespace detail

/// Canonical text: sorted keys, scalar arrays (matrix rows) on one line.
inline auto to_text(const Json &j) -> std::string {
  std::string out;
  detail::emit(j, 0, out);
  out += "\n";
  return out;
}

// ---- reading ----------------------------------------------------------------

namespace detail {

[[noreturn]] inline void schema(const std::string &path, const std::string &what) {
  fail(ErrorKind::Parse, "at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline auto field(const Json &j, const std::string &path, const char *key) -> const Json & {
  if (!j.is_object()) schema(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(path, std::string("missing field '") + key + "'");
  return *it;
}

inline auto read_integer(const Json &j, const std::string &path) -> Integer {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
    return Integer(static_cast<long>(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    if (auto v = parse_integer(j.get<std::string>())) return *v;
    schema(path, "not a decimal integer: " + j.get<std::string>());
  }
  schema(path, "expected an integer");
}

inline auto read_long(const Json &j, const std::string &path) -> long {
  Integer v = read_integer(j, path);
  if (!v.fits_slong_p()) schema(path, "integer out of range");
  return v.get_si();
}

inline auto read_count(const Json &j, const std::string &path) -> std::size_t {
  long v = read_long(j, path);
  if (v < 0) schema(path, "expected a nonnegative count");
  return static_cast<std::size_t>(v);
}

inline auto read_string(const Json &j, const std::string &path) -> std::string {
  if (!j.is_string()) schema(path, "expected a string");
  return j.get<std::string>();
}

inline auto read_array(const Json &j, const std::string &path) -> const Json & {
  if (!j.is_array()) schema(path, "expected an array");
  return j;
}

} // namespace detail

inline auto matrix_from_json(const Json &j, const std::string &path = "") -> IntMatrix {
  const auto &rows = detail::read_array(j, path);
  std::size_t r = rows.size(), c = 0;
  for (std::size_t i = 0; i < r; ++i) {
    const auto &row = detail::read_array(rows[i], path + "/" + std::to_string(i));
    if (i == 0) c = row.size();
    else if (row.size() != c) detail::schema(path + "/" + std::to_string(i), "ragged matrix row");
  }
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k)
      m(i, k) = detail::read_integer(rows[i][k], path + "/" + std::to_string(i) + "/" + std::to_string(k));
  return m;
}

namespace detail {

// Stored inverse witnesses must match the recomputed inverse exactly.
inline void check_witness(const Json &j, const std::string &path, const char *key,
                          const IntMatrix &expected) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!(matrix_from_json(*it, path + "/" + key) == expected))
    fail(ErrorKind::Validation, "at " + path + "/" + key + ": inverse witness is wrong");
}

template <class F> auto validated(const std::string &path, F &&make) -> RepAut {
  try {
    return make();
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::Validation)
      fail(ErrorKind::Validation, "at " + (path.empty() ? std::string("/") : path) + ": " + e.what());
    throw;
  }
}

} // namespace detail

inline auto aut_from_json(const Json &j, const std::string &path = "") -> RepAut {
  using namespace detail;
  std::string variant = read_string(field(j, path, "variant"), path + "/variant");
  if (variant == "finitary") {
    std::vector<std::size_t> support;
    const auto &s = read_array(field(j, path, "support"), path + "/support");
    for (std::size_t i = 0; i < s.size(); ++i)
      support.push_back(read_count(s[i], path + "/support/" + std::to_string(i)));
    IntMatrix M = matrix_from_json(field(j, path, "M"), path + "/M");
    RepAut phi = validated(path, [&] { return RepAut::finitary(support, M); });
    check_witness(j, path, "M_inv", phi.get<Finitary>().M_inv);
    return phi;
  }
  if (variant == "uniform" || variant == "eventually_uniform") {
    IntMatrix B = matrix_from_json(field(j, path, "B"), path + "/B");
    if (j.contains("d") && read_count(j["d"], path + "/d") != B.rows())
      schema(path + "/d", "block size does not match B");
    IntMatrix Mw;
    if (variant == "eventually_uniform") {
      Mw = matrix_from_json(field(j, path, "M_window"), path + "/M_window");
      if (read_count(field(j, path, "window"), path + "/window") != Mw.rows())
        schema(path + "/window", "window does not match M_window");
    }
    RepAut phi = validated(path, [&] { return RepAut::eventually_uniform(Mw, B); });
    const auto &e = phi.get<EventuallyUniform>();
    if (variant == "eventually_uniform" && e.window == 0)
      schema(path, "eventually_uniform with empty window; use 'uniform'");
    check_witness(j, path, "B_inv", e.block.B_inv);
    if (e.window) check_witness(j, path, "M_window_inv", e.M_window_inv);
    return phi;
  }
  if (variant == "graded") {
    std::vector<Integer> prefix;
    const auto &p = read_array(field(j, path, "prefix"), path + "/prefix");
    for (std::size_t i = 0; i < p.size(); ++i)
      prefix.push_back(read_integer(p[i], path + "/prefix/" + std::to_string(i)));
    std::vector<long> excluded;
    const auto &x = read_array(field(j, path, "excluded"), path + "/excluded");
    for (std::size_t i = 0; i < x.size(); ++i)
      excluded.push_back(read_long(x[i], path + "/excluded/" + std::to_string(i)));
    Integer e = j.contains("exponent") ? read_integer(j["exponent"], path + "/exponent") : Integer(1);
    IntMatrix head = j.contains("head") ? matrix_from_json(j["head"], path + "/head") : IntMatrix();
    RepAut phi = validated(path, [&] { return RepAut::graded_with_head(prefix, excluded, e, head); });
    if (phi.get<GradedBlock>().head_pairs) check_witness(j, path, "head_inv", phi.get<GradedBlock>().head_inv);
    return phi;
  }
  schema(path + "/variant", "unknown variant '" + variant + "'");
}

inline auto word_from_json(const Json &j, const std::string &path = "") -> Word {
  using namespace detail;
  if (!j.is_object()) schema(path, "expected a word object");
  if (j.contains("name")) return Word::named(read_string(j["name"], path + "/name"));
  if (j.contains("inv")) return Word::inverse(word_from_json(j["inv"], path + "/inv"));
  if (j.contains("pow"))
    return Word::power(word_from_json(j["pow"], path + "/pow"), read_long(field(j, path, "exp"), path + "/exp"));
  if (j.contains("conj"))
    return Word::conj(word_from_json(j["conj"], path + "/conj"), word_from_json(field(j, path, "by"), path + "/by"));
  if (j.contains("prod")) {
    const auto &f = read_array(j["prod"], path + "/prod");
    std::vector<Word> ws;
    for (std::size_t i = 0; i < f.size(); ++i)
      ws.push_back(word_from_json(f[i], path + "/prod/" + std::to_string(i)));
    return Word::product(std::move(ws));
  }
  schema(path, "unknown word token");
}

inline auto env_from_json(const Json &j, const std::string &path = "") -> Environment {
  if (!j.is_object()) detail::schema(path, "expected an object of bindings");
  Environment env;
  for (auto it = j.begin(); it != j.end(); ++it)
    env.emplace(it.key(), aut_from_json(it.value(), path + "/" + it.key()));
  return env;
}

inline auto certificate_from_json(const Json &j, const std::string &path = "") -> Certificate {
  using namespace detail;
  Certificate c;
  if (j.contains("label")) c.label = read_string(j["label"], path + "/label");
  std::string claim = read_string(field(j, path, "claim"), path + "/claim");
  if (claim == "window-identity") c.claim = ClaimKind::WindowIdentity;
  else if (claim == "order") c.claim = ClaimKind::Order;
  else if (claim == "action-on-vector") c.claim = ClaimKind::ActionOnVector;
  else schema(path + "/claim", "unknown claim kind '" + claim + "'");
  c.word = word_from_json(field(j, path, "word"), path + "/word");
  c.env = env_from_json(field(j, path, "env"), path + "/env");
  const auto &w = read_array(field(j, path, "windows"), path + "/windows");
  for (std::size_t i = 0; i < w.size(); ++i)
    c.windows.push_back(read_count(w[i], path + "/windows/" + std::to_string(i)));
  if (j.contains("target")) c.target_aut = aut_from_json(j["target"], path + "/target");
  if (j.contains("target_matrix"))
    c.target_matrix = matrix_from_json(j["target_matrix"], path + "/target_matrix");
  if (c.claim == ClaimKind::Order) c.order = read_long(field(j, path, "order"), path + "/order");
  if (c.claim == ClaimKind::ActionOnVector) {
    c.vectors = matrix_from_json(field(j, path, "vectors"), path + "/vectors");
    c.images = matrix_from_json(field(j, path, "images"), path + "/images");
  }
  return c;
}

inline auto chain_from_json(const Json &j, const std::string &path = "") -> WitnessChain {
  using namespace detail;
  WitnessChain ch;
  ch.input_name = read_string(field(j, path, "input_name"), path + "/input_name");
  ch.input = aut_from_json(field(j, path, "input"), path + "/input");
  const auto &s = read_array(field(j, path, "steps"), path + "/steps");
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string p = path + "/steps/" + std::to_string(i);
    ch.steps.push_back({read_string(field(s[i], p, "name"), p + "/name"),
                        certificate_from_json(field(s[i], p, "certificate"), p + "/certificate")});
  }
  ch.target = aut_from_json(field(j, path, "target"), path + "/target");
  if (j.contains("notes")) {
    const auto &n = read_array(j["notes"], path + "/notes");
    for (std::size_t i = 0; i < n.size(); ++i)
      ch.notes.push_back(read_string(n[i], path + "/notes/" + std::to_string(i)));
  }
  if (j.contains("out_of_scope")) ch.out_of_scope = read_string(j["out_of_scope"], path + "/out_of_scope");
  return ch;
}

/// Parses text and checks the document header.
inline auto parse_document(const std::string &text, const std::string &kind) -> Json {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error &e) {
    fail(ErrorKind::Parse, std::string("JSON syntax: ") + e.what());
  }
  if (!j.is_object()) detail::schema("", "expected a JSON object");
  long v = detail::read_long(detail::field(j, "", "format_version"), "/format_version");
  if (v != kFormatVersion) detail::schema("/format_version", "unsupported version " + std::to_string(v));
  std::string k = detail::read_string(detail::field(j, "", "kind"), "/kind");
  if (k != kind) detail::schema("/kind", "expected kind '" + kind + "', got '" + k + "'");
  return j;
}

// ---- file-level documents (.aut, .word, .cert) -------------------------------

inline auto serialize_aut(const RepAut &phi) -> std::string {
  return to_text(document("aut", aut_to_json(phi)));
}
inline auto parse_aut(const std::string &text) -> RepAut {
  return aut_from_json(parse_document(text, "aut"));
}

struct WordDocument {
  Word word;
  Environment env;
  friend auto operator==(const WordDocument &, const WordDocument &) -> bool = default;
};

inline auto serialize_word(const WordDocument &d) -> std::string {
  return to_text(document("word", {{"word", word_to_json(d.word)}, {"env", env_to_json(d.env)}}));
}
inline auto parse_word(const std::string &text) -> WordDocument {
  Json j = parse_document(text, "word");
  return {word_from_json(detail::field(j, "", "word"), "/word"),
          env_from_json(detail::field(j, "", "env"), "/env")};
}

inline auto serialize_certificate(const Certificate &c) -> std::string {
  return to_text(document("certificate", certificate_to_json(c)));
}
inline auto parse_certificate(const std::string &text) -> Certificate {
  return certificate_from_json(parse_document(text, "certificate"));
}

inline auto serialize_chain(const WitnessChain &ch) -> std::string {
  return to_text(document("chain", chain_to_json(ch)));
}
inline auto parse_chain(const std::string &text) -> WitnessChain {
  return chain_from_json(parse_document(text, "chain"));
}

} // namespace freeab
