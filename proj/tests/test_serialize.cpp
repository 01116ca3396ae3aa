#include <gtest/gtest.h>

#include <functional>

#include "freeab/construct.hpp"
#include "freeab/filters.hpp"
#include "freeab/ladder.hpp"
#include "freeab/sampling.hpp"
#include "freeab/serialize.hpp"

using namespace freeab;

namespace {

auto kind_of(const std::function<void()> &f) -> std::optional<ErrorKind> {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  return std::nullopt;
}

auto message_of(const std::function<void()> &f) -> std::string {
  try {
    f();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST(SerializeAut, TauDocument) {
  auto j = Json::parse(serialize_aut(RepAut::uniform(IntMatrix{{1, 1}, {0, 1}})));
  EXPECT_EQ(j["kind"], "aut");
  EXPECT_EQ(j["variant"], "uniform");
  EXPECT_EQ(j["d"], 2);
  EXPECT_EQ(j["B"], Json::parse("[[1,1],[0,1]]"));
}

TEST(SerializeAut, NonUnimodularIsValidationError) {
  std::string text = R"({"format_version":1,"kind":"aut","variant":"uniform","B":[[2,0],[0,1]]})";
  EXPECT_EQ(kind_of([&] { parse_aut(text); }), ErrorKind::Validation);
  EXPECT_NE(message_of([&] { parse_aut(text); }).find("determinant 2"), std::string::npos)
      << message_of([&] { parse_aut(text); });
}

TEST(SerializeAut, SchemaErrorsCarryPosition) {
  std::string text = R"({"format_version":1,"kind":"aut","variant":"uniform","B":[[1,1],[0,"x"]]})";
  EXPECT_EQ(kind_of([&] { parse_aut(text); }), ErrorKind::Parse);
  EXPECT_NE(message_of([&] { parse_aut(text); }).find("/B/1/1"), std::string::npos);
  EXPECT_EQ(kind_of([&] { parse_aut("{not json"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([&] { parse_aut(R"({"format_version":1,"kind":"word"})"); }), ErrorKind::Parse);
  EXPECT_EQ(kind_of([&] { parse_aut(R"({"format_version":9,"kind":"aut"})"); }), ErrorKind::Parse);
}

TEST(SerializeAut, WrongInverseWitnessRejected) {
  std::string text =
      R"({"format_version":1,"kind":"aut","variant":"uniform","B":[[1,1],[0,1]],"B_inv":[[1,1],[0,1]]})";
  EXPECT_EQ(kind_of([&] { parse_aut(text); }), ErrorKind::Validation);
}

TEST(SerializeAut, GradedRoundTrip) {
  auto phi = RepAut::graded({2, 3}, {7});
  EXPECT_EQ(parse_aut(serialize_aut(phi)), phi);
}

TEST(SerializeAut, BigIntegersSurvive) {
  IntMatrix B = IntMatrix::identity(2);
  B(0, 1) = Integer("123456789012345678901234567890");
  auto phi = RepAut::uniform(B);
  EXPECT_EQ(parse_aut(serialize_aut(phi)), phi);
}

TEST(SerializeAut, CorpusRoundTripIsByteStable) {
  for (const auto &phi : sampling::corpus(41, 300)) {
    std::string text = serialize_aut(phi);
    RepAut back = parse_aut(text);
    EXPECT_EQ(back, phi);
    EXPECT_EQ(serialize_aut(back), text);
  }
}

TEST(SerializeWord, RoundTrip) {
  sampling::Rng rng(42);
  Environment env{{"a", RepAut::uniform(IntMatrix{{1, 1}, {0, 1}})},
                  {"b", RepAut::finitary({0}, IntMatrix{{-1}})}};
  for (int it = 0; it < 100; ++it) {
    WordDocument d{sampling::random_word(rng, {"a", "b"}, 4), env};
    auto back = parse_word(serialize_word(d));
    EXPECT_EQ(back, d);
    EXPECT_EQ(evaluate_word(back.word, back.env, 4), evaluate_word(d.word, d.env, 4));
  }
}

TEST(SerializeCertificate, RoundTripAndVerify) {
  auto c = shear_order_certificate(order_n_shear(5, 7));
  auto back = parse_certificate(serialize_certificate(c));
  EXPECT_EQ(back, c);
  EXPECT_TRUE(verify_certificate(back).ok);
}

TEST(SerializeCertificate, TamperedEntryFailsVerification) {
  auto c = bezout_combine(2, 3, 5).cert;
  auto j = Json::parse(serialize_certificate(c));
  ASSERT_TRUE(verify_certificate(parse_certificate(j.dump())).ok);
  j["target"]["B"][0][1] = 3;
  j["target"].erase("B_inv");
  auto r = verify_certificate(parse_certificate(j.dump()));
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.failure.find("entry (0,1)"), std::string::npos) << r.failure;
}

TEST(SerializeChain, ReverifiesFromText) {
  auto ch = km_pipeline(RepAut::uniform(IntMatrix{{3, 4}, {2, 3}}),
                        PipelineOptions{2, 3, shear_frame(IntMatrix{{3, 4}, {2, 3}}, 2), "phi", true});
  auto back = parse_chain(serialize_chain(ch));
  EXPECT_EQ(back, ch);
  EXPECT_TRUE(verify_chain(back).ok);
}

TEST(SerializeDescriptors, RoundTrip) {
  DescriptorFamily f{{PrimeSet::finite_set({2, 3}), PrimeSet::all_primes(), PrimeSet::all_except({5}),
                      PrimeSet::union_with_prefix({3}, {3, 7})},
                     2};
  auto back = parse_descriptors(serialize_descriptors(f));
  ASSERT_EQ(back.family.size(), f.family.size());
  for (std::size_t i = 0; i < f.family.size(); ++i) EXPECT_EQ(back.family[i], f.family[i]);
  EXPECT_EQ(back.s, f.s);
}
