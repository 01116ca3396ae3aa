#include <gtest/gtest.h>

#include "freeab/aut.hpp"
#include "freeab/sampling.hpp"

using namespace freeab;

namespace {

const IntMatrix tau_B{{1, 1}, {0, 1}};

// hand-built graded window: pair n is [[1, e*P_n],[0, 1]]
auto graded_window(const std::vector<long> &increments) -> IntMatrix {
  IntMatrix W = IntMatrix::identity(2 * increments.size());
  for (std::size_t n = 0; n < increments.size(); ++n) W(2 * n, 2 * n + 1) = increments[n];
  return W;
}

// aligned window sizes for phi, smallest first
auto aligned_sizes(const RepAut &phi, std::size_t count) -> std::vector<std::size_t> {
  std::vector<std::size_t> out;
  for (std::size_t N = 1; out.size() < count; ++N)
    if (window_aligned(phi, N)) out.push_back(N);
  return out;
}

} // namespace

TEST(WindowMatrix, TauUniform) {
  IntMatrix W = window_matrix(RepAut::uniform(tau_B), 4);
  EXPECT_EQ(W, block_diag({tau_B, tau_B}));
}

TEST(WindowMatrix, GradedPrefix) {
  auto phi = RepAut::graded({2, 3}, {});
  EXPECT_EQ(window_matrix(phi, 4), graded_window({2, 6}));
  // the tail continues with the first unused prime, 5
  EXPECT_EQ(window_matrix(phi, 6), graded_window({2, 6, 30}));
}

TEST(WindowMatrix, FinitaryNegation) {
  auto phi = RepAut::finitary({0}, IntMatrix{{-1}});
  IntMatrix want = IntMatrix::identity(3);
  want(0, 0) = -1;
  EXPECT_EQ(window_matrix(phi, 3), want);
}

TEST(WindowMatrix, MisalignedWindowFails) {
  auto phi = RepAut::eventually_uniform(IntMatrix::identity(4), IntMatrix::identity(2));
  try {
    window_matrix(phi, 3);
    FAIL() << "no error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowAlignment);
  }
  EXPECT_THROW(window_matrix(RepAut::graded({2}, {}), 3), Error);
  EXPECT_THROW(window_matrix(RepAut::finitary({5}, IntMatrix{{-1}}), 4), Error);
}

TEST(Validation, NonUnimodularRejected) {
  EXPECT_THROW(RepAut::uniform(IntMatrix{{2, 0}, {0, 1}}), Error);
  EXPECT_THROW(RepAut::finitary({1, 0}, IntMatrix::identity(2)), Error);
  EXPECT_THROW(RepAut::graded({1}, {}), Error);
  EXPECT_THROW(RepAut::graded({}, {4}), Error);
}

TEST(Compose, TauSquared) {
  auto t = RepAut::uniform(tau_B);
  auto t2 = compose(t, t);
  EXPECT_EQ(t2, RepAut::uniform(IntMatrix{{1, 2}, {0, 1}}));
}

TEST(Compose, SwapThenUniform) {
  auto sw = RepAut::finitary({0, 1}, IntMatrix{{0, 1}, {1, 0}});
  IntMatrix B{{2, 1}, {1, 1}};
  auto xi = compose(sw, RepAut::uniform(B));
  ASSERT_TRUE(xi.holds<EventuallyUniform>());
  const auto &e = xi.get<EventuallyUniform>();
  EXPECT_EQ(e.window, 2u);
  EXPECT_EQ(e.M_window, (IntMatrix{{1, 1}, {2, 1}}));
  EXPECT_EQ(e.block.B, B);
  for (std::size_t N : {2u, 4u, 8u})
    EXPECT_EQ(window_matrix(xi, N), window_matrix(sw, N) * window_matrix(RepAut::uniform(B), N));
}

TEST(Compose, WithInverseIsIdentity) {
  for (const auto &phi : sampling::corpus(21, 60)) {
    EXPECT_TRUE(is_identity(compose(phi, invert(phi))));
    EXPECT_TRUE(is_identity(compose(invert(phi), phi)));
  }
}

TEST(Compose, GradedShapesMustMatch) {
  try {
    compose(RepAut::graded({2}, {}), RepAut::graded({3}, {}));
    FAIL() << "no error";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::CompositionUnsupported);
  }
  EXPECT_THROW(compose(RepAut::graded({2}, {}), RepAut::uniform(tau_B)), Error);
}

TEST(Invert, Examples) {
  EXPECT_EQ(invert(RepAut::uniform(tau_B)), RepAut::uniform(IntMatrix{{1, -1}, {0, 1}}));
  IntMatrix M{{2, 1}, {1, 1}};
  auto f = invert(RepAut::finitary({1, 3}, M));
  EXPECT_EQ(f.get<Finitary>().M, (IntMatrix{{1, -1}, {-1, 2}}));
  auto g = RepAut::graded({2, 3}, {});
  auto gi = invert(g);
  EXPECT_EQ(gi.get<GradedBlock>().prefix, g.get<GradedBlock>().prefix);
  EXPECT_EQ(gi.get<GradedBlock>().exponent, -1);
  EXPECT_EQ(window_matrix(gi, 4) * window_matrix(g, 4), IntMatrix::identity(4));
}

TEST(Reblock, Examples) {
  auto t = RepAut::uniform(tau_B);
  auto t2 = direct_sum_and_reblock(t, 2);
  EXPECT_EQ(t2.get<EventuallyUniform>().block.B, block_diag({tau_B, tau_B}));
  EXPECT_EQ(direct_sum_and_reblock(t, 1), t);
  EXPECT_THROW(direct_sum_and_reblock(t, 0), Error);
  for (std::size_t N : {4u, 8u}) EXPECT_EQ(window_matrix(t2, N), window_matrix(t, N));
}

TEST(Properties, WindowCoherence) {
  for (const auto &phi : sampling::corpus(22, 150)) {
    auto sizes = aligned_sizes(phi, 4);
    for (std::size_t a : sizes)
      for (std::size_t b : sizes)
        if (b % a == 0 && b > a) {
          EXPECT_EQ(window_matrix(phi, b).block(0, 0, a, a), window_matrix(phi, a));
        }
  }
}

TEST(Properties, WindowsAreUnimodular) {
  for (const auto &phi : sampling::corpus(23, 150))
    for (std::size_t N : aligned_sizes(phi, 3)) EXPECT_EQ(abs(determinant(window_matrix(phi, N))), 1);
}

TEST(Properties, ComposeIsHomomorphism) {
  auto items = sampling::corpus(24, 60);
  int checked = 0;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = 0; j < items.size(); j += 3) {
      RepAut xi;
      try {
        xi = compose(items[i], items[j]);
      } catch (const Error &e) {
        ASSERT_EQ(e.kind(), ErrorKind::CompositionUnsupported);
        continue;
      }
      for (std::size_t N = 1; N <= 24; ++N) {
        if (!window_aligned(items[i], N) || !window_aligned(items[j], N) || !window_aligned(xi, N)) continue;
        EXPECT_EQ(window_matrix(xi, N), window_matrix(items[i], N) * window_matrix(items[j], N));
        ++checked;
      }
    }
  EXPECT_GT(checked, 500);
}
