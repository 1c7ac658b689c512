#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rmtclt/numeric.hpp"
#include "rmtclt/philox.hpp"

using namespace rmtclt;

// Known-answer vectors published with the Random123 library (kat_vectors,
// philox4x32 with 10 rounds).
TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, K{0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, GenerateIsConstexpr) {
  constexpr auto b = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  static_assert(b[0] == 0x6627e8d5u);
  SUCCEED();
}

TEST(Substream, PureFunctionOfCoordinates) {
  const Substream a(42, StreamDomain::MatrixEntries, 7);
  const Substream b(42, StreamDomain::MatrixEntries, 7);
  for (std::uint64_t i : {0ull, 1ull, 12345ull, (1ull << 40) + 3}) EXPECT_EQ(a.at(i).bits, b.at(i).bits);
  // evaluation order does not matter
  const auto late = a.at(999).bits;
  (void)a.at(5);
  EXPECT_EQ(a.at(999).bits, late);
}

TEST(Substream, DomainsReplicatesAndSeedsDiffer) {
  std::set<Philox4x32::Block> seen;
  for (std::uint64_t seed : {1ull, 2ull, (1ull << 33)})
    for (auto d : {StreamDomain::MatrixEntries, StreamDomain::Bootstrap, StreamDomain::Diagnostics})
      for (std::uint32_t r : {0u, 1u})
        for (std::uint64_t i : {0ull, 1ull, (1ull << 32)}) seen.insert(Substream(seed, d, r).at(i).bits);
  EXPECT_EQ(seen.size(), 3u * 3u * 2u * 3u);
}

TEST(RandomBlock, UniformRangeAndMoments) {
  const Substream s(3, StreamDomain::Diagnostics, 0);
  CompensatedSum sum, sq;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.at(i).uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = s.at(i).uniform_open_low(1);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum.add(u);
    sq.add(u * u);
  }
  const double m = sum.value() / n;
  // var(U) = 1/12; SE of the mean is sqrt(1/12/n)
  EXPECT_NEAR(m, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq.value() / n - m * m, 1.0 / 12.0, 0.002);
}

TEST(RandomBlock, NormalMoments) {
  const Substream s(11, StreamDomain::Diagnostics, 1);
  const int n = 400000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = s.at(i).normal();
  EXPECT_NEAR(mean(x), 0.0, 4.0 / std::sqrt(n));
  // Var of x^2 is 2 for a standard normal
  EXPECT_NEAR(sample_variance(x), 1.0, 4.0 * std::sqrt(2.0 / n));
  double kurt = 0.0;
  for (double v : x) kurt += v * v * v * v;
  // Var of x^4 is 105 - 9 = 96
  EXPECT_NEAR(kurt / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Numeric, PairwiseAndCompensatedSums) {
  std::vector<double> v(1000001, 0.1);
  v[0] = 1e16;
  CompensatedSum c;
  for (double x : v) c.add(x);
  EXPECT_DOUBLE_EQ(c.value(), 1e16 + 100000.0);
  std::vector<double> w(1 << 20, 1.0 / 3.0);
  EXPECT_NEAR(pairwise_sum(w), (1 << 20) / 3.0, 1e-9);
}

TEST(Numeric, SampleVarianceUsesBesselCorrection) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_DOUBLE_EQ(sample_variance(v), 5.0 / 3.0);
  const std::vector<double> c(50, 7.25);
  EXPECT_EQ(sample_variance(c), 0.0);
}
