#include <granusense/errors.hpp>
#include <granusense/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using granusense::DomainError;
using granusense::Rng;
using granusense::stream_hash;

TEST(Rng, SameSeedSameSequence) {
  Rng a(7), b(7);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  bool differ = false;
  for (int i = 0; i < 4; ++i) differ |= a.next_u64() != b.next_u64();
  EXPECT_TRUE(differ);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(11);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Rng, UniformRangeRespectsBounds) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 5.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 5.0);
  }
}

TEST(Rng, GaussianMomentsMatchStandardNormal) {
  Rng rng(23);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.05);
}

TEST(Rng, GaussianScaleAndShift) {
  Rng a(5), b(5);
  const double g = a.gaussian();
  EXPECT_DOUBLE_EQ(b.gaussian(3.0, 2.0), 3.0 + 2.0 * g);
}

TEST(Rng, PoissonZeroRateIsAlwaysZero) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.poisson(0.0), 0);
}

TEST(Rng, PoissonRejectsNegativeRate) {
  Rng rng(9);
  EXPECT_THROW(rng.poisson(-1.0), DomainError);
}

TEST(Rng, PoissonMeanTracksRate) {
  Rng rng(31);
  const int n = 4000;
  long total = 0;
  for (int i = 0; i < n; ++i) total += rng.poisson(50.0);
  EXPECT_NEAR(static_cast<double>(total) / n, 50.0, 1.0);
}

// derive() keys off the seed, not the draw position, so fan-out order can
// never change a child stream.
TEST(Rng, DeriveIgnoresDrawPosition) {
  Rng fresh(123);
  Rng advanced(123);
  for (int i = 0; i < 10; ++i) advanced.next_u64();

  Rng c1 = fresh.derive("lift");
  Rng c2 = advanced.derive("lift");
  EXPECT_EQ(c1.seed(), c2.seed());
  for (int i = 0; i < 8; ++i) EXPECT_EQ(c1.next_u64(), c2.next_u64());
}

TEST(Rng, DeriveSeparatesStreams) {
  Rng rng(123);
  EXPECT_NE(rng.derive("lift").seed(), rng.derive("tilt").seed());
  EXPECT_NE(rng.derive(0).seed(), rng.derive(1).seed());
}

TEST(Rng, DeriveByNameHashesTheName) {
  Rng rng(77);
  EXPECT_EQ(rng.derive("vib").seed(), rng.derive(stream_hash("vib")).seed());
}

TEST(Rng, DeriveMatchesMix) {
  Rng rng(2024);
  EXPECT_EQ(rng.derive(5).seed(), Rng(Rng::mix(2024, 5)).seed());
}

// FNV-1a reference vectors.
TEST(Rng, StreamHashMatchesFnv1a) {
  EXPECT_EQ(stream_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(stream_hash("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, GaussianPairCacheIsPerInstance) {
  Rng a(42);
  Rng b(42);
  std::vector<double> sa, sb;
  for (int i = 0; i < 7; ++i) sa.push_back(a.gaussian());
  for (int i = 0; i < 7; ++i) sb.push_back(b.gaussian());
  EXPECT_EQ(sa, sb);
}
