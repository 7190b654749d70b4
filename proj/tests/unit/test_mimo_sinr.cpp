/**
 * @file test_mimo_sinr.cpp
 * @brief Covariance accumulation, whitening and MMSE-IRC SINR.
 */
#include <gtest/gtest.h>

#include <cmath>

#include "nrmimo/mimo_sinr.hpp"
#include "support/oracles.hpp"

using namespace nrmimo;
using oracle::randomComplex;

namespace {

ComplexMatrixArray randomPsdCov(std::size_t n, std::size_t pages, int interferers, Random& rng) {
  auto w = noiseCovariance(rng.uniform(0.1, 2.0), n, pages);
  for (int k = 0; k < interferers; ++k)
    w = addInterference(w, randomComplex(n, 4, pages, rng), dummyPrecoder(4, 1 + k % 2, pages));
  return w;
}

}  // namespace

TEST(NoiseCov, Examples) {
  EXPECT_EQ(noiseCovariance(1.0, 2, 3), identity(2, 3));
  EXPECT_EQ(noiseCovariance(4.0, 2, 1), identity(2) * cd(4));
  EXPECT_EQ(noiseCovariance(1.0, 2, 52).pages(), 52u);
  EXPECT_THROW(noiseCovariance(0.0, 2, 1), std::invalid_argument);
}

TEST(AddInterference, OuterProduct) {
  const double s2 = 0.3;
  const auto p = make(2, 1, 1, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});
  const auto w = addInterference(noiseCovariance(s2, 2, 1), identity(2), p);
  EXPECT_NEAR(w(0, 0).real(), s2 + 0.5, 1e-15);
  EXPECT_NEAR(w(1, 1).real(), s2 + 0.5, 1e-15);
  EXPECT_NEAR(w(0, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(w(1, 0).real(), 0.5, 1e-15);
}

TEST(AddInterference, ZeroPowerIsNoOp) {
  Random rng(1, 0);
  const auto acc = randomPsdCov(2, 3, 1, rng);
  EXPECT_EQ(addInterference(acc, randomComplex(2, 4, 3, rng), ComplexMatrixArray(4, 1, 3)), acc);
}

TEST(AddInterference, StaysHermitian) {
  Random rng(2, 0);
  const auto w = randomPsdCov(4, 8, 5, rng);
  EXPECT_LT(maxAbsDiff(w, hermitian(w)), 1e-12);
  EXPECT_THROW(addInterference(identity(3, 2), randomComplex(2, 2, 2, rng), dummyPrecoder(2, 1, 2)), DimensionError);
}

TEST(Whitening, Examples) {
  Random rng(3, 0);
  const auto h = randomComplex(2, 4, 5, rng);
  EXPECT_LT(maxAbsDiff(whitenChannel(h, noiseCovariance(4.0, 2, 5)), h * cd(0.5)), 1e-15);
  EXPECT_EQ(whitenChannel(h, identity(2, 5)), h);
}

TEST(Whitening, CovarianceBecomesIdentity) {
  Random rng(4, 0);
  const auto p = make(2, 1, 1, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});
  const auto w0 = addInterference(noiseCovariance(1.0, 2, 1), identity(2), p);
  const auto li = invertLowerTriangular(choleskyLLT(w0));
  EXPECT_LT(maxAbsDiff(pageMultiply(pageMultiply(li, w0), hermitian(li)), identity(2)), 1e-10);
  for (int t = 0; t < 50; ++t) {
    const auto w = randomPsdCov(1 + t % 4, 6, t % 3, rng);
    const auto l = invertLowerTriangular(choleskyLLT(w));
    EXPECT_LT(maxAbsDiff(pageMultiply(pageMultiply(l, w), hermitian(l)), identity(w.rows(), 6)), 1e-10);
  }
}

TEST(Whitening, ZeroNoiseFails) {
  EXPECT_THROW(whitenChannel(identity(2), ComplexMatrixArray(2, 2, 1)), DecompositionError);
}

TEST(Sinr, ScalarCase) {
  const auto s = computeSinr(make(1, 1, 1, {1.0}), make(1, 1, 1, {1.0}));
  EXPECT_NEAR(s(0, 0), 1.0, 1e-15);
}

TEST(Sinr, DiagonalHandExample) {
  const auto s = computeSinr(make(2, 2, 1, {2.0, 0.0, 0.0, 1.0}), identity(2));
  EXPECT_NEAR(s(0, 0), 4.0, 1e-14);
  EXPECT_NEAR(s(1, 0), 1.0, 1e-14);
}

TEST(Sinr, ZeroPrecoderGivesZero) {
  Random rng(5, 0);
  const auto s = computeSinr(randomComplex(2, 2, 4, rng), ComplexMatrixArray(2, 2, 4));
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(Sinr, MatchesExplicitMmseReceiver) {
  Random rng(6, 0);
  for (int t = 0; t < 100; ++t) {
    const auto h = randomComplex(2, 2, 1, rng);
    const auto w = randomPsdCov(2, 1, t % 3, rng);
    const auto p = randomComplex(2, 1 + t % 2, 1, rng, 0.5);
    const auto s = computeSinr(whitenChannel(h, w), p);
    const auto ref = oracle::mmseReceiverSinr(oracle::fromPage(h), oracle::fromPage(p), oracle::fromPage(w));
    for (std::size_t l = 0; l < ref.size(); ++l) EXPECT_NEAR(s(l, 0), ref[l], 1e-8 * std::max(1.0, ref[l]));
  }
}

TEST(Sinr, RankOneIsChannelGain) {
  Random rng(7, 0);
  const auto h = randomComplex(4, 8, 6, rng);
  const auto p = randomComplex(8, 1, 6, rng, 0.3);
  const auto s = computeSinr(h, p);
  const auto hp = pageMultiply(h, p);
  for (std::size_t rb = 0; rb < 6; ++rb) EXPECT_NEAR(s(0, rb), frobeniusNorm2(hp, rb), 1e-12 * s(0, rb));
}

TEST(Sinr, InterferenceNeverHelps) {
  Random rng(8, 0);
  for (int t = 0; t < 40; ++t) {
    const auto h = randomComplex(2, 4, 3, rng);
    const auto p = dummyPrecoder(4, 1 + t % 2, 3);
    const auto w = noiseCovariance(1.0, 2, 3);
    const auto clean = computeSinr(whitenChannel(h, w), p);
    const auto wi = addInterference(w, randomComplex(2, 4, 3, rng), dummyPrecoder(4, 1, 3));
    const auto dirty = computeSinr(whitenChannel(h, wi), p);
    for (std::size_t i = 0; i < clean.values().size(); ++i)
      EXPECT_LE(dirty.values()[i], clean.values()[i] * (1 + 1e-12));
  }
}

TEST(Sinr, InvariantToReceiveTransform) {
  Random rng(9, 0);
  for (int t = 0; t < 20; ++t) {
    const auto h = randomComplex(3, 4, 2, rng);
    const auto w = randomPsdCov(3, 2, 1, rng);
    const auto u = randomComplex(3, 3, 2, rng) + identity(3, 2) * cd(2.0);
    const auto p = dummyPrecoder(4, 2, 2);
    const auto a = computeSinr(whitenChannel(h, w), p);
    const auto b = computeSinr(whitenChannel(pageMultiply(u, h), pageMultiply(pageMultiply(u, w), hermitian(u))), p);
    for (std::size_t i = 0; i < a.values().size(); ++i)
      EXPECT_NEAR(a.values()[i], b.values()[i], 1e-8 * std::max(1.0, a.values()[i]));
  }
}

TEST(Sinr, GramKernelMatchesMatrixPath) {
  Random rng(10, 0);
  for (std::size_t r = 1; r <= 4; ++r) {
    const auto h = randomComplex(4, 8, 5, rng);
    const auto p = randomComplex(8, r, 5, rng, 0.4);
    const auto s = computeSinr(h, p);
    const auto g = pageMultiply(h, p);
    const auto gram = pageMultiply(hermitian(g), g);
    for (std::size_t rb = 0; rb < 5; ++rb) {
      double out[4];
      sinrFromGram(r, gram.page(rb).data(), out);
      for (std::size_t l = 0; l < r; ++l) EXPECT_NEAR(out[l], s(l, rb), 1e-10 * std::max(1.0, s(l, rb)));
    }
  }
}

TEST(SisoPsd, Examples) {
  const auto p = make(2, 1, 1, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});
  EXPECT_NEAR(sisoRxPsd(identity(2), p)[0], 1.0, 1e-15);
  EXPECT_EQ(sisoRxPsd(identity(2), ComplexMatrixArray(2, 1, 1))[0], 0.0);
  Random rng(11, 0);
  for (double v : sisoRxPsd(randomComplex(2, 4, 9, rng), randomComplex(4, 2, 9, rng))) EXPECT_GE(v, 0.0);
}

TEST(DummyPrecoder, Examples) {
  EXPECT_EQ(dummyPrecoder(2, 1), make(2, 1, 1, {1.0, 0.0}));
  EXPECT_LT(maxAbsDiff(dummyPrecoder(2, 2), identity(2) * cd(1 / std::sqrt(2.0))), 1e-16);
  const auto w = dummyPrecoder(4, 2);
  EXPECT_NEAR(w(0, 0).real(), 1 / std::sqrt(2.0), 1e-16);
  EXPECT_NEAR(w(1, 1).real(), 1 / std::sqrt(2.0), 1e-16);
  EXPECT_NEAR(frobeniusNorm2(w), 1.0, 1e-15);
  EXPECT_THROW(dummyPrecoder(2, 3), std::invalid_argument);
}

TEST(Tile, RepeatsPage) {
  const auto t = tile(make(2, 1, 1, {1.0, 2.0}), 3);
  EXPECT_EQ(t.pages(), 3u);
  EXPECT_EQ(t(1, 0, 2), cd(2));
}
