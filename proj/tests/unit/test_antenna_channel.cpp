/**
 * @file test_antenna_channel.cpp
 * @brief Port layouts, sub-array virtualization, steering, cluster channel, pathloss.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nrmimo/antenna.hpp"
#include "nrmimo/channel.hpp"

using namespace nrmimo;

namespace {

LinkGeometry smallLink(double d, std::size_t nRb = 4) {
  LinkGeometry l;
  l.txPosition = {0, 0, 25};
  l.rxPosition = {d, 0, 1.5};
  l.nRb = nRb;
  return l;
}

}  // namespace

TEST(PortConfig, Conf3With32PortsOk) {
  const auto g = ArrayGeometry::upa(8, 4, true);
  const PortConfig p{4, 4, true};
  EXPECT_NO_THROW(validatePortConfig(p, g));
  EXPECT_EQ(p.numPorts(), 32);
}

TEST(PortConfig, TwoPortsOk) {
  const PortConfig p{1, 1, true};
  EXPECT_NO_THROW(validatePortConfig(p, ArrayGeometry::upa(1, 1, true)));
  EXPECT_EQ(p.numPorts(), 2);
}

TEST(PortConfig, Rejections) {
  EXPECT_THROW(validatePortConfig({5, 1, true}, ArrayGeometry::upa(1, 10, true)), PortConfigError);
  EXPECT_THROW(validatePortConfig({3, 1, false}, ArrayGeometry::upa(1, 4, false)), PortConfigError);
  EXPECT_THROW(validatePortConfig({1, 3, false}, ArrayGeometry::upa(4, 1, false)), PortConfigError);
  EXPECT_THROW(validatePortConfig({1, 1, true}, ArrayGeometry::upa(1, 1, false)), PortConfigError);
}

TEST(PortConfig, TotalElements) {
  EXPECT_EQ(ArrayGeometry::upa(8, 4, true).totalElements(), 64);
  EXPECT_EQ(ArrayGeometry::upa(2, 4, false).totalElements(), 8);
}

TEST(PortMap, Conf2aGnbTwoVerticalNeighbours) {
  const auto g = ArrayGeometry::upa(4, 2, true);
  const auto map = elementToPortMap({2, 2, true}, g);
  ASSERT_EQ(map.size(), 8u);
  for (const auto& port : map) {
    ASSERT_EQ(port.size(), 2u);
    const int pol0 = port[0] / 8, pol1 = port[1] / 8;
    EXPECT_EQ(pol0, pol1);
    const int e0 = port[0] % 8, e1 = port[1] % 8;
    EXPECT_EQ(e0 / 4, e1 / 4);             // same column
    EXPECT_EQ(std::abs(e0 % 4 - e1 % 4), 1);  // adjacent rows
  }
}

TEST(PortMap, SingleElement) {
  const auto map = elementToPortMap({1, 1, false}, ArrayGeometry::upa(1, 1, false));
  ASSERT_EQ(map.size(), 1u);
  EXPECT_EQ(map[0], std::vector<int>{0});
}

TEST(PortMap, PartitionForEverySupportedLayout) {
  for (const auto& [nH, nV] : kSupportedPortLayouts)
    for (int mult : {1, 2}) {
      const auto g = ArrayGeometry::upa(nV * mult, nH * mult, true);
      const auto map = elementToPortMap({nH, nV, true}, g);
      ASSERT_EQ(static_cast<int>(map.size()), 2 * nH * nV);
      std::set<int> seen;
      for (const auto& port : map) {
        ASSERT_EQ(static_cast<int>(port.size()), mult * mult);
        const int pol = port[0] / g.elementsPerPolarization();
        int rMin = 1 << 20, rMax = -1, cMin = 1 << 20, cMax = -1;
        for (int e : port) {
          EXPECT_TRUE(seen.insert(e).second) << "element in two ports";
          EXPECT_EQ(e / g.elementsPerPolarization(), pol);
          const int local = e % g.elementsPerPolarization();
          rMin = std::min(rMin, local % g.numRows);
          rMax = std::max(rMax, local % g.numRows);
          cMin = std::min(cMin, local / g.numRows);
          cMax = std::max(cMax, local / g.numRows);
        }
        EXPECT_EQ(rMax - rMin + 1, mult);  // contiguous rectangle
        EXPECT_EQ(cMax - cMin + 1, mult);
      }
      EXPECT_EQ(static_cast<int>(seen.size()), g.totalElements());
    }
}

TEST(Steering, BroadsideAndEndfire) {
  const auto g = ArrayGeometry::upa(1, 2, false);
  const auto broad = steeringVector(g, 0.0, 90.0);
  EXPECT_NEAR(std::abs(broad[0] - cd(1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(broad[1] - cd(1)), 0.0, 1e-15);
  const auto end = steeringVector(g, 90.0, 90.0);
  EXPECT_NEAR(std::abs(end[0] - cd(1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(end[1] - cd(-1)), 0.0, 1e-12);
}

TEST(Steering, UnitMagnitude) {
  Random rng(11, 0);
  const auto g = ArrayGeometry::upa(4, 8, true, 33.0);
  for (int i = 0; i < 50; ++i) {
    const auto a = steeringVector(g, rng.uniform(-180, 180), rng.uniform(0, 180));
    ASSERT_EQ(static_cast<int>(a.size()), g.totalElements());
    for (const auto& v : a) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  }
}

TEST(Pathloss, Formula) {
  LinkGeometry unit;
  unit.txPosition = {0, 0, 0};
  unit.rxPosition = {1, 0, 0};
  unit.carrierFrequencyHz = 1e9;
  EXPECT_NEAR(pathlossUmaDb(unit, LosState::kLos), 28.0, 1e-12);

  const auto l = smallLink(100.0);
  const double d3 = std::sqrt(100.0 * 100.0 + 23.5 * 23.5);
  EXPECT_NEAR(pathlossUmaDb(l, LosState::kLos), 28.0 + 22.0 * std::log10(d3) + 20.0 * std::log10(4.0), 1e-12);
  EXPECT_NEAR(pathlossUmaDb(l, LosState::kLos), 84.3, 0.05);
}

TEST(Pathloss, NlosNeverBelowLos) {
  for (double d = 5; d < 3000; d *= 1.7) {
    const auto l = smallLink(d);
    EXPECT_GE(pathlossUmaDb(l, LosState::kNlos), pathlossUmaDb(l, LosState::kLos));
  }
}

TEST(LosProbability, Shape) {
  EXPECT_DOUBLE_EQ(losProbabilityUma(10.0, 1.5), 1.0);
  double prev = 1.0;
  for (double d = 20; d < 1000; d += 50) {
    const double p = losProbabilityUma(d, 1.5);
    EXPECT_LE(p, prev);
    EXPECT_GT(p, 0.0);
    prev = p;
  }
}

TEST(Channel, SinglePathUnitMagnitude) {
  ClusterParams cp;
  cp.numClusters = 1;
  cp.applyPathloss = false;
  const auto one = ArrayGeometry::upa(1, 1, false);
  Random rng(3, 0);
  const auto ch = generateChannel(smallLink(50.0, 8), one, one, LosState::kNlos, rng, cp);
  ASSERT_EQ(ch.state.clusters.size(), 1u);
  EXPECT_DOUBLE_EQ(ch.state.clusters[0].power, 1.0);
  for (std::size_t rb = 0; rb < 8; ++rb) EXPECT_NEAR(std::abs(ch.h(0, 0, rb)), 1.0, 1e-12);
}

TEST(Channel, SameSeedSameRealization) {
  const auto tx = ArrayGeometry::upa(2, 4, true), rx = ArrayGeometry::upa(1, 2, true, 180.0);
  Random a(42, 1), b(42, 1);
  const auto ha = generateChannel(smallLink(200.0), tx, rx, a);
  const auto hb = generateChannel(smallLink(200.0), tx, rx, b);
  EXPECT_EQ(ha.h, hb.h);
  Random c(43, 1);
  EXPECT_FALSE(generateChannel(smallLink(200.0), tx, rx, c).h == ha.h);
}

TEST(Channel, ClusterPowersNormalised) {
  Random rng(5, 0);
  for (auto los : {LosState::kLos, LosState::kNlos}) {
    const auto st = drawClusters(smallLink(100.0), los, {}, rng);
    double s = 0;
    for (const auto& c : st.clusters) s += c.power;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_EQ(st.clusters.size(), 10u);
  }
}

TEST(Channel, MeanGainMatchesPathloss) {
  // random cluster phases make cross terms vanish: E|h|^2 per element = 10^(-PL/10)
  const auto tx = ArrayGeometry::upa(2, 2, false), rx = ArrayGeometry::upa(1, 2, false, 180.0);
  const auto link = smallLink(150.0, 4);
  const double expected = std::pow(10.0, -pathlossUmaDb(link, LosState::kNlos) / 10.0);
  double acc = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    Random rng(static_cast<std::uint64_t>(s), 7);
    const auto ch = generateChannel(link, tx, rx, LosState::kNlos, rng);
    acc += frobeniusNorm2(ch.h) / static_cast<double>(ch.h.size());
  }
  EXPECT_NEAR(acc / seeds / expected, 1.0, 0.05);
}

TEST(Channel, SwappedEndsTransposeShape) {
  const auto a = ArrayGeometry::upa(2, 4, false), b = ArrayGeometry::upa(1, 2, true);
  Random r1(1, 0), r2(1, 0);
  auto l = smallLink(80.0);
  const auto h = generateChannel(l, a, b, r1).h;
  std::swap(l.txPosition, l.rxPosition);
  const auto g = generateChannel(l, b, a, r2).h;
  EXPECT_EQ(h.rows(), g.cols());
  EXPECT_EQ(h.cols(), g.rows());
  EXPECT_EQ(h.pages(), g.pages());
}

TEST(Txru, OneElementPerPortIsIdentity) {
  const auto tx = ArrayGeometry::upa(2, 2, true), rx = ArrayGeometry::upa(1, 2, true, 180.0);
  Random rng(9, 0);
  const auto ch = generateChannel(smallLink(100.0), tx, rx, rng);
  const auto txMap = elementToPortMap({2, 2, true}, tx);
  const auto rxMap = elementToPortMap({2, 1, true}, rx);
  const auto port = applyTxru(ch.h, tx, txMap, {0, 90}, rx, rxMap, {180, 90});
  ASSERT_EQ(port.rows(), 4u);
  ASSERT_EQ(port.cols(), 8u);
  // single-element ports carry unit weights, only the element order differs
  for (std::size_t p = 0; p < port.pages(); ++p)
    for (std::size_t t = 0; t < txMap.size(); ++t)
      for (std::size_t r = 0; r < rxMap.size(); ++r)
        EXPECT_NEAR(std::abs(port(r, t, p) - ch.h(rxMap[r][0], txMap[t][0], p)), 0.0, 1e-15);
}

TEST(Txru, MatchedBeamGivesCoherentGain) {
  const auto tx = ArrayGeometry::upa(1, 2, false), rx = ArrayGeometry::upa(1, 1, false, 180.0);
  auto link = smallLink(40.0, 2);
  ClusterParams cp;
  cp.numClusters = 1;
  cp.applyPathloss = false;
  Random rng(1, 0);
  const auto ch = generateChannel(link, tx, rx, LosState::kLos, rng, cp);
  ASSERT_EQ(ch.state.clusters.size(), 1u);
  const auto& c = ch.state.clusters[0];
  const auto port = applyTxru(ch.h, tx, elementToPortMap({1, 1, false}, tx), c.txDir, rx,
                              elementToPortMap({1, 1, false}, rx), c.rxDir);
  const double single = std::abs(ch.h(0, 0, 0));
  EXPECT_NEAR(single, 1.0, 1e-12);
  for (std::size_t rb = 0; rb < 2; ++rb) EXPECT_NEAR(std::abs(port(0, 0, rb)), std::sqrt(2.0) * single, 1e-12);
}

TEST(Txru, NormBound) {
  const auto tx = ArrayGeometry::upa(8, 4, true), rx = ArrayGeometry::upa(2, 2, true, 180.0);
  Random rng(21, 0);
  for (int i = 0; i < 5; ++i) {
    const auto ch = generateChannel(smallLink(300.0, 3), tx, rx, rng);
    const auto port = applyTxru(ch.h, tx, elementToPortMap({4, 2, true}, tx), {rng.uniform(-60, 60), 95}, rx,
                                elementToPortMap({1, 1, true}, rx), {180, 85});
    const double bound = std::sqrt(4.0 * 4.0) * std::sqrt(frobeniusNorm2(ch.h));
    EXPECT_LE(std::sqrt(frobeniusNorm2(port)), bound);
  }
}

TEST(LinkChannelCadence, RegeneratesOnlyAfterPeriod) {
  LinkChannel::Endpoint g{ArrayGeometry::upa(2, 4, false), {2, 1, false}, {0, 0, 25}, {}};
  LinkChannel::Endpoint u{ArrayGeometry::upa(2, 2, false, 180.0), {2, 1, false}, {100, 0, 1.5}, {}};
  g.beam = directionTo(g.position, u.position);
  u.beam = directionTo(u.position, g.position);
  LinkChannel link(g, u, 4e9, 52, 180e3, {}, 100.0, 100.0, 7, 0);
  const auto* first = &link.at(0.0);
  const auto h0 = first->portChannel;
  EXPECT_EQ(link.generations(), 1);
  for (double t : {1.0, 50.0, 99.0}) {
    EXPECT_EQ(&link.at(t), first);
    EXPECT_EQ(link.at(t).portChannel, h0);
  }
  EXPECT_EQ(link.generations(), 1);
  EXPECT_EQ(link.at(100.0).generatedAtMs, 100.0);
  EXPECT_EQ(link.generations(), 2);
  EXPECT_FALSE(link.at(100.0).portChannel == h0);
  EXPECT_EQ(link.at(0.0).portChannel.pages(), 52u);
}
