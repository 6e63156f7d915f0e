#include <gtest/gtest.h>

#include <qcube/bounds.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace qcube;

namespace {

VertexSet set_of(int d, std::initializer_list<std::uint32_t> ids) { return VertexSet(Dim(d), ids); }

}  // namespace

TEST(BinomTail, Examples) {
  const auto r = check_binom_tail(10, 0.3);
  EXPECT_EQ(r.sum, 176);
  EXPECT_NEAR(r.bound(), 450.2, 0.5);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(check_binom_tail(1, 0.0).holds);
  EXPECT_EQ(check_binom_tail(1, 0.0).sum, 1);
  for (int n = 1; n <= 40; ++n) EXPECT_TRUE(check_binom_tail(n, 0.5).holds) << n;
  EXPECT_THROW(check_binom_tail(0, 0.2), Error);
  EXPECT_THROW(check_binom_tail(5, 0.6), Error);
}

TEST(BinomTail, FullGrid) {
  for (int n = 1; n <= 30; ++n)
    for (int step = 1; step <= 10; ++step) EXPECT_TRUE(check_binom_tail(n, 0.05 * step).holds) << n << " " << 0.05 * step;
}

TEST(Compositions, Examples) {
  EXPECT_EQ(compositions(4).total, 8);
  EXPECT_EQ(compositions(1).total, 1);
  const auto r = compositions(4, 2);
  EXPECT_EQ(r.at_most_b, 4);
  EXPECT_EQ(r.index_sum, 7);
  EXPECT_NEAR(r.exp2_bound, 29.56, 0.01);
  EXPECT_THROW(compositions(0), Error);
  EXPECT_THROW(compositions(4, 3), Error);
}

TEST(Compositions, EnumerationOracle) {
  for (int m = 1; m <= 16; ++m) {
    std::vector<int> prefix;
    std::vector<std::vector<int>> all;
    oracle::compositions(m, prefix, all);
    ASSERT_EQ(compositions(m).total, Count(all.size())) << m;
    for (int b = 1; 2 * b <= m; ++b) {
      const auto r = compositions(m, b);
      const auto listed = std::count_if(all.begin(), all.end(), [&](const auto& c) { return static_cast<int>(c.size()) <= b; });
      ASSERT_EQ(r.at_most_b, Count(listed));
      ASSERT_EQ(r.at_most_b, oracle::count_compositions(m, b));
      ASSERT_LE(r.at_most_b, r.index_sum);
      ASSERT_LE(static_cast<double>(r.index_sum), r.exp2_bound * (1 + 1e-12));
    }
  }
  for (int m = 17; m <= 20; ++m) EXPECT_EQ(compositions(m).total, oracle::count_compositions(m));
}

TEST(LinkedSets, Examples) {
  EXPECT_EQ(linked_sets_count(Dim(3), 1, Vertex{0}).count, 1);
  EXPECT_EQ(linked_sets_count(Dim(3), 2, Vertex{0}).count, 6);
  EXPECT_EQ(linked_sets_count(Dim(3), 2, Vertex{7}).count, 6);
  EXPECT_THROW(linked_sets_count(Dim(5), 2, Vertex{0}), Error);
  EXPECT_THROW(linked_sets_count(Dim(4), 6, Vertex{0}), Error);
}

TEST(LinkedSets, BruteForceOracle) {
  for (int d = 2; d <= 4; ++d)
    for (int x = 1; x <= (d == 4 ? 4 : 5); ++x)
      for (int k : {1, 2})
        for (std::uint32_t v : {0u, (1u << d) - 1})
          ASSERT_EQ(linked_sets_count(Dim(d), x, Vertex{v}, k).count, oracle::linked_sets(d, x, v, k)) << d << " " << x << " " << k;
}

TEST(Isoperimetry, Examples) {
  const auto r3 = isoperimetry_scan(Dim(3), 2);
  EXPECT_DOUBLE_EQ(r3.deficit, 0.5);
  EXPECT_DOUBLE_EQ(r3.normalized, 0.5 * std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(isoperimetry_scan(Dim(2), 1).deficit, 0.5);
  const auto s = isoperimetry_scan(Dim(3), 1);
  EXPECT_NEAR(s.deficit, 2.0 / 3.0, 1e-12);
  EXPECT_THROW(isoperimetry_scan(Dim(6), 2), Error);
  EXPECT_THROW(isoperimetry_scan(Dim(3), 3), Error);
}

TEST(Isoperimetry, ArgminIsConsistent) {
  for (int d = 2; d <= 5; ++d) {
    const int cap = static_cast<int>(Dim(d).vertex_count() / 4);
    const auto r = isoperimetry_scan(Dim(d), cap, ScanMode::Exhaustive, 0, 4);
    EXPECT_EQ(static_cast<int>(r.argmin.size()), r.set_size);
    EXPECT_EQ(static_cast<int>(neighborhood(r.argmin).size()), r.boundary_size);
    EXPECT_GT(r.deficit, 0);
    EXPECT_EQ(r.argmin, isoperimetry_scan(Dim(d), cap, ScanMode::Exhaustive, 0, 1).argmin);
  }
}

TEST(Isoperimetry, HeuristicNeverBeatsExhaustive) {
  for (int d = 3; d <= 5; ++d) {
    const int cap = static_cast<int>(Dim(d).vertex_count() / 4);
    const auto ex = isoperimetry_scan(Dim(d), cap);
    const auto he = isoperimetry_scan(Dim(d), cap, ScanMode::Heuristic, 42);
    EXPECT_GE(he.deficit, ex.deficit - 1e-12);
    EXPECT_EQ(he.argmin, isoperimetry_scan(Dim(d), cap, ScanMode::Heuristic, 42).argmin);
  }
  EXPECT_GT(isoperimetry_scan(Dim(8), 64, ScanMode::Heuristic, 1).deficit, 0);
}

TEST(SmallSets, Examples) {
  EXPECT_DOUBLE_EQ(small_set_expansion_scan(Dim(3), 1).ratio, 1.0);
  EXPECT_DOUBLE_EQ(small_set_expansion_scan(Dim(3), 2).ratio, 1.5);
  const auto r = small_set_expansion_scan(Dim(4), 2);
  EXPECT_NEAR(r.ratio, 8.0 / 6.0, 1e-12);
  EXPECT_EQ(r.boundary_size, 6);
}

TEST(Components, Classification) {
  const auto iso = classify_components(set_of(3, {0b000}));
  ASSERT_EQ(iso.size(), 1u);
  EXPECT_EQ(iso[0].cls, ComponentClass::Isolated);
  EXPECT_EQ(iso[0].a, 1);
  EXPECT_EQ(iso[0].g, 3);

  const auto small = classify_components(set_of(3, {0b000, 0b011}));
  ASSERT_EQ(small.size(), 1u);
  EXPECT_EQ(small[0].cls, ComponentClass::Small);
  EXPECT_EQ(small[0].a, 2);
  EXPECT_EQ(small[0].g, 4);
  EXPECT_EQ(small[0].closure, 4);

  const auto large = classify_components(set_of(3, {0b000, 0b011}), 4);
  EXPECT_EQ(large[0].cls, ComponentClass::Large);
  EXPECT_THROW(classify_components(set_of(3, {0b001})), Error);
}

TEST(CostAudit, Examples) {
  const auto one = cost_audit(set_of(3, {0b000}));
  ASSERT_EQ(one.components.size(), 1u);
  EXPECT_EQ(one.components[0].bits, 2.0);
  EXPECT_TRUE(one.components[0].within_g());

  // N({0000, 0011}) has 6 vertices: 0001 and 0010 are shared
  const auto pair = cost_audit(set_of(4, {0b0000, 0b0011}));
  EXPECT_EQ(pair.g, 6);
  ASSERT_EQ(pair.components.size(), 1u);
  EXPECT_EQ(pair.components[0].profile.cls, ComponentClass::Small);
  EXPECT_EQ(pair.components[0].profile.closure, 2);
  // seed 3 bits, 6 evens at distance 2 from the seed, 2 subset bits
  EXPECT_DOUBLE_EQ(pair.components[0].bits, 3 + std::log2(6.0) + 2);
  // 24 even pairs at distance 2, each closed
  ASSERT_TRUE(pair.components[0].family_bits.has_value());
  EXPECT_DOUBLE_EQ(*pair.components[0].family_bits, std::log2(24.0));
  EXPECT_FALSE(pair.components[0].within_g());

  const auto anti = cost_audit(set_of(4, {0b0000, 0b1111}));
  ASSERT_EQ(anti.components.size(), 2u);
  for (const auto& c : anti.components) EXPECT_EQ(c.profile.cls, ComponentClass::Isolated);
  EXPECT_GT(anti.decomposition_bits, 0);
  EXPECT_THROW(cost_audit(VertexSet(Dim(4))), Error);
}

TEST(CostAudit, LargePathUsesCertificate) {
  const auto r = cost_audit(set_of(4, {0b0000, 0b0011, 0b0101}), kDefaultGamma, 4);
  ASSERT_EQ(r.components.size(), 1u);
  const auto& c = r.components[0];
  EXPECT_EQ(c.profile.cls, ComponentClass::Large);
  ASSERT_TRUE(c.certificate_bits && c.pair_bits);
  EXPECT_DOUBLE_EQ(c.bits, *c.pair_bits + static_cast<double>(*c.certificate_bits));
  EXPECT_EQ(r.sum_t_large, c.profile.t);
}

TEST(CostAudit, SumOfBoundariesIsG) {
  std::mt19937_64 rng(99);
  const FamilyIndex index{Dim(5)};
  for (int rep = 0; rep < 200; ++rep) {
    const std::uint64_t m = rng() & rng() & index.cube().full_mask();
    if (!m) continue;
    const auto audit = cost_audit(index, index.cube().evens_to_set(m));
    int g_sum = 0;
    for (const auto& c : audit.components) g_sum += c.profile.g;
    ASSERT_EQ(g_sum, audit.g);
  }
}
