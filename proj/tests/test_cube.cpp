#include <gtest/gtest.h>

#include <qcube/cube.hpp>

#include <random>

#include "oracles.hpp"

using namespace qcube;

namespace {

VertexSet set_of(int d, std::initializer_list<std::uint32_t> ids) { return VertexSet(Dim(d), ids); }

std::uint64_t as_bits(const VertexSet& s) {
  std::uint64_t m = 0;
  s.for_each([&](Vertex v) { m |= std::uint64_t{1} << v.id; });
  return m;
}

VertexSet from_bits(int d, std::uint64_t m) {
  VertexSet s{Dim(d)};
  for (; m; m &= m - 1) s.insert(Vertex{static_cast<std::uint32_t>(std::countr_zero(m))});
  return s;
}

}  // namespace

TEST(Dim, Limits) {
  EXPECT_EQ(Dim(3).vertex_count(), 8u);
  EXPECT_EQ(Dim(3).half(), 4u);
  EXPECT_THROW(Dim(0), Error);
  try {
    Dim bad(25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_capacity());
  }
}

TEST(Parity, Examples) {
  EXPECT_EQ(parity(Vertex{0b000}), Parity::Even);
  EXPECT_EQ(parity(Vertex{0b011}), Parity::Even);
  EXPECT_EQ(parity(Vertex{0b111}), Parity::Odd);
}

TEST(Neighbors, Examples) {
  EXPECT_EQ(neighbors(Dim(3), Vertex{0b000}), set_of(3, {0b001, 0b010, 0b100}));
  EXPECT_EQ(neighbors(Dim(1), Vertex{0}), set_of(1, {1}));
  EXPECT_EQ(neighbors(Dim(3), Vertex{0b101}), set_of(3, {0b100, 0b111, 0b001}));
  EXPECT_THROW(neighbors(Dim(3), Vertex{8}), Error);
}

TEST(Neighborhood, Examples) {
  EXPECT_EQ(neighborhood(set_of(3, {0b000, 0b011})), set_of(3, {0b001, 0b010, 0b100, 0b111}));
  EXPECT_TRUE(neighborhood(VertexSet(Dim(5))).empty());
  const Dim d(3);
  EXPECT_EQ(neighborhood(VertexSet::parity_class(d, Parity::Even)), VertexSet::parity_class(d, Parity::Odd));
}

TEST(Closure, Examples) {
  EXPECT_EQ(closure(set_of(3, {0b000})), set_of(3, {0b000}));
  EXPECT_EQ(closure(set_of(3, {0b000, 0b011})), set_of(3, {0b000, 0b011, 0b101, 0b110}));
  EXPECT_TRUE(closure(VertexSet(Dim(4))).empty());
}

TEST(Closure, MixedParityRejected) {
  EXPECT_THROW(closure(set_of(3, {0, 1})), Error);
  EXPECT_THROW(class_of(set_of(3, {0, 1})), Error);
}

TEST(Closure, MatchesDefinitionExhaustively) {
  for (int d = 1; d <= 4; ++d) {
    const auto ev = oracle::evens(d);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << ev.size()); ++s) {
      const std::uint64_t verts = oracle::expand(ev, s);
      const VertexSet a = from_bits(d, verts);
      ASSERT_EQ(as_bits(closure(a)), oracle::closure(d, verts)) << "d=" << d << " s=" << s;
      ASSERT_EQ(as_bits(neighborhood(a)), oracle::nbhd(d, verts));
    }
  }
}

TEST(Closure, Invariants) {
  std::mt19937_64 rng(7);
  for (int d = 2; d <= 6; ++d) {
    const auto ev = oracle::evens(d);
    for (int rep = 0; rep < 300; ++rep) {
      std::uint64_t verts = 0;
      for (auto v : ev)
        if (rng() % 4 == 0) verts |= std::uint64_t{1} << v;
      const VertexSet a = from_bits(d, verts);
      const VertexSet c = closure(a);
      ASSERT_TRUE(a.is_subset_of(c));
      ASSERT_EQ(neighborhood(c), neighborhood(a));
      ASSERT_EQ(closure(c), c);
      // expansion of the even class
      ASSERT_GE(neighborhood(a).size(), a.size());
    }
  }
}

TEST(Expansion, EveryEvenSetExhaustive) {
  for (int d = 1; d <= 4; ++d) {
    const HalfCube cube{Dim(d)};
    for (std::uint64_t m = 0; m <= cube.full_mask(); ++m)
      ASSERT_GE(std::popcount(cube.neighborhood(m)), std::popcount(m));
  }
}

TEST(TwoComponents, Examples) {
  EXPECT_EQ(two_components(set_of(3, {0b000, 0b011, 0b101})).size(), 1u);
  const auto comps = two_components(set_of(4, {0b0000, 0b1111}));
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0], set_of(4, {0b0000}));
  EXPECT_EQ(comps[1], set_of(4, {0b1111}));
  EXPECT_TRUE(two_components(VertexSet(Dim(3))).empty());
}

TEST(TwoComponents, PartitionWithDisjointNeighborhoods) {
  std::mt19937_64 rng(11);
  for (int d = 3; d <= 6; ++d) {
    const auto ev = oracle::evens(d);
    for (int rep = 0; rep < 200; ++rep) {
      std::uint64_t verts = 0;
      for (auto v : ev)
        if (rng() % 6 == 0) verts |= std::uint64_t{1} << v;
      const VertexSet a = from_bits(d, verts);
      const auto comps = two_components(a);
      VertexSet uni{Dim(d)};
      std::size_t g_sum = 0;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        ASSERT_TRUE(oracle::two_linked(as_bits(comps[i])));
        ASSERT_FALSE(uni.intersects(comps[i]));
        uni |= comps[i];
        g_sum += neighborhood(comps[i]).size();
        for (std::size_t j = i + 1; j < comps.size(); ++j)
          ASSERT_FALSE(neighborhood(comps[i]).intersects(neighborhood(comps[j])));
      }
      ASSERT_EQ(uni, a);
      ASSERT_EQ(g_sum, neighborhood(a).size());
    }
  }
}

TEST(VertexSet, HexRoundTrip) {
  const VertexSet s = set_of(4, {0, 3, 9});
  EXPECT_EQ(s.to_hex(), "209");
  EXPECT_EQ(VertexSet::from_hex(Dim(4), "0x209"), s);
  EXPECT_THROW(VertexSet::from_hex(Dim(2), "10"), Error);
  EXPECT_THROW(VertexSet::from_hex(Dim(4), "zz"), Error);
}

TEST(VertexSet, CanonicalOrderIsLexOnSortedIds) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 2000; ++rep) {
    const VertexSet x = from_bits(6, rng() & rng());
    const VertexSet y = from_bits(6, rng() & rng());
    const auto xi = x.ids(), yi = y.ids();
    ASSERT_EQ(x < y, std::lexicographical_compare(xi.begin(), xi.end(), yi.begin(), yi.end()));
  }
}

TEST(HalfCube, AgreesWithVertexSetOps) {
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 6; ++d) {
    const HalfCube cube{Dim(d)};
    for (int rep = 0; rep < 200; ++rep) {
      const std::uint64_t m = rng() & cube.full_mask();
      const VertexSet a = cube.evens_to_set(m);
      ASSERT_EQ(cube.evens_mask(a), m);
      ASSERT_EQ(cube.odds_to_set(cube.neighborhood(m)), neighborhood(a));
      ASSERT_EQ(cube.evens_to_set(cube.closure(m)), closure(a));
      ASSERT_EQ(cube.two_linked(m), is_two_linked(a));
    }
  }
}
