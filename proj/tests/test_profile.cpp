#include <gtest/gtest.h>

#include <qcube/profile.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "oracles.hpp"

using namespace qcube;

namespace {

std::map<std::tuple<int, int, int>, Count> flatten(const ProfileTable& t) {
  std::map<std::tuple<int, int, int>, Count> out;
  for (const auto& [k, n] : t.entries()) out[{k.a, k.g, k.closure}] = n;
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("qcube_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Sweep, SmallExamples) {
  using E = ProfileTable::Entries;
  EXPECT_EQ(sweep_profiles(Dim(1)).entries(), (E{{{0, 0, 0}, 1}, {{1, 1, 0}, 1}}));
  EXPECT_EQ(sweep_profiles(Dim(2)).entries(), (E{{{0, 0, 0}, 1}, {{1, 2, 0}, 2}, {{2, 2, 0}, 1}}));
  EXPECT_EQ(sweep_profiles(Dim(3)).marginal_a(2), 6);
}

TEST(Sweep, MatchesNaiveOracle) {
  for (int d = 1; d <= 4; ++d) {
    EXPECT_EQ(flatten(sweep_profiles(Dim(d))), oracle::profiles(d, false)) << d;
    EXPECT_EQ(flatten(sweep_profiles(Dim(d), {ClosureFeature::Split})), oracle::profiles(d, true)) << d;
  }
}

TEST(Sweep, ExactClosureSizes) {
  for (int d = 1; d <= 4; ++d) {
    const auto ev = oracle::evens(d);
    ProfileTable::Entries want;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << ev.size()); ++s) {
      const auto verts = oracle::expand(ev, s);
      ProfileKey k{static_cast<std::uint16_t>(std::popcount(verts)), static_cast<std::uint16_t>(std::popcount(oracle::nbhd(d, verts))),
                   static_cast<std::uint8_t>(std::popcount(oracle::closure(d, verts)))};
      ++want[k];
    }
    EXPECT_EQ(sweep_profiles(Dim(d), {ClosureFeature::Size}).entries(), want) << d;
  }
}

TEST(Sweep, TotalsArePowersOfTwo) {
  for (int d = 1; d <= 5; ++d) {
    const auto t = sweep_profiles(Dim(d), {ClosureFeature::None, 2});
    EXPECT_EQ(t.total(), pow2(Dim(d).half()));
    for (int a = 0; a <= static_cast<int>(Dim(d).half()); ++a) EXPECT_EQ(t.marginal_a(a), binomial(Dim(d).half(), a));
  }
}

TEST(Sweep, CapacityLimit) {
  try {
    sweep_profiles(Dim(7));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_capacity());
  }
}

TEST(GrayWalker, IncrementalMatchesScratch) {
  std::mt19937_64 rng(1234);
  for (int d = 5; d <= 6; ++d) {
    const HalfCube cube{Dim(d)};
    const std::uint64_t start = rng() & cube.full_mask();
    GrayWalker<ClosureFeature::Size> walker(cube, start);
    GrayWalker<ClosureFeature::None> plain(cube, start);
    for (int step = 0; step < 20000; ++step) {
      const int i = static_cast<int>(rng() % cube.half());
      walker.toggle(i);
      plain.toggle(i);
      if (step % 37 != 0) continue;
      const std::uint64_t m = walker.subset();
      ASSERT_EQ(plain.subset(), m);
      ASSERT_EQ(walker.size(), std::popcount(m));
      ASSERT_EQ(walker.boundary(), std::popcount(cube.neighborhood(m)));
      ASSERT_EQ(plain.boundary(), walker.boundary());
      ASSERT_EQ(walker.closure_size(), static_cast<int>(closure(cube.evens_to_set(m)).size()));
    }
  }
}

TEST(Sweep, ThreadCountDoesNotChangeTable) {
  for (auto f : {ClosureFeature::None, ClosureFeature::Split, ClosureFeature::Size}) {
    const auto one = sweep_profiles(Dim(5), {f, 1});
    for (unsigned th : {2u, 3u, 8u}) EXPECT_EQ(sweep_profiles(Dim(5), {f, th}), one);
  }
  // prefix width only changes the work split
  EXPECT_EQ(sweep_profiles(Dim(4), {ClosureFeature::Split, 4, 0}), sweep_profiles(Dim(4), {ClosureFeature::Split, 4, 8}));
}

TEST(RestrictedCount, Examples) {
  EXPECT_EQ(restricted_count(Dim(3), 3, 1, 4), 4);
  EXPECT_EQ(restricted_count(Dim(3), 4, 2, 2), 0);
  for (int d = 1; d <= 4; ++d) EXPECT_EQ(restricted_count(Dim(d), 0, 0, 0), 1);
}

TEST(RestrictedCount, SplitTableOnlyAtQuarter) {
  const auto split = sweep_profiles(Dim(4), {ClosureFeature::Split});
  const auto exact = sweep_profiles(Dim(4), {ClosureFeature::Size});
  for (int g = 0; g <= 8; ++g) EXPECT_EQ(restricted_count(split, g, 1, 4), restricted_count(exact, g, 1, 4));
  EXPECT_THROW(restricted_count(split, 6, 1, 3), Error);
  EXPECT_THROW(restricted_count(sweep_profiles(Dim(4)), 6, 1, 4), Error);
}

TEST(ProfileIO, RoundTrip) {
  const auto dir = temp_dir("io");
  const auto t2 = sweep_profiles(Dim(2));
  const auto bytes = serialize_profile(t2);
  EXPECT_EQ(bytes.size(), kProfileHeaderBytes + 3 * kProfileEntryBytes + 4);
  save_profile(t2, dir / "d2.bin");
  EXPECT_EQ(load_profile(dir / "d2.bin"), t2);

  const auto t4 = sweep_profiles(Dim(4), {ClosureFeature::Split});
  save_profile(t4, dir / "d4.bin");
  const auto again = load_profile(dir / "d4.bin");
  EXPECT_EQ(again, t4);
  EXPECT_EQ(serialize_profile(again), serialize_profile(t4));
  std::filesystem::remove_all(dir);
}

TEST(ProfileIO, Errors) {
  auto bytes = serialize_profile(sweep_profiles(Dim(3)));
  auto expect_kind = [](std::vector<std::uint8_t> b, ErrorKind kind) {
    try {
      deserialize_profile(b);
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  expect_kind({bytes.begin(), bytes.end() - 5}, ErrorKind::FormatError);
  expect_kind({bytes.begin(), bytes.begin() + 3}, ErrorKind::FormatError);
  auto flipped = bytes;
  flipped[kProfileHeaderBytes + 7] ^= 0x40;
  expect_kind(flipped, ErrorKind::ChecksumMismatch);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_profile(magic), Error);
  EXPECT_THROW(serialize_profile(sweep_profiles(Dim(3), {ClosureFeature::Size})), Error);
}

TEST(ProfileIO, CacheReuse) {
  const auto dir = temp_dir("cache");
  const SweepOptions opts{ClosureFeature::Split, 2};
  const auto first = cached_profiles(Dim(4), opts, dir);
  const auto path = dir / profile_cache_name(Dim(4), ClosureFeature::Split);
  ASSERT_TRUE(std::filesystem::exists(path));
  EXPECT_EQ(path.filename(), "qdpr_d4_f1_v1.bin");
  EXPECT_EQ(cached_profiles(Dim(4), opts, dir), first);
  std::filesystem::remove_all(dir);
}
