#include <gtest/gtest.h>

#include <qcube/enumeration.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace qcube;

TEST(Counts, SmallValues) {
  const Count bis[] = {1, 1, 5};
  const Count is[] = {3, 7, 35};
  for (int d = 1; d <= 3; ++d) {
    const auto t = sweep_profiles(Dim(d));
    EXPECT_EQ(count_bis(t), bis[d - 1]) << d;
    EXPECT_EQ(count_is(t), is[d - 1]) << d;
  }
}

TEST(Counts, AllSubsetsOracle) {
  for (int d = 1; d <= 4; ++d) {
    const auto want = oracle::all_subsets(d);
    const auto r = count_report(sweep_profiles(Dim(d)));
    EXPECT_EQ(r.bis, want.bis) << d;
    EXPECT_EQ(r.is_count, want.is) << d;
    EXPECT_EQ(r.max_bis, want.max_bis) << d;
    for (const auto& [k, n] : r.by_size) {
      const auto it = want.bis_by_size.find(k);
      EXPECT_EQ(n, it == want.bis_by_size.end() ? 0 : it->second) << d << " k=" << k;
    }
  }
}

TEST(Counts, BySizeExamples) {
  EXPECT_EQ(count_bis_by_size(sweep_profiles(Dim(3))), (std::map<int, Count>{{0, 1}, {1, 4}, {2, 0}}));
  EXPECT_EQ(count_bis_by_size(sweep_profiles(Dim(2))), (std::map<int, Count>{{0, 1}, {1, 0}}));
}

TEST(Counts, ReportInvariants) {
  for (int d = 2; d <= 5; ++d) {
    const auto r = count_report(sweep_profiles(Dim(d), {ClosureFeature::None, 4}));
    Count sum = 0;
    for (const auto& [k, n] : r.by_size) {
      sum += n;
      if (2 * k > r.max_bis) {
        EXPECT_EQ(n, 0);
      }
    }
    EXPECT_EQ(sum, r.bis);
    ASSERT_TRUE(r.lower_bound);
    EXPECT_LE(*r.lower_bound, r.bis);
    EXPECT_LE(r.bis, r.is_count);
  }
}

TEST(MaxBisFormula, Values) {
  EXPECT_EQ(barber_formula(Dim(2)), 0);
  EXPECT_EQ(barber_formula(Dim(3)), 2);
  EXPECT_EQ(barber_formula(Dim(4)), 4);
  EXPECT_EQ(barber_formula(Dim(5)), 10);
  EXPECT_EQ(barber_formula(Dim(6)), 20);
  EXPECT_THROW(barber_formula(Dim(1)), Error);
}

TEST(MaxBis, SearchAgreesWithFormula) {
  for (int d = 2; d <= 5; ++d) EXPECT_EQ(Count(max_bis_size(sweep_profiles(Dim(d), {ClosureFeature::None, 4}))), barber_formula(Dim(d)));
}

TEST(LowerBound, Values) {
  EXPECT_EQ(lower_bound_series(Dim(2)), 1);
  EXPECT_EQ(lower_bound_series(Dim(3)), 2);
  EXPECT_EQ(lower_bound_series(Dim(4)), 6);
  // C(10, 5) by Vandermonde
  EXPECT_EQ(lower_bound_series(Dim(5)), 252);
}

TEST(Scaling, Rows) {
  const auto rows = scaling_stats(1, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].log2_bis, 0.0);
  EXPECT_DOUBLE_EQ(rows[0].x_d, 1.0);
  EXPECT_FALSE(rows[0].x_lower);
  EXPECT_NEAR(rows[2].log2_bis, 2.3219, 1e-4);
  EXPECT_NEAR(rows[2].x_d, 0.7266, 1e-4);
  for (const auto& r : rows) {
    EXPECT_GT(r.x_d, 0);
    EXPECT_GT(r.is_ratio, 0);
    if (r.x_lower) {
      EXPECT_GE(*r.x_lower, r.x_d);
    }
  }
  EXPECT_NEAR(rows[2].is_ratio, 35.0 / (2 * std::sqrt(std::exp(1.0)) * 16), 1e-12);
  EXPECT_THROW(scaling_stats(3, 7), Error);
  EXPECT_THROW(scaling_stats(3, 2), Error);
}
