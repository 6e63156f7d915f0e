#pragma once

// Exact counts of balanced / ordinary independent sets in Q_d derived from a
// profile table, the maximum balanced independent set size, and the scaling
// diagnostics built from them.
//
// Every independent set I splits as A = I & E, B = I & O with B avoiding
// N(A), so with E = N/2:
//   i(Q_d)   = sum_A 2^(E - |N(A)|)
//   bis(Q_d) = sum_A C(E - |N(A)|, |A|)

#include <qcube/count.hpp>
#include <qcube/cube.hpp>
#include <qcube/profile.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

namespace qcube {

inline Count count_bis(const ProfileTable& table) {
  const int half = static_cast<int>(table.dim().half());
  Count total = 0;
  for (const auto& [key, n] : table.by_size_and_boundary()) {
    total = checked_add(total, checked_mul(n, binomial(half - key.second, key.first)));
  }
  return total;
}

inline Count count_is(const ProfileTable& table) {
  const int half = static_cast<int>(table.dim().half());
  Count total = 0;
  for (const auto& [key, n] : table.by_size_and_boundary()) {
    total = checked_add(total, checked_mul(n, pow2(static_cast<unsigned>(half - key.second))));
  }
  return total;
}

/// k -> number of balanced independent sets with k even and k odd vertices,
/// for k = 0..N/4.
inline std::map<int, Count> count_bis_by_size(const ProfileTable& table) {
  const int half = static_cast<int>(table.dim().half());
  std::map<int, Count> out;
  for (int k = 0; k <= half / 2; ++k) out[k] = 0;
  for (const auto& [key, n] : table.by_size_and_boundary()) {
    const auto [a, g] = key;
    const Count c = binomial(half - g, a);
    if (c == 0) continue;
    out[a] = checked_add(out[a], checked_mul(n, c));
  }
  return out;
}

/// max over A of 2 * min(|A|, N/2 - |N(A)|).
inline int max_bis_size(const ProfileTable& table) {
  const int half = static_cast<int>(table.dim().half());
  int best = 0;
  for (const auto& [key, n] : table.by_size_and_boundary()) {
    if (n != 0) best = std::max(best, 2 * std::min(key.first, half - key.second));
  }
  return best;
}

/// Closed form for the maximum BIS size, d >= 2.
inline Count barber_formula(Dim d) {
  const int dv = d.value();
  if (dv < 2) fail(ErrorKind::DomainError, "maximum BIS formula needs d >= 2");
  const Count half = d.half();
  if (dv % 2 == 0) return half - 2 * binomial(dv - 2, (dv - 2) / 2);
  return half - binomial(dv - 1, (dv - 1) / 2);
}

/// sum_k C(M/2, k)^2 for M the maximum BIS size: every balanced subset of a
/// maximum BIS is itself a BIS.
inline Count lower_bound_series(Dim d) {
  const Count m = barber_formula(d);
  const auto side = static_cast<std::int64_t>(m / 2);
  Count total = 0;
  for (std::int64_t k = 0; k <= side; ++k) {
    const Count c = binomial(side, k);
    total = checked_add(total, checked_mul(c, c));
  }
  return total;
}

struct CountReport {
  int d = 0;
  Count bis = 0;
  Count is_count = 0;
  std::map<int, Count> by_size;
  int max_bis = 0;
  /// Only defined for d >= 2.
  std::optional<Count> lower_bound;
};

inline CountReport count_report(const ProfileTable& table) {
  CountReport r;
  r.d = table.dim().value();
  r.bis = count_bis(table);
  r.is_count = count_is(table);
  r.by_size = count_bis_by_size(table);
  r.max_bis = max_bis_size(table);
  if (r.d >= 2) r.lower_bound = lower_bound_series(table.dim());
  return r;
}

struct ScalingRow {
  int d = 0;
  Count bis = 0;
  Count is_count = 0;
  double log2_bis = 0;
  /// (1 - log2 bis / (N/2)) * sqrt(d)
  double x_d = 0;
  /// i(Q_d) / (2 sqrt(e) 2^(N/2))
  double is_ratio = 0;
  /// Same statistic as x_d for the lower-bound series; nullopt for d = 1.
  std::optional<double> x_lower;
};

inline double scaling_statistic(Dim d, double log2_value) {
  return (1.0 - log2_value / static_cast<double>(d.half())) * std::sqrt(static_cast<double>(d.value()));
}

inline ScalingRow scaling_row(const ProfileTable& table) {
  const Dim d = table.dim();
  ScalingRow row;
  row.d = d.value();
  row.bis = count_bis(table);
  row.is_count = count_is(table);
  row.log2_bis = log2_exact(row.bis);
  row.x_d = scaling_statistic(d, row.log2_bis);
  const long double scale = 2.0L * std::sqrt(std::numbers::e_v<long double>) * std::ldexp(1.0L, static_cast<int>(d.half()));
  row.is_ratio = static_cast<double>(to_long_double(row.is_count) / scale);
  if (d.value() >= 2) row.x_lower = scaling_statistic(d, log2_exact(lower_bound_series(d)));
  return row;
}

inline std::vector<ScalingRow> scaling_stats(int d_min, int d_max, const SweepOptions& opts = {},
                                             const std::optional<std::filesystem::path>& cache_dir = std::nullopt) {
  if (d_min < 1 || d_min > d_max) fail(ErrorKind::DomainError, "need 1 <= d_min <= d_max");
  if (d_max > kMaxSweepDim) fail(ErrorKind::CapacityExceeded, "scaling needs d_max <= " + std::to_string(kMaxSweepDim));
  std::vector<ScalingRow> rows;
  for (int d = d_min; d <= d_max; ++d) rows.push_back(scaling_row(cached_profiles(Dim(d), opts, cache_dir)));
  return rows;
}

}  // namespace qcube
