#pragma once

// Exact nonnegative integer arithmetic for enumeration results.

#include <qcube/error.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace qcube {

using Count = unsigned __int128;

inline constexpr Count kCountMax = ~Count{0};

inline Count checked_add(Count x, Count y) {
  Count r;
  if (__builtin_add_overflow(x, y, &r)) fail(ErrorKind::Overflow, "128-bit addition overflow");
  return r;
}

inline Count checked_mul(Count x, Count y) {
  Count r;
  if (__builtin_mul_overflow(x, y, &r)) fail(ErrorKind::Overflow, "128-bit multiplication overflow");
  return r;
}

inline Count pow2(unsigned k) {
  if (k >= 128) fail(ErrorKind::Overflow, "2^" + std::to_string(k) + " exceeds 128 bits");
  return Count{1} << k;
}

inline int bit_length(Count v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi != 0) return 128 - std::countl_zero(hi);
  return 64 - std::countl_zero(static_cast<std::uint64_t>(v));
}

inline std::string to_decimal(Count v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {out.rbegin(), out.rend()};
}

inline Count parse_decimal(std::string_view text) {
  if (text.empty()) fail(ErrorKind::InvalidArgument, "empty decimal string");
  Count v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') fail(ErrorKind::InvalidArgument, "not a decimal digit in '" + std::string(text) + "'");
    v = checked_add(checked_mul(v, 10), static_cast<Count>(c - '0'));
  }
  return v;
}

/// log2 of an exact integer from its bit length and a normalized 64-bit
/// mantissa. Relative error is at the level of long double rounding.
inline double log2_exact(Count v) {
  if (v == 0) fail(ErrorKind::DomainError, "log2 of zero");
  const int len = bit_length(v);
  std::uint64_t mantissa;
  if (len > 64) {
    mantissa = static_cast<std::uint64_t>(v >> (len - 64));
  } else {
    mantissa = static_cast<std::uint64_t>(v) << (64 - len);
  }
  // mantissa / 2^63 lies in [1, 2)
  const long double m = static_cast<long double>(mantissa) / 9223372036854775808.0L;
  return static_cast<double>(static_cast<long double>(len - 1) + std::log2(m));
}

inline long double to_long_double(Count v) {
  return static_cast<long double>(static_cast<std::uint64_t>(v >> 64)) * 18446744073709551616.0L +
         static_cast<long double>(static_cast<std::uint64_t>(v));
}

namespace detail {

inline constexpr int kPascalRows = 132;  // C(131, 65) is the last row that fits

struct PascalTable {
  std::array<std::array<Count, kPascalRows>, kPascalRows> rows{};
  PascalTable() {
    for (int n = 0; n < kPascalRows; ++n) {
      rows[n][0] = 1;
      for (int k = 1; k <= n; ++k) rows[n][k] = rows[n - 1][k - 1] + (k < n ? rows[n - 1][k] : 0);
    }
  }
};

inline const PascalTable& pascal() {
  static const PascalTable table;
  return table;
}

}  // namespace detail

/// Exact binomial coefficient, C(n,k) = 0 for k < 0 or k > n.
inline Count binomial(std::int64_t n, std::int64_t k) {
  if (n < 0) fail(ErrorKind::DomainError, "binomial with negative n");
  if (k < 0 || k > n) return 0;
  if (n < detail::kPascalRows) return detail::pascal().rows[n][k];
  if (k > n - k) k = n - k;
  Count r = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    // r * (n - i) is divisible by (i + 1) at every step
    r = checked_mul(r, static_cast<Count>(n - i)) / static_cast<Count>(i + 1);
  }
  return r;
}

}  // namespace qcube
