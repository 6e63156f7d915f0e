#pragma once

// Exact joint distribution of (|A|, |N(A)|, closure data) over every subset A
// of the even class, plus the binary cache format for those tables.

#include <qcube/count.hpp>
#include <qcube/cube.hpp>
#include <qcube/error.hpp>
#include <qcube/parallel.hpp>

#include <zlib.h>

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcube {

/// Which closure data the sweep records next to (|A|, |N(A)|).
///  - None:  closure not tracked, key closure field is 0.
///  - Split: 1 if |[A]| <= N/4, else 2.
///  - Size:  the exact |[A]|. In-memory only; the cache format has no slot for it.
enum class ClosureFeature : std::uint8_t { None = 0, Split = 1, Size = 2 };

struct ProfileKey {
  std::uint16_t a = 0;
  std::uint16_t g = 0;
  std::uint8_t closure = 0;
  friend auto operator<=>(const ProfileKey&, const ProfileKey&) = default;
};

inline constexpr std::uint8_t kSplitSmall = 1;
inline constexpr std::uint8_t kSplitLarge = 2;

class ProfileTable {
 public:
  using Entries = std::map<ProfileKey, Count>;

  ProfileTable(Dim dim, ClosureFeature feature, Entries entries = {})
      : dim_(dim), feature_(feature), entries_(std::move(entries)) {}

  Dim dim() const noexcept { return dim_; }
  ClosureFeature feature() const noexcept { return feature_; }
  const Entries& entries() const noexcept { return entries_; }

  /// Sum of all counts; equals 2^(N/2) for a complete sweep.
  Count total() const {
    Count t = 0;
    for (const auto& [key, n] : entries_) t = checked_add(t, n);
    return t;
  }

  /// Number of A with |A| = a (all g, all closure classes).
  Count marginal_a(int a) const {
    Count t = 0;
    for (const auto& [key, n] : entries_) {
      if (key.a == a) t = checked_add(t, n);
    }
    return t;
  }

  /// Entries projected onto (a, g), closure data summed out.
  std::map<std::pair<int, int>, Count> by_size_and_boundary() const {
    std::map<std::pair<int, int>, Count> out;
    for (const auto& [key, n] : entries_) {
      auto& slot = out[{key.a, key.g}];
      slot = checked_add(slot, n);
    }
    return out;
  }

  friend bool operator==(const ProfileTable& x, const ProfileTable& y) {
    return x.dim_ == y.dim_ && x.feature_ == y.feature_ && x.entries_ == y.entries_;
  }

 private:
  Dim dim_;
  ClosureFeature feature_;
  Entries entries_;
};

/// Incremental state for walking subsets of the even class one toggle at a
/// time. Each toggle touches the d cover counters of the flipped vertex's
/// neighbors; |N(A)| is the number of nonzero counters. With closure
/// tracking, every counter that crosses zero also updates the "uncovered
/// neighbor" tally of the evens around it.
template <ClosureFeature Feature>
class GrayWalker {
 public:
  GrayWalker(const HalfCube& cube, std::uint64_t start) : d_(cube.dim().value()), half_(cube.half()) {
    for (int i = 0; i < half_; ++i) {
      int k = 0;
      for (std::uint64_t m = cube.even_neighbors(i); m; m &= m - 1) even_adj_[i * d_ + k++] = static_cast<std::uint8_t>(std::countr_zero(m));
      k = 0;
      for (std::uint64_t m = cube.odd_neighbors(i); m; m &= m - 1) odd_adj_[i * d_ + k++] = static_cast<std::uint8_t>(std::countr_zero(m));
    }
    cover_.fill(0);
    missing_.fill(static_cast<std::uint8_t>(d_));
    for (std::uint64_t m = start; m; m &= m - 1) toggle(std::countr_zero(m));
  }

  void toggle(int i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    subset_ ^= bit;
    const std::uint8_t* nb = &even_adj_[i * d_];
    if constexpr (Feature == ClosureFeature::None) {
      const int delta = (subset_ & bit) ? 1 : -1;
      size_ += delta;
      for (int k = 0; k < d_; ++k) {
        const int before = cover_[nb[k]];
        const int after = before + delta;
        cover_[nb[k]] = static_cast<std::uint8_t>(after);
        boundary_ += (before == 0) - (after == 0);
      }
    } else if (subset_ & bit) {
      ++size_;
      for (int k = 0; k < d_; ++k) {
        if (cover_[nb[k]]++ == 0) {
          ++boundary_;
          uncover_step<-1>(nb[k]);
        }
      }
    } else {
      --size_;
      for (int k = 0; k < d_; ++k) {
        if (--cover_[nb[k]] == 0) {
          --boundary_;
          uncover_step<+1>(nb[k]);
        }
      }
    }
  }

  std::uint64_t subset() const noexcept { return subset_; }
  int size() const noexcept { return size_; }
  int boundary() const noexcept { return boundary_; }
  /// |[A]|; only meaningful when closure is tracked.
  int closure_size() const noexcept { return closed_; }

 private:
  template <int Delta>
  void uncover_step(int odd) {
    const std::uint8_t* nb = &odd_adj_[odd * d_];
    for (int k = 0; k < d_; ++k) {
      if constexpr (Delta < 0) {
        if (--missing_[nb[k]] == 0) ++closed_;
      } else {
        if (missing_[nb[k]]++ == 0) --closed_;
      }
    }
  }

  int d_;
  int half_;
  std::array<std::uint8_t, 32 * 6> even_adj_{};
  std::array<std::uint8_t, 32 * 6> odd_adj_{};
  std::array<std::uint8_t, 32> cover_{};
  std::array<std::uint8_t, 32> missing_{};
  std::uint64_t subset_ = 0;
  int size_ = 0;
  int boundary_ = 0;
  int closed_ = 0;
};

struct SweepOptions {
  ClosureFeature closure = ClosureFeature::None;
  unsigned threads = 1;
  /// Number of top subset-index bits fixed per work unit; -1 picks a default
  /// that depends on d only, never on the thread count.
  int prefix_bits = -1;
};

inline constexpr int kMaxSweepDim = 6;

namespace detail {

inline int closure_slots(ClosureFeature f, int half) {
  switch (f) {
    case ClosureFeature::None: return 1;
    case ClosureFeature::Split: return 2;
    case ClosureFeature::Size: return half + 1;
  }
  return 1;
}

template <ClosureFeature Feature>
void sweep_chunk(const HalfCube& cube, int low_bits, std::uint64_t prefix, std::vector<std::uint64_t>& hist) {
  const int half = cube.half();
  const int slots = closure_slots(Feature, half);
  GrayWalker<Feature> walker(cube, prefix << low_bits);
  auto record = [&] {
    std::size_t idx = static_cast<std::size_t>(walker.size() * (half + 1) + walker.boundary()) * slots;
    if constexpr (Feature == ClosureFeature::Split) idx += walker.closure_size() * 2 <= half ? 0 : 1;
    if constexpr (Feature == ClosureFeature::Size) idx += walker.closure_size();
    ++hist[idx];
  };
  record();
  const std::uint64_t steps = std::uint64_t{1} << low_bits;
  for (std::uint64_t i = 1; i < steps; ++i) {
    walker.toggle(std::countr_zero(i));
    record();
  }
}

/// Same walk as GrayWalker<None>, with the per-odd cover counters packed as
/// 4-bit lanes (16 per word) so the whole counter state stays in registers.
/// A toggle adds or subtracts the flipped vertex's lane pattern, touching
/// exactly its d counters; |N(A)| is the number of nonzero lanes.
template <int D>
void sweep_chunk_plain(const HalfCube& cube, int low_bits, std::uint64_t prefix, std::vector<std::uint64_t>& hist) {
  constexpr int kHalf = 1 << (D - 1);
  constexpr std::uint64_t kLaneLow = 0x1111111111111111ULL;
  std::array<std::uint64_t, kHalf> inc_lo{};
  std::array<std::uint64_t, kHalf> inc_hi{};
  for (int i = 0; i < kHalf; ++i) {
    for (std::uint64_t m = cube.even_neighbors(i); m; m &= m - 1) {
      const int u = std::countr_zero(m);
      (u < 16 ? inc_lo[i] : inc_hi[i]) += std::uint64_t{1} << (4 * (u & 15));
    }
  }
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t subset = 0;
  int size = 0;
  auto toggle = [&](int i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    subset ^= bit;
    if (subset & bit) {
      lo += inc_lo[i];
      hi += inc_hi[i];
      ++size;
    } else {
      lo -= inc_lo[i];
      hi -= inc_hi[i];
      --size;
    }
  };
  // counters never exceed d <= 6, so three bits per lane suffice
  auto boundary = [&] {
    return std::popcount((lo | lo >> 1 | lo >> 2) & kLaneLow) + std::popcount((hi | hi >> 1 | hi >> 2) & kLaneLow);
  };
  for (std::uint64_t m = prefix << low_bits; m; m &= m - 1) toggle(std::countr_zero(m));
  std::uint64_t* h = hist.data();
  ++h[size * (kHalf + 1) + boundary()];
  const std::uint64_t steps = std::uint64_t{1} << low_bits;
  for (std::uint64_t i = 1; i < steps; ++i) {
    toggle(std::countr_zero(i));
    ++h[size * (kHalf + 1) + boundary()];
  }
}

inline void sweep_chunk_plain_dispatch(const HalfCube& cube, int low_bits, std::uint64_t prefix, std::vector<std::uint64_t>& hist) {
  switch (cube.dim().value()) {
    case 1: sweep_chunk_plain<1>(cube, low_bits, prefix, hist); break;
    case 2: sweep_chunk_plain<2>(cube, low_bits, prefix, hist); break;
    case 3: sweep_chunk_plain<3>(cube, low_bits, prefix, hist); break;
    case 4: sweep_chunk_plain<4>(cube, low_bits, prefix, hist); break;
    case 5: sweep_chunk_plain<5>(cube, low_bits, prefix, hist); break;
    default: sweep_chunk_plain<6>(cube, low_bits, prefix, hist); break;
  }
}

}  // namespace detail

/// Enumerates all 2^(N/2) subsets of the even class and tallies their
/// profile. The index space is cut into 2^p prefixes; each work unit walks
/// its low bits in reflected Gray-code order with private counters and a
/// private histogram, and histograms are merged in prefix order.
inline ProfileTable sweep_profiles(Dim d, const SweepOptions& opts = {}) {
  if (d.value() > kMaxSweepDim) {
    fail(ErrorKind::CapacityExceeded, "full profile sweep supports d <= " + std::to_string(kMaxSweepDim));
  }
  const HalfCube cube(d);
  const int half = cube.half();
  const int prefix_bits = opts.prefix_bits >= 0 ? std::min(opts.prefix_bits, half) : std::min(half, 6);
  const int low_bits = half - prefix_bits;
  const std::size_t chunks = std::size_t{1} << prefix_bits;
  const int slots = detail::closure_slots(opts.closure, half);
  const std::size_t hist_size = static_cast<std::size_t>(half + 1) * (half + 1) * slots;

  std::vector<std::vector<std::uint64_t>> partial(chunks);
  parallel_chunks(chunks, opts.threads, [&](std::size_t c) {
    std::vector<std::uint64_t> hist(hist_size, 0);
    switch (opts.closure) {
      case ClosureFeature::None: detail::sweep_chunk_plain_dispatch(cube, low_bits, c, hist); break;
      case ClosureFeature::Split: detail::sweep_chunk<ClosureFeature::Split>(cube, low_bits, c, hist); break;
      case ClosureFeature::Size: detail::sweep_chunk<ClosureFeature::Size>(cube, low_bits, c, hist); break;
    }
    partial[c] = std::move(hist);
  });

  std::vector<Count> merged(hist_size, 0);
  for (const auto& hist : partial) {
    for (std::size_t i = 0; i < hist_size; ++i) merged[i] = checked_add(merged[i], hist[i]);
  }

  ProfileTable::Entries entries;
  for (std::size_t i = 0; i < hist_size; ++i) {
    if (merged[i] == 0) continue;
    const int c = static_cast<int>(i % slots);
    const int g = static_cast<int>((i / slots) % (half + 1));
    const int a = static_cast<int>(i / slots / (half + 1));
    std::uint8_t closure = 0;
    if (opts.closure == ClosureFeature::Split) closure = c == 0 ? kSplitSmall : kSplitLarge;
    if (opts.closure == ClosureFeature::Size) closure = static_cast<std::uint8_t>(c);
    entries.emplace(ProfileKey{static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(g), closure}, merged[i]);
  }
  return ProfileTable(d, opts.closure, std::move(entries));
}

/// |{A in E : |N(A)| = g, |A| >= min_a, |[A]| <= max_closure}|.
/// Needs exact closure sizes, or the split table when max_closure is N/4.
inline Count restricted_count(const ProfileTable& table, int g, int min_a, int max_closure) {
  const int quarter = static_cast<int>(table.dim().vertex_count() / 4);
  const bool split_ok = table.feature() == ClosureFeature::Split && max_closure == quarter;
  if (table.feature() != ClosureFeature::Size && !split_ok) {
    fail(ErrorKind::FeatureMissing, "restricted count needs closure sizes (or the N/4 split with max_closure = N/4)");
  }
  Count total = 0;
  for (const auto& [key, n] : table.entries()) {
    if (key.g != g || key.a < min_a) continue;
    const bool small = table.feature() == ClosureFeature::Size ? key.closure <= max_closure : key.closure == kSplitSmall;
    if (small) total = checked_add(total, n);
  }
  return total;
}

inline Count restricted_count(Dim d, int g, int min_a, int max_closure, unsigned threads = 1) {
  return restricted_count(sweep_profiles(d, {ClosureFeature::Size, threads, -1}), g, min_a, max_closure);
}

// --- cache file -----------------------------------------------------------
//
// "QDPR" | version u16 | d u8 | feature flags u8 | entry count u64 |
// entries (a u16, g u16, closure flag u8, count u128) | CRC32 u32.
// All integers little-endian; the CRC covers every preceding byte.

inline constexpr std::uint16_t kProfileFormatVersion = 1;
inline constexpr std::size_t kProfileHeaderBytes = 16;
inline constexpr std::size_t kProfileEntryBytes = 21;

namespace detail {

inline void put_le(std::vector<std::uint8_t>& out, Count v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline Count get_le(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  Count v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | in[at + i];
  return v;
}

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; d <= 6 caches are far below that limit
  crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_profile(const ProfileTable& table) {
  if (table.feature() == ClosureFeature::Size) {
    fail(ErrorKind::FormatError, "closure-size tables have no cache encoding; sweep with the N/4 split instead");
  }
  std::vector<std::uint8_t> out{'Q', 'D', 'P', 'R'};
  detail::put_le(out, kProfileFormatVersion, 2);
  out.push_back(static_cast<std::uint8_t>(table.dim().value()));
  out.push_back(static_cast<std::uint8_t>(table.feature()));
  detail::put_le(out, table.entries().size(), 8);
  for (const auto& [key, n] : table.entries()) {
    detail::put_le(out, key.a, 2);
    detail::put_le(out, key.g, 2);
    out.push_back(key.closure);
    detail::put_le(out, n, 16);
  }
  detail::put_le(out, detail::crc32_of(out), 4);
  return out;
}

inline ProfileTable deserialize_profile(std::span<const std::uint8_t> in) {
  using detail::get_le;
  if (in.size() < kProfileHeaderBytes + 4) fail(ErrorKind::FormatError, "profile cache truncated");
  if (in[0] != 'Q' || in[1] != 'D' || in[2] != 'P' || in[3] != 'R') fail(ErrorKind::FormatError, "bad magic");
  const auto version = static_cast<std::uint16_t>(get_le(in, 4, 2));
  if (version != kProfileFormatVersion) fail(ErrorKind::FormatError, "unsupported version " + std::to_string(version));
  const int dval = in[6];
  const std::uint8_t flags = in[7];
  const Count n_entries = get_le(in, 8, 8);
  if (dval < 1 || dval > kMaxSweepDim) fail(ErrorKind::FormatError, "bad dimension byte");
  if (flags > static_cast<std::uint8_t>(ClosureFeature::Split)) fail(ErrorKind::FormatError, "bad feature flags");
  const Count expected = kProfileHeaderBytes + n_entries * kProfileEntryBytes + 4;
  if (n_entries > in.size() || expected != in.size()) fail(ErrorKind::FormatError, "profile cache length mismatch (truncated?)");
  const auto stored_crc = static_cast<std::uint32_t>(get_le(in, in.size() - 4, 4));
  if (stored_crc != detail::crc32_of(in.first(in.size() - 4))) fail(ErrorKind::ChecksumMismatch, "profile cache CRC mismatch");

  const Dim d(dval);
  const auto feature = static_cast<ClosureFeature>(flags);
  const int half = static_cast<int>(d.half());
  ProfileTable::Entries entries;
  std::optional<ProfileKey> prev;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_entries); ++i) {
    const std::size_t at = kProfileHeaderBytes + i * kProfileEntryBytes;
    ProfileKey key{static_cast<std::uint16_t>(get_le(in, at, 2)), static_cast<std::uint16_t>(get_le(in, at + 2, 2)), in[at + 4]};
    if (key.a > half || key.g > half) fail(ErrorKind::FormatError, "entry out of range");
    const bool flag_ok = feature == ClosureFeature::None ? key.closure == 0 : (key.closure == kSplitSmall || key.closure == kSplitLarge);
    if (!flag_ok) fail(ErrorKind::FormatError, "closure flag inconsistent with feature flags");
    if (prev && !(*prev < key)) fail(ErrorKind::FormatError, "entries not strictly ascending");
    prev = key;
    entries.emplace(key, get_le(in, at + 5, 16));
  }
  return ProfileTable(d, feature, std::move(entries));
}

inline void save_profile(const ProfileTable& table, const std::filesystem::path& path) {
  const auto bytes = serialize_profile(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::InvalidArgument, "write failed for " + path.string());
}

inline ProfileTable load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FormatError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_profile(bytes);
}

inline std::string profile_cache_name(Dim d, ClosureFeature feature) {
  return "qdpr_d" + std::to_string(d.value()) + "_f" + std::to_string(static_cast<int>(feature)) + "_v" +
         std::to_string(kProfileFormatVersion) + ".bin";
}

/// Loads the cached table for (d, feature) from cache_dir when present,
/// otherwise sweeps and writes it there. Without a cache dir this is a
/// plain sweep. Closure-size tables are never cached.
inline ProfileTable cached_profiles(Dim d, const SweepOptions& opts, const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir || opts.closure == ClosureFeature::Size) return sweep_profiles(d, opts);
  const auto path = *cache_dir / profile_cache_name(d, opts.closure);
  if (std::filesystem::exists(path)) return load_profile(path);
  auto table = sweep_profiles(d, opts);
  std::filesystem::create_directories(*cache_dir);
  save_profile(table, path);
  return table;
}

}  // namespace qcube
