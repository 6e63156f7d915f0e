#pragma once

// Hamming cube primitives over bit-indexed vertex sets.

#include <qcube/error.hpp>

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcube {

/// Cube dimension d, 1 <= d <= 24. N = 2^d is always derived.
class Dim {
 public:
  static constexpr int kMax = 24;

  explicit Dim(int d) : d_(d) {
    if (d < 1 || d > kMax) {
      fail(ErrorKind::CapacityExceeded, "dimension " + std::to_string(d) + " outside [1, " + std::to_string(kMax) + "]");
    }
  }

  int value() const noexcept { return d_; }
  std::uint32_t vertex_count() const noexcept { return std::uint32_t{1} << d_; }
  std::uint32_t half() const noexcept { return std::uint32_t{1} << (d_ - 1); }

  friend bool operator==(Dim, Dim) = default;

 private:
  int d_;
};

struct Vertex {
  std::uint32_t id = 0;
  friend auto operator<=>(Vertex, Vertex) = default;
};

enum class Parity { Even, Odd };

inline Parity parity(Vertex v) noexcept {
  return (std::popcount(v.id) % 2 == 0) ? Parity::Even : Parity::Odd;
}

inline Parity opposite(Parity p) noexcept { return p == Parity::Even ? Parity::Odd : Parity::Even; }

inline int hamming_distance(Vertex u, Vertex v) noexcept { return std::popcount(u.id ^ v.id); }

inline void check_vertex(Dim d, Vertex v) {
  if (v.id >= d.vertex_count()) {
    fail(ErrorKind::DomainError, "vertex " + std::to_string(v.id) + " outside Q_" + std::to_string(d.value()));
  }
}

/// Membership bitmap over the 2^d vertices, ascending vertex id.
class VertexSet {
 public:
  explicit VertexSet(Dim dim) : dim_(dim), words_(word_count(dim), 0) {}

  VertexSet(Dim dim, std::initializer_list<std::uint32_t> ids) : VertexSet(dim) {
    for (auto id : ids) insert(Vertex{id});
  }

  static VertexSet from_ids(Dim dim, std::span<const std::uint32_t> ids) {
    VertexSet s(dim);
    for (auto id : ids) s.insert(Vertex{id});
    return s;
  }

  static VertexSet all(Dim dim) {
    VertexSet s(dim);
    for (std::uint32_t v = 0; v < dim.vertex_count(); ++v) s.insert(Vertex{v});
    return s;
  }

  static VertexSet parity_class(Dim dim, Parity p) {
    VertexSet s(dim);
    for (std::uint32_t v = 0; v < dim.vertex_count(); ++v) {
      if (parity(Vertex{v}) == p) s.insert(Vertex{v});
    }
    return s;
  }

  /// Parses a hex bitmap where bit i (of the integer value) is vertex i.
  static VertexSet from_hex(Dim dim, std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) fail(ErrorKind::InvalidArgument, "empty hex bitmap");
    VertexSet s(dim);
    std::uint64_t bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, bit += 4) {
      const char c = *it;
      int nibble;
      if (c >= '0' && c <= '9') nibble = c - '0';
      else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
      else fail(ErrorKind::InvalidArgument, std::string("bad hex digit '") + c + "'");
      for (int j = 0; j < 4; ++j) {
        if ((nibble >> j) & 1) {
          if (bit + j >= dim.vertex_count()) fail(ErrorKind::DomainError, "hex bitmap has bits beyond 2^d");
          s.insert(Vertex{static_cast<std::uint32_t>(bit + j)});
        }
      }
    }
    return s;
  }

  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    const std::uint32_t nibbles = (dim_.vertex_count() + 3) / 4;
    for (std::uint32_t i = 0; i < nibbles; ++i) {
      int nibble = 0;
      for (int j = 0; j < 4; ++j) {
        const std::uint32_t v = i * 4 + j;
        if (v < dim_.vertex_count() && contains(Vertex{v})) nibble |= 1 << j;
      }
      out.push_back(kDigits[nibble]);
    }
    while (out.size() > 1 && out.back() == '0') out.pop_back();
    return {out.rbegin(), out.rend()};
  }

  Dim dim() const noexcept { return dim_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool contains(Vertex v) const noexcept {
    return v.id < dim_.vertex_count() && ((words_[v.id >> 6] >> (v.id & 63)) & 1);
  }

  void insert(Vertex v) {
    check_vertex(dim_, v);
    words_[v.id >> 6] |= std::uint64_t{1} << (v.id & 63);
  }

  void erase(Vertex v) {
    check_vertex(dim_, v);
    words_[v.id >> 6] &= ~(std::uint64_t{1} << (v.id & 63));
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }

  bool empty() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  std::optional<Vertex> min() const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i]) return Vertex{static_cast<std::uint32_t>(i * 64 + std::countr_zero(words_[i]))};
    }
    return std::nullopt;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      for (std::uint64_t w = words_[i]; w; w &= w - 1) {
        fn(Vertex{static_cast<std::uint32_t>(i * 64 + std::countr_zero(w))});
      }
    }
  }

  std::vector<std::uint32_t> ids() const {
    std::vector<std::uint32_t> out;
    out.reserve(size());
    for_each([&](Vertex v) { out.push_back(v.id); });
    return out;
  }

  bool is_subset_of(const VertexSet& other) const {
    same_dim(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~other.words_[i]) return false;
    }
    return true;
  }

  bool intersects(const VertexSet& other) const {
    same_dim(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & other.words_[i]) return true;
    }
    return false;
  }

  VertexSet& operator|=(const VertexSet& o) {
    same_dim(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexSet& operator&=(const VertexSet& o) {
    same_dim(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// Set difference.
  VertexSet& operator-=(const VertexSet& o) {
    same_dim(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_;
  }

  /// Canonical order: lexicographic comparison of the ascending id lists.
  friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
    if (a.dim_ != b.dim_) return a.dim_.value() <=> b.dim_.value();
    const std::size_t n = a.words_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t diff = a.words_[i] ^ b.words_[i];
      if (diff == 0) continue;
      // The lowest differing vertex belongs to exactly one set. The other set
      // is smaller only if it has no elements past that vertex.
      const int bit = std::countr_zero(diff);
      const bool a_has = (a.words_[i] >> bit) & 1;
      const VertexSet& other = a_has ? b : a;
      const std::uint64_t above = bit == 63 ? 0 : (~std::uint64_t{0} << (bit + 1));
      bool other_continues = (other.words_[i] & above) != 0;
      for (std::size_t j = i + 1; j < n && !other_continues; ++j) other_continues = other.words_[j] != 0;
      const bool a_less = a_has ? other_continues : !other_continues;
      return a_less ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

 private:
  static std::size_t word_count(Dim d) { return (d.vertex_count() + 63) / 64; }

  void same_dim(const VertexSet& o) const {
    if (!(o.dim_ == dim_)) fail(ErrorKind::InvalidArgument, "vertex sets of different dimensions");
  }

  Dim dim_;
  std::vector<std::uint64_t> words_;
};

inline VertexSet neighbors(Dim d, Vertex v) {
  check_vertex(d, v);
  VertexSet s(d);
  for (int i = 0; i < d.value(); ++i) s.insert(Vertex{v.id ^ (std::uint32_t{1} << i)});
  return s;
}

/// N(A): every vertex adjacent to some member of A.
inline VertexSet neighborhood(const VertexSet& a) {
  const Dim d = a.dim();
  VertexSet out(d);
  a.for_each([&](Vertex v) {
    for (int i = 0; i < d.value(); ++i) out.insert(Vertex{v.id ^ (std::uint32_t{1} << i)});
  });
  return out;
}

/// Parity class shared by all members, nullopt for the empty set.
inline std::optional<Parity> class_of(const VertexSet& a) {
  std::optional<Parity> p;
  bool mixed = false;
  a.for_each([&](Vertex v) {
    const Parity q = parity(v);
    if (!p) p = q;
    else if (*p != q) mixed = true;
  });
  if (mixed) fail(ErrorKind::MixedParity, "set meets both parity classes");
  return p;
}

/// [A] restricted to the parity class of A: {v : N(v) is inside N(A)}.
inline VertexSet closure(const VertexSet& a) {
  const Dim d = a.dim();
  VertexSet out(d);
  const auto p = class_of(a);
  if (!p) return out;
  const VertexSet na = neighborhood(a);
  // Any v with N(v) inside N(A) shares a neighbor with A, so it lies within
  // distance 2 of some member.
  VertexSet candidates(d);
  a.for_each([&](Vertex v) {
    candidates.insert(v);
    for (int i = 0; i < d.value(); ++i) {
      for (int j = i + 1; j < d.value(); ++j) {
        candidates.insert(Vertex{v.id ^ (std::uint32_t{1} << i) ^ (std::uint32_t{1} << j)});
      }
    }
  });
  candidates.for_each([&](Vertex v) {
    for (int i = 0; i < d.value(); ++i) {
      if (!na.contains(Vertex{v.id ^ (std::uint32_t{1} << i)})) return;
    }
    out.insert(v);
  });
  return out;
}

/// Maximal subsets connected under Hamming distance <= 2, ordered by their
/// minimum vertex id.
inline std::vector<VertexSet> two_components(const VertexSet& a) {
  const Dim d = a.dim();
  std::vector<VertexSet> out;
  VertexSet unseen = a;
  std::vector<Vertex> stack;
  while (auto seed = unseen.min()) {
    VertexSet comp(d);
    unseen.erase(*seed);
    comp.insert(*seed);
    stack.push_back(*seed);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      auto visit = [&](std::uint32_t id) {
        const Vertex w{id};
        if (unseen.contains(w)) {
          unseen.erase(w);
          comp.insert(w);
          stack.push_back(w);
        }
      };
      for (int i = 0; i < d.value(); ++i) {
        const std::uint32_t u = v.id ^ (std::uint32_t{1} << i);
        visit(u);
        for (int j = i + 1; j < d.value(); ++j) visit(u ^ (std::uint32_t{1} << j));
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

inline bool is_two_linked(const VertexSet& a) { return !a.empty() && two_components(a).size() == 1; }

/// Dense bitmask view of Q_d for d <= 6: each parity class is indexed
/// 0..N/2-1 in ascending id order, so subsets of one class fit in a uint64.
class HalfCube {
 public:
  static constexpr int kMaxDim = 6;

  explicit HalfCube(Dim d) : dim_(d) {
    if (d.value() > kMaxDim) {
      fail(ErrorKind::CapacityExceeded, "bitmask view needs d <= " + std::to_string(kMaxDim));
    }
    const std::uint32_t n = d.vertex_count();
    index_.assign(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
      auto& ids = parity(Vertex{v}) == Parity::Even ? even_ : odd_;
      index_[v] = static_cast<int>(ids.size());
      ids.push_back(v);
    }
    const std::size_t half = even_.size();
    even_nbrs_.assign(half, 0);
    odd_nbrs_.assign(half, 0);
    even_linked_.assign(half, 0);
    for (std::size_t i = 0; i < half; ++i) {
      for (int b = 0; b < d.value(); ++b) {
        even_nbrs_[i] |= std::uint64_t{1} << index_[even_[i] ^ (1u << b)];
        odd_nbrs_[i] |= std::uint64_t{1} << index_[odd_[i] ^ (1u << b)];
      }
      for (std::size_t j = 0; j < half; ++j) {
        if (j != i && std::popcount(even_[i] ^ even_[j]) <= 2) even_linked_[i] |= std::uint64_t{1} << j;
      }
    }
  }

  Dim dim() const noexcept { return dim_; }
  int half() const noexcept { return static_cast<int>(even_.size()); }
  std::uint64_t full_mask() const noexcept {
    return half() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << half()) - 1;
  }

  std::span<const std::uint32_t> even_ids() const noexcept { return even_; }
  std::span<const std::uint32_t> odd_ids() const noexcept { return odd_; }
  /// Odd-class index mask of N(even i).
  std::uint64_t even_neighbors(int i) const noexcept { return even_nbrs_[i]; }
  /// Even-class index mask of N(odd j).
  std::uint64_t odd_neighbors(int j) const noexcept { return odd_nbrs_[j]; }
  int index_of(Vertex v) const { return index_[v.id]; }

  std::uint64_t neighborhood(std::uint64_t evens) const noexcept {
    std::uint64_t out = 0;
    for (; evens; evens &= evens - 1) out |= even_nbrs_[std::countr_zero(evens)];
    return out;
  }

  std::uint64_t closure(std::uint64_t evens) const noexcept {
    if (!evens) return 0;
    const std::uint64_t na = neighborhood(evens);
    std::uint64_t out = 0;
    for (int i = 0; i < half(); ++i) {
      if ((even_nbrs_[i] & ~na) == 0) out |= std::uint64_t{1} << i;
    }
    return out;
  }

  bool two_linked(std::uint64_t evens) const noexcept {
    if (!evens) return false;
    std::uint64_t seen = evens & (~evens + 1);
    std::uint64_t frontier = seen;
    while (frontier) {
      const int i = std::countr_zero(frontier);
      frontier &= frontier - 1;
      const std::uint64_t fresh = even_linked_[i] & evens & ~seen;
      seen |= fresh;
      frontier |= fresh;
    }
    return seen == evens;
  }

  /// Even-class index mask of evens at distance exactly 2 from even i.
  std::uint64_t even_linked(int i) const noexcept { return even_linked_[i]; }

  VertexSet evens_to_set(std::uint64_t evens) const {
    VertexSet s(dim_);
    for (; evens; evens &= evens - 1) s.insert(Vertex{even_[std::countr_zero(evens)]});
    return s;
  }

  VertexSet odds_to_set(std::uint64_t odds) const {
    VertexSet s(dim_);
    for (; odds; odds &= odds - 1) s.insert(Vertex{odd_[std::countr_zero(odds)]});
    return s;
  }

  /// Inverse of evens_to_set; fails unless every member is even.
  std::uint64_t evens_mask(const VertexSet& s) const {
    std::uint64_t m = 0;
    s.for_each([&](Vertex v) {
      if (parity(v) != Parity::Even) fail(ErrorKind::DomainError, "expected a subset of the even class");
      m |= std::uint64_t{1} << index_[v.id];
    });
    return m;
  }

 private:
  Dim dim_;
  std::vector<std::uint32_t> even_;
  std::vector<std::uint32_t> odd_;
  std::vector<int> index_;
  std::vector<std::uint64_t> even_nbrs_;
  std::vector<std::uint64_t> odd_nbrs_;
  std::vector<std::uint64_t> even_linked_;
};

}  // namespace qcube
