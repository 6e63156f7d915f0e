#pragma once

// Supporting inequalities checked numerically (binomial tails, compositions,
// linked-set counts, vertex isoperimetry) and the per-component cost audit of
// an even set.

#include <qcube/containers.hpp>
#include <qcube/count.hpp>
#include <qcube/cube.hpp>
#include <qcube/entropy.hpp>
#include <qcube/error.hpp>
#include <qcube/linked.hpp>
#include <qcube/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qcube {

// --- binomial tail ----------------------------------------------------------

struct BinomTailCheck {
  int n = 0;
  double alpha = 0;
  Count sum = 0;        ///< sum_{i <= alpha n} C(n, i)
  double log2_bound = 0;  ///< H(alpha) n
  bool holds = false;

  double bound() const { return std::exp2(log2_bound); }
};

inline BinomTailCheck check_binom_tail(int n, double alpha) {
  if (n < 1) fail(ErrorKind::DomainError, "binomial tail needs n >= 1");
  if (!(alpha >= 0.0 && alpha <= 0.5)) fail(ErrorKind::DomainError, "binomial tail needs alpha in [0, 1/2]");
  BinomTailCheck r{n, alpha};
  // alpha n is often meant to be an integer (0.3 * 10); absorb rounding noise
  const auto top = static_cast<int>(std::floor(alpha * n + 1e-9));
  for (int i = 0; i <= top; ++i) r.sum = checked_add(r.sum, binomial(n, i));
  r.log2_bound = binary_entropy(alpha) * n;
  r.holds = log2_exact(r.sum) <= r.log2_bound + 1e-9;
  return r;
}

// --- compositions -----------------------------------------------------------

struct CompositionCount {
  int m = 0;
  Count total = 0;  ///< 2^(m-1)
  std::optional<int> b;
  Count at_most_b = 0;     ///< exact: sum_{s <= b} C(m-1, s-1)
  Count index_sum = 0;     ///< sum_{i <= b} C(m-1, i), the indexing used in the stated bound
  double exp2_bound = 0;   ///< 2^(b log2(e m / b))
};

/// Exact number of compositions of m with at most `parts` parts.
inline Count compositions_at_most(int m, int parts) {
  Count t = 0;
  for (int s = 1; s <= std::min(parts, m); ++s) t = checked_add(t, binomial(m - 1, s - 1));
  return t;
}

inline CompositionCount compositions(int m, std::optional<int> b = std::nullopt) {
  if (m < 1) fail(ErrorKind::DomainError, "compositions need m >= 1");
  CompositionCount r{m, pow2(static_cast<unsigned>(m - 1)), b};
  if (b) {
    if (*b < 1 || 2 * *b > m) fail(ErrorKind::DomainError, "part bound needs 1 <= b <= m/2");
    r.at_most_b = compositions_at_most(m, *b);
    for (int i = 0; i <= *b; ++i) r.index_sum = checked_add(r.index_sum, binomial(m - 1, i));
    r.exp2_bound = std::exp2(*b * std::log2(std::numbers::e * m / *b));
  }
  return r;
}

// --- linked sets ------------------------------------------------------------

struct LinkedSetCount {
  Count count = 0;
  /// log2(count) / (x log2 d): the constant C in 2^(C x log2 d), when defined.
  std::optional<double> constant;
};

inline constexpr int kMaxLinkedDim = 4;
inline constexpr int kMaxLinkedSize = 5;

/// Number of k-linked subsets of V(Q_d) of size x containing v.
inline LinkedSetCount linked_sets_count(Dim d, int x, Vertex v, int k = 2) {
  check_vertex(d, v);
  if (d.value() > kMaxLinkedDim || x > kMaxLinkedSize) {
    fail(ErrorKind::CapacityExceeded, "linked-set count needs d <= 4 and x <= 5");
  }
  if (x < 1 || k < 1) fail(ErrorKind::DomainError, "linked-set count needs x >= 1 and k >= 1");
  const std::uint32_t n = d.vertex_count();
  std::vector<std::uint64_t> adj(n, 0);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t w = 0; w < n; ++w) {
      if (u != w && std::popcount(u ^ w) <= k) adj[u] |= std::uint64_t{1} << w;
    }
  }
  LinkedSetCount r;
  for_each_connected_set(adj, static_cast<int>(v.id), x, (std::uint64_t{1} << n) - 1, [&](std::uint64_t) { ++r.count; });
  if (d.value() >= 2 && r.count > 0) r.constant = log2_exact(r.count) / (x * std::log2(static_cast<double>(d.value())));
  return r;
}

// --- isoperimetry scans -----------------------------------------------------

inline constexpr int kMaxScanDim = 5;

namespace detail {

/// Visits every nonempty subset of the even class with at most max_size
/// members, work split by smallest member; fn(chunk, mask).
template <typename Fn>
void scan_even_subsets(const HalfCube& cube, int max_size, unsigned threads, Fn&& fn) {
  const int half = cube.half();
  parallel_chunks(static_cast<std::size_t>(half), threads, [&](std::size_t first) {
    // combinations of indices > first, up to max_size - 1 of them
    auto rec = [&](auto&& self, std::uint64_t mask, int next, int room) -> void {
      fn(first, mask);
      if (room == 0) return;
      for (int j = next; j < half; ++j) self(self, mask | (std::uint64_t{1} << j), j + 1, room - 1);
    };
    rec(rec, std::uint64_t{1} << first, static_cast<int>(first) + 1, max_size - 1);
  });
}

}  // namespace detail

enum class ScanMode { Exhaustive, Heuristic };

struct IsoperimetryResult {
  int set_size = 0;      ///< |A| at the minimum
  int boundary_size = 0; ///< |N(A)| at the minimum
  double deficit = 0;    ///< (|N(A)| - |A|) / |N(A)|
  double normalized = 0; ///< deficit * sqrt(d)
  VertexSet argmin;
  std::size_t sets_scanned = 0;
};

namespace detail {

/// (g1 - a1)/g1 < (g2 - a2)/g2, exactly.
inline bool deficit_less(int a1, int g1, int a2, int g2) {
  return static_cast<std::int64_t>(g1 - a1) * g2 < static_cast<std::int64_t>(g2 - a2) * g1;
}

struct Candidate {
  int a = 0;
  int g = 0;
  std::uint64_t mask = 0;
  bool valid = false;
};

}  // namespace detail

inline IsoperimetryResult isoperimetry_scan(Dim d, int max_size, ScanMode mode = ScanMode::Exhaustive, std::uint64_t seed = 0,
                                            unsigned threads = 1) {
  const int quarter = static_cast<int>(d.vertex_count() / 4);
  if (max_size < 1 || max_size > std::max(1, quarter)) fail(ErrorKind::DomainError, "isoperimetry scan needs 1 <= max_size <= N/4");
  IsoperimetryResult result{0, 0, 0, 0, VertexSet(d), 0};

  auto better = [](int a1, int g1, const VertexSet& s1, int a2, int g2, const VertexSet& s2) {
    if (detail::deficit_less(a1, g1, a2, g2)) return true;
    if (detail::deficit_less(a2, g2, a1, g1)) return false;
    return s1 < s2;
  };

  if (mode == ScanMode::Exhaustive) {
    if (d.value() > kMaxScanDim) fail(ErrorKind::CapacityExceeded, "exhaustive isoperimetry scan needs d <= 5; use heuristic mode");
    const HalfCube cube(d);
    std::vector<detail::Candidate> best(cube.half());
    std::vector<std::size_t> scanned(cube.half(), 0);
    detail::scan_even_subsets(cube, max_size, threads, [&](std::size_t chunk, std::uint64_t m) {
      ++scanned[chunk];
      const int a = std::popcount(m);
      const int g = std::popcount(cube.neighborhood(m));
      auto& b = best[chunk];
      if (!b.valid || detail::deficit_less(a, g, b.a, b.g) ||
          (!detail::deficit_less(b.a, b.g, a, g) && canonical_mask_less(m, b.mask))) {
        b = {a, g, m, true};
      }
    });
    bool have = false;
    for (std::size_t c = 0; c < best.size(); ++c) {
      result.sets_scanned += scanned[c];
      if (!best[c].valid) continue;
      const VertexSet s = cube.evens_to_set(best[c].mask);
      if (!have || better(best[c].a, best[c].g, s, result.set_size, result.boundary_size, result.argmin)) {
        result.set_size = best[c].a;
        result.boundary_size = best[c].g;
        result.argmin = s;
        have = true;
      }
    }
  } else {
    // Heuristic: even parts of Hamming balls around an even and an odd
    // center, with the outermost layer cut to every admissible size either
    // as an id-order prefix or as seeded random samples.
    if (d.value() > 16) fail(ErrorKind::CapacityExceeded, "heuristic isoperimetry scan needs d <= 16");
    std::mt19937_64 rng(seed);
    bool have = false;
    auto consider = [&](const VertexSet& s) {
      ++result.sets_scanned;
      const int a = static_cast<int>(s.size());
      const int g = static_cast<int>(neighborhood(s).size());
      if (!have || better(a, g, s, result.set_size, result.boundary_size, result.argmin)) {
        result.set_size = a;
        result.boundary_size = g;
        result.argmin = s;
        have = true;
      }
    };
    for (std::uint32_t center : {0u, 1u}) {
      VertexSet ball(d);
      for (int r = 0; r <= d.value(); ++r) {
        std::vector<Vertex> layer;
        for (std::uint32_t v = 0; v < d.vertex_count(); ++v) {
          if (parity(Vertex{v}) == Parity::Even && std::popcount(v ^ center) == r) layer.push_back(Vertex{v});
        }
        if (layer.empty()) continue;
        const int room = max_size - static_cast<int>(ball.size());
        if (room <= 0) break;
        const int take_max = std::min<int>(room, static_cast<int>(layer.size()));
        for (int take = 1; take <= take_max; ++take) {
          VertexSet prefix = ball;
          for (int i = 0; i < take; ++i) prefix.insert(layer[i]);
          consider(prefix);
          for (int sample = 0; sample < 3 && take < static_cast<int>(layer.size()); ++sample) {
            std::vector<Vertex> pool = layer;
            std::shuffle(pool.begin(), pool.end(), rng);
            VertexSet random_cut = ball;
            for (int i = 0; i < take; ++i) random_cut.insert(pool[i]);
            consider(random_cut);
          }
        }
        if (take_max < static_cast<int>(layer.size())) break;
        for (const auto& v : layer) ball.insert(v);
      }
    }
  }
  result.deficit = static_cast<double>(result.boundary_size - result.set_size) / result.boundary_size;
  result.normalized = result.deficit * std::sqrt(static_cast<double>(d.value()));
  return result;
}

struct SmallSetResult {
  int set_size = 0;
  int boundary_size = 0;
  double ratio = 0;  ///< |A| d / |N(A)|
  VertexSet argmax;
  std::size_t sets_scanned = 0;
};

/// Largest |A| d / |N(A)| over nonempty even A with |A| <= max_size.
inline SmallSetResult small_set_expansion_scan(Dim d, int max_size, unsigned threads = 1) {
  if (d.value() > kMaxScanDim) fail(ErrorKind::CapacityExceeded, "small-set scan needs d <= 5");
  const HalfCube cube(d);
  if (max_size < 1 || max_size > cube.half()) fail(ErrorKind::DomainError, "small-set scan needs 1 <= max_size <= N/2");
  // a1/g1 > a2/g2 exactly
  auto ratio_greater = [](int a1, int g1, int a2, int g2) {
    return static_cast<std::int64_t>(a1) * g2 > static_cast<std::int64_t>(a2) * g1;
  };
  std::vector<detail::Candidate> best(cube.half());
  std::vector<std::size_t> scanned(cube.half(), 0);
  detail::scan_even_subsets(cube, max_size, threads, [&](std::size_t chunk, std::uint64_t m) {
    ++scanned[chunk];
    const int a = std::popcount(m);
    const int g = std::popcount(cube.neighborhood(m));
    auto& b = best[chunk];
    if (!b.valid || ratio_greater(a, g, b.a, b.g) || (!ratio_greater(b.a, b.g, a, g) && canonical_mask_less(m, b.mask))) {
      b = {a, g, m, true};
    }
  });
  detail::Candidate top;
  SmallSetResult result{0, 0, 0, VertexSet(d), 0};
  for (std::size_t c = 0; c < best.size(); ++c) {
    result.sets_scanned += scanned[c];
    const auto& b = best[c];
    if (!b.valid) continue;
    if (!top.valid || ratio_greater(b.a, b.g, top.a, top.g) || (!ratio_greater(top.a, top.g, b.a, b.g) && canonical_mask_less(b.mask, top.mask))) {
      top = b;
    }
  }
  result.set_size = top.a;
  result.boundary_size = top.g;
  result.ratio = static_cast<double>(top.a) * d.value() / top.g;
  result.argmax = cube.evens_to_set(top.mask);
  return result;
}

// --- component classification ----------------------------------------------

enum class ComponentClass { Isolated, Small, Large };

inline std::string_view to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::Isolated: return "isolated";
    case ComponentClass::Small: return "small";
    case ComponentClass::Large: return "large";
  }
  return "?";
}

struct ComponentProfile {
  VertexSet members;
  int a = 0;        ///< |A_i|
  int g = 0;        ///< |N(A_i)|
  int closure = 0;  ///< |[A_i]|
  int t = 0;        ///< g - closure
  ComponentClass cls = ComponentClass::Isolated;
  int c_of_a = 0;   ///< sum of closure sizes over all components of A
};

inline int default_small_threshold(Dim d) {
  const int dv = d.value();
  return dv * dv * dv * dv;
}

/// Splits A into 2-components and classes them by g_i alone: a single
/// vertex (g_i = d) is isolated, otherwise g_i < threshold is small.
inline std::vector<ComponentProfile> classify_components(const VertexSet& a, std::optional<int> small_threshold = std::nullopt) {
  if (auto p = class_of(a); p && *p != Parity::Even) fail(ErrorKind::DomainError, "components are classified for even sets");
  const int threshold = small_threshold.value_or(default_small_threshold(a.dim()));
  std::vector<ComponentProfile> out;
  int c_of_a = 0;
  for (auto& comp : two_components(a)) {
    ComponentProfile p{comp};
    p.a = static_cast<int>(comp.size());
    p.g = static_cast<int>(neighborhood(comp).size());
    p.closure = static_cast<int>(closure(comp).size());
    p.t = p.g - p.closure;
    if (p.g == a.dim().value()) p.cls = ComponentClass::Isolated;
    else if (p.g < threshold) p.cls = ComponentClass::Small;
    else p.cls = ComponentClass::Large;
    c_of_a += p.closure;
    out.push_back(std::move(p));
  }
  for (auto& p : out) p.c_of_a = c_of_a;
  return out;
}

// --- cost audit -------------------------------------------------------------

inline constexpr double kDefaultAlpha = 0.1;

struct ComponentCost {
  ComponentProfile profile;
  /// Bits charged by the audit's code for this component.
  double bits = 0;
  /// Small components: log2 |G(a_i, g_i)|, the rank of A_i in its family.
  /// The shortest code given (a_i, g_i); reported beside `bits`.
  std::optional<double> family_bits;
  /// Large components: |W| and certificate parts of `bits`.
  std::optional<double> pair_bits;
  std::optional<std::size_t> certificate_bits;
  /// Position of A_i in its family, for isolated/small components.
  std::optional<std::size_t> rank;

  bool within_g() const { return bits <= profile.g + 1e-9; }
};

struct CostAudit {
  int d = 0;
  int g = 0;  ///< |N(A)|, equal to the sum of g_i
  int c_of_a = 0;
  double decomposition_bits = 0;
  std::vector<ComponentCost> components;
  double total_bits = 0;
  double ref_g_log_d_over_d = 0;  ///< g log2(d) / d
  int sum_t_large = 0;
};

/// Number of 2-linked subsets of the even class with `size` members that
/// contain even index `seed`.
inline Count linked_even_sets_through(const HalfCube& cube, int seed, int size) {
  std::vector<std::uint64_t> adj(cube.half());
  for (int i = 0; i < cube.half(); ++i) adj[i] = cube.even_linked(i);
  Count n = 0;
  for_each_connected_set(adj, seed, size, cube.full_mask(), [&](std::uint64_t) { ++n; });
  return n;
}

/// Cost of naming A component by component, against g = |N(A)|.
///  - decomposition: the (g_i) as a composition of g into at most g/d parts,
///    then the (|[A_i]|) as a composition of c(A) into that many parts;
///  - isolated: the vertex, log2(N/2) bits;
///  - small: seed (log2(N/2) bits), index of [A_i] among the 2-linked sets of
///    size |[A_i]| through the seed, then |[A_i]| subset bits;
///  - large: log2 |W| for the trivial approximation plus certificate bits.
inline CostAudit cost_audit(const FamilyIndex& index, const VertexSet& a, double gamma = kDefaultGamma,
                            std::optional<int> small_threshold = std::nullopt) {
  if (a.empty()) fail(ErrorKind::EmptyInput, "cost audit needs a nonempty set");
  if (!(a.dim() == index.dim())) fail(ErrorKind::InvalidArgument, "family index built for another dimension");
  const Dim d = a.dim();
  const HalfCube& cube = index.cube();
  CostAudit audit;
  audit.d = d.value();
  audit.g = static_cast<int>(neighborhood(a).size());
  const auto profiles = classify_components(a, small_threshold);
  audit.c_of_a = profiles.front().c_of_a;
  const int parts = static_cast<int>(profiles.size());
  const int max_parts = std::max(1, audit.g / d.value());
  audit.decomposition_bits =
      log2_exact(compositions_at_most(audit.g, max_parts)) + log2_exact(binomial(audit.c_of_a - 1, parts - 1));
  audit.ref_g_log_d_over_d = audit.g * std::log2(static_cast<double>(d.value())) / d.value();
  audit.total_bits = audit.decomposition_bits;

  for (const auto& p : profiles) {
    ComponentCost cost{p, 0, {}, {}, {}, {}};
    const std::uint64_t mask = cube.evens_mask(p.members);
    const auto family = index.family(p.closure, p.g);
    switch (p.cls) {
      case ComponentClass::Isolated:
        cost.bits = d.value() - 1;
        cost.rank = index.rank(mask);
        break;
      case ComponentClass::Small: {
        // seed vertex, then [A_i] among the 2-linked sets of its size through
        // the seed, then A_i as a subset of [A_i]
        const int seed = std::countr_zero(cube.closure(mask));
        cost.bits = (d.value() - 1) + log2_exact(linked_even_sets_through(cube, seed, p.closure)) + p.closure;
        cost.family_bits = std::log2(static_cast<double>(family.size()));
        cost.rank = index.rank(mask);
        break;
      }
      case ComponentClass::Large: {
        const FamilyQuery q{d, p.closure, p.g};
        std::vector<VertexSet> members;
        members.reserve(family.size());
        for (auto m : family) members.push_back(cube.evens_to_set(m));
        const PairIndex pairs = build_pair_index(q, members, phi_trivial);
        const ApproxPair pair = phi_trivial(p.members);
        const PairContext ctx = make_context(q, pair, pairs.preimages.at(pair));
        const Certificate cert = encode(p.members, ctx, gamma);
        cost.pair_bits = std::log2(static_cast<double>(pairs.image_size()));
        cost.certificate_bits = cert.total_bits();
        cost.bits = *cost.pair_bits + static_cast<double>(cert.total_bits());
        audit.sum_t_large += p.t;
        break;
      }
    }
    audit.total_bits += cost.bits;
    audit.components.push_back(std::move(cost));
  }
  return audit;
}

inline CostAudit cost_audit(const VertexSet& a, double gamma = kDefaultGamma, std::optional<int> small_threshold = std::nullopt) {
  const FamilyIndex index(a.dim());
  return cost_audit(index, a, gamma, small_threshold);
}

}  // namespace qcube
