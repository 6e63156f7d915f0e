#pragma once

// Container families G(a, g), approximation pairs (S, F), and the two-case
// certificate that names a member A of G(a, g) given its pair.
//
// Case 1 (|S| < g - gamma t): A is a subset of S.
// Case 2: with A* the closure of a canonical preimage member and G* = N(A*),
// the sets G* \ G and G \ G* determine G = N(A), hence [A]; then A is a
// subset of [A]. G* \ G is a subset of G* \ F, and G \ G* = N(Y) \ G* for
// some Y inside [A] \ A*, which is a subset of S \ A*.

#include <qcube/cube.hpp>
#include <qcube/entropy.hpp>
#include <qcube/error.hpp>
#include <qcube/linked.hpp>

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qcube {

inline constexpr int kMaxFamilyDim = 5;
inline constexpr double kDefaultGamma = 0.08;

/// Canonical order on even-class index masks; agrees with VertexSet's
/// ordering because class indices follow ascending vertex id.
inline bool canonical_mask_less(std::uint64_t x, std::uint64_t y) {
  if (x == y) return false;
  const std::uint64_t diff = x ^ y;
  const int bit = std::countr_zero(diff);
  const bool x_has = (x >> bit) & 1;
  const std::uint64_t other = x_has ? y : x;
  const bool other_continues = bit < 63 && (other >> (bit + 1)) != 0;
  return x_has ? other_continues : !other_continues;
}

struct FamilyQuery {
  Dim d;
  int a;  ///< target |[A]|
  int g;  ///< target |N(A)|

  void validate() const {
    if (a < 1 || a > g || g > static_cast<int>(d.half())) {
      fail(ErrorKind::DomainError, "family query needs 1 <= a <= g <= N/2");
    }
  }
  int t() const noexcept { return g - a; }
  /// The regime in which the container lemma is stated: a <= N/4, g >= d^4.
  bool in_lemma_regime() const noexcept {
    const int dv = d.value();
    return a <= static_cast<int>(d.vertex_count() / 4) && g >= dv * dv * dv * dv;
  }
};

/// Every 2-linked A of the even class bucketed by (|[A]|, |N(A)|), for d <= 5.
class FamilyIndex {
 public:
  explicit FamilyIndex(Dim d) : cube_(checked(d)) {
    const std::uint64_t limit = std::uint64_t{1} << cube_.half();
    for (std::uint64_t m = 1; m < limit; ++m) {
      if (!cube_.two_linked(m)) continue;
      const int a = std::popcount(cube_.closure(m));
      const int g = std::popcount(cube_.neighborhood(m));
      families_[{a, g}].push_back(m);
    }
    for (auto& [key, members] : families_) std::sort(members.begin(), members.end(), canonical_mask_less);
  }

  const HalfCube& cube() const noexcept { return cube_; }
  Dim dim() const noexcept { return cube_.dim(); }

  std::span<const std::uint64_t> family(int a, int g) const {
    const auto it = families_.find({a, g});
    if (it == families_.end()) return {};
    return it->second;
  }

  std::vector<std::pair<int, int>> feasible() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [key, members] : families_) out.push_back(key);
    return out;
  }

  /// Position of A within G(|[A]|, |N(A)|).
  std::size_t rank(std::uint64_t evens) const {
    if (!cube_.two_linked(evens)) fail(ErrorKind::NotTwoLinked, "rank needs a 2-linked set");
    const auto fam = family(std::popcount(cube_.closure(evens)), std::popcount(cube_.neighborhood(evens)));
    const auto it = std::lower_bound(fam.begin(), fam.end(), evens, canonical_mask_less);
    return static_cast<std::size_t>(it - fam.begin());
  }

 private:
  static Dim checked(Dim d) {
    if (d.value() > kMaxFamilyDim) fail(ErrorKind::CapacityExceeded, "family index needs d <= " + std::to_string(kMaxFamilyDim));
    return d;
  }

  HalfCube cube_;
  std::map<std::pair<int, int>, std::vector<std::uint64_t>> families_;
};

namespace detail {

inline std::vector<std::uint64_t> family_exhaustive(const HalfCube& cube, int a, int g) {
  std::vector<std::uint64_t> out;
  const std::uint64_t limit = std::uint64_t{1} << cube.half();
  for (std::uint64_t m = 1; m < limit; ++m) {
    if (std::popcount(cube.neighborhood(m)) != g) continue;
    if (std::popcount(cube.closure(m)) != a) continue;
    if (cube.two_linked(m)) out.push_back(m);
  }
  return out;
}

/// Grows every 2-linked closed C with |C| = a and |N(C)| = g (anchored at its
/// minimum vertex), then keeps the 2-linked subsets of C whose closure is C.
inline std::vector<std::uint64_t> family_by_growth(const HalfCube& cube, int a, int g) {
  std::vector<std::uint64_t> adj(cube.half());
  for (int i = 0; i < cube.half(); ++i) adj[i] = cube.even_linked(i);
  std::vector<std::uint64_t> out;
  for (int seed = 0; seed < cube.half(); ++seed) {
    const std::uint64_t above = cube.full_mask() & ~((std::uint64_t{1} << seed) - 1);
    for_each_connected_set(adj, seed, a, above, [&](std::uint64_t c) {
      if (std::popcount(cube.neighborhood(c)) != g || cube.closure(c) != c) return;
      // nonempty submasks of c
      for (std::uint64_t s = c; s; s = (s - 1) & c) {
        if (cube.closure(s) == c && cube.two_linked(s)) out.push_back(s);
      }
    });
  }
  return out;
}

}  // namespace detail

/// All 2-linked A in the even class with |[A]| = a and |N(A)| = g, in
/// canonical order. d <= 4 scans every subset; d = 5 grows closed linked sets.
inline std::vector<VertexSet> enumerate_family(const FamilyQuery& q) {
  q.validate();
  if (q.d.value() > kMaxFamilyDim) fail(ErrorKind::CapacityExceeded, "family enumeration needs d <= " + std::to_string(kMaxFamilyDim));
  const HalfCube cube(q.d);
  auto masks = q.d.value() <= 4 ? detail::family_exhaustive(cube, q.a, q.g) : detail::family_by_growth(cube, q.a, q.g);
  std::sort(masks.begin(), masks.end(), canonical_mask_less);
  std::vector<VertexSet> out;
  out.reserve(masks.size());
  for (auto m : masks) out.push_back(cube.evens_to_set(m));
  return out;
}

// --- approximation pairs --------------------------------------------------

struct ApproxPair {
  VertexSet S;  ///< even side, contains [A]
  VertexSet F;  ///< odd side, inside N(A)

  friend bool operator==(const ApproxPair&, const ApproxPair&) = default;
  friend std::strong_ordering operator<=>(const ApproxPair& x, const ApproxPair& y) {
    if (auto c = x.S <=> y.S; c != 0) return c;
    return x.F <=> y.F;
  }
};

using PhiStrategy = std::function<ApproxPair(const VertexSet&)>;

inline void require_even_linked(const VertexSet& a) {
  if (a.empty()) fail(ErrorKind::EmptyInput, "approximation needs a nonempty set");
  if (class_of(a) != Parity::Even) fail(ErrorKind::DomainError, "approximation needs a subset of the even class");
  if (!is_two_linked(a)) fail(ErrorKind::NotTwoLinked, "approximation needs a 2-linked set");
}

/// (S, F) = ([A], N(A)). S contains [A], F lies in N(A), and
/// |S| <= |N([A])| = |F| by expansion.
inline ApproxPair phi_trivial(const VertexSet& a) {
  require_even_linked(a);
  return ApproxPair{closure(a), neighborhood(a)};
}

struct PairIndex {
  FamilyQuery query;
  std::map<ApproxPair, std::vector<VertexSet>> preimages;

  /// |W|: number of distinct pairs used.
  std::size_t image_size() const noexcept { return preimages.size(); }
  std::size_t max_preimage() const noexcept {
    std::size_t best = 0;
    for (const auto& [pair, members] : preimages) best = std::max(best, members.size());
    return best;
  }
};

inline PairIndex build_pair_index(const FamilyQuery& q, std::span<const VertexSet> family, const PhiStrategy& phi) {
  PairIndex index{q, {}};
  for (const auto& a : family) index.preimages[phi(a)].push_back(a);
  for (auto& [pair, members] : index.preimages) std::sort(members.begin(), members.end());
  return index;
}

inline PairIndex build_pair_index(const FamilyQuery& q, const PhiStrategy& phi) {
  const auto family = enumerate_family(q);
  return build_pair_index(q, family, phi);
}

// --- gamma ----------------------------------------------------------------

/// gamma in (0,1) with gamma + H(gamma) <= 1/2, which keeps the case-2 cost
/// gamma t + H(gamma) t + (g - t) at most g - t/2.
inline bool gamma_admissible(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) return false;
  return gamma + binary_entropy(gamma) <= 0.5;
}

inline double choose_gamma() {
  if (!gamma_admissible(kDefaultGamma)) fail(ErrorKind::InvalidGamma, "default gamma fails gamma + H(gamma) <= 1/2");
  return kDefaultGamma;
}

// --- certificates ---------------------------------------------------------

using Bits = std::vector<bool>;

struct CostLedger {
  std::vector<std::pair<std::string, std::size_t>> stage_bits;
  /// Reference values the stages are compared with: gamma t, H(gamma) t, a.
  double ref_l1 = 0;
  double ref_l2 = 0;
  double ref_l3 = 0;

  std::size_t total_bits() const {
    std::size_t t = 0;
    for (const auto& [name, bits] : stage_bits) t += bits;
    return t;
  }

  std::size_t stage(std::string_view name) const {
    for (const auto& [n, bits] : stage_bits) {
      if (n == name) return bits;
    }
    return 0;
  }
};

inline constexpr std::string_view kStageCaseFlag = "case-flag";
inline constexpr std::string_view kStageCase1 = "case1-subset";
inline constexpr std::string_view kStageL1 = "l1";
inline constexpr std::string_view kStageL2 = "l2";
inline constexpr std::string_view kStageL3 = "l3";

struct Certificate {
  int case_id = 1;
  Bits subset_of_s;     ///< case 1: A over S
  Bits removed;         ///< case 2: G* \ G over G* \ F
  Bits extra;           ///< case 2: Y over S \ A*
  Bits within_closure;  ///< case 2: A over [A]
  CostLedger ledger;

  std::size_t total_bits() const { return ledger.total_bits(); }
};

/// What encoder and decoder share for one pair: the family parameters, the
/// pair, and A* (closure of the canonically smallest preimage member).
struct PairContext {
  FamilyQuery query;
  ApproxPair pair;
  VertexSet anchor;  ///< A*

  VertexSet anchor_boundary() const { return neighborhood(anchor); }  ///< G*
};

inline PairContext make_context(const FamilyQuery& q, const ApproxPair& pair, std::span<const VertexSet> preimage) {
  if (preimage.empty()) fail(ErrorKind::EmptyInput, "pair context needs a nonempty preimage");
  const auto smallest = std::min_element(preimage.begin(), preimage.end());
  return PairContext{q, pair, closure(*smallest)};
}

namespace detail {

inline Bits membership(const VertexSet& subset, const VertexSet& domain) {
  Bits bits;
  bits.reserve(domain.size());
  domain.for_each([&](Vertex v) { bits.push_back(subset.contains(v)); });
  return bits;
}

inline VertexSet select(const Bits& bits, const VertexSet& domain) {
  if (bits.size() != domain.size()) {
    fail(ErrorKind::MalformedCertificate, "payload has " + std::to_string(bits.size()) + " bits, domain has " + std::to_string(domain.size()));
  }
  VertexSet out(domain.dim());
  std::size_t i = 0;
  domain.for_each([&](Vertex v) {
    if (bits[i++]) out.insert(v);
  });
  return out;
}

inline bool use_case_one(std::size_t s_size, int g, int t, double gamma) {
  return static_cast<double>(s_size) < static_cast<double>(g) - gamma * static_cast<double>(t);
}

inline void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorKind::InvalidGamma, "gamma must lie in (0,1)");
}

}  // namespace detail

/// Evens v with N(v) inside `boundary`.
inline VertexSet evens_inside(const VertexSet& boundary) {
  const Dim d = boundary.dim();
  VertexSet out(d);
  for (std::uint32_t v = 0; v < d.vertex_count(); ++v) {
    if (parity(Vertex{v}) != Parity::Even) continue;
    bool inside = true;
    for (int i = 0; i < d.value() && inside; ++i) inside = boundary.contains(Vertex{v ^ (std::uint32_t{1} << i)});
    if (inside) out.insert(Vertex{v});
  }
  return out;
}

/// Y: for each x in G \ G*, its smallest-id neighbor in [A] \ A*.
inline VertexSet uncovered_witnesses(const VertexSet& boundary, const VertexSet& anchor_boundary, const VertexSet& closed, const VertexSet& anchor) {
  const Dim d = boundary.dim();
  const VertexSet pool = closed - anchor;
  VertexSet y(d);
  (boundary - anchor_boundary).for_each([&](Vertex x) {
    std::optional<Vertex> best;
    for (int i = 0; i < d.value(); ++i) {
      const Vertex w{x.id ^ (std::uint32_t{1} << i)};
      if (pool.contains(w) && (!best || w < *best)) best = w;
    }
    if (!best) fail(ErrorKind::InvalidArgument, "boundary vertex without a neighbor in [A] \\ A*");
    y.insert(*best);
  });
  return y;
}

inline Certificate encode(const VertexSet& a, const PairContext& ctx, double gamma) {
  detail::check_gamma(gamma);
  require_even_linked(a);
  const VertexSet boundary = neighborhood(a);
  const VertexSet closed = closure(a);
  const int g = static_cast<int>(boundary.size());
  const int t = g - static_cast<int>(closed.size());
  if (g != ctx.query.g || static_cast<int>(closed.size()) != ctx.query.a) {
    fail(ErrorKind::NotInPreimage, "set is not in G(a, g) for this context");
  }
  const auto& [s, f] = ctx.pair;
  if (!closed.is_subset_of(s) || !f.is_subset_of(boundary)) {
    fail(ErrorKind::NotInPreimage, "pair does not approximate the set (need S containing [A], F inside N(A))");
  }

  Certificate cert;
  cert.ledger.ref_l1 = gamma * t;
  cert.ledger.ref_l2 = binary_entropy(gamma) * t;
  cert.ledger.ref_l3 = static_cast<double>(g - t);
  if (detail::use_case_one(s.size(), g, t, gamma)) {
    cert.case_id = 1;
    cert.subset_of_s = detail::membership(a, s);
  } else {
    cert.case_id = 2;
    const VertexSet& anchor = ctx.anchor;
    const VertexSet anchor_boundary = ctx.anchor_boundary();
    cert.removed = detail::membership(anchor_boundary - boundary, anchor_boundary - f);
    cert.extra = detail::membership(uncovered_witnesses(boundary, anchor_boundary, closed, anchor), s - anchor);
    cert.within_closure = detail::membership(a, closed);
  }
  cert.ledger.stage_bits = {
      {std::string(kStageCaseFlag), 1},
      {std::string(kStageCase1), cert.subset_of_s.size()},
      {std::string(kStageL1), cert.removed.size()},
      {std::string(kStageL2), cert.extra.size()},
      {std::string(kStageL3), cert.within_closure.size()},
  };
  return cert;
}

inline Certificate encode(const VertexSet& a, const FamilyQuery& q, const ApproxPair& pair, std::span<const VertexSet> preimage,
                          double gamma) {
  if (std::find(preimage.begin(), preimage.end(), a) == preimage.end()) fail(ErrorKind::NotInPreimage, "set is not in the preimage");
  return encode(a, make_context(q, pair, preimage), gamma);
}

inline VertexSet decode(const PairContext& ctx, const Certificate& cert, double gamma) {
  detail::check_gamma(gamma);
  const auto& [s, f] = ctx.pair;
  const int expected_case = detail::use_case_one(s.size(), ctx.query.g, ctx.query.t(), gamma) ? 1 : 2;
  if (cert.case_id != expected_case) {
    fail(ErrorKind::CaseMismatch, "certificate case " + std::to_string(cert.case_id) + ", context implies " + std::to_string(expected_case));
  }
  if (cert.case_id == 1) {
    if (!cert.removed.empty() || !cert.extra.empty() || !cert.within_closure.empty()) {
      fail(ErrorKind::MalformedCertificate, "case 1 certificate carries case 2 payloads");
    }
    return detail::select(cert.subset_of_s, s);
  }
  if (!cert.subset_of_s.empty()) fail(ErrorKind::MalformedCertificate, "case 2 certificate carries a case 1 payload");
  const VertexSet anchor_boundary = ctx.anchor_boundary();
  const VertexSet removed = detail::select(cert.removed, anchor_boundary - f);
  const VertexSet y = detail::select(cert.extra, s - ctx.anchor);
  const VertexSet boundary = (anchor_boundary - removed) | (neighborhood(y) - anchor_boundary);
  const VertexSet closed = evens_inside(boundary);
  return detail::select(cert.within_closure, closed);
}

// Serialized form: case flag byte, then each payload as a u32 LE bit count
// followed by its bits packed LSB-first. Case 1 carries one payload, case 2
// carries three (removed, extra, within_closure).

namespace detail {

inline void put_bits(std::vector<std::uint8_t>& out, const Bits& bits) {
  const auto n = static_cast<std::uint32_t>(bits.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  std::uint8_t byte = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) byte |= static_cast<std::uint8_t>(1u << (i % 8));
    if (i % 8 == 7) {
      out.push_back(byte);
      byte = 0;
    }
  }
  if (bits.size() % 8 != 0) out.push_back(byte);
}

inline Bits get_bits(std::span<const std::uint8_t> in, std::size_t& at) {
  if (at + 4 > in.size()) fail(ErrorKind::MalformedCertificate, "truncated payload length");
  std::uint32_t n = 0;
  for (int i = 3; i >= 0; --i) n = (n << 8) | in[at + i];
  at += 4;
  const std::size_t bytes = (static_cast<std::size_t>(n) + 7) / 8;
  if (at + bytes > in.size()) fail(ErrorKind::MalformedCertificate, "truncated payload bits");
  Bits bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (in[at + i / 8] >> (i % 8)) & 1;
  at += bytes;
  return bits;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_certificate(const Certificate& cert) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(cert.case_id)};
  if (cert.case_id == 1) {
    detail::put_bits(out, cert.subset_of_s);
  } else {
    detail::put_bits(out, cert.removed);
    detail::put_bits(out, cert.extra);
    detail::put_bits(out, cert.within_closure);
  }
  return out;
}

/// Payloads only; the ledger travels in its JSON sidecar.
inline Certificate deserialize_certificate(std::span<const std::uint8_t> in) {
  if (in.empty()) fail(ErrorKind::MalformedCertificate, "empty certificate");
  Certificate cert;
  cert.case_id = in[0];
  std::size_t at = 1;
  if (cert.case_id == 1) {
    cert.subset_of_s = detail::get_bits(in, at);
  } else if (cert.case_id == 2) {
    cert.removed = detail::get_bits(in, at);
    cert.extra = detail::get_bits(in, at);
    cert.within_closure = detail::get_bits(in, at);
  } else {
    fail(ErrorKind::MalformedCertificate, "bad case flag " + std::to_string(cert.case_id));
  }
  if (at != in.size()) fail(ErrorKind::MalformedCertificate, "trailing bytes after payloads");
  return cert;
}

inline nlohmann::ordered_json ledger_json(const Certificate& cert) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& [name, bits] : cert.ledger.stage_bits) stages.push_back({{"stage", name}, {"bits", bits}});
  return {
      {"case", cert.case_id},
      {"stages", stages},
      {"total_bits", cert.ledger.total_bits()},
      {"reference", {{"l1_gamma_t", cert.ledger.ref_l1}, {"l2_entropy_t", cert.ledger.ref_l2}, {"l3_a", cert.ledger.ref_l3}}},
  };
}

// --- family audit ---------------------------------------------------------

struct FamilyAudit {
  FamilyQuery query;
  std::size_t family_size = 0;
  double log2_size = -std::numeric_limits<double>::infinity();
  int t = 0;
  std::size_t image_size = 0;    ///< |W| for the strategy used
  std::size_t max_preimage = 0;
  std::size_t max_certificate_bits = 0;
  std::size_t case1_count = 0;
  std::size_t case2_count = 0;
  /// gamma t + H(gamma) t + (g - t), o(1) terms taken as 0.
  double case2_reference = 0;
  bool roundtrip_ok = true;
  /// total bits <= max(|S|, |G* \ F| + |S \ A*| + |[A]|) + 1 on every member
  bool certificate_bound_ok = true;
  bool in_lemma_regime = false;

  bool within_g() const { return log2_size <= query.g; }
  bool within_g_minus_t() const { return log2_size <= query.g - t; }
  bool within_g_minus_half_t() const { return log2_size <= query.g - t / 2.0; }
};

inline FamilyAudit audit_family(const FamilyQuery& q, std::span<const VertexSet> family, const PhiStrategy& phi, double gamma) {
  detail::check_gamma(gamma);
  FamilyAudit audit{q};
  audit.t = q.t();
  audit.in_lemma_regime = q.in_lemma_regime();
  audit.family_size = family.size();
  audit.case2_reference = gamma * audit.t + binary_entropy(gamma) * audit.t + (q.g - audit.t);
  if (family.empty()) return audit;
  audit.log2_size = std::log2(static_cast<double>(family.size()));
  const PairIndex index = build_pair_index(q, family, phi);
  audit.image_size = index.image_size();
  audit.max_preimage = index.max_preimage();
  for (const auto& [pair, members] : index.preimages) {
    const PairContext ctx = make_context(q, pair, members);
    const VertexSet anchor_boundary = ctx.anchor_boundary();
    const std::size_t case2_domain = (anchor_boundary - pair.F).size() + (pair.S - ctx.anchor).size() + static_cast<std::size_t>(q.a);
    const std::size_t bound = std::max(pair.S.size(), case2_domain) + 1;
    for (const auto& a : members) {
      const Certificate cert = encode(a, ctx, gamma);
      (cert.case_id == 1 ? audit.case1_count : audit.case2_count)++;
      audit.max_certificate_bits = std::max(audit.max_certificate_bits, cert.total_bits());
      if (cert.total_bits() > bound) audit.certificate_bound_ok = false;
      if (!(decode(ctx, cert, gamma) == a)) audit.roundtrip_ok = false;
    }
  }
  return audit;
}

inline FamilyAudit audit_family(const FamilyQuery& q, const PhiStrategy& phi, double gamma) {
  const auto family = enumerate_family(q);
  return audit_family(q, family, phi, gamma);
}

}  // namespace qcube
