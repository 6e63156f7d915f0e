#pragma once

// Enumeration of connected vertex subsets in small graphs given as bitmask
// adjacency rows (at most 64 vertices).

#include <bit>
#include <cstdint>
#include <span>

namespace qcube {

namespace detail {

template <typename Fn>
void grow_connected(std::span<const std::uint64_t> adj, std::uint64_t allowed, std::uint64_t chosen, std::uint64_t frontier,
                    std::uint64_t excluded, int remaining, Fn& fn) {
  if (remaining == 0) {
    fn(chosen);
    return;
  }
  if (std::popcount(frontier) == 0) return;
  const std::uint64_t w = frontier & (~frontier + 1);
  const int wi = std::countr_zero(frontier);
  // w in the set
  const std::uint64_t grown = chosen | w;
  const std::uint64_t next = (frontier | adj[wi]) & allowed & ~grown & ~excluded;
  grow_connected(adj, allowed, grown, next, excluded, remaining - 1, fn);
  // w not in the set
  grow_connected(adj, allowed, chosen, frontier & ~w, excluded | w, remaining, fn);
}

}  // namespace detail

/// Calls fn(mask) once for every connected set of exactly `size` vertices
/// that contains `start` and lies inside `allowed`. Each branch decides one
/// frontier vertex in or out, so no set is produced twice.
template <typename Fn>
void for_each_connected_set(std::span<const std::uint64_t> adj, int start, int size, std::uint64_t allowed, Fn&& fn) {
  const std::uint64_t s = std::uint64_t{1} << start;
  if (size < 1 || !(allowed & s)) return;
  detail::grow_connected(adj, allowed, s, adj[start] & allowed & ~s, 0, size - 1, fn);
}

}  // namespace qcube
