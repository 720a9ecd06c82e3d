/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ashg/csv.hpp"
#include "ashg/error.hpp"
#include "ashg/instance.hpp"

namespace ashg {

enum class CsVerdict { Exists, NotExists };

inline const char* to_string(CsVerdict v) { return v == CsVerdict::Exists ? "Exists" : "NotExists"; }

struct CsResult {
  CsVerdict verdict = CsVerdict::NotExists;
  std::optional<Partition> partition;
  std::string method;
  std::uint64_t partitions_checked = 0;

  bool exists() const { return verdict == CsVerdict::Exists; }
};

/// No blocking coalition with at most k members.
inline VerificationResult verify_kcore(const AshgInstance& inst, const Partition& p, int k) {
  if (k < 1) throw PreconditionError("k must be positive");
  return verify_bruteforce(inst, p, k);
}

/// Pairs up endpoints of positive edges, heaviest first, while both are still alone.
inline Partition greedy_2core(const AshgInstance& inst) {
  std::vector<Edge> pos;
  for (const auto& e : inst.edges())
    if (e.w > 0) pos.push_back(e);
  std::sort(pos.begin(), pos.end(),
            [](const Edge& a, const Edge& b) { return std::tuple(-a.w, a.u, a.v) < std::tuple(-b.w, b.u, b.v); });
  std::vector<char> taken(inst.size(), 0);
  std::vector<std::vector<Vertex>> blocks;
  for (const auto& e : pos) {
    if (taken[e.u] || taken[e.v]) continue;
    taken[e.u] = taken[e.v] = 1;
    blocks.push_back({e.u, e.v});
  }
  for (Vertex v = 0; v < inst.size(); ++v)
    if (!taken[v]) blocks.push_back({v});
  return Partition(inst.size(), blocks);
}

struct PartitionSearchLimits {
  int max_vertices = 10;
};

/// Visits set partitions of {0..n-1} as restricted growth strings in lexicographic order,
/// starting from the grand coalition. Stops when `f` returns true.
template <class F>
bool for_each_partition(int n, F&& f) {
  std::vector<int> rgs(n, 0), top(n, 0);  // top[i] = max(rgs[0..i])
  auto emit = [&] {
    int blocks = n ? top[n - 1] + 1 : 0;
    std::vector<std::vector<Vertex>> b(blocks);
    for (int v = 0; v < n; ++v) b[rgs[v]].push_back(v);
    return f(Partition(n, b));
  };
  if (emit()) return true;
  while (true) {
    int i = n - 1;
    while (i > 0 && rgs[i] > top[i - 1]) --i;
    if (i <= 0) return false;
    ++rgs[i];
    top[i] = std::max(top[i - 1], rgs[i]);
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      top[j] = top[j - 1];
    }
    if (emit()) return true;
  }
}

namespace detail {

inline CsResult search_partitions(const AshgInstance& inst, std::optional<int> k, PartitionSearchLimits limits,
                                  const char* method) {
  if (inst.size() > limits.max_vertices)
    throw ResourceLimitError("partition-vertices", std::to_string(inst.size()) + " vertices, cap " +
                                                       std::to_string(limits.max_vertices));
  CsResult r;
  r.method = method;
  for_each_partition(inst.size(), [&](Partition p) {
    ++r.partitions_checked;
    if (!verify_bruteforce(inst, p, k).stable()) return false;
    r.verdict = CsVerdict::Exists;
    r.partition = std::move(p);
    return true;
  });
  return r;
}

}  // namespace detail

/// First partition (in restricted-growth order) with no blocking coalition of size <= k.
inline CsResult solve_kcs_bruteforce(const AshgInstance& inst, int k, PartitionSearchLimits limits = {}) {
  if (k < 1) throw PreconditionError("k must be positive");
  return detail::search_partitions(inst, k, limits, "kcs-bruteforce");
}

inline CsResult solve_cs_bruteforce(const AshgInstance& inst, PartitionSearchLimits limits = {}) {
  return detail::search_partitions(inst, std::nullopt, limits, "bruteforce");
}

}  // namespace ashg
