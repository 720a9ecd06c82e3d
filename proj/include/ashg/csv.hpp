/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ashg/error.hpp"
#include "ashg/instance.hpp"
#include "ashg/treedecomp.hpp"

namespace ashg {

enum class Verdict { Stable, Unstable };

struct SolverStats {
  std::uint64_t nodes = 0;       // search nodes or subsets examined
  std::uint64_t states = 0;      // DP states created in total
  std::uint64_t peak_states = 0; // largest DP table
};

struct VerificationResult {
  Verdict verdict = Verdict::Stable;
  std::optional<Coalition> witness;
  SolverStats stats;

  bool stable() const { return verdict == Verdict::Stable; }
};

inline const char* to_string(Verdict v) { return v == Verdict::Stable ? "Stable" : "Unstable"; }

namespace detail {

inline VerificationResult unstable(Coalition x, SolverStats s) { return {Verdict::Unstable, std::move(x), s}; }

inline void check_witness(const AshgInstance& inst, const Partition& p, const Coalition& x, const char* solver) {
  if (x.empty() || !is_blocking(inst, p, x))
    throw std::logic_error(std::string(solver) + " produced a witness that is not blocking");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Brute force over connected subsets

struct BruteForceLimits {
  std::uint64_t node_cap = std::uint64_t{1} << 22;
};

/// Enumerates connected subsets in include-first lexicographic order of their indicator
/// vectors (vertex 0 most significant) and returns the first blocking one.
inline VerificationResult verify_bruteforce(const AshgInstance& inst, const Partition& p,
                                            std::optional<int> max_size = std::nullopt,
                                            BruteForceLimits limits = {}) {
  require_matching(inst, p);
  if (max_size && *max_size < 1) throw PreconditionError("maxSize must be positive");
  const int n = inst.size();
  const auto ut = partition_utilities(inst, p);
  const int cap_size = max_size ? std::min(*max_size, n) : n;

  std::vector<Weight> cur(n, 0);   // utility from chosen neighbors
  std::vector<Weight> rest(n, 0);  // positive weight towards undecided neighbors
  for (int u = 0; u < n; ++u)
    for (const auto& nb : inst.neighbors(u))
      if (nb.w > 0) rest[u] += nb.w;
  std::vector<char> in(n, 0);
  std::vector<Vertex> chosen;
  SolverStats stats;
  std::optional<Coalition> found;
  std::vector<int> mark(n, 0);
  int epoch = 0;
  std::vector<Vertex> queue;

  // every chosen vertex can still strictly improve
  auto hopeful = [&](Vertex u) { return cur[u] + rest[u] > ut[u]; };

  // chosen vertices lie in one component of G[chosen + undecided]
  auto still_connectable = [&](int next) {
    if (chosen.size() <= 1) return true;
    ++epoch;
    queue.assign(1, chosen[0]);
    mark[chosen[0]] = epoch;
    std::size_t reached = 1;
    for (std::size_t i = 0; i < queue.size() && reached < chosen.size(); ++i)
      for (const auto& nb : inst.neighbors(queue[i])) {
        Vertex v = nb.v;
        if (mark[v] == epoch || !(in[v] || v >= next)) continue;
        mark[v] = epoch;
        if (in[v]) ++reached;
        queue.push_back(v);
      }
    return reached == chosen.size();
  };

  auto accept = [&]() {
    if (chosen.empty()) return false;
    for (Vertex u : chosen)
      if (cur[u] <= ut[u]) return false;
    return is_connected_set(inst, chosen);
  };

  // decide vertex i; vertices < i are decided
  std::function<bool(int)> dfs = [&](int i) -> bool {
    if (++stats.nodes > limits.node_cap)
      throw ResourceLimitError("enumeration", "more than " + std::to_string(limits.node_cap) +
                                                  " search nodes in connected-subset enumeration");
    if (i == n || static_cast<int>(chosen.size()) == cap_size) {
      if (accept()) {
        found = Coalition(chosen);
        return true;
      }
      return false;
    }
    auto nbs = inst.neighbors(i);
    for (const auto& nb : nbs)
      if (nb.w > 0) rest[nb.v] -= nb.w;
    bool done = false;
    // include i
    {
      in[i] = 1;
      chosen.push_back(i);
      for (const auto& nb : nbs) cur[nb.v] += nb.w;
      bool ok = hopeful(i);
      for (const auto& nb : nbs)
        if (ok && in[nb.v] && !hopeful(nb.v)) ok = false;
      if (ok) done = dfs(i + 1);
      for (const auto& nb : nbs) cur[nb.v] -= nb.w;
      chosen.pop_back();
      in[i] = 0;
    }
    // exclude i
    if (!done) {
      bool ok = true;
      for (const auto& nb : nbs)
        if (in[nb.v] && !hopeful(nb.v)) ok = false;
      if (ok && !chosen.empty()) ok = still_connectable(i + 1);
      if (ok) done = dfs(i + 1);
    }
    for (const auto& nb : nbs)
      if (nb.w > 0) rest[nb.v] += nb.w;
    return done;
  };

  if (n > 0) dfs(0);
  if (found) return detail::unstable(*found, stats);
  return {Verdict::Stable, std::nullopt, stats};
}

// ---------------------------------------------------------------------------
// Forests

inline VerificationResult verify_tree(const AshgInstance& inst, const Partition& p) {
  require_matching(inst, p);
  if (!is_forest(inst)) throw WrongAlgorithmError("verify_tree requires a forest; the instance has a cycle");
  const int n = inst.size();
  const auto ut = partition_utilities(inst, p);
  std::vector<int> parent(n, -2);
  std::vector<Weight> up_weight(n, 0);
  std::vector<Vertex> order;
  for (int r = 0; r < n; ++r) {
    if (parent[r] != -2) continue;
    parent[r] = -1;
    std::size_t start = order.size();
    order.push_back(r);
    for (std::size_t i = start; i < order.size(); ++i)
      for (const auto& nb : inst.neighbors(order[i]))
        if (parent[nb.v] == -2) {
          parent[nb.v] = order[i];
          up_weight[nb.v] = nb.w;
          order.push_back(nb.v);
        }
  }
  // best utility of u in a coalition inside its subtree that contains u
  std::vector<Weight> below(n, 0);
  std::vector<char> accepted(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vertex v = *it;
    int par = parent[v];
    if (par < 0) continue;
    Weight w = up_weight[v];
    if (w >= 0 && below[v] + w > ut[v]) {
      accepted[v] = 1;
      below[par] += w;
    }
  }
  SolverStats stats;
  stats.nodes = static_cast<std::uint64_t>(n);
  for (Vertex u = 0; u < n; ++u) {
    if (below[u] <= ut[u]) continue;
    std::vector<Vertex> members{u};
    for (std::size_t i = 0; i < members.size(); ++i)
      for (const auto& nb : inst.neighbors(members[i]))
        if (parent[nb.v] == members[i] && accepted[nb.v]) members.push_back(nb.v);
    Coalition x(members);
    detail::check_witness(inst, p, x, "verify_tree");
    return detail::unstable(std::move(x), stats);
  }
  return {Verdict::Stable, std::nullopt, stats};
}

// ---------------------------------------------------------------------------
// Nice tree decomposition DP

enum class SignatureMode { Value, EdgeSet };

struct TreewidthLimits {
  std::uint64_t state_cap = 4'000'000;  // per node
};

namespace detail {

/// Flat table of signatures for one decomposition node.
struct SignatureTable {
  int width = 0;  // bag size
  std::vector<std::uint64_t> mask;
  std::vector<std::uint8_t> flag;
  std::vector<std::int64_t> val;  // width entries per state
  std::vector<std::int32_t> left, right;
  std::vector<std::int32_t> head, next;
  std::vector<std::uint64_t> hashes;

  std::size_t size() const { return mask.size(); }
  const std::int64_t* values(std::size_t i) const { return val.data() + i * static_cast<std::size_t>(width); }

  static std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return h ^ x;
  }

  void reset(int w) {
    width = w;
    head.assign(1024, -1);
  }

  void rehash() {
    head.assign(head.size() * 2, -1);
    for (std::size_t i = 0; i < size(); ++i) {
      auto b = hashes[i] & (head.size() - 1);
      next[i] = head[b];
      head[b] = static_cast<std::int32_t>(i);
    }
  }

  /// Inserts unless an identical signature exists; returns true when new.
  bool insert(std::uint64_t m, std::uint8_t f, const std::int64_t* v, std::int32_t l, std::int32_t r) {
    std::uint64_t h = mix(mix(0, m), f);
    for (int i = 0; i < width; ++i) h = mix(h, static_cast<std::uint64_t>(v[i]));
    auto b = h & (head.size() - 1);
    for (std::int32_t j = head[b]; j >= 0; j = next[j]) {
      if (hashes[j] != h || mask[j] != m || flag[j] != f) continue;
      if (std::equal(v, v + width, values(static_cast<std::size_t>(j)))) return false;
    }
    mask.push_back(m);
    flag.push_back(f);
    val.insert(val.end(), v, v + width);
    left.push_back(l);
    right.push_back(r);
    hashes.push_back(h);
    next.push_back(head[b]);
    head[b] = static_cast<std::int32_t>(size() - 1);
    if (size() * 2 > head.size()) rehash();
    return true;
  }
};

inline std::uint64_t insert_bit(std::uint64_t m, int pos, bool bit) {
  std::uint64_t low = m & ((std::uint64_t{1} << pos) - 1);
  std::uint64_t high = (m >> pos) << (pos + 1);
  return high | low | (static_cast<std::uint64_t>(bit) << pos);
}

inline std::uint64_t remove_bit(std::uint64_t m, int pos) {
  std::uint64_t low = m & ((std::uint64_t{1} << pos) - 1);
  std::uint64_t high = (m >> (pos + 1)) << pos;
  return high | low;
}

}  // namespace detail

inline VerificationResult verify_treewidth(const AshgInstance& inst, const Partition& p,
                                           const NiceTreeDecomposition& nice, SignatureMode mode,
                                           TreewidthLimits limits = {}) {
  require_matching(inst, p);
  if (auto err = nice_shape_error(nice); !err.empty()) throw ValidationError("decomposition is not nice: " + err);
  if (auto rep = validate_td(inst, nice.as_td()); !rep.ok())
    throw ValidationError("invalid tree decomposition: " + rep.message);
  if (nice.width() + 1 > 64) throw ResourceLimitError("bag-size", "bags larger than 64 vertices");
  if (mode == SignatureMode::EdgeSet && inst.max_degree() > 63)
    throw ResourceLimitError("degree", "EDGESET signatures need degree at most 63");
  const auto ut = partition_utilities(inst, p);
  const Weight bound = static_cast<Weight>(inst.max_degree()) * inst.max_abs_weight();

  // edge (v, x) as a bit index inside x's adjacency list
  auto edge_bit = [&](Vertex x, Vertex v) {
    auto nb = inst.neighbors(x);
    auto it = std::lower_bound(nb.begin(), nb.end(), v, [](const Neighbor& a, Vertex y) { return a.v < y; });
    return static_cast<int>(it - nb.begin());
  };
  auto gained = [&](Vertex x, std::int64_t raw) -> Weight {
    if (mode == SignatureMode::Value) return raw;
    Weight s = 0;
    auto nb = inst.neighbors(x);
    for (auto bits = static_cast<std::uint64_t>(raw); bits; bits &= bits - 1) s += nb[std::countr_zero(bits)].w;
    return s;
  };

  std::vector<detail::SignatureTable> table(nice.node_count());
  SolverStats stats;
  std::vector<std::int64_t> buf;
  for (int t = 0; t < nice.node_count(); ++t) {  // children precede parents
    const auto& bag = nice.bags[t];
    const int w = static_cast<int>(bag.size());
    auto& out = table[t];
    out.reset(w);
    buf.assign(static_cast<std::size_t>(w) + 1, 0);
    switch (nice.kind[t]) {
      case NodeKind::Leaf:
        out.insert(0, 0, buf.data(), -1, -1);
        break;
      case NodeKind::Introduce: {
        const auto& in = table[nice.children[t][0]];
        const int pos = static_cast<int>(std::lower_bound(bag.begin(), bag.end(), nice.vertex[t]) - bag.begin());
        for (std::size_t s = 0; s < in.size(); ++s) {
          const auto* v = in.values(s);
          for (int i = 0, j = 0; i < w; ++i) buf[i] = (i == pos) ? 0 : v[j++];
          for (bool take : {false, true})
            out.insert(detail::insert_bit(in.mask[s], pos, take), in.flag[s], buf.data(), static_cast<std::int32_t>(s), -1);
        }
        break;
      }
      case NodeKind::Forget: {
        const int c = nice.children[t][0];
        const auto& in = table[c];
        const auto& cbag = nice.bags[c];
        const Vertex v = nice.vertex[t];
        const int pos = static_cast<int>(std::lower_bound(cbag.begin(), cbag.end(), v) - cbag.begin());
        // in-bag neighbors of v: (position in child bag, weight)
        std::vector<std::pair<int, Weight>> local;
        for (const auto& nb : inst.neighbors(v)) {
          auto it = std::lower_bound(cbag.begin(), cbag.end(), nb.v);
          if (it != cbag.end() && *it == nb.v) local.emplace_back(static_cast<int>(it - cbag.begin()), nb.w);
        }
        for (std::size_t s = 0; s < in.size(); ++s) {
          const auto m = in.mask[s];
          const auto* vals = in.values(s);
          std::uint8_t flag = in.flag[s];
          for (int i = 0; i < static_cast<int>(cbag.size()); ++i) buf[i] = vals[i];
          if (m >> pos & 1) {
            Weight total = gained(v, vals[pos]);
            for (auto [q, wt] : local)
              if (m >> q & 1) total += wt;
            if (total <= ut[v]) continue;
            for (auto [q, wt] : local) {
              if (!(m >> q & 1)) continue;
              if (mode == SignatureMode::Value) {
                buf[q] += wt;
                if (buf[q] > bound || buf[q] < -bound) throw std::logic_error("signature value out of range");
              } else {
                buf[q] |= std::int64_t{1} << edge_bit(cbag[q], v);
              }
            }
            flag = 1;
          }
          for (int i = pos; i + 1 < static_cast<int>(cbag.size()); ++i) buf[i] = buf[i + 1];
          out.insert(detail::remove_bit(m, pos), flag, buf.data(), static_cast<std::int32_t>(s), -1);
        }
        break;
      }
      case NodeKind::Join: {
        const auto& a = table[nice.children[t][0]];
        const auto& b = table[nice.children[t][1]];
        std::unordered_map<std::uint64_t, std::vector<std::int32_t>> by_mask;
        for (std::size_t s = 0; s < b.size(); ++s) by_mask[b.mask[s]].push_back(static_cast<std::int32_t>(s));
        for (std::size_t s = 0; s < a.size(); ++s) {
          auto it = by_mask.find(a.mask[s]);
          if (it == by_mask.end()) continue;
          const auto* va = a.values(s);
          for (auto r : it->second) {
            const auto* vb = b.values(static_cast<std::size_t>(r));
            for (int i = 0; i < w; ++i) buf[i] = mode == SignatureMode::Value ? va[i] + vb[i] : (va[i] | vb[i]);
            out.insert(a.mask[s], a.flag[s] | b.flag[r], buf.data(), static_cast<std::int32_t>(s), r);
            if (out.size() > limits.state_cap) break;
          }
          if (out.size() > limits.state_cap) break;
        }
        break;
      }
    }
    stats.nodes++;
    stats.states += out.size();
    stats.peak_states = std::max<std::uint64_t>(stats.peak_states, out.size());
    if (out.size() > limits.state_cap)
      throw ResourceLimitError("dp-states", "node " + std::to_string(t) + " exceeds " +
                                                std::to_string(limits.state_cap) + " signatures");
    // children tables are no longer needed except for witness reconstruction; keep them
  }

  const auto& root = table[nice.root];
  std::int32_t hit = -1;
  for (std::size_t s = 0; s < root.size(); ++s)
    if (root.flag[s]) {
      hit = static_cast<std::int32_t>(s);
      break;
    }
  if (hit < 0) return {Verdict::Stable, std::nullopt, stats};

  std::vector<Vertex> members;
  std::vector<std::pair<int, std::int32_t>> stack{{nice.root, hit}};
  while (!stack.empty()) {
    auto [t, s] = stack.back();
    stack.pop_back();
    const auto& tab = table[t];
    switch (nice.kind[t]) {
      case NodeKind::Leaf:
        break;
      case NodeKind::Introduce: {
        const auto& bag = nice.bags[t];
        int pos = static_cast<int>(std::lower_bound(bag.begin(), bag.end(), nice.vertex[t]) - bag.begin());
        if (tab.mask[s] >> pos & 1) members.push_back(nice.vertex[t]);
        stack.push_back({nice.children[t][0], tab.left[s]});
        break;
      }
      case NodeKind::Forget:
        stack.push_back({nice.children[t][0], tab.left[s]});
        break;
      case NodeKind::Join:
        stack.push_back({nice.children[t][0], tab.left[s]});
        stack.push_back({nice.children[t][1], tab.right[s]});
        break;
    }
  }
  Coalition x(members);
  detail::check_witness(inst, p, x, "verify_treewidth");
  return detail::unstable(std::move(x), stats);
}

// ---------------------------------------------------------------------------
// Vertex cover

struct VertexCoverLimits {
  int max_cover = 24;
  std::uint64_t state_cap = 2'000'000;  // per DP layer
};

inline bool is_vertex_cover(const AshgInstance& inst, const std::vector<Vertex>& s) {
  std::vector<char> in(inst.size(), 0);
  for (Vertex v : s) in[v] = 1;
  for (const auto& e : inst.edges())
    if (!in[e.u] && !in[e.v]) return false;
  return true;
}

/// Minimum vertex cover by bounded branching on uncovered edges (iterative deepening).
inline std::vector<Vertex> find_vertex_cover(const AshgInstance& inst, int max_size = 24) {
  std::vector<char> in(inst.size(), 0);
  std::vector<Vertex> pick;
  std::function<bool(int)> branch = [&](int budget) -> bool {
    for (const auto& e : inst.edges()) {
      if (in[e.u] || in[e.v]) continue;
      if (budget == 0) return false;
      for (Vertex v : {e.u, e.v}) {
        in[v] = 1;
        pick.push_back(v);
        if (branch(budget - 1)) return true;
        pick.pop_back();
        in[v] = 0;
      }
      return false;
    }
    return true;
  };
  for (int k = 0; k <= max_size; ++k)
    if (branch(k)) {
      std::sort(pick.begin(), pick.end());
      return pick;
    }
  throw ResourceLimitError("vertex-cover", "no vertex cover of size at most " + std::to_string(max_size));
}

inline VerificationResult verify_vertexcover(const AshgInstance& inst, const Partition& p,
                                             std::optional<std::vector<Vertex>> cover = std::nullopt,
                                             VertexCoverLimits limits = {}) {
  require_matching(inst, p);
  const int n = inst.size();
  std::vector<Vertex> s;
  if (cover) {
    s = *cover;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (Vertex v : s)
      if (v < 0 || v >= n) throw PreconditionError("cover vertex out of range");
    if (!is_vertex_cover(inst, s)) throw PreconditionError("given set is not a vertex cover");
  } else {
    s = find_vertex_cover(inst, limits.max_cover);
  }
  const int k = static_cast<int>(s.size());
  if (k > limits.max_cover)
    throw ResourceLimitError("vertex-cover", "cover of size " + std::to_string(k) + " exceeds " +
                                                 std::to_string(limits.max_cover));
  const auto ut = partition_utilities(inst, p);
  std::vector<char> in_s(n, 0);
  for (Vertex v : s) in_s[v] = 1;
  SolverStats stats;

  std::vector<char> in_t(n, 0);
  std::vector<int> dim(n, -1);
  // bit (k-1-j) of the mask stands for s[j], so descending masks give include-first order
  for (std::uint64_t mask = (std::uint64_t{1} << k); mask-- > 0;) {
    ++stats.nodes;
    std::vector<Vertex> t;
    for (int j = 0; j < k; ++j)
      if (mask >> (k - 1 - j) & 1) t.push_back(s[j]);
    if (t.empty()) {
      for (Vertex v = 0; v < n; ++v)
        if (!in_s[v] && ut[v] < 0) return detail::unstable(Coalition{v}, stats);
      continue;
    }
    for (Vertex u : t) in_t[u] = 1;
    const int d = static_cast<int>(t.size());
    for (int i = 0; i < d; ++i) dim[t[i]] = i;
    // requirement per coordinate and the candidate independent vertices
    std::vector<Weight> need(d);
    for (int i = 0; i < d; ++i) {
      Weight inside = 0;
      for (const auto& nb : inst.neighbors(t[i]))
        if (in_t[nb.v]) inside += nb.w;
      need[i] = ut[t[i]] + 1 - inside;
    }
    std::vector<Vertex> items;
    for (Vertex v = 0; v < n; ++v) {
      if (in_s[v]) continue;
      Weight g = 0;
      bool touches = false;
      for (const auto& nb : inst.neighbors(v))
        if (in_t[nb.v]) {
          g += nb.w;
          touches = true;
        }
      if (touches && g > ut[v]) items.push_back(v);
    }
    const int m = static_cast<int>(items.size());
    // remaining positive / negative contributions per coordinate after item j
    std::vector<std::vector<Weight>> pos(m + 1, std::vector<Weight>(d, 0)), neg(m + 1, std::vector<Weight>(d, 0));
    for (int j = m - 1; j >= 0; --j) {
      pos[j] = pos[j + 1];
      neg[j] = neg[j + 1];
      for (const auto& nb : inst.neighbors(items[j]))
        if (in_t[nb.v]) (nb.w > 0 ? pos[j] : neg[j])[dim[nb.v]] += nb.w;
    }
    // states after j items: clamped partial sums; dead states dropped
    auto normalize = [&](std::vector<Weight>& val, int j) {
      for (int i = 0; i < d; ++i) {
        if (val[i] + pos[j][i] < need[i]) return false;
        Weight sat = need[i] - neg[j][i];
        if (val[i] > sat) val[i] = sat;
      }
      return true;
    };
    struct Layer {
      std::vector<Weight> vals;
      std::vector<std::int32_t> from;
      std::vector<std::uint8_t> took;
      std::unordered_map<std::uint64_t, std::vector<std::int32_t>> index;
    };
    auto hash_of = [&](const Weight* v) {
      std::uint64_t h = 0;
      for (int i = 0; i < d; ++i) h = detail::SignatureTable::mix(h, static_cast<std::uint64_t>(v[i]));
      return h;
    };
    auto push = [&](Layer& layer, const std::vector<Weight>& v, std::int32_t from, bool took) {
      auto h = hash_of(v.data());
      auto& bucket = layer.index[h];
      for (auto idx : bucket)
        if (std::equal(v.begin(), v.end(), layer.vals.begin() + static_cast<std::ptrdiff_t>(idx) * d)) return;
      bucket.push_back(static_cast<std::int32_t>(layer.from.size()));
      layer.vals.insert(layer.vals.end(), v.begin(), v.end());
      layer.from.push_back(from);
      layer.took.push_back(took);
    };
    std::vector<Layer> layers(m + 1);
    std::vector<Weight> start(d, 0);
    if (normalize(start, 0)) push(layers[0], start, -1, false);
    std::vector<Weight> cur(d);
    for (int j = 0; j < m && !layers[j].from.empty(); ++j) {
      std::vector<std::pair<int, Weight>> contrib;
      for (const auto& nb : inst.neighbors(items[j]))
        if (in_t[nb.v]) contrib.emplace_back(dim[nb.v], nb.w);
      for (std::size_t st = 0; st < layers[j].from.size(); ++st) {
        for (bool take : {true, false}) {
          std::copy_n(layers[j].vals.begin() + static_cast<std::ptrdiff_t>(st) * d, d, cur.begin());
          if (take)
            for (auto [i, w] : contrib) cur[i] += w;
          if (normalize(cur, j + 1)) push(layers[j + 1], cur, static_cast<std::int32_t>(st), take);
        }
      }
      stats.states += layers[j + 1].from.size();
      stats.peak_states = std::max<std::uint64_t>(stats.peak_states, layers[j + 1].from.size());
      if (layers[j + 1].from.size() > limits.state_cap)
        throw ResourceLimitError("dp-states", "vertex-cover DP layer exceeds " + std::to_string(limits.state_cap));
    }
    bool feasible = !layers[m].from.empty();
    if (feasible) {
      std::vector<Vertex> members = t;
      std::int32_t st = 0;
      for (int j = m; j > 0; --j) {
        if (layers[j].took[st]) members.push_back(items[j - 1]);
        st = layers[j].from[st];
      }
      Coalition x(members);
      detail::check_witness(inst, p, x, "verify_vertexcover");
      return detail::unstable(std::move(x), stats);
    }
    for (Vertex u : t) {
      in_t[u] = 0;
      dim[u] = -1;
    }
  }
  return {Verdict::Stable, std::nullopt, stats};
}

}  // namespace ashg
