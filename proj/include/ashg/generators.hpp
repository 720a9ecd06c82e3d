/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ashg/csv.hpp"
#include "ashg/error.hpp"
#include "ashg/instance.hpp"
#include "ashg/kcore.hpp"
#include "ashg/qbf.hpp"
#include "ashg/treedecomp.hpp"

namespace ashg {

/// The six vertices of one copy of the non-stable K6 gadget: `h` is the attachment vertex.
struct GadgetHandle {
  Vertex h = 0;
  std::array<Vertex, 5> rest{};  // h1..h5
  Weight rho = 0;
};

enum class AttachMode { Plain, Neighborhood };

struct ReductionOutput {
  AshgInstance instance;
  std::optional<Partition> partition;
  std::vector<std::string> provenance;        // label of every vertex, indexed by id
  std::optional<Verdict> expected_verdict;    // verification families: verdict on `partition`
  std::optional<CsVerdict> expected_core;     // existence families
  std::optional<int> k;                       // coalition size bound for k-core families
  std::vector<GadgetHandle> gadgets;
  std::vector<Vertex> modulator;              // vertex cover or deletion set of the construction
  std::optional<TreeDecomposition> decomposition;

  Vertex find(std::string_view label) const {
    for (std::size_t i = 0; i < provenance.size(); ++i)
      if (provenance[i] == label) return static_cast<Vertex>(i);
    throw PreconditionError("no vertex labelled '" + std::string(label) + "'");
  }
};

inline std::string emit_provenance(const ReductionOutput& out) {
  std::ostringstream os;
  for (std::size_t i = 0; i < out.provenance.size(); ++i) os << i << ' ' << out.provenance[i] << '\n';
  return os.str();
}

/// Largest sum of positive weights at a single vertex. Gadget weights must stay below its negation.
inline Weight max_positive_incidence(const AshgInstance& inst) {
  Weight best = 0;
  for (Vertex u = 0; u < inst.size(); ++u) {
    Weight s = 0;
    for (const auto& nb : inst.neighbors(u))
      if (nb.w > 0) s += nb.w;
    best = std::max(best, s);
  }
  return best;
}

/// {h1,h2,h3} and {h4,h5}: the stable split of the gadget without h.
inline std::vector<std::vector<Vertex>> gadget_rest_blocks(const GadgetHandle& g) {
  return {{g.rest[0], g.rest[1], g.rest[2]}, {g.rest[3], g.rest[4]}};
}

namespace detail {

// (i, j, weight) over local ids 0 = h, 1..5 = h1..h5; weight 0 marks the negative pairs.
inline constexpr std::array<std::array<int, 3>, 15> kGadgetPairs{{
    {0, 1, 5}, {2, 3, 5}, {4, 5, 5}, {1, 2, 4}, {3, 4, 4}, {0, 5, 4}, {1, 3, 3}, {3, 5, 3}, {1, 5, 3},
    {0, 2, 0}, {0, 3, 0}, {0, 4, 0}, {1, 4, 0}, {2, 4, 0}, {2, 5, 0},
}};

/// Labelled instance under construction. Negative gadget weights are placeholders until build().
class Construction {
 public:
  Vertex add(std::string label, int group = 0) {
    labels.push_back(std::move(label));
    groups.push_back(group);
    host_adj_.emplace_back();
    return static_cast<Vertex>(labels.size() - 1);
  }

  void edge(Vertex u, Vertex v, Weight w) {
    put(u, v, w, false);
    host_adj_[u].push_back(v);
    host_adj_[v].push_back(u);
  }
  void rho_edge(Vertex u, Vertex v) { put(u, v, 0, true); }

  bool adjacent(Vertex u, Vertex v) const { return keys_.count(key(u, v)) > 0; }

  /// Attaches a gadget copy at `s`. Neighborhoods are taken in the host graph only, so the
  /// result does not depend on the order of attachments at disjoint sets.
  GadgetHandle attach(const std::vector<Vertex>& s, Weight xi, AttachMode mode, const std::string& tag) {
    if (s.empty()) throw PreconditionError("attachment set is empty");
    if (xi < 9) throw PreconditionError("attachment weight must be at least 9");
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (s[i] == s[j] || adjacent(s[i], s[j]))
          throw PreconditionError("attachment set is not independent");
    const int group = groups[s[0]];
    GadgetHandle g;
    std::array<Vertex, 6> ids{};
    for (int i = 0; i < 6; ++i) ids[i] = add(tag + (i == 0 ? ".h" : ".h" + std::to_string(i)), group);
    g.h = ids[0];
    for (int i = 0; i < 5; ++i) g.rest[i] = ids[i + 1];
    for (auto [a, b, w] : kGadgetPairs) {
      if (w) put(ids[a], ids[b], w, false);
      else put(ids[a], ids[b], 0, true);
    }
    for (Vertex x : s) {
      put(g.h, x, xi, false);
      for (Vertex r : g.rest) put(r, x, 0, true);
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) put(s[i], s[j], 0, true);
    if (mode == AttachMode::Neighborhood) {
      std::vector<Vertex> nb;
      for (Vertex x : s)
        for (Vertex v : host_adj_[x])
          if (std::find(s.begin(), s.end(), v) == s.end()) nb.push_back(v);
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      for (Vertex v : nb) put(g.h, v, 0, true);
    }
    gadgets.push_back(g);
    return g;
  }

  Weight max_positive() const {
    std::vector<Weight> pos(labels.size(), 0);
    for (const auto& e : edges_)
      if (!e.negative && e.w > 0) {
        pos[e.u] += e.w;
        pos[e.v] += e.w;
      }
    return pos.empty() ? 0 : *std::max_element(pos.begin(), pos.end());
  }

  AshgInstance build(Weight rho, std::string name, std::optional<Weight> scale = std::nullopt) {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({e.u, e.v, e.negative ? rho : e.w});
    for (auto& g : gadgets) g.rho = rho;
    return AshgInstance(static_cast<int>(labels.size()), std::move(out), std::move(name), scale);
  }

  std::vector<std::string> labels;
  std::vector<int> groups;
  std::vector<GadgetHandle> gadgets;

 private:
  struct Pending {
    Vertex u, v;
    Weight w;
    bool negative;
  };

  static std::uint64_t key(Vertex u, Vertex v) {
    auto a = static_cast<std::uint64_t>(std::min(u, v)), b = static_cast<std::uint64_t>(std::max(u, v));
    return (a << 32) | b;
  }

  void put(Vertex u, Vertex v, Weight w, bool negative) {
    if (u == v) throw std::logic_error("construction produced a self-loop");
    if (!keys_.insert(key(u, v)).second)
      throw std::logic_error("construction produced a duplicate edge " + labels[u] + " " + labels[v]);
    edges_.push_back({std::min(u, v), std::max(u, v), w, negative});
  }

  std::vector<Pending> edges_;
  std::unordered_set<std::uint64_t> keys_;
  std::vector<std::vector<Vertex>> host_adj_;
};

inline void append_gadget_blocks(std::vector<std::vector<Vertex>>& blocks, const GadgetHandle& g) {
  for (auto& b : gadget_rest_blocks(g)) blocks.push_back(std::move(b));
}

inline Weight sum(const std::vector<Weight>& a) { return std::accumulate(a.begin(), a.end(), Weight{0}); }

inline void require_positive(const std::vector<Weight>& a, const char* what) {
  if (a.empty()) throw PreconditionError(std::string(what) + " must be non-empty");
  for (Weight x : a)
    if (x <= 0) throw PreconditionError(std::string(what) + " must contain positive integers");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gadget

/// Standalone gadget; not core stable when rho < -15.
inline std::pair<AshgInstance, GadgetHandle> gadget_h(Weight rho) {
  std::vector<Edge> edges;
  for (auto [a, b, w] : detail::kGadgetPairs) edges.push_back({a, b, w ? w : rho});
  GadgetHandle g{0, {1, 2, 3, 4, 5}, rho};
  return {AshgInstance(6, std::move(edges), "gadget"), g};
}

/// Host plus one gadget copy at the independent set `s`. Gadget vertices get ids after the host's.
inline std::pair<AshgInstance, GadgetHandle> attach(const AshgInstance& host, const std::vector<Vertex>& s, Weight rho,
                                                    Weight xi, AttachMode mode) {
  detail::Construction c;
  for (Vertex v = 0; v < host.size(); ++v) c.add(std::to_string(v));
  for (Vertex x : s)
    if (x < 0 || x >= host.size()) throw PreconditionError("attachment vertex out of range");
  std::vector<Edge> host_edges = host.edges();
  for (const auto& e : host_edges) c.edge(e.u, e.v, e.w);
  auto g = c.attach(s, xi, mode, "H");
  auto inst = c.build(rho, host.name());
  if (rho >= -max_positive_incidence(inst))
    throw PreconditionError("rho = " + std::to_string(rho) + " is not below -" +
                            std::to_string(max_positive_incidence(inst)));
  return {inst, c.gadgets.back()};
}

// ---------------------------------------------------------------------------
// Brute-force answers for the source problems

namespace source {

/// Some subset of `a` sums to exactly half the total (subset-sum table).
inline bool has_equal_split(const std::vector<Weight>& a) {
  Weight s = detail::sum(a);
  if (s % 2) return false;
  std::vector<char> reach(static_cast<std::size_t>(s / 2) + 1, 0);
  reach[0] = 1;
  for (Weight x : a)
    for (Weight t = s / 2; t >= x; --t)
      if (reach[t - x]) reach[t] = 1;
  return reach[s / 2];
}

/// `a` splits into k groups of equal sum.
inline bool has_perfect_packing(std::vector<Weight> a, int k) {
  Weight s = detail::sum(a);
  if (k < 1 || s % k) return false;
  const Weight cap = s / k;
  std::sort(a.rbegin(), a.rend());
  std::vector<Weight> load(k, 0);
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == a.size()) return true;
    for (int b = 0; b < k; ++b) {
      if (load[b] + a[i] > cap) continue;
      load[b] += a[i];
      if (place(i + 1)) return true;
      load[b] -= a[i];
      if (load[b] == 0) break;  // empty bins are interchangeable
    }
    return false;
  };
  return place(0);
}

/// Some vertex set of size >= s induces a subgraph of maximum degree <= dstar.
inline bool has_bounded_degree_set(const Graph& g, int dstar, int s) {
  if (g.n > 24) throw ResourceLimitError("source-bruteforce", "graph too large for subset enumeration");
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.n); ++mask) {
    if (std::popcount(mask) < s) continue;
    bool ok = true;
    for (int u = 0; u < g.n && ok; ++u) {
      if (!(mask >> u & 1)) continue;
      int d = 0;
      for (int v : g.adj[u]) d += mask >> v & 1;
      ok = d <= dstar;
    }
    if (ok) return true;
  }
  return false;
}

inline bool has_clique(const Graph& g, int k) {
  std::vector<int> cur;
  std::function<bool(int)> grow = [&](int from) {
    if (static_cast<int>(cur.size()) == k) return true;
    for (int v = from; v < g.n; ++v) {
      bool ok = std::all_of(cur.begin(), cur.end(),
                            [&](int u) { return std::binary_search(g.adj[v].begin(), g.adj[v].end(), u); });
      if (!ok) continue;
      cur.push_back(v);
      if (grow(v + 1)) return true;
      cur.pop_back();
    }
    return false;
  };
  return grow(0);
}

/// A proper colouring with colours 0..2, if one exists.
inline std::optional<std::vector<int>> three_coloring(const Graph& g) {
  std::vector<int> col(g.n, -1);
  std::function<bool(int)> paint = [&](int v) {
    if (v == g.n) return true;
    for (int c = 0; c < 3; ++c) {
      bool ok = std::none_of(g.adj[v].begin(), g.adj[v].end(), [&](int u) { return col[u] == c; });
      if (!ok) continue;
      col[v] = c;
      if (paint(v + 1)) return true;
    }
    col[v] = -1;
    return false;
  };
  if (!paint(0)) return std::nullopt;
  return col;
}

/// Subsets of `a` (as bit masks) for which no subset of `b` completes a half-total sum.
inline std::vector<std::uint32_t> exists_forall_witnesses(const std::vector<Weight>& a, const std::vector<Weight>& b) {
  if (a.size() > 16 || b.size() > 16) throw ResourceLimitError("source-bruteforce", "sets too large");
  const Weight s = detail::sum(a) + detail::sum(b);
  std::vector<std::uint32_t> out;
  for (std::uint32_t ma = 0; ma < (1u << a.size()); ++ma) {
    Weight sa = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (ma >> i & 1) sa += a[i];
    bool hit = false;
    for (std::uint32_t mb = 0; mb < (1u << b.size()) && !hit; ++mb) {
      Weight sb = 0;
      for (std::size_t i = 0; i < b.size(); ++i)
        if (mb >> i & 1) sb += b[i];
      hit = 2 * (sa + sb) == s;
    }
    if (!hit) out.push_back(ma);
  }
  return out;
}

/// A satisfying assignment (index = variable id, entry 0 unused), by enumeration.
inline std::optional<std::vector<char>> satisfying_assignment(const Cnf& f, int cap = 22) {
  if (f.num_vars > cap) throw ResourceLimitError("source-bruteforce", "too many variables for enumeration");
  std::vector<char> val(f.num_vars + 1, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars); ++mask) {
    for (int v = 1; v <= f.num_vars; ++v) val[v] = mask >> (v - 1) & 1;
    bool ok = std::all_of(f.clauses.begin(), f.clauses.end(),
                          [&](const LitVec& c) { return detail::clause_true(val, c); });
    if (ok) return val;
  }
  return std::nullopt;
}

/// Formula in which each variable occurs 2 or 3 times with random signs, in clauses of 1..3
/// distinct variables.
inline Cnf random_33sat(std::mt19937_64& rng, int vars) {
  std::vector<Lit> slots;
  for (int v = 1; v <= vars; ++v) {
    int times = 2 + static_cast<int>(rng() % 2);
    for (int t = 0; t < times; ++t) slots.push_back(rng() % 2 ? v : -v);
  }
  std::shuffle(slots.begin(), slots.end(), rng);
  Cnf f;
  f.num_vars = vars;
  LitVec cur;
  std::size_t want = 1 + rng() % 3;
  for (Lit l : slots) {
    bool clash = std::any_of(cur.begin(), cur.end(), [&](Lit o) { return var_of(o) == var_of(l); });
    if (clash || cur.size() == want) {
      f.clauses.push_back(std::move(cur));
      cur.clear();
      want = 1 + rng() % 3;
    }
    cur.push_back(l);
  }
  if (!cur.empty()) f.clauses.push_back(std::move(cur));
  return f;
}

}  // namespace source

// ---------------------------------------------------------------------------
// Verification reductions

/// Vertices a_i, then x, y, x', y'. Weights use A scaled by 2n and an offset of 1.
inline ReductionOutput gen_partition_csv(const std::vector<Weight>& a) {
  detail::require_positive(a, "A");
  const Weight n = static_cast<Weight>(a.size());
  const Weight c = 2 * n;
  const Weight s = c * detail::sum(a);
  detail::Construction g;
  std::vector<Vertex> item;
  for (std::size_t i = 0; i < a.size(); ++i) item.push_back(g.add("a" + std::to_string(i)));
  Vertex x = g.add("x"), y = g.add("y"), xp = g.add("x'"), yp = g.add("y'");
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.edge(item[i], x, c * a[i] + 1);
    g.edge(item[i], y, -c * a[i]);
  }
  g.edge(x, xp, 3 * s / 2);
  g.edge(y, yp, s / 2);
  g.edge(x, y, s + 1);
  ReductionOutput out;
  out.instance = g.build(0, "partition-csv", c);
  std::vector<std::vector<Vertex>> blocks{{x, xp}, {y, yp}};
  for (Vertex v : item) blocks.push_back({v});
  out.partition = Partition(out.instance.size(), blocks);
  out.provenance = g.labels;
  out.modulator = {x, y};
  out.expected_verdict = source::has_equal_split(a) ? Verdict::Unstable : Verdict::Stable;
  return out;
}

/// Deletion set y_*, z_* leaves x and the per-item cliques.
inline ReductionOutput gen_binpacking_csv(const std::vector<Weight>& a, int k) {
  detail::require_positive(a, "A");
  if (k < 1) throw PreconditionError("k must be positive");
  const Weight n = static_cast<Weight>(a.size());
  const Weight total = detail::sum(a);
  const bool divisible = total % k == 0;
  // Unit scale f: item weights f*a, slack f/(2n), margin f/4, target f*total/k; all integral.
  const Weight f = divisible ? 4 * n : 4 * n * k;
  const Weight s = f * total, target = s / k, eps = f / (2 * n), delta = f / 4;
  const Weight amax = *std::max_element(a.begin(), a.end());
  const Weight rho = -(f * amax + eps + 1);

  detail::Construction g;
  Vertex x = g.add("x");
  std::vector<Vertex> y, z;
  for (int j = 0; j < k; ++j) y.push_back(g.add("y" + std::to_string(j)));
  for (int j = 0; j < k; ++j) z.push_back(g.add("z" + std::to_string(j)));
  // Cycles of length 2 collapse to one edge of double weight; length 1 has no edge.
  auto ring = [&](const std::vector<Vertex>& r, Weight w) {
    if (k == 2) g.edge(r[0], r[1], 2 * w);
    if (k >= 3)
      for (int j = 0; j < k; ++j) g.edge(r[j], r[(j + 1) % k], w);
  };
  ring(y, 2 * s - target);
  ring(z, -s);
  for (int j = 0; j < k; ++j) {
    g.edge(x, y[j], 2 * s + 2 * target);
    g.edge(y[j], z[j], 2 * s + target + delta);
  }
  std::vector<std::vector<Vertex>> copies(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int j = 0; j < k; ++j) {
      Vertex v = g.add("a" + std::to_string(i) + "." + std::to_string(j));
      copies[i].push_back(v);
      g.edge(v, y[j], f * a[i] + eps);
      g.edge(v, z[j], -f * a[i]);
    }
    for (int p = 0; p < k; ++p)
      for (int q = p + 1; q < k; ++q) g.edge(copies[i][p], copies[i][q], rho);
  }
  ReductionOutput out;
  out.instance = g.build(0, "binpacking-csv", f);
  std::vector<std::vector<Vertex>> blocks{{x}};
  blocks[0].insert(blocks[0].end(), y.begin(), y.end());
  for (Vertex v : z) blocks.push_back({v});
  for (const auto& cp : copies)
    for (Vertex v : cp) blocks.push_back({v});
  out.partition = Partition(out.instance.size(), blocks);
  out.provenance = g.labels;
  out.modulator = y;
  out.modulator.insert(out.modulator.end(), z.begin(), z.end());
  // Without divisibility the bins can block at a fractional target once k >= 3, so no answer is claimed.
  if (divisible || k <= 2)
    out.expected_verdict = source::has_perfect_packing(a, k) ? Verdict::Unstable : Verdict::Stable;
  return out;
}

/// Host vertices keep ids 0..n-1; all weights are +-1.
inline ReductionOutput gen_bdd_csv(const Graph& host, int dstar, int s) {
  if (s < 1) throw PreconditionError("s must be positive");
  if (dstar < 0) throw PreconditionError("degree bound must be non-negative");
  detail::Construction g;
  for (int v = 0; v < host.n; ++v) g.add("v" + std::to_string(v));
  for (auto [u, v] : host.edges()) g.edge(u, v, -1);
  Vertex x = g.add("x"), xp = g.add("x'");
  std::vector<std::vector<Vertex>> blocks{{x, xp}};
  for (int i = 0; i < s * (dstar + 1) - 1; ++i) {
    Vertex c = g.add("c" + std::to_string(i));
    g.edge(c, x, 1);
    g.edge(c, xp, 1);
    blocks[0].push_back(c);
  }
  for (int u = 0; u < host.n; ++u) {
    blocks.push_back({u});
    for (int i = 0; i <= dstar; ++i) {
      std::string tag = "v" + std::to_string(u) + ".p" + std::to_string(i);
      Vertex p = g.add(tag), leaf = g.add(tag + "'");
      g.edge(p, x, 1);
      g.edge(p, u, 1);
      g.edge(p, leaf, 1);
      blocks.push_back({p, leaf});
    }
  }
  ReductionOutput out;
  out.instance = g.build(0, "bdd-csv");
  out.partition = Partition(out.instance.size(), blocks);
  out.provenance = g.labels;
  if (host.n <= 24)
    out.expected_verdict = source::has_bounded_degree_set(host, dstar, s) ? Verdict::Unstable : Verdict::Stable;
  return out;
}

/// Unit weights; each host vertex gets k-2 pendant leaves and shares a block with them.
inline ReductionOutput gen_clique_kcsv(const Graph& host, int k) {
  if (k < 3) throw PreconditionError("k must be at least 3");
  detail::Construction g;
  for (int v = 0; v < host.n; ++v) g.add("v" + std::to_string(v));
  for (auto [u, v] : host.edges()) g.edge(u, v, 1);
  std::vector<std::vector<Vertex>> blocks;
  for (int v = 0; v < host.n; ++v) {
    blocks.push_back({v});
    for (int i = 0; i < k - 2; ++i) {
      Vertex p = g.add("v" + std::to_string(v) + ".p" + std::to_string(i));
      g.edge(p, v, 1);
      blocks.back().push_back(p);
    }
  }
  ReductionOutput out;
  out.instance = g.build(0, "clique-kcsv");
  out.partition = Partition(out.instance.size(), blocks);
  out.provenance = g.labels;
  out.k = k;
  if (host.n <= 40) out.expected_verdict = source::has_clique(host, k) ? Verdict::Unstable : Verdict::Stable;
  return out;
}

// ---------------------------------------------------------------------------
// Existence reductions

/// A and B scaled by 8n with margins 2n and 1. `chosen`, a bit mask over A, selects the
/// items grouped with x in the emitted partition.
inline ReductionOutput gen_eapartition_cs(const std::vector<Weight>& a, const std::vector<Weight>& b,
                                          std::optional<std::uint32_t> chosen = std::nullopt) {
  detail::require_positive(a, "A");
  detail::require_positive(b, "B");
  if (a.size() != b.size()) throw PreconditionError("A and B must have the same size");
  const Weight n = static_cast<Weight>(a.size());
  const Weight c = 8 * n, delta = 2 * n, eps = 1;
  const Weight sa = c * detail::sum(a), s = sa + c * detail::sum(b);
  const Weight rho = -30 * s;

  detail::Construction g;
  Vertex x = g.add("x"), xh = g.add("x^");
  g.edge(x, xh, 19 * s / 2);
  std::vector<Vertex> u, v;
  for (Weight i = 0; i < n; ++i) {
    u.push_back(g.add("a" + std::to_string(i)));
    v.push_back(g.add("b" + std::to_string(i)));
    g.edge(u[i], x, c * a[i]);
    g.edge(u[i], xh, c * a[i]);
    g.edge(v[i], x, -c * b[i]);
    g.edge(v[i], xh, c * b[i] + eps);
  }
  auto hx = g.attach({x}, 9 * s + sa - delta, AttachMode::Plain, "H[x]");
  auto hxh = g.attach({xh}, 10 * s - delta, AttachMode::Plain, "H[x^]");
  g.rho_edge(hx.h, hxh.h);
  for (Vertex vi : v) {
    g.rho_edge(vi, hx.h);
    g.rho_edge(vi, hxh.h);
  }
  if (rho >= -g.max_positive()) throw std::logic_error("eapartition: fixed negative weight too weak");
  ReductionOutput out;
  out.instance = g.build(rho, "eapartition-cs", c);
  out.gadgets = g.gadgets;
  out.provenance = g.labels;
  out.modulator = {x, xh, hx.h, hxh.h};
  for (const auto& gh : {hx, hxh})
    for (int i : {0, 1, 3, 4}) out.modulator.push_back(gh.rest[i]);
  std::sort(out.modulator.begin(), out.modulator.end());
  if (n <= 16)
    out.expected_core = source::exists_forall_witnesses(a, b).empty() ? CsVerdict::NotExists : CsVerdict::Exists;
  if (chosen) {
    std::vector<std::vector<Vertex>> blocks{{hx.h, x}, {hxh.h, xh}};
    for (Weight i = 0; i < n; ++i) {
      blocks[(*chosen >> i & 1) ? 0 : 1].push_back(u[i]);
      blocks.push_back({v[i]});
    }
    detail::append_gadget_blocks(blocks, hx);
    detail::append_gadget_blocks(blocks, hxh);
    out.partition = Partition(out.instance.size(), blocks);
  }
  return out;
}

/// Nine-vertex gadget per host vertex, three attached connectors per host edge.
/// `coloring` (colours 0..2) selects the emitted partition.
inline ReductionOutput gen_3col_kcs(const Graph& host, std::optional<std::vector<int>> coloring = std::nullopt) {
  for (int v = 0; v < host.n; ++v)
    if (host.adj[v].size() > 3) throw PreconditionError("graph is not sub-cubic: vertex " + std::to_string(v));
  detail::Construction g;
  // gadget index i (0-based) is u_{i+1}
  std::vector<std::array<Vertex, 9>> vg(host.n);
  std::vector<std::pair<int, int>> pos_pairs;
  for (int x = 0; x < host.n; ++x) {
    for (int i = 0; i < 9; ++i) vg[x][i] = g.add("v" + std::to_string(x) + ".u" + std::to_string(i + 1));
    std::map<std::pair<int, int>, Weight> w;
    for (int i = 0; i < 3; ++i) {
      w[{i, (i + 1) % 3}] = -5;
      w[{i, i + 3}] = 14;
      w[{i + 3, i + 6}] = 50;
    }
    // u_i joins u_{3+j} (i != j) at 20, so every {u_{3+j}, u1, u2, u3} is free of rho edges
    for (auto [p, q] : {std::pair{0, 4}, {0, 5}, {1, 3}, {1, 5}, {2, 3}, {2, 4}}) w[{p, q}] = 20;
    for (int p = 0; p < 9; ++p)
      for (int q = p + 1; q < 9; ++q) {
        auto it = w.find({p, q});
        if (it == w.end()) it = w.find({q, p});
        if (it == w.end()) g.rho_edge(vg[x][p], vg[x][q]);
        else g.edge(vg[x][p], vg[x][q], it->second);
      }
  }
  struct Connector {
    std::array<Vertex, 3> v;
  };
  std::vector<Connector> conn;
  auto edges = host.edges();
  for (auto [x, y] : edges) {
    Connector e;
    for (int i = 0; i < 3; ++i) {
      e.v[i] = g.add("e" + std::to_string(x) + "-" + std::to_string(y) + ".v" + std::to_string(i + 1));
      g.edge(e.v[i], vg[x][i], 5);
      g.edge(e.v[i], vg[y][i], 5);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) g.rho_edge(e.v[i], e.v[j]);
    conn.push_back(e);
  }
  std::vector<GadgetHandle> att;
  for (std::size_t e = 0; e < conn.size(); ++e)
    for (int i = 0; i < 3; ++i)
      att.push_back(g.attach({conn[e].v[i]}, 9, AttachMode::Neighborhood, "H[" + g.labels[conn[e].v[i]] + "]"));
  const Weight rho = std::min<Weight>(-104, -g.max_positive() - 1);
  ReductionOutput out;
  out.instance = g.build(rho, "3col-kcs");
  out.gadgets = g.gadgets;
  out.provenance = g.labels;
  out.k = 3;
  if (host.n <= 30) out.expected_core = source::three_coloring(host) ? CsVerdict::Exists : CsVerdict::NotExists;
  if (coloring) {
    if (static_cast<int>(coloring->size()) != host.n) throw PreconditionError("colouring size mismatch");
    std::vector<std::vector<Vertex>> blocks;
    for (int x = 0; x < host.n; ++x) {
      int c = (*coloring)[x];
      if (c < 0 || c > 2) throw PreconditionError("colours must be 0, 1 or 2");
      blocks.push_back({vg[x][6 + c]});
      blocks.push_back({vg[x][3 + c], vg[x][0], vg[x][1], vg[x][2]});
      for (int i = 0; i < 3; ++i)
        if (i != c) blocks.push_back({vg[x][3 + i], vg[x][6 + i]});
    }
    std::size_t a = 0;
    for (const auto& e : conn)
      for (int i = 0; i < 3; ++i, ++a) {
        blocks.push_back({att[a].h, e.v[i]});
        detail::append_gadget_blocks(blocks, att[a]);
      }
    out.partition = Partition(out.instance.size(), blocks);
  }
  return out;
}

/// How a (3,3) formula is laid out by gen_33sat_cs after normalisation.
struct Sat33Layout {
  Cnf formula;                          // normalised and padded; variable ids as in the input, padding after
  std::vector<int> variables;           // variables of `formula`, in chain order
  int bits = 0;                         // clause count is 2^bits
  std::vector<std::pair<int, char>> padding_values;  // fixed values for padding variables
};

namespace detail {

inline Sat33Layout normalise_33(const Cnf& input) {
  std::vector<int> occ(input.num_vars + 1, 0);
  std::vector<LitVec> clauses;
  for (const auto& raw : input.clauses) {
    LitVec c = raw;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.size() > 3) throw PreconditionError("clause with more than 3 literals");
    for (Lit l : c) ++occ[var_of(l)];
    bool taut = false;
    for (Lit l : c) taut |= std::binary_search(c.begin(), c.end(), -l);
    if (!taut) clauses.push_back(std::move(c));
  }
  for (int v = 1; v <= input.num_vars; ++v)
    if (occ[v] > 3) throw PreconditionError("variable " + std::to_string(v) + " occurs more than 3 times");
  // pure literals are set true and their clauses dropped, until both polarities remain everywhere
  while (true) {
    std::vector<char> pos(input.num_vars + 1, 0), neg(input.num_vars + 1, 0);
    for (const auto& c : clauses)
      for (Lit l : c) (l > 0 ? pos : neg)[var_of(l)] = 1;
    auto pure = [&](Lit l) { return !(pos[var_of(l)] && neg[var_of(l)]); };
    auto before = clauses.size();
    std::erase_if(clauses, [&](const LitVec& c) { return std::any_of(c.begin(), c.end(), pure); });
    if (clauses.size() == before) break;
  }
  Sat33Layout out;
  std::size_t count = 2;
  while (count < clauses.size()) count *= 2;
  if (count - clauses.size() == 1) count *= 2;
  int next = input.num_vars;
  std::size_t pad = count - clauses.size();
  while (pad > 0) {
    if (pad % 2) {  // (a|b) (-a|c) (-b|-c), satisfied by a=1 b=0 c=1
      int a = ++next, b = ++next, c = ++next;
      clauses.push_back({a, b});
      clauses.push_back({-a, c});
      clauses.push_back({-b, -c});
      out.padding_values.insert(out.padding_values.end(), {{a, 1}, {b, 0}, {c, 1}});
      pad -= 3;
    } else {  // (a|b) (-a|-b), satisfied by a=1 b=0
      int a = ++next, b = ++next;
      clauses.push_back({a, b});
      clauses.push_back({-a, -b});
      out.padding_values.insert(out.padding_values.end(), {{a, 1}, {b, 0}});
      pad -= 2;
    }
  }
  out.formula.num_vars = next;
  out.formula.clauses = std::move(clauses);
  std::vector<char> used(next + 1, 0);
  for (const auto& c : out.formula.clauses)
    for (Lit l : c) used[var_of(l)] = 1;
  for (int v = 1; v <= next; ++v)
    if (used[v]) out.variables.push_back(v);
  while ((std::size_t{1} << out.bits) < count) ++out.bits;
  return out;
}

}  // namespace detail

/// Bounded-degree, logarithmic-pathwidth existence instance for a formula where every variable
/// occurs at most 3 times. `assignment` (index = variable id) selects the emitted partition.
inline ReductionOutput gen_33sat_cs(const Cnf& phi, std::optional<std::vector<char>> assignment = std::nullopt) {
  for (const auto& c : phi.clauses)
    for (Lit l : c)
      if (l == 0 || var_of(l) > phi.num_vars) throw PreconditionError("literal out of range");
  const Sat33Layout lay = detail::normalise_33(phi);
  const int bits = lay.bits;
  const int nv = static_cast<int>(lay.variables.size());

  struct Occurrence {
    int clause;
    bool positive;
    Vertex z;
    std::vector<Vertex> s, sbar, t, u, v;  // s has bits+1 entries, the others bits
  };
  std::vector<std::vector<Occurrence>> occ(nv);
  std::vector<int> index_of(lay.formula.num_vars + 1, -1);
  for (int i = 0; i < nv; ++i) index_of[lay.variables[i]] = i;
  for (int cl = 0; cl < static_cast<int>(lay.formula.clauses.size()); ++cl)
    for (Lit l : lay.formula.clauses[cl]) occ[index_of[var_of(l)]].push_back({cl, l > 0, 0, {}, {}, {}, {}, {}});

  // group 0 holds the selection cycles, group i+1 everything owned by variable i
  detail::Construction g;
  std::vector<Vertex> ypos(nv), yneg(nv);
  for (int i = 0; i < nv; ++i) {
    std::string var = "x" + std::to_string(lay.variables[i]);
    ypos[i] = g.add(var, i + 1);
    yneg[i] = g.add("-" + var, i + 1);
    for (std::size_t j = 0; j < occ[i].size(); ++j) {
      auto& o = occ[i][j];
      std::string tag = var + "#" + std::to_string(j + 1);
      o.z = g.add(tag + ".z", i + 1);
      for (int k = 0; k <= bits; ++k) o.s.push_back(g.add(tag + ".s" + std::to_string(k), i + 1));
      for (int k = 0; k < bits; ++k) {
        o.sbar.push_back(g.add(tag + ".sb" + std::to_string(k), i + 1));
        o.t.push_back(g.add(tag + ".t" + std::to_string(k), i + 1));
        o.u.push_back(g.add(tag + ".u" + std::to_string(k), i + 1));
        o.v.push_back(g.add(tag + ".v" + std::to_string(k), i + 1));
      }
    }
  }
  std::vector<Vertex> p(bits), q(bits), r(bits);
  for (int k = 0; k < bits; ++k) {
    p[k] = g.add("p" + std::to_string(k));
    q[k] = g.add("q" + std::to_string(k));
    r[k] = g.add("r" + std::to_string(k));
  }

  std::vector<const Occurrence*> chain;  // all occurrences in variable order
  for (const auto& list : occ)
    for (const auto& o : list) chain.push_back(&o);
  auto bit = [](const Occurrence& o, int k) { return (o.clause >> k) & 1; };

  for (int i = 0; i < nv; ++i)
    for (const auto& o : occ[i]) {
      g.edge(o.positive ? ypos[i] : yneg[i], o.z, 1);
      for (int k = 0; k < bits; ++k) {
        g.edge(o.s[k], o.sbar[k], 10);
        g.edge(o.sbar[k], o.s[k + 1], 9);
        g.edge(o.s[k], o.t[k], -1);
        g.edge(o.t[k], bit(o, k) ? o.v[k] : o.u[k], 2);
      }
      g.edge(o.s[bits], o.z, 1);
    }
  for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
    g.edge(chain[c]->z, chain[c + 1]->z, 5);
    for (int k = 0; k < bits; ++k) {
      g.edge(chain[c]->u[k], chain[c + 1]->u[k], 5);
      g.edge(chain[c]->v[k], chain[c + 1]->v[k], 5);
    }
  }
  const Occurrence& first = *chain.front();
  const Occurrence& last = *chain.back();
  for (int k = 0; k < bits; ++k) {
    g.edge(p[k], q[k], 1);
    g.edge(p[k], r[k], 1);
    g.rho_edge(q[k], r[k]);
    if (k + 1 < bits) g.edge(p[k], p[k + 1], 5);
    g.edge(last.u[k], q[k], 5);
    g.edge(q[k], first.u[k], 5);
    g.edge(last.v[k], r[k], 5);
    g.edge(r[k], first.v[k], 5);
  }
  g.edge(last.z, p[0], 5);
  g.edge(p[bits - 1], first.z, 5);

  // anchors and the partner kept with each gadget's h in the emitted partition
  std::vector<std::pair<Vertex, GadgetHandle>> single;
  std::vector<GadgetHandle> literal(nv);
  auto at = [&](Vertex a, Weight xi) {
    single.emplace_back(a, g.attach({a}, xi, AttachMode::Neighborhood, "H[" + g.labels[a] + "]"));
  };
  for (int i = 0; i < nv; ++i)
    literal[i] = g.attach({ypos[i], yneg[i]}, 9, AttachMode::Neighborhood, "H[" + g.labels[ypos[i]] + "]");
  for (const auto& list : occ)
    for (const auto& o : list) {
      for (int k = 0; k < bits; ++k) {
        at(o.sbar[k], 10);
        at(o.u[k], bit(o, k) ? 9 : 10);
        at(o.v[k], bit(o, k) ? 10 : 9);
      }
      at(o.z, 10);
      for (Vertex sv : o.s) at(sv, 9);
    }
  for (int k = 0; k < bits; ++k) {
    at(p[k], 10);
    at(q[k], 10);
    at(r[k], 10);
  }

  const Weight rho = std::min<Weight>(-20 - 2 * bits, -g.max_positive() - 1);
  ReductionOutput out;
  out.instance = g.build(rho, "33sat-cs");
  out.gadgets = g.gadgets;
  out.provenance = g.labels;
  if (phi.num_vars <= 22)
    out.expected_core = source::satisfying_assignment(phi) ? CsVerdict::Exists : CsVerdict::NotExists;

  // path decomposition: the selection group plus two consecutive variable groups per bag
  std::vector<std::vector<int>> group(nv + 1);
  for (Vertex w = 0; w < out.instance.size(); ++w) group[g.groups[w]].push_back(w);
  std::vector<std::vector<int>> bags;
  for (int i = 1; i <= std::max(1, nv - 1); ++i) {
    std::vector<int> bag = group[0];
    bag.insert(bag.end(), group[i].begin(), group[i].end());
    if (i + 1 <= nv) bag.insert(bag.end(), group[i + 1].begin(), group[i + 1].end());
    bags.push_back(std::move(bag));
  }
  std::vector<std::pair<int, int>> path;
  for (int i = 0; i + 1 < static_cast<int>(bags.size()); ++i) path.emplace_back(i, i + 1);
  out.decomposition = TreeDecomposition::from_tree_edges(std::move(bags), path);

  if (assignment) {
    if (static_cast<int>(assignment->size()) < phi.num_vars + 1)
      throw PreconditionError("assignment must cover every variable (index = variable id)");
    std::vector<char> val(lay.formula.num_vars + 1, 0);
    for (int v = 1; v <= phi.num_vars; ++v) val[v] = (*assignment)[v];
    for (auto [v, b] : lay.padding_values) val[v] = b;
    std::vector<std::vector<Vertex>> blocks;
    std::vector<char> placed(out.instance.size(), 0);
    auto put = [&](std::vector<Vertex> blk) {
      for (Vertex w : blk) placed[w] = 1;
      blocks.push_back(std::move(blk));
    };
    for (int i = 0; i < nv; ++i) {
      bool truth = val[lay.variables[i]] != 0;
      put({literal[i].h, truth ? ypos[i] : yneg[i]});
      for (auto& blk : gadget_rest_blocks(literal[i])) put(blk);
    }
    for (const auto& [anchor, gh] : single) {
      put({gh.h, anchor});
      for (auto& blk : gadget_rest_blocks(gh)) put(blk);
    }
    for (Vertex w = 0; w < out.instance.size(); ++w)
      if (!placed[w]) blocks.push_back({w});
    out.partition = Partition(out.instance.size(), blocks);
  }
  return out;
}

/// Normalised formula that gen_33sat_cs encodes, for callers that need clause numbering.
inline Sat33Layout layout_33sat(const Cnf& phi) { return detail::normalise_33(phi); }

}  // namespace ashg
