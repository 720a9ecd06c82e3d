/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ashg/csv.hpp"
#include "ashg/error.hpp"
#include "ashg/instance.hpp"
#include "ashg/kcore.hpp"
#include "ashg/qbf.hpp"
#include "ashg/treedecomp.hpp"

namespace ashg {

/// Core stability as an exists-forall formula. x variables (one per edge of the augmented
/// graph) pick the partition, y variables (one per vertex) range over candidate coalitions.
struct CsEncoding {
  AshgInstance augmented;  // instance plus weight-0 edges between bag mates
  TreeDecomposition td;    // the decomposition the encoding was built from
  int original_edges = 0;
  E3CnfFDnf formula;
  std::vector<int> clause_node;    // per cnf clause: first node (pre-order) holding its triple
  std::vector<Vertex> term_owner;  // per dnf term: the vertex it speaks for, -1 for the all-out term

  int x_var(Vertex u, Vertex v) const {  // 1-based
    if (u > v) std::swap(u, v);
    const auto& e = augmented.edges();
    auto it = std::lower_bound(e.begin(), e.end(), Edge{u, v, 0},
                               [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    if (it == e.end() || it->u != u || it->v != v) throw PreconditionError("no x variable for a non-edge");
    return static_cast<int>(it - e.begin()) + 1;
  }
  int y_var(Vertex u) const { return static_cast<int>(augmented.edge_count()) + u + 1; }
};

struct EncodeLimits {
  int max_degree = 4;  // in the augmented graph; terms per vertex grow as 4^degree
};

inline CsEncoding encode_cs(const AshgInstance& inst, const TreeDecomposition& td, EncodeLimits limits = {}) {
  if (auto rep = validate_td(inst, td); !rep.ok()) throw ValidationError("invalid tree decomposition: " + rep.message);
  const int n = inst.size();
  InstanceBuilder b(n);
  for (const auto& e : inst.edges()) b.add_edge(e.u, e.v, e.w);
  for (const auto& bag : td.bags)
    for (std::size_t i = 0; i < bag.size(); ++i)
      for (std::size_t j = i + 1; j < bag.size(); ++j)
        if (!b.has_edge(bag[i], bag[j])) b.add_edge(bag[i], bag[j], 0);
  CsEncoding enc{b.build(), td, static_cast<int>(inst.edge_count()), {}, {}, {}};
  const auto& g = enc.augmented;
  for (Vertex u = 0; u < n; ++u)
    if (g.degree(u) > limits.max_degree)
      throw ResourceLimitError("augmented-degree", "vertex " + std::to_string(u) + " has degree " +
                                                       std::to_string(g.degree(u)) + " after adding bag edges, cap " +
                                                       std::to_string(limits.max_degree));
  auto& phi = enc.formula;
  const int m = static_cast<int>(g.edge_count());
  phi.num_vars = m + n;
  for (int v = 1; v <= m; ++v) phi.x_vars.push_back(v);
  for (Vertex u = 0; u < n; ++u) phi.y_vars.push_back(enc.y_var(u));

  // transitivity inside bags: x(a,b) and x(b,c) force x(a,c)
  std::set<std::tuple<int, int, int>> seen;
  for (int t : preorder(td.children(), td.root)) {
    const auto& bag = td.bags[t];
    for (int mid : bag)
      for (std::size_t i = 0; i < bag.size(); ++i)
        for (std::size_t j = i + 1; j < bag.size(); ++j) {
          int a = bag[i], c = bag[j];
          if (a == mid || c == mid || !seen.insert({a, mid, c}).second) continue;
          phi.cnf.push_back({-enc.x_var(a, mid), -enc.x_var(mid, c), enc.x_var(a, c)});
          enc.clause_node.push_back(t);
        }
  }

  // nobody in the coalition, or some member u gains no more than it has now
  LitVec none;
  for (Vertex u = 0; u < n; ++u) none.push_back(-enc.y_var(u));
  phi.dnf.push_back(std::move(none));
  enc.term_owner.push_back(-1);
  for (Vertex u = 0; u < n; ++u) {
    auto nb = g.neighbors(u);
    const int d = static_cast<int>(nb.size());
    std::vector<Weight> sum(std::size_t{1} << d, 0);
    for (std::size_t mask = 1; mask < sum.size(); ++mask) {
      int low = std::countr_zero(mask);
      sum[mask] = sum[mask & (mask - 1)] + nb[low].w;
    }
    for (std::size_t in_y = 0; in_y < sum.size(); ++in_y)
      for (std::size_t in_p = 0; in_p < sum.size(); ++in_p) {
        if (sum[in_y] > sum[in_p]) continue;
        LitVec term{enc.y_var(u)};
        for (int i = 0; i < d; ++i) term.push_back((in_y >> i & 1) ? enc.y_var(nb[i].v) : -enc.y_var(nb[i].v));
        for (int i = 0; i < d; ++i) term.push_back((in_p >> i & 1) ? enc.x_var(u, nb[i].v) : -enc.x_var(u, nb[i].v));
        phi.dnf.push_back(std::move(term));
        enc.term_owner.push_back(u);
      }
  }
  return enc;
}

/// Decomposition of the formula's incidence graph: each original node keeps the y variables of
/// its bag's closed neighborhood, the x variables inside the bag and the all-out term; every
/// cnf clause and per-vertex term gets its own node on a path above its home node.
inline AnnotatedTd build_incidence_td(const CsEncoding& enc) {
  const auto& td = enc.td;
  const auto& g = enc.augmented;
  const auto& phi = enc.formula;
  const int n = g.size();
  const int nv = phi.num_vars;
  const int k = static_cast<int>(phi.cnf.size());
  const int nodes = td.node_count();
  const int none_term = nv + k;  // incidence vertex of the all-out term

  RootedTree orig(td.parent, td.root);
  std::vector<int> top(n, -1);  // highest node holding the vertex
  for (int t = 0; t < nodes; ++t)
    for (int v : td.bags[t])
      if (top[v] < 0 || orig.depth(t) < orig.depth(top[v])) top[v] = t;

  std::vector<std::vector<int>> base(nodes);
  for (int t = 0; t < nodes; ++t) {
    auto& bag = base[t];
    const auto& tb = td.bags[t];
    for (int u : tb) {
      bag.push_back(enc.y_var(u) - 1);
      for (const auto& nb : g.neighbors(u)) bag.push_back(enc.y_var(nb.v) - 1);
    }
    for (std::size_t i = 0; i < tb.size(); ++i)
      for (std::size_t j = i + 1; j < tb.size(); ++j) bag.push_back(enc.x_var(tb[i], tb[j]) - 1);
    bag.push_back(none_term);
    std::sort(bag.begin(), bag.end());
    bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
  }

  std::vector<std::vector<int>> items(nodes);  // incidence vertices of clauses/terms per home node
  for (int i = 0; i < k; ++i) items[enc.clause_node[i]].push_back(nv + i);
  for (int j = 1; j < static_cast<int>(phi.dnf.size()); ++j) items[top[enc.term_owner[j]]].push_back(nv + k + j);

  AnnotatedTd out{TdKind::Incidence, {}};
  auto& nt = out.td;
  nt.bags = base;
  nt.parent = td.parent;
  nt.root = td.root;
  std::vector<int> item_of;  // per added node
  for (int t = 0; t < nodes; ++t) {
    int above = td.parent[t];
    int prev = -1;
    for (int item : items[t]) {
      int id = nt.node_count();
      auto bag = base[t];
      bag.push_back(item);
      nt.bags.push_back(std::move(bag));
      nt.parent.push_back(prev >= 0 ? prev : (above >= 0 ? above : t));
      item_of.push_back(item);
      prev = id;
    }
    if (prev >= 0 && above >= 0) nt.parent[t] = prev;
  }
  // variables a term needs beyond its home bag are routed along the tree
  RootedTree tree(nt.parent, nt.root);
  for (int id = nodes; id < nt.node_count(); ++id) {
    int item = item_of[id - nodes];
    const LitVec& row = item < nv + k ? phi.cnf[item - nv] : phi.dnf[item - nv - k];
    for (Lit l : row) {
      int v = var_of(l) - 1;
      if (std::find(nt.bags[id].begin(), nt.bags[id].end(), v) != nt.bags[id].end()) continue;
      int anchor = -1;  // some original node already holding v
      if (v < static_cast<int>(g.edge_count())) {
        const auto& e = g.edges()[v];
        for (int t = 0; t < nodes && anchor < 0; ++t)
          if (std::binary_search(td.bags[t].begin(), td.bags[t].end(), e.u) &&
              std::binary_search(td.bags[t].begin(), td.bags[t].end(), e.v))
            anchor = t;
      }
      if (anchor < 0) throw std::logic_error("incidence decomposition: variable without a home");
      for (int t : tree.steiner({id, anchor})) nt.bags[t].push_back(v);
    }
  }
  detail::sort_bags(nt);
  return out;
}

/// Blocks are the components of the edges whose x variable is true.
inline Partition decode_partition(const CsEncoding& enc, const std::vector<char>& model) {
  const auto& g = enc.augmented;
  std::vector<int> parent(g.size());
  for (int i = 0; i < g.size(); ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  const auto& e = g.edges();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i + 1 >= model.size()) throw PreconditionError("model does not assign every x variable");
    if (model[i + 1]) parent[find(e[i].u)] = find(e[i].v);
  }
  std::map<int, std::vector<Vertex>> blocks;
  for (Vertex v = 0; v < g.size(); ++v) blocks[find(v)].push_back(v);
  std::vector<std::vector<Vertex>> out;
  for (auto& [r, b] : blocks) out.push_back(std::move(b));
  return Partition(g.size(), out);
}

struct CsPipelineOptions {
  EncodeLimits encode;
  QbfPipelineOptions qbf;
};

struct CsPipelineStats {
  int augmented_edges = 0, augmented_degree = 0;
  int cnf_clauses = 0, dnf_terms = 0, incidence_width = 0;
  QbfPipelineStats qbf;
};

struct CsPipelineResult {
  CsResult result;
  CsPipelineStats stats;
  std::string qdimacs, dimacs;
};

namespace detail {

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const ResourceLimitError& e) {
    throw ResourceLimitError(e.cap(), std::string("stage ") + name + ": " + e.detail());
  }
}

}  // namespace detail

/// Decides core stability through the quantified-formula pipeline.
inline CsPipelineResult solve_cs(const AshgInstance& inst, std::optional<TreeDecomposition> td = std::nullopt,
                                 const CsPipelineOptions& opt = {}) {
  TreeDecomposition dec = td ? *td : heuristic_decompose(inst);
  CsPipelineResult r;
  auto enc = detail::stage("encode", [&] { return encode_cs(inst, dec, opt.encode); });
  r.stats.augmented_edges = static_cast<int>(enc.augmented.edge_count());
  r.stats.augmented_degree = enc.augmented.max_degree();
  r.stats.cnf_clauses = static_cast<int>(enc.formula.cnf.size());
  r.stats.dnf_terms = static_cast<int>(enc.formula.dnf.size());
  auto itd = detail::stage("incidence-td", [&] { return build_incidence_td(enc); });
  r.stats.incidence_width = itd.td.width();
  auto q = detail::stage("qbf", [&] { return solve_e3cnffdnf(enc.formula, itd.td, opt.qbf); });
  r.stats.qbf = q.stats;
  r.qdimacs = std::move(q.qdimacs);
  r.dimacs = std::move(q.dimacs);
  r.result.method = "qbf";
  if (!q.sat) return r;
  auto p = decode_partition(enc, q.assignment);
  bool stable = inst.size() <= 20 ? verify_bruteforce(inst, p).stable()
                                  : verify_treewidth(inst, p, make_nice(dec), SignatureMode::Value).stable();
  if (!stable) throw std::logic_error("pipeline model decodes to a partition that is not core stable");
  r.result.verdict = CsVerdict::Exists;
  r.result.partition = std::move(p);
  return r;
}

}  // namespace ashg
