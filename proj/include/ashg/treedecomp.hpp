/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ashg/error.hpp"
#include "ashg/instance.hpp"

namespace ashg {

/// Plain undirected simple graph used for decompositions of instances and formulas.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;  // sorted, no duplicates

  Graph() = default;
  explicit Graph(int count) : n(count), adj(count) {}

  static Graph from_edges(int count, const std::vector<std::pair<int, int>>& edges) {
    Graph g(count);
    for (auto [u, v] : edges) {
      if (u == v) continue;
      g.adj[u].push_back(v);
      g.adj[v].push_back(u);
    }
    for (auto& a : g.adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
  }

  static Graph from_instance(const AshgInstance& inst) {
    Graph g(inst.size());
    for (int u = 0; u < inst.size(); ++u)
      for (const auto& nb : inst.neighbors(u)) g.adj[u].push_back(nb.v);
    return g;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n; ++u)
      for (int v : adj[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }
};

/// Rooted tree decomposition. Bags are sorted; parent[root] == -1.
struct TreeDecomposition {
  std::vector<std::vector<int>> bags;
  std::vector<int> parent;
  int root = 0;

  int node_count() const { return static_cast<int>(bags.size()); }
  int width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return static_cast<int>(w) - 1;
  }
  std::vector<std::vector<int>> children() const {
    std::vector<std::vector<int>> ch(bags.size());
    for (int i = 0; i < node_count(); ++i)
      if (parent[i] >= 0) ch[parent[i]].push_back(i);
    return ch;
  }
  std::vector<std::pair<int, int>> tree_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < node_count(); ++i)
      if (parent[i] >= 0) out.emplace_back(parent[i], i);
    return out;
  }

  /// Builds a rooted decomposition from an unrooted tree given by its edges.
  static TreeDecomposition from_tree_edges(std::vector<std::vector<int>> bags,
                                           const std::vector<std::pair<int, int>>& edges, int root = 0) {
    const int count = static_cast<int>(bags.size());
    if (count == 0) throw ValidationError("decomposition has no nodes");
    if (static_cast<int>(edges.size()) != count - 1)
      throw ValidationError("tree with " + std::to_string(count) + " nodes needs " + std::to_string(count - 1) +
                            " edges, got " + std::to_string(edges.size()));
    std::vector<std::vector<int>> nb(count);
    for (auto [a, b] : edges) {
      if (a < 0 || b < 0 || a >= count || b >= count || a == b) throw ValidationError("bad tree edge");
      nb[a].push_back(b);
      nb[b].push_back(a);
    }
    TreeDecomposition td;
    td.bags = std::move(bags);
    for (auto& b : td.bags) {
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
    }
    td.parent.assign(count, -2);
    td.root = root;
    td.parent[root] = -1;
    std::vector<int> stack{root};
    int seen = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : nb[x])
        if (td.parent[y] == -2) {
          td.parent[y] = x;
          ++seen;
          stack.push_back(y);
        }
    }
    if (seen != count) throw ValidationError("tree edges do not connect all nodes");
    return td;
  }
};

/// Node order with every parent before its children.
inline std::vector<int> preorder(const std::vector<std::vector<int>>& children, int root) {
  std::vector<int> order;
  order.reserve(children.size());
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    order.push_back(x);
    for (auto it = children[x].rbegin(); it != children[x].rend(); ++it) stack.push_back(*it);
  }
  return order;
}

/// Node order with every child before its parent.
inline std::vector<int> postorder(const std::vector<std::vector<int>>& children, int root) {
  std::vector<int> order;
  order.reserve(children.size());
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [x, i] = stack.back();
    if (i < children[x].size()) {
      int c = children[x][i++];
      stack.push_back({c, 0});
    } else {
      order.push_back(x);
      stack.pop_back();
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// Validation

struct TdReport {
  enum class Kind { Ok, BadTree, UnknownVertex, VertexMissing, EdgeUncovered, Disconnected };
  Kind kind = Kind::Ok;
  std::string message;
  std::vector<int> witness;

  bool ok() const { return kind == Kind::Ok; }
};

/// Sorted `bag` holds every element of `items`; cheap when `items` is short.
template <class Items>
bool bag_contains_all(const std::vector<int>& bag, const Items& items) {
  for (int v : items)
    if (!std::binary_search(bag.begin(), bag.end(), v)) return false;
  return true;
}

/// Bags containing each vertex, in node order, stored flat.
class Occurrences {
 public:
  Occurrences(const TreeDecomposition& td, int vertex_count) : start_(static_cast<std::size_t>(vertex_count) + 1, 0) {
    for (const auto& b : td.bags)
      for (int v : b) ++start_[v + 1];
    for (int v = 0; v < vertex_count; ++v) start_[v + 1] += start_[v];
    nodes_.resize(start_.back());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (int i = 0; i < td.node_count(); ++i)
      for (int v : td.bags[i]) nodes_[fill[v]++] = i;
  }
  std::span<const int> operator[](int v) const {
    return {nodes_.data() + start_[v], static_cast<std::size_t>(start_[v + 1] - start_[v])};
  }

 private:
  std::vector<int> start_, nodes_;
};

namespace detail {

/// Shared checks; `covered(occ, fail)` tests the edge or hyperedge condition.
template <class Covered>
TdReport validate_td_with(int vertex_count, const TreeDecomposition& td, Covered&& covered) {
  TdReport r;
  const int count = td.node_count();
  auto fail = [&](TdReport::Kind k, std::string msg, std::vector<int> w) {
    r.kind = k;
    r.message = std::move(msg);
    r.witness = std::move(w);
    return r;
  };
  if (count == 0 || static_cast<int>(td.parent.size()) != count || td.root < 0 || td.root >= count ||
      td.parent[td.root] != -1)
    return fail(TdReport::Kind::BadTree, "missing or malformed root", {});
  for (int i = 0; i < count; ++i) {
    if (i != td.root && (td.parent[i] < 0 || td.parent[i] >= count))
      return fail(TdReport::Kind::BadTree, "node " + std::to_string(i) + " has no valid parent", {i});
  }
  {
    // every node must reach the root
    std::vector<int> state(count, 0);
    state[td.root] = 2;
    for (int i = 0; i < count; ++i) {
      std::vector<int> path;
      int x = i;
      while (state[x] == 0) {
        state[x] = 1;
        path.push_back(x);
        x = td.parent[x];
      }
      if (state[x] == 1) return fail(TdReport::Kind::BadTree, "parent pointers contain a cycle", {x});
      for (int p : path) state[p] = 2;
    }
  }
  for (int i = 0; i < count; ++i)
    for (int v : td.bags[i])
      if (v < 0 || v >= vertex_count) return fail(TdReport::Kind::UnknownVertex, "bag " + std::to_string(i) + " references unknown vertex " + std::to_string(v), {i, v});
  Occurrences occ(td, vertex_count);
  for (int v = 0; v < vertex_count; ++v)
    if (occ[v].empty()) return fail(TdReport::Kind::VertexMissing, "vertex " + std::to_string(v) + " is in no bag", {v});
  if (auto bad = covered(occ, fail); !bad.ok()) return bad;
  // occurrences of v are connected iff exactly one occurrence has its parent outside the set
  std::vector<char> in(count, 0);
  for (int v = 0; v < vertex_count; ++v) {
    for (int node : occ[v]) in[node] = 1;
    int tops = 0;
    for (int node : occ[v])
      if (td.parent[node] < 0 || !in[td.parent[node]]) ++tops;
    for (int node : occ[v]) in[node] = 0;
    if (tops != 1)
      return fail(TdReport::Kind::Disconnected, "occurrences of vertex " + std::to_string(v) + " are disconnected", {v});
  }
  return r;
}

}  // namespace detail

inline TdReport validate_td(const Graph& g, const TreeDecomposition& td) {
  return detail::validate_td_with(g.n, td, [&](const Occurrences& occ, auto&& fail) {
    for (int u = 0; u < g.n; ++u)
      for (int v : g.adj[u]) {
        if (v <= u) continue;
        auto small = occ[u].size() < occ[v].size() ? occ[u] : occ[v];
        int other = occ[u].size() < occ[v].size() ? v : u;
        bool found = false;
        for (int node : small)
          if (std::binary_search(td.bags[node].begin(), td.bags[node].end(), other)) {
            found = true;
            break;
          }
        if (!found)
          return fail(TdReport::Kind::EdgeUncovered, "edge " + std::to_string(u) + " " + std::to_string(v) + " is uncovered", {u, v});
      }
    return TdReport{};
  });
}

/// Same contract for the graph in which every hyperedge (sorted vertex list) is a clique.
/// Each hyperedge must lie inside one bag, which for subtrees is equivalent to pairwise coverage.
template <class Rows>
TdReport validate_td(int vertex_count, const Rows& hyperedges, const TreeDecomposition& td) {
  return detail::validate_td_with(vertex_count, td, [&](const Occurrences& occ, auto&& fail) {
    for (const auto& e : hyperedges) {
      if (e.begin() == e.end()) continue;
      int rare = *e.begin();
      for (int v : e)
        if (occ[v].size() < occ[rare].size()) rare = v;
      bool found = false;
      for (int node : occ[rare])
        if (bag_contains_all(td.bags[node], e)) {
          found = true;
          break;
        }
      if (!found)
        return fail(TdReport::Kind::EdgeUncovered, "hyperedge starting at " + std::to_string(*e.begin()) + " is uncovered",
                    std::vector<int>(e.begin(), e.end()));
    }
    return TdReport{};
  });
}

inline TdReport validate_td(const AshgInstance& inst, const TreeDecomposition& td) {
  return validate_td(Graph::from_instance(inst), td);
}

// ---------------------------------------------------------------------------
// Heuristic construction

enum class Heuristic { MinDegree, MinFill };

inline TreeDecomposition heuristic_decompose(const Graph& g, Heuristic h = Heuristic::MinFill) {
  const int n = g.n;
  TreeDecomposition td;
  if (n == 0) {
    td.bags = {{}};
    td.parent = {-1};
    td.root = 0;
    return td;
  }
  std::vector<std::set<int>> adj(n);
  for (int u = 0; u < n; ++u) adj[u].insert(g.adj[u].begin(), g.adj[u].end());
  std::vector<char> done(n, 0);
  auto score = [&](int v) -> long long {
    if (h == Heuristic::MinDegree) return static_cast<long long>(adj[v].size());
    long long missing = 0;
    for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
      for (auto b = std::next(a); b != adj[v].end(); ++b)
        if (!adj[*a].count(*b)) ++missing;
    return missing;
  };
  std::vector<long long> sc(n);
  std::set<std::pair<long long, int>> queue;
  for (int v = 0; v < n; ++v) {
    sc[v] = score(v);
    queue.insert({sc[v], v});
  }
  std::vector<int> order;
  std::vector<int> position(n);
  std::vector<std::vector<int>> bag_of(n);
  while (!queue.empty()) {
    int v = queue.begin()->second;
    queue.erase(queue.begin());
    position[v] = static_cast<int>(order.size());
    order.push_back(v);
    done[v] = 1;
    std::vector<int> nb(adj[v].begin(), adj[v].end());
    bag_of[v] = nb;
    bag_of[v].push_back(v);
    std::sort(bag_of[v].begin(), bag_of[v].end());
    std::set<int> touched;
    for (int a : nb) {
      adj[a].erase(v);
      for (int b : nb)
        if (a != b) adj[a].insert(b);
    }
    for (int a : nb) {
      touched.insert(a);
      for (int b : adj[a]) touched.insert(b);
    }
    for (int t : touched) {
      if (done[t]) continue;
      queue.erase({sc[t], t});
      sc[t] = score(t);
      queue.insert({sc[t], t});
    }
    adj[v].clear();
  }
  // node i corresponds to order[i]; parent = earliest-eliminated later neighbor
  td.bags.resize(n);
  td.parent.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    td.bags[i] = bag_of[v];
    int best = -1;
    for (int u : bag_of[v])
      if (u != v && (best < 0 || position[u] < best)) best = position[u];
    td.parent[i] = best;
  }
  td.root = n - 1;
  for (int i = 0; i < n - 1; ++i)
    if (td.parent[i] < 0) td.parent[i] = td.root;
  // contract nodes whose bag is contained in the parent's bag
  std::vector<char> removed(n, 0);
  for (int i = 0; i < n; ++i) {
    int p = td.parent[i];
    if (p < 0) continue;
    if (std::includes(td.bags[p].begin(), td.bags[p].end(), td.bags[i].begin(), td.bags[i].end()))
      removed[i] = 1;
  }
  auto resolve = [&](int x) {
    while (x >= 0 && removed[x]) x = td.parent[x];
    return x;
  };
  std::vector<int> new_id(n, -1);
  TreeDecomposition out;
  for (int i = 0; i < n; ++i)
    if (!removed[i]) {
      new_id[i] = out.node_count();
      out.bags.push_back(td.bags[i]);
    }
  out.parent.assign(out.bags.size(), -1);
  for (int i = 0; i < n; ++i) {
    if (removed[i]) continue;
    int p = resolve(td.parent[i]);
    out.parent[new_id[i]] = p < 0 ? -1 : new_id[p];
  }
  out.root = new_id[td.root];
  return out;
}

inline TreeDecomposition heuristic_decompose(const AshgInstance& inst, Heuristic h = Heuristic::MinFill) {
  return heuristic_decompose(Graph::from_instance(inst), h);
}

// ---------------------------------------------------------------------------
// Nice decompositions

enum class NodeKind { Leaf, Introduce, Forget, Join };

struct NiceTreeDecomposition {
  std::vector<std::vector<int>> bags;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<NodeKind> kind;
  std::vector<int> vertex;  // introduced / forgotten vertex, -1 otherwise
  int root = 0;

  int node_count() const { return static_cast<int>(bags.size()); }
  int width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return static_cast<int>(w) - 1;
  }
  TreeDecomposition as_td() const { return {bags, parent, root}; }
};

/// Converts a decomposition to nice form. Node ids are a post-order: children precede parents.
inline NiceTreeDecomposition make_nice(const TreeDecomposition& td) {
  NiceTreeDecomposition nice;
  auto add = [&](std::vector<int> bag, NodeKind k, int v, std::vector<int> ch) {
    int id = nice.node_count();
    nice.bags.push_back(std::move(bag));
    nice.kind.push_back(k);
    nice.vertex.push_back(v);
    nice.parent.push_back(-1);
    for (int c : ch) nice.parent[c] = id;
    nice.children.push_back(std::move(ch));
    return id;
  };
  // walk from node `from` (with bag `cur`) to bag `target`: forget then introduce
  auto transition = [&](int from, const std::vector<int>& target) {
    std::vector<int> cur = nice.bags[from];
    std::vector<int> drop, gain;
    std::set_difference(cur.begin(), cur.end(), target.begin(), target.end(), std::back_inserter(drop));
    std::set_difference(target.begin(), target.end(), cur.begin(), cur.end(), std::back_inserter(gain));
    for (int v : drop) {
      cur.erase(std::lower_bound(cur.begin(), cur.end(), v));
      from = add(cur, NodeKind::Forget, v, {from});
    }
    for (int v : gain) {
      cur.insert(std::lower_bound(cur.begin(), cur.end(), v), v);
      from = add(cur, NodeKind::Introduce, v, {from});
    }
    return from;
  };
  auto children = td.children();
  std::vector<int> result(td.node_count(), -1);
  for (int t : postorder(children, td.root)) {
    const auto& bag = td.bags[t];
    std::vector<int> branches;
    for (int c : children[t]) branches.push_back(transition(result[c], bag));
    if (branches.empty()) {
      int leaf = add({}, NodeKind::Leaf, -1, {});
      branches.push_back(transition(leaf, bag));
    }
    int acc = branches[0];
    for (std::size_t i = 1; i < branches.size(); ++i) acc = add(bag, NodeKind::Join, -1, {acc, branches[i]});
    result[t] = acc;
  }
  nice.root = transition(result[td.root], {});
  return nice;
}

/// Checks the nice-form shape (not validity against a graph).
inline std::string nice_shape_error(const NiceTreeDecomposition& nice) {
  if (nice.node_count() == 0) return "no nodes";
  if (!nice.bags[nice.root].empty()) return "root bag is not empty";
  for (int i = 0; i < nice.node_count(); ++i) {
    const auto& ch = nice.children[i];
    const auto& b = nice.bags[i];
    switch (nice.kind[i]) {
      case NodeKind::Leaf:
        if (!ch.empty() || !b.empty()) return "leaf " + std::to_string(i) + " has children or a non-empty bag";
        break;
      case NodeKind::Join:
        if (ch.size() != 2 || nice.bags[ch[0]] != b || nice.bags[ch[1]] != b)
          return "join " + std::to_string(i) + " malformed";
        break;
      case NodeKind::Introduce: {
        if (ch.size() != 1) return "introduce " + std::to_string(i) + " needs one child";
        auto c = nice.bags[ch[0]];
        c.insert(std::lower_bound(c.begin(), c.end(), nice.vertex[i]), nice.vertex[i]);
        if (c != b || std::binary_search(nice.bags[ch[0]].begin(), nice.bags[ch[0]].end(), nice.vertex[i]))
          return "introduce " + std::to_string(i) + " malformed";
        break;
      }
      case NodeKind::Forget: {
        if (ch.size() != 1) return "forget " + std::to_string(i) + " needs one child";
        auto c = b;
        c.insert(std::lower_bound(c.begin(), c.end(), nice.vertex[i]), nice.vertex[i]);
        if (c != nice.bags[ch[0]] || std::binary_search(b.begin(), b.end(), nice.vertex[i]))
          return "forget " + std::to_string(i) + " malformed";
        break;
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Steiner closure over a rooted tree

/// Rooted tree with LCA queries, used to grow vertex occurrence sets into subtrees.
class RootedTree {
 public:
  RootedTree(const std::vector<int>& parent, int root) : parent_(parent), root_(root) {
    const int n = static_cast<int>(parent.size());
    std::vector<std::vector<int>> ch(n);
    for (int i = 0; i < n; ++i)
      if (parent[i] >= 0) ch[parent[i]].push_back(i);
    depth_.assign(n, 0);
    pre_.assign(n, 0);
    auto order = preorder(ch, root);
    for (std::size_t i = 0; i < order.size(); ++i) {
      int x = order[i];
      pre_[x] = static_cast<int>(i);
      if (parent[x] >= 0) depth_[x] = depth_[parent[x]] + 1;
    }
    int levels = 1;
    while ((1 << levels) < n) ++levels;
    up_.assign(levels, std::vector<int>(n));
    for (int i = 0; i < n; ++i) up_[0][i] = parent[i] < 0 ? i : parent[i];
    for (int k = 1; k < levels; ++k)
      for (int i = 0; i < n; ++i) up_[k][i] = up_[k - 1][up_[k - 1][i]];
    mark_.assign(n, 0);
  }

  int lca(int a, int b) const {
    if (depth_[a] < depth_[b]) std::swap(a, b);
    int diff = depth_[a] - depth_[b];
    for (int k = 0; diff; ++k, diff >>= 1)
      if (diff & 1) a = up_[k][a];
    if (a == b) return a;
    for (int k = static_cast<int>(up_.size()) - 1; k >= 0; --k)
      if (up_[k][a] != up_[k][b]) {
        a = up_[k][a];
        b = up_[k][b];
      }
    return parent_[a];
  }

  int preorder_index(int x) const { return pre_[x]; }
  int depth(int x) const { return depth_[x]; }
  int parent(int x) const { return parent_[x]; }

  /// Nodes of the smallest subtree containing all `required` nodes.
  std::vector<int> steiner(const std::vector<int>& required) {
    if (required.empty()) return {};
    ++epoch_;
    int top = required[0];
    for (int r : required) top = lca(top, r);
    std::vector<int> out;
    for (int r : required) {
      int x = r;
      while (mark_[x] != epoch_) {
        mark_[x] = epoch_;
        out.push_back(x);
        if (x == top) break;
        x = parent_[x];
      }
    }
    if (mark_[top] != epoch_) {
      mark_[top] = epoch_;
      out.push_back(top);
    }
    return out;
  }

 private:
  std::vector<int> parent_;
  int root_;
  std::vector<int> depth_, pre_;
  std::vector<std::vector<int>> up_;
  std::vector<int> mark_;
  int epoch_ = 0;
};

// ---------------------------------------------------------------------------
// PACE .td format (1-based in files, 0-based in memory)

inline TreeDecomposition read_td(std::string_view text, int vertex_count) {
  bool header = false;
  int nbags = 0, nverts = 0;
  std::vector<std::vector<int>> bags;
  std::vector<char> defined;
  std::vector<std::pair<int, int>> edges;
  detail::for_each_line(text, [&](std::string_view line, int no) {
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "c") return;
    if (tok[0] == "s") {
      if (header) throw ParseError("duplicate 's td' header", no);
      if (tok.size() != 5 || tok[1] != "td") throw ParseError("malformed header, expected 's td <#bags> <max-bag-size> <n>'", no);
      nbags = static_cast<int>(detail::parse_int(tok[2], no, "bag count"));
      detail::parse_int(tok[3], no, "bag size");
      nverts = static_cast<int>(detail::parse_int(tok[4], no, "vertex count"));
      if (nbags < 1) throw ParseError("decomposition needs at least one bag", no);
      if (nverts != vertex_count)
        throw ParseError("header declares " + std::to_string(nverts) + " vertices, instance has " + std::to_string(vertex_count), no);
      bags.assign(nbags, {});
      defined.assign(nbags, 0);
      header = true;
      return;
    }
    if (!header) throw ParseError("missing 's td' header before data", no);
    if (tok[0] == "b") {
      if (tok.size() < 2) throw ParseError("malformed bag line", no);
      auto id = detail::parse_int(tok[1], no, "bag id");
      if (id < 1 || id > nbags) throw ParseError("bag id out of range", no);
      if (defined[id - 1]) throw ParseError("bag " + std::to_string(id) + " defined twice", no);
      defined[id - 1] = 1;
      for (std::size_t i = 2; i < tok.size(); ++i) {
        auto v = detail::parse_int(tok[i], no, "vertex id");
        if (v < 1 || v > nverts) throw ParseError("bag references unknown vertex " + std::to_string(v), no);
        bags[id - 1].push_back(static_cast<int>(v - 1));
      }
      return;
    }
    if (tok.size() != 2) throw ParseError("malformed tree edge line", no);
    auto a = detail::parse_int(tok[0], no, "bag id");
    auto b = detail::parse_int(tok[1], no, "bag id");
    if (a < 1 || b < 1 || a > nbags || b > nbags) throw ParseError("tree edge references unknown bag", no);
    edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
  });
  if (!header) throw ParseError("missing 's td' header");
  for (int i = 0; i < nbags; ++i)
    if (!defined[i]) throw ParseError("bag " + std::to_string(i + 1) + " not defined");
  try {
    return TreeDecomposition::from_tree_edges(std::move(bags), edges, 0);
  } catch (const ValidationError& e) {
    throw ParseError(std::string("non-tree edge set: ") + e.what());
  }
}

inline TreeDecomposition read_td(std::string_view text, const AshgInstance& inst) {
  return read_td(text, inst.size());
}

inline std::string emit_td(const TreeDecomposition& td, int vertex_count) {
  std::ostringstream out;
  out << "s td " << td.node_count() << " " << td.width() + 1 << " " << vertex_count << "\n";
  for (int i = 0; i < td.node_count(); ++i) {
    out << "b " << i + 1;
    for (int v : td.bags[i]) out << " " << v + 1;
    out << "\n";
  }
  for (auto [a, b] : td.tree_edges()) out << a + 1 << " " << b + 1 << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// PACE .gr graph format (1-based in files)

inline Graph read_gr(std::string_view text) {
  std::optional<int> n;
  std::size_t m = 0;
  std::vector<std::pair<int, int>> edges;
  detail::for_each_line(text, [&](std::string_view line, int no) {
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "c") return;
    if (tok[0] == "p") {
      if (n) throw ParseError("duplicate header", no);
      if (tok.size() != 4 || tok[1] != "tw") throw ParseError("malformed header, expected 'p tw <n> <m>'", no);
      auto nv = detail::parse_int(tok[2], no, "vertex count");
      auto mv = detail::parse_int(tok[3], no, "edge count");
      if (nv < 0 || mv < 0) throw ParseError("negative count in header", no);
      n = static_cast<int>(nv);
      m = static_cast<std::size_t>(mv);
      return;
    }
    if (!n) throw ParseError("missing 'p tw' header before data", no);
    if (tok.size() != 2) throw ParseError("malformed edge line, expected '<u> <v>'", no);
    auto u = detail::parse_int(tok[0], no, "vertex id");
    auto v = detail::parse_int(tok[1], no, "vertex id");
    if (u < 1 || v < 1 || u > *n || v > *n) throw ParseError("vertex id out of range 1.." + std::to_string(*n), no);
    if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), no);
    edges.emplace_back(static_cast<int>(u - 1), static_cast<int>(v - 1));
  });
  if (!n) throw ParseError("missing 'p tw' header");
  if (edges.size() != m)
    throw ParseError("header declares " + std::to_string(m) + " edges but " + std::to_string(edges.size()) +
                     " were given");
  auto g = Graph::from_edges(*n, edges);
  if (g.edges().size() != m) throw ParseError("duplicate edge in graph file");
  return g;
}

inline std::string emit_gr(const Graph& g) {
  auto edges = g.edges();
  std::ostringstream out;
  out << "p tw " << g.n << " " << edges.size() << "\n";
  for (auto [u, v] : edges) out << u + 1 << " " << v + 1 << "\n";
  return out.str();
}

}  // namespace ashg
