/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ashg/error.hpp"

namespace ashg {

using Vertex = int;
using Weight = std::int64_t;

/// Undirected weighted edge, stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Weight w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Vertex v = 0;
  Weight w = 0;
};

/// An additively separable hedonic game: a simple undirected graph with integer weights.
/// Immutable once built; use InstanceBuilder to construct.
class AshgInstance {
 public:
  AshgInstance() : offsets_(1, 0) {}

  AshgInstance(int n, std::vector<Edge> edges, std::string name = {},
               std::optional<Weight> scale = std::nullopt)
      : n_(n), edges_(std::move(edges)), name_(std::move(name)), scale_(scale) {
    if (n_ < 0) throw PreconditionError("negative vertex count");
    if (scale_ && *scale_ <= 0) throw PreconditionError("scale must be positive");
    for (auto& e : edges_) {
      if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
        throw PreconditionError("edge endpoint out of range");
      if (e.u == e.v) throw PreconditionError("self-loop at vertex " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
        throw PreconditionError("duplicate edge " + std::to_string(edges_[i].u) + " " +
                                std::to_string(edges_[i].v));
    build_adjacency();
  }

  int size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& name() const { return name_; }
  std::optional<Weight> scale() const { return scale_; }

  /// Neighbors of u sorted by id.
  std::span<const Neighbor> neighbors(Vertex u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }
  int degree(Vertex u) const { return static_cast<int>(offsets_[u + 1] - offsets_[u]); }
  int max_degree() const { return max_degree_; }
  /// Maximum absolute edge weight (0 for edgeless graphs).
  Weight max_abs_weight() const { return w_max_; }

  std::optional<Weight> weight(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v,
                               [](const Neighbor& a, Vertex x) { return a.v < x; });
    if (it == nb.end() || it->v != v) return std::nullopt;
    return it->w;
  }
  bool adjacent(Vertex u, Vertex v) const { return weight(u, v).has_value(); }

  /// Equality up to edge ordering (edges are kept sorted).
  friend bool operator==(const AshgInstance& a, const AshgInstance& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.scale_ == b.scale_ && a.name_ == b.name_;
  }

 private:
  void build_adjacency() {
    std::vector<int> deg(n_, 0);
    for (const auto& e : edges_) {
      ++deg[e.u];
      ++deg[e.v];
    }
    offsets_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
    adj_.assign(offsets_[n_], {});
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adj_[fill[e.u]++] = {e.v, e.w};
      adj_[fill[e.v]++] = {e.u, e.w};
      w_max_ = std::max(w_max_, e.w < 0 ? -e.w : e.w);
    }
    for (int i = 0; i < n_; ++i) {
      std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.v < b.v; });
      max_degree_ = std::max(max_degree_, deg[i]);
    }
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::string name_;
  std::optional<Weight> scale_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adj_;
  Weight w_max_ = 0;
  int max_degree_ = 0;
};

/// Mutable staging area for instances.
class InstanceBuilder {
 public:
  explicit InstanceBuilder(int n = 0) : n_(n) {}

  int size() const { return n_; }
  Vertex add_vertex() { return n_++; }
  /// Adds k vertices and returns the id of the first one.
  Vertex add_vertices(int k) {
    Vertex first = n_;
    n_ += k;
    return first;
  }

  void add_edge(Vertex u, Vertex v, Weight w) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) throw PreconditionError("edge endpoint out of range");
    if (u == v) throw PreconditionError("self-loop at vertex " + std::to_string(u));
    if (has_edge(u, v))
      throw PreconditionError("duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    edges_.push_back({std::min(u, v), std::max(u, v), w});
    keys_.push_back(key(u, v));
    sorted_ = false;
  }

  bool has_edge(Vertex u, Vertex v) const {
    if (!sorted_) {
      index_.resize(keys_.size());
      std::iota(index_.begin(), index_.end(), std::size_t{0});
      std::sort(index_.begin(), index_.end(),
                [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
      sorted_ = true;
    }
    auto k = key(u, v);
    auto it = std::lower_bound(index_.begin(), index_.end(), k,
                               [&](std::size_t a, std::uint64_t x) { return keys_[a] < x; });
    return it != index_.end() && keys_[*it] == k;
  }

  std::vector<Edge>& edges() { return edges_; }
  void set_name(std::string name) { name_ = std::move(name); }
  void set_scale(std::optional<Weight> scale) { scale_ = scale; }

  AshgInstance build() const { return AshgInstance(n_, edges_, name_, scale_); }

 private:
  static std::uint64_t key(Vertex u, Vertex v) {
    auto a = static_cast<std::uint64_t>(std::min(u, v));
    auto b = static_cast<std::uint64_t>(std::max(u, v));
    return (a << 32) | b;
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> keys_;
  mutable std::vector<std::size_t> index_;
  mutable bool sorted_ = true;
  std::string name_;
  std::optional<Weight> scale_;
};

/// A set of agents, kept sorted and duplicate free.
class Coalition {
 public:
  Coalition() = default;
  Coalition(std::initializer_list<Vertex> members) : Coalition(std::vector<Vertex>(members)) {}
  explicit Coalition(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  bool contains(Vertex u) const { return std::binary_search(members_.begin(), members_.end(), u); }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<Vertex>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::vector<Vertex> members_;
};

/// Disjoint blocks covering 0..n-1 exactly.
class Partition {
 public:
  Partition() = default;

  Partition(int n, std::vector<std::vector<Vertex>> blocks) : block_of_(n, -1) {
    for (auto& b : blocks) {
      if (b.empty()) throw PreconditionError("empty block in partition");
      std::sort(b.begin(), b.end());
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (Vertex v : blocks[i]) {
        if (v < 0 || v >= n) throw PreconditionError("partition vertex " + std::to_string(v) + " out of range");
        if (block_of_[v] != -1)
          throw PreconditionError("vertex " + std::to_string(v) + " assigned twice");
        block_of_[v] = static_cast<int>(i);
      }
    }
    for (int v = 0; v < n; ++v)
      if (block_of_[v] == -1) throw PreconditionError("vertex " + std::to_string(v) + " unassigned");
    blocks_ = std::move(blocks);
  }

  static Partition singletons(int n) {
    std::vector<std::vector<Vertex>> b(n);
    for (int v = 0; v < n; ++v) b[v] = {v};
    return Partition(n, std::move(b));
  }
  static Partition grand(int n) {
    if (n == 0) return Partition(0, {});
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 0);
    return Partition(n, {all});
  }

  int vertex_count() const { return static_cast<int>(block_of_.size()); }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::vector<Vertex>>& blocks() const { return blocks_; }
  const std::vector<Vertex>& block(std::size_t i) const { return blocks_[i]; }
  int block_of(Vertex v) const {
    if (v < 0 || v >= vertex_count()) throw PreconditionError("vertex " + std::to_string(v) + " unassigned");
    return block_of_[v];
  }

  /// Blocks sorted by their smallest member.
  Partition canonical() const {
    auto b = blocks_;
    std::sort(b.begin(), b.end());
    return Partition(vertex_count(), std::move(b));
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    if (a.vertex_count() != b.vertex_count()) return false;
    auto x = a.blocks_;
    auto y = b.blocks_;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }

 private:
  std::vector<std::vector<Vertex>> blocks_;
  std::vector<int> block_of_;
};

inline void require_matching(const AshgInstance& inst, const Partition& p) {
  if (p.vertex_count() != inst.size())
    throw PreconditionError("partition covers " + std::to_string(p.vertex_count()) +
                            " vertices but instance has " + std::to_string(inst.size()));
}

/// Sum of w(uv) over v in X. Requires u in X.
inline Weight utility(const AshgInstance& inst, const Coalition& x, Vertex u) {
  if (!x.contains(u)) throw PreconditionError("utility: vertex " + std::to_string(u) + " not in coalition");
  Weight sum = 0;
  for (const auto& nb : inst.neighbors(u))
    if (x.contains(nb.v)) sum += nb.w;
  return sum;
}

inline Weight partition_utility(const AshgInstance& inst, const Partition& p, Vertex u) {
  require_matching(inst, p);
  Weight sum = 0;
  for (const auto& nb : inst.neighbors(u))
    if (p.block_of(nb.v) == p.block_of(u)) sum += nb.w;
  return sum;
}

/// Utility of every vertex under P.
inline std::vector<Weight> partition_utilities(const AshgInstance& inst, const Partition& p) {
  require_matching(inst, p);
  std::vector<Weight> out(inst.size(), 0);
  for (const auto& e : inst.edges())
    if (p.block_of(e.u) == p.block_of(e.v)) {
      out[e.u] += e.w;
      out[e.v] += e.w;
    }
  return out;
}

inline bool is_blocking(const AshgInstance& inst, const Partition& p, const Coalition& x) {
  if (x.empty()) throw PreconditionError("is_blocking: empty coalition");
  require_matching(inst, p);
  for (Vertex u : x) {
    if (u < 0 || u >= inst.size()) throw PreconditionError("coalition vertex out of range");
    if (utility(inst, x, u) <= partition_utility(inst, p, u)) return false;
  }
  return true;
}

/// Connected components of the graph induced by `vertices` (zero-weight edges count).
inline std::vector<std::vector<Vertex>> induced_components(const AshgInstance& inst,
                                                           const std::vector<Vertex>& vertices) {
  std::vector<char> in(inst.size(), 0), seen(inst.size(), 0);
  for (Vertex v : vertices) in[v] = 1;
  std::vector<std::vector<Vertex>> comps;
  for (Vertex s : vertices) {
    if (seen[s]) continue;
    std::vector<Vertex> comp{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (const auto& nb : inst.neighbors(comp[i]))
        if (in[nb.v] && !seen[nb.v]) {
          seen[nb.v] = 1;
          comp.push_back(nb.v);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

inline bool is_connected_set(const AshgInstance& inst, const std::vector<Vertex>& vertices) {
  return vertices.empty() || induced_components(inst, vertices).size() == 1;
}

/// Splits every block into its connected components. Utilities are unchanged.
inline Partition normalize_connected(const AshgInstance& inst, const Partition& p) {
  require_matching(inst, p);
  std::vector<std::vector<Vertex>> out;
  for (const auto& b : p.blocks())
    for (auto& c : induced_components(inst, b)) out.push_back(std::move(c));
  std::sort(out.begin(), out.end());
  return Partition(inst.size(), std::move(out));
}

/// Subgraph induced by `vertices`; vertex i of the result is vertices[i].
inline AshgInstance induced_subgraph(const AshgInstance& inst, const std::vector<Vertex>& vertices) {
  std::vector<int> pos(inst.size(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) pos[vertices[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  for (const auto& e : inst.edges())
    if (pos[e.u] >= 0 && pos[e.v] >= 0) edges.push_back({pos[e.u], pos[e.v], e.w});
  return AshgInstance(static_cast<int>(vertices.size()), std::move(edges), inst.name(), inst.scale());
}

inline bool is_forest(const AshgInstance& inst) {
  auto comps = induced_components(inst, [&] {
    std::vector<Vertex> all(inst.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }());
  return inst.edge_count() + comps.size() == static_cast<std::size_t>(inst.size());
}

// ---------------------------------------------------------------------------
// Text formats

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::int64_t parse_int(std::string_view tok, int line, const char* what) {
  std::string s(tok);
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0)
    throw ParseError(std::string("expected integer ") + what + ", got '" + s + "'", line);
  return v;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  int no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++no;
    f(text.substr(pos, nl - pos), no);
    pos = nl + 1;
  }
}

}  // namespace detail

inline AshgInstance parse_instance(std::string_view text) {
  std::optional<int> n;
  std::size_t m = 0;
  std::optional<Weight> scale;
  std::string name;
  std::vector<Edge> edges;
  std::vector<int> edge_lines;
  detail::for_each_line(text, [&](std::string_view line, int no) {
    auto tok = detail::split_ws(line);
    if (tok.empty()) return;
    if (tok[0] == "c") {
      if (tok.size() >= 3 && tok[1] == "name") {
        auto at = line.find("name");
        auto rest = line.substr(at + 4);
        auto first = rest.find_first_not_of(" \t");
        auto last = rest.find_last_not_of(" \t\r");
        name = std::string(rest.substr(first, last - first + 1));
      }
      return;
    }
    if (tok[0] == "p") {
      if (n) throw ParseError("duplicate header", no);
      if (tok.size() != 4 || tok[1] != "ashg") throw ParseError("malformed header, expected 'p ashg <n> <m>'", no);
      auto nv = detail::parse_int(tok[2], no, "vertex count");
      auto mv = detail::parse_int(tok[3], no, "edge count");
      if (nv < 0 || mv < 0) throw ParseError("negative count in header", no);
      n = static_cast<int>(nv);
      m = static_cast<std::size_t>(mv);
      return;
    }
    if (!n) throw ParseError("missing 'p ashg' header before data", no);
    if (tok[0] == "s") {
      if (tok.size() != 3 || tok[1] != "scale") throw ParseError("malformed scale line, expected 's scale <k>'", no);
      auto k = detail::parse_int(tok[2], no, "scale");
      if (k <= 0) throw ParseError("scale must be positive", no);
      if (scale) throw ParseError("duplicate scale line", no);
      scale = k;
      return;
    }
    if (tok[0] == "e") {
      if (tok.size() != 4) throw ParseError("malformed edge line, expected 'e <u> <v> <w>'", no);
      auto u = detail::parse_int(tok[1], no, "vertex id");
      auto v = detail::parse_int(tok[2], no, "vertex id");
      auto w = detail::parse_int(tok[3], no, "weight");
      if (u < 0 || u >= *n || v < 0 || v >= *n)
        throw ParseError("vertex id out of range 0.." + std::to_string(*n - 1), no);
      if (u == v) throw ParseError("self-loop at vertex " + std::to_string(u), no);
      edges.push_back({static_cast<Vertex>(std::min(u, v)), static_cast<Vertex>(std::max(u, v)), w});
      edge_lines.push_back(no);
      return;
    }
    throw ParseError("unknown line type '" + std::string(tok[0]) + "'", no);
  });
  if (!n) throw ParseError("missing 'p ashg' header");
  if (edges.size() != m)
    throw ParseError("header declares " + std::to_string(m) + " edges but " + std::to_string(edges.size()) +
                     " were given");
  std::vector<std::size_t> idx(edges.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(edges[a].u, edges[a].v) < std::pair(edges[b].u, edges[b].v);
  });
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const auto& a = edges[idx[i - 1]];
    const auto& b = edges[idx[i]];
    if (a.u == b.u && a.v == b.v)
      throw ParseError("duplicate edge " + std::to_string(a.u) + " " + std::to_string(a.v),
                       std::max(edge_lines[idx[i - 1]], edge_lines[idx[i]]));
  }
  return AshgInstance(*n, std::move(edges), std::move(name), scale);
}

inline std::string emit_instance(const AshgInstance& inst) {
  std::ostringstream out;
  if (!inst.name().empty()) out << "c name " << inst.name() << "\n";
  out << "p ashg " << inst.size() << " " << inst.edge_count() << "\n";
  if (inst.scale()) out << "s scale " << *inst.scale() << "\n";
  for (const auto& e : inst.edges()) out << "e " << e.u << " " << e.v << " " << e.w << "\n";
  return out.str();
}

inline Partition parse_partition(std::string_view text, const AshgInstance& inst) {
  const int n = inst.size();
  std::vector<int> line_of(n, 0);
  std::vector<std::vector<Vertex>> blocks;
  detail::for_each_line(text, [&](std::string_view line, int no) {
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "c") return;
    std::vector<Vertex> block;
    for (auto t : tok) {
      auto v = detail::parse_int(t, no, "vertex id");
      if (v < 0 || v >= n) throw ParseError("vertex id " + std::to_string(v) + " out of range", no);
      if (line_of[v] != 0)
        throw ParseError("vertex " + std::to_string(v) + " already assigned on line " + std::to_string(line_of[v]),
                         no);
      line_of[v] = no;
      block.push_back(static_cast<Vertex>(v));
    }
    blocks.push_back(std::move(block));
  });
  for (int v = 0; v < n; ++v)
    if (line_of[v] == 0) throw ParseError("vertex " + std::to_string(v) + " unassigned");
  return Partition(n, std::move(blocks));
}

inline std::string emit_partition(const Partition& p) {
  std::ostringstream out;
  const Partition canon = p.canonical();
  for (const auto& b : canon.blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) out << (i ? " " : "") << b[i];
    out << "\n";
  }
  return out.str();
}

inline std::string emit_coalition(const Coalition& x) {
  std::ostringstream out;
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? " " : "") << x.members()[i];
  out << "\n";
  return out.str();
}

}  // namespace ashg
