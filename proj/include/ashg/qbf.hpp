/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ashg/error.hpp"
#include "ashg/treedecomp.hpp"

namespace ashg {

// Literals are DIMACS style: variable ids start at 1, negation is the sign.
using Lit = int;
using LitVec = std::vector<Lit>;

inline int var_of(Lit l) { return l < 0 ? -l : l; }

/// exists x: (3-CNF over x) and forall y: (DNF over x and y)
struct E3CnfFDnf {
  int num_vars = 0;
  std::vector<int> x_vars, y_vars;
  std::vector<LitVec> cnf, dnf;
};

/// exists x forall y: DNF matrix.
struct QbfEA {
  int num_vars = 0;
  std::vector<int> x_vars, y_vars;
  std::vector<LitVec> terms;
  bool three_dnf = false;
};

struct Cnf {
  int num_vars = 0;
  std::vector<LitVec> clauses;
};

enum class TdKind { Primal, Incidence };

/// A decomposition tagged with the graph it decomposes. Primal: vertex v-1 is variable v.
/// Incidence: additionally vertex num_vars + j is term (or clause) j.
struct AnnotatedTd {
  TdKind kind = TdKind::Primal;
  TreeDecomposition td;
};

struct BagCounts {
  int existential = 0;
  int universal = 0;
  int clauses = 0;
};

namespace detail {

/// 'e', 'a' or 0 per variable id.
inline std::vector<char> quantifiers(int num_vars, const std::vector<int>& x, const std::vector<int>& y) {
  std::vector<char> q(static_cast<std::size_t>(num_vars) + 1, 0);
  for (auto [vars, tag] : {std::pair{&x, 'e'}, std::pair{&y, 'a'}})
    for (int v : *vars) {
      if (v < 1 || v > num_vars) throw PreconditionError("variable " + std::to_string(v) + " out of range");
      if (q[v]) throw PreconditionError("variable " + std::to_string(v) + " quantified twice");
      q[v] = tag;
    }
  return q;
}

inline void check_lits(const std::vector<LitVec>& rows, int num_vars, const char* what) {
  for (const auto& r : rows)
    for (Lit l : r)
      if (l == 0 || var_of(l) > num_vars) throw PreconditionError(std::string(what) + " literal out of range");
}

inline bool lit_true(const std::vector<char>& val, Lit l) { return (val[var_of(l)] != 0) == (l > 0); }

inline bool term_true(const std::vector<char>& val, const LitVec& t) {
  for (Lit l : t)
    if (!lit_true(val, l)) return false;
  return true;
}

inline bool clause_true(const std::vector<char>& val, const LitVec& c) {
  for (Lit l : c)
    if (lit_true(val, l)) return true;
  return false;
}

inline LitVec sorted_vars(const LitVec& row) {
  LitVec v;
  for (Lit l : row) v.push_back(var_of(l) - 1);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline Graph incidence(int num_vars, const std::vector<const std::vector<LitVec>*>& groups) {
  std::vector<std::pair<int, int>> edges;
  int id = num_vars;
  for (const auto* g : groups)
    for (const auto& row : *g) {
      for (int v : sorted_vars(row)) edges.emplace_back(v, id);
      ++id;
    }
  return Graph::from_edges(id, edges);
}

inline Graph primal(int num_vars, const std::vector<LitVec>& rows) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& row : rows) {
    auto vs = sorted_vars(row);
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) edges.emplace_back(vs[i], vs[j]);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph::from_edges(num_vars, edges);
}

inline void sort_bags(TreeDecomposition& td) {
  for (auto& b : td.bags) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
}

}  // namespace detail

inline void validate(const E3CnfFDnf& phi) {
  auto q = detail::quantifiers(phi.num_vars, phi.x_vars, phi.y_vars);
  detail::check_lits(phi.cnf, phi.num_vars, "cnf");
  detail::check_lits(phi.dnf, phi.num_vars, "dnf");
  for (const auto& c : phi.cnf) {
    if (c.size() > 3) throw PreconditionError("cnf clause wider than 3");
    for (Lit l : c)
      if (q[var_of(l)] != 'e') throw PreconditionError("cnf clause uses a variable that is not existential");
  }
  for (const auto& t : phi.dnf)
    for (Lit l : t)
      if (!q[var_of(l)]) throw PreconditionError("dnf term uses an unquantified variable");
}

inline void validate(const QbfEA& q) {
  auto qs = detail::quantifiers(q.num_vars, q.x_vars, q.y_vars);
  detail::check_lits(q.terms, q.num_vars, "term");
  for (const auto& t : q.terms) {
    if (q.three_dnf && t.size() > 3) throw PreconditionError("term wider than 3 in a 3-DNF");
    for (Lit l : t)
      if (!qs[var_of(l)]) throw PreconditionError("term uses an unquantified variable");
  }
}

inline Graph incidence_graph(const E3CnfFDnf& phi) { return detail::incidence(phi.num_vars, {&phi.cnf, &phi.dnf}); }
inline Graph incidence_graph(const QbfEA& q) { return detail::incidence(q.num_vars, {&q.terms}); }
inline Graph primal_graph(const QbfEA& q) { return detail::primal(q.num_vars, q.terms); }
inline Graph primal_graph(const Cnf& c) { return detail::primal(c.num_vars, c.clauses); }

inline std::vector<BagCounts> bag_counts(const QbfEA& q, const AnnotatedTd& atd) {
  auto qs = detail::quantifiers(q.num_vars, q.x_vars, q.y_vars);
  std::vector<BagCounts> out;
  for (const auto& bag : atd.td.bags) {
    BagCounts c;
    for (int v : bag) {
      if (v >= q.num_vars)
        ++c.clauses;
      else if (qs[v + 1] == 'e')
        ++c.existential;
      else
        ++c.universal;
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force evaluation

struct EvalResult {
  bool sat = false;
  std::vector<char> assignment;  // indexed by variable id; only x entries are meaningful
};

namespace detail {

template <class Inner>
EvalResult eval_exists_forall(int num_vars, const std::vector<int>& x, const std::vector<int>& y, int cap,
                              Inner&& holds) {
  if (static_cast<int>(x.size() + y.size()) > cap)
    throw ResourceLimitError("eval-vars", std::to_string(x.size() + y.size()) + " variables, cap " +
                                              std::to_string(cap));
  std::vector<char> val(static_cast<std::size_t>(num_vars) + 1, 0);
  for (std::uint64_t xm = 0; xm < (std::uint64_t{1} << x.size()); ++xm) {
    for (std::size_t i = 0; i < x.size(); ++i) val[x[i]] = xm >> i & 1;
    bool all = true;
    for (std::uint64_t ym = 0; all && ym < (std::uint64_t{1} << y.size()); ++ym) {
      for (std::size_t i = 0; i < y.size(); ++i) val[y[i]] = ym >> i & 1;
      all = holds(val, ym == 0);
    }
    if (all) {
      for (int v : y) val[v] = 0;
      return {true, val};
    }
  }
  return {false, {}};
}

inline bool dnf_true(const std::vector<char>& val, const std::vector<LitVec>& terms) {
  for (const auto& t : terms)
    if (term_true(val, t)) return true;
  return false;
}

}  // namespace detail

inline EvalResult eval_bruteforce(const QbfEA& q, int cap = 24) {
  validate(q);
  return detail::eval_exists_forall(q.num_vars, q.x_vars, q.y_vars, cap,
                                    [&](const std::vector<char>& val, bool) { return detail::dnf_true(val, q.terms); });
}

inline EvalResult eval_bruteforce(const E3CnfFDnf& phi, int cap = 24) {
  validate(phi);
  return detail::eval_exists_forall(phi.num_vars, phi.x_vars, phi.y_vars, cap,
                                    [&](const std::vector<char>& val, bool first) {
                                      if (first)
                                        for (const auto& c : phi.cnf)
                                          if (!detail::clause_true(val, c)) return false;
                                      return detail::dnf_true(val, phi.dnf);
                                    });
}

// ---------------------------------------------------------------------------
// exists-CNF forall-DNF  ->  exists-forall DNF

namespace detail {

struct EaLayout {
  int base_vars = 0;
  std::vector<int> clause_var;              // y for each cnf clause
  int c_var = 0;                            // y guarding the dnf part
  std::vector<std::vector<int>> clause_terms;  // new term ids per cnf clause
  std::vector<int> dnf_term;                // new term id per dnf term
  int negative_term = 0;
};

inline std::pair<QbfEA, EaLayout> to_ea(const E3CnfFDnf& phi) {
  validate(phi);
  QbfEA q;
  EaLayout lay;
  lay.base_vars = phi.num_vars;
  const int k = static_cast<int>(phi.cnf.size());
  q.num_vars = phi.num_vars + k + 1;
  q.x_vars = phi.x_vars;
  q.y_vars = phi.y_vars;
  for (int i = 0; i < k; ++i) {
    lay.clause_var.push_back(phi.num_vars + 1 + i);
    q.y_vars.push_back(phi.num_vars + 1 + i);
  }
  lay.c_var = phi.num_vars + k + 1;
  q.y_vars.push_back(lay.c_var);
  lay.clause_terms.resize(k);
  for (int i = 0; i < k; ++i)
    for (Lit l : phi.cnf[i]) {
      lay.clause_terms[i].push_back(static_cast<int>(q.terms.size()));
      q.terms.push_back({lay.clause_var[i], l});
    }
  for (const auto& t : phi.dnf) {
    lay.dnf_term.push_back(static_cast<int>(q.terms.size()));
    LitVec nt{lay.c_var};
    nt.insert(nt.end(), t.begin(), t.end());
    q.terms.push_back(std::move(nt));
  }
  LitVec neg;
  for (int v : lay.clause_var) neg.push_back(-v);
  neg.push_back(-lay.c_var);
  lay.negative_term = static_cast<int>(q.terms.size());
  q.terms.push_back(std::move(neg));
  return {std::move(q), std::move(lay)};
}

}  // namespace detail

inline QbfEA e3cnffdnf_to_ea(const E3CnfFDnf& phi) { return detail::to_ea(phi).first; }

/// Same transformation, carrying a decomposition of the input's incidence graph
/// (variables, then cnf clauses, then dnf terms) over to the output's incidence graph.
inline std::pair<QbfEA, AnnotatedTd> e3cnffdnf_to_ea(const E3CnfFDnf& phi, const TreeDecomposition& td) {
  auto [q, lay] = detail::to_ea(phi);
  if (auto rep = validate_td(incidence_graph(phi), td); !rep.ok())
    throw ValidationError("input decomposition: " + rep.message);
  const int nv = phi.num_vars;
  const int k = static_cast<int>(phi.cnf.size());
  AnnotatedTd out{TdKind::Incidence, td};
  for (auto& bag : out.td.bags) {
    std::vector<int> nb;
    for (int v : bag) {
      if (v < nv) {
        nb.push_back(v);
      } else if (v < nv + k) {
        int i = v - nv;
        nb.push_back(lay.clause_var[i] - 1);
        for (int t : lay.clause_terms[i]) nb.push_back(q.num_vars + t);
      } else {
        nb.push_back(q.num_vars + lay.dnf_term[v - nv - k]);
      }
    }
    nb.push_back(lay.c_var - 1);
    nb.push_back(q.num_vars + lay.negative_term);
    bag = std::move(nb);
  }
  detail::sort_bags(out.td);
  return {std::move(q), std::move(out)};
}

// ---------------------------------------------------------------------------
// Splitting wide terms

/// Splits every term wider than 3 into a chain of width-3 terms linked by fresh universal
/// variables, and rebuilds the incidence decomposition around the new terms.
inline std::pair<QbfEA, AnnotatedTd> split_to_3dnf(const QbfEA& q, const AnnotatedTd& atd) {
  validate(q);
  if (atd.kind != TdKind::Incidence) throw PreconditionError("split_to_3dnf needs an incidence decomposition");
  if (auto rep = validate_td(incidence_graph(q), atd.td); !rep.ok())
    throw ValidationError("input decomposition: " + rep.message);
  const auto qs = detail::quantifiers(q.num_vars, q.x_vars, q.y_vars);
  const int nv = q.num_vars;
  const auto& td = atd.td;
  const int nodes = td.node_count();
  auto children = td.children();
  std::vector<int> pre(nodes);
  {
    auto order = preorder(children, td.root);
    for (int i = 0; i < nodes; ++i) pre[order[i]] = i;
  }
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(nv) + q.terms.size());
  for (int t = 0; t < nodes; ++t)
    for (int v : td.bags[t]) occ[v].push_back(t);

  struct Piece {
    LitVec lits;
    int anchor;
  };
  QbfEA out;
  out.x_vars = q.x_vars;
  out.y_vars = q.y_vars;
  int next_var = nv;
  // per output term: pieces carry an anchor, unsplit terms the original term id
  std::vector<std::pair<int, Piece>> plan;  // (original term or -1, piece)
  std::vector<std::vector<std::pair<int, int>>> home_req;  // per plan entry: (var vertex, home node)
  for (int j = 0; j < static_cast<int>(q.terms.size()); ++j) {
    const auto& term = q.terms[j];
    if (term.size() <= 3) {
      plan.push_back({j, {term, -1}});
      home_req.emplace_back();
      continue;
    }
    const auto& bt = occ[nv + j];
    std::vector<char> in_bt(nodes, 0);
    for (int t : bt) in_bt[t] = 1;
    std::vector<std::pair<Lit, int>> lits;  // literal, home
    for (Lit l : term) {
      int home = -1;
      for (int t : occ[var_of(l) - 1])
        if (in_bt[t] && (home < 0 || pre[t] < pre[home])) home = t;
      lits.emplace_back(l, home);
    }
    std::stable_sort(lits.begin(), lits.end(), [&](const auto& a, const auto& b) {
      auto key = [&](const auto& p) { return std::tuple(pre[p.second], qs[var_of(p.first)] != 'e', var_of(p.first)); };
      return key(a) < key(b);
    });
    const int r = static_cast<int>(lits.size());
    int prev_z = 0;
    for (int pidx = 0; pidx < r - 2; ++pidx) {
      Piece pc;
      std::vector<std::pair<Lit, int>> orig;
      if (pidx == 0) {
        orig = {lits[0], lits[1]};
      } else if (pidx == r - 3) {
        orig = {lits[r - 2], lits[r - 1]};
      } else {
        orig = {lits[pidx + 1]};
      }
      if (prev_z) pc.lits.push_back(-prev_z);
      for (auto& o : orig) pc.lits.push_back(o.first);
      if (pidx < r - 3) {
        prev_z = ++next_var;
        out.y_vars.push_back(prev_z);
        pc.lits.push_back(prev_z);
      }
      pc.anchor = orig.back().second;
      std::vector<std::pair<int, int>> req;
      for (auto& o : orig) req.emplace_back(var_of(o.first) - 1, o.second);
      plan.push_back({-1, pc});
      home_req.push_back(std::move(req));
    }
  }
  out.num_vars = next_var;
  for (auto& [orig, pc] : plan) out.terms.push_back(pc.lits);
  out.three_dnf = true;

  const int nv2 = out.num_vars;
  AnnotatedTd res{TdKind::Incidence, {}};
  auto& nt = res.td;
  nt.root = td.root;
  nt.parent = td.parent;
  std::vector<int> old_to_new(q.terms.size(), -1);
  for (int i = 0; i < static_cast<int>(plan.size()); ++i)
    if (plan[i].first >= 0) old_to_new[plan[i].first] = i;
  for (const auto& bag : td.bags) {
    std::vector<int> nb;
    for (int v : bag) {
      if (v < nv)
        nb.push_back(v);
      else if (old_to_new[v - nv] >= 0)
        nb.push_back(nv2 + old_to_new[v - nv]);
    }
    nt.bags.push_back(std::move(nb));
  }
  // piece nodes: same-anchor runs hang as a path below the anchor
  std::vector<int> piece_node(plan.size(), -1);
  int last_anchor = -1, last_node = -1;
  for (int i = 0; i < static_cast<int>(plan.size()); ++i) {
    if (plan[i].first >= 0) {
      last_anchor = -1;
      continue;
    }
    const auto& pc = plan[i].second;
    int parent = (pc.anchor == last_anchor) ? last_node : pc.anchor;
    int id = nt.node_count();
    std::vector<int> bag{nv2 + i};
    for (Lit l : pc.lits) bag.push_back(var_of(l) - 1);
    nt.bags.push_back(std::move(bag));
    nt.parent.push_back(parent);
    piece_node[i] = id;
    last_anchor = pc.anchor;
    last_node = id;
  }
  // grow each variable's occurrence set over the new nodes
  std::vector<std::vector<int>> required(nv2);
  for (int i = 0; i < static_cast<int>(plan.size()); ++i) {
    if (piece_node[i] < 0) continue;
    for (Lit l : plan[i].second.lits) required[var_of(l) - 1].push_back(piece_node[i]);
    for (auto [v, home] : home_req[i]) required[v].push_back(home);
  }
  RootedTree tree(nt.parent, nt.root);
  for (int v = 0; v < nv2; ++v) {
    if (required[v].empty()) continue;
    for (int t : tree.steiner(required[v])) nt.bags[t].push_back(v);
  }
  detail::sort_bags(nt);
  return {std::move(out), std::move(res)};
}

/// Replaces each term in every bag by its variables.
inline AnnotatedTd incidence_to_primal(const QbfEA& q, const AnnotatedTd& atd) {
  if (atd.kind != TdKind::Incidence) throw PreconditionError("expected an incidence decomposition");
  AnnotatedTd out{TdKind::Primal, atd.td};
  for (auto& bag : out.td.bags) {
    std::vector<int> nb;
    for (int v : bag) {
      if (v < q.num_vars) {
        nb.push_back(v);
      } else {
        for (Lit l : q.terms.at(static_cast<std::size_t>(v - q.num_vars))) nb.push_back(var_of(l) - 1);
      }
    }
    bag = std::move(nb);
  }
  detail::sort_bags(out.td);
  return out;
}

// ---------------------------------------------------------------------------
// exists-forall 3-DNF  ->  CNF over a nice primal decomposition

struct CnfEncoding {
  Cnf cnf;
  AnnotatedTd td;  // over the primal graph of `cnf`
  int t_exists = 0, t_forall = 0, bags = 0;
  std::size_t size_bound = 0;  // C * bags * 2^t_forall * (t_exists + t_forall), in clauses
};

inline constexpr std::size_t kCnfSizeConstant = 16;

/// Per bag B and assignment s to B's universal variables, z(B,s) says "s extends to the
/// universal variables below B without making any term below B true" and w(B,s) says
/// "no term inside B is true under s". The CNF forbids z at the root.
inline CnfEncoding qbf_to_cnf(const QbfEA& q, const NiceTreeDecomposition& nice, int exist_cap = 20,
                              std::size_t clause_cap = 4'000'000) {
  validate(q);
  if (auto err = nice_shape_error(nice); !err.empty()) throw ValidationError("decomposition is not nice: " + err);
  for (int t = 0; t < nice.node_count(); ++t)
    if (nice.kind[t] == NodeKind::Leaf && !nice.bags[t].empty()) throw ValidationError("leaf bag is not empty");
  std::vector<std::vector<int>> term_sets;
  for (const auto& term : q.terms) {
    auto vs = detail::sorted_vars(term);
    term_sets.push_back(std::move(vs));
  }
  if (auto rep = validate_td(q.num_vars, term_sets, nice.as_td()); !rep.ok())
    throw ValidationError("decomposition does not cover the primal graph: " + rep.message);
  const auto qs = detail::quantifiers(q.num_vars, q.x_vars, q.y_vars);
  const int nodes = nice.node_count();

  // terms by smallest variable vertex, for containment tests
  std::vector<LitVec> term_vars;
  std::vector<std::vector<int>> terms_at(q.num_vars);
  for (int j = 0; j < static_cast<int>(q.terms.size()); ++j) {
    term_vars.push_back(detail::sorted_vars(q.terms[j]));
    if (!term_vars[j].empty()) terms_at[term_vars[j][0]].push_back(j);
  }
  bool empty_term = false;
  for (const auto& tv : term_vars) empty_term = empty_term || tv.empty();

  CnfEncoding enc;
  enc.bags = nodes;
  std::vector<std::vector<int>> uni(nodes), ex(nodes);
  std::vector<int> base(nodes);
  int next = q.num_vars + 1;
  for (int t = 0; t < nodes; ++t) {
    for (int v : nice.bags[t]) (qs[v + 1] == 'a' ? uni[t] : ex[t]).push_back(v + 1);
    if (uni[t].size() > 20) throw ResourceLimitError("bag-universals", "more than 20 universal variables in a bag");
    enc.t_exists = std::max(enc.t_exists, static_cast<int>(ex[t].size()));
    enc.t_forall = std::max(enc.t_forall, static_cast<int>(uni[t].size()));
    base[t] = next;
    next += 2 << uni[t].size();
  }
  auto& clauses = enc.cnf.clauses;
  auto z = [&](int t, std::uint32_t s) { return base[t] + 2 * static_cast<int>(s) + 1; };
  auto w = [&](int t, std::uint32_t s) { return base[t] + 2 * static_cast<int>(s); };
  // child assignment: bits of s re-indexed onto the child's universal list, with `extra` forced
  auto project = [&](int t, int c, std::uint32_t s, int extra_var, int extra_val) {
    std::uint32_t r = 0;
    for (std::size_t j = 0; j < uni[c].size(); ++j) {
      int v = uni[c][j];
      int bit;
      if (v == extra_var) {
        bit = extra_val;
      } else {
        auto it = std::lower_bound(uni[t].begin(), uni[t].end(), v);
        bit = static_cast<int>(s >> (it - uni[t].begin()) & 1);
      }
      r |= static_cast<std::uint32_t>(bit) << j;
    }
    return r;
  };

  std::vector<char> val(static_cast<std::size_t>(q.num_vars) + 1, 0);
  for (int t = 0; t < nodes; ++t) {
    const auto& bag = nice.bags[t];
    std::vector<int> contained;
    for (int v : bag)
      for (int j : terms_at[v])
        if (bag_contains_all(bag, term_vars[j])) contained.push_back(j);
    const std::uint32_t count = 1u << uni[t].size();
    for (std::uint32_t s = 0; s < count; ++s) {
      for (std::size_t i = 0; i < uni[t].size(); ++i) val[uni[t][i]] = s >> i & 1;
      // terms surviving s, reduced to their existential literals
      std::vector<LitVec> reduced;
      bool always = empty_term && t == nice.root;
      for (int j : contained) {
        LitVec rest;
        bool alive = true;
        for (Lit l : q.terms[j]) {
          if (qs[var_of(l)] == 'a') {
            if (!detail::lit_true(val, l)) alive = false;
          } else {
            rest.push_back(l);
          }
        }
        if (!alive) continue;
        if (rest.empty()) always = true;
        reduced.push_back(std::move(rest));
      }
      if (always) {
        clauses.push_back({-w(t, s)});
      } else if (reduced.empty()) {
        clauses.push_back({w(t, s)});
      } else {
        std::vector<int> evars;
        for (const auto& r : reduced)
          for (Lit l : r) evars.push_back(var_of(l));
        std::sort(evars.begin(), evars.end());
        evars.erase(std::unique(evars.begin(), evars.end()), evars.end());
        if (static_cast<int>(evars.size()) > exist_cap)
          throw ResourceLimitError("bag-existentials", "term block with " + std::to_string(evars.size()) +
                                                           " existential variables");
        if (clauses.size() + (std::size_t{1} << evars.size()) > clause_cap)
          throw ResourceLimitError("cnf-clauses", "more than " + std::to_string(clause_cap) + " clauses");
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << evars.size()); ++a) {
          LitVec cl;
          for (std::size_t i = 0; i < evars.size(); ++i) {
            bool bit = a >> i & 1;
            val[evars[i]] = bit;
            cl.push_back(bit ? -evars[i] : evars[i]);
          }
          bool some = false;
          for (const auto& r : reduced) some = some || detail::term_true(val, r);
          cl.push_back(some ? -w(t, s) : w(t, s));
          clauses.push_back(std::move(cl));
        }
      }
      const int zs = z(t, s), ws = w(t, s);
      const auto& ch = nice.children[t];
      switch (nice.kind[t]) {
        case NodeKind::Leaf:
          clauses.push_back({zs});
          break;
        case NodeKind::Introduce: {
          int zc = z(ch[0], project(t, ch[0], s, 0, 0));
          clauses.push_back({-zs, ws});
          clauses.push_back({-zs, zc});
          clauses.push_back({zs, -ws, -zc});
          break;
        }
        case NodeKind::Forget: {
          int u = nice.vertex[t] + 1;
          clauses.push_back({-zs, ws});
          if (qs[u] == 'a') {
            int z0 = z(ch[0], project(t, ch[0], s, u, 0));
            int z1 = z(ch[0], project(t, ch[0], s, u, 1));
            clauses.push_back({-zs, z0, z1});
            clauses.push_back({zs, -ws, -z0});
            clauses.push_back({zs, -ws, -z1});
          } else {
            int zc = z(ch[0], project(t, ch[0], s, 0, 0));
            clauses.push_back({-zs, zc});
            clauses.push_back({zs, -ws, -zc});
          }
          break;
        }
        case NodeKind::Join: {
          int za = z(ch[0], s), zb = z(ch[1], s);
          clauses.push_back({-zs, ws});
          clauses.push_back({-zs, za});
          clauses.push_back({-zs, zb});
          clauses.push_back({zs, -ws, -za, -zb});
          break;
        }
      }
    }
  }
  clauses.push_back({-z(nice.root, 0)});
  enc.cnf.num_vars = next - 1;

  enc.size_bound = kCnfSizeConstant * static_cast<std::size_t>(nodes) * (std::size_t{1} << enc.t_forall) *
                   static_cast<std::size_t>(std::max(1, enc.t_exists + enc.t_forall));
  if (clauses.size() > enc.size_bound)
    throw std::logic_error("qbf_to_cnf produced " + std::to_string(clauses.size()) + " clauses, above the bound " +
                           std::to_string(enc.size_bound));

  // decomposition of the CNF's primal graph on the same tree
  auto& td = enc.td.td;
  enc.td.kind = TdKind::Primal;
  td.parent = nice.parent;
  td.root = nice.root;
  td.bags.resize(nodes);
  for (int t = 0; t < nodes; ++t) {
    auto& bag = td.bags[t];
    for (int v : ex[t]) bag.push_back(v - 1);
    for (std::uint32_t s = 0; s < (1u << uni[t].size()); ++s) {
      bag.push_back(z(t, s) - 1);
      bag.push_back(w(t, s) - 1);
    }
    for (int c : nice.children[t])
      for (std::uint32_t s = 0; s < (1u << uni[c].size()); ++s) bag.push_back(z(c, s) - 1);
  }
  // universal ids do not occur in the CNF; give each its own leaf
  for (int v : q.y_vars) {
    td.bags.push_back({v - 1});
    td.parent.push_back(nice.root);
  }
  detail::sort_bags(td);
  return enc;
}

// ---------------------------------------------------------------------------
// CNF satisfiability over a tree decomposition

struct SatResult {
  bool sat = false;
  std::vector<char> model;  // indexed by variable id
  std::uint64_t states = 0, peak_states = 0;
};

struct SatLimits {
  std::uint64_t state_cap = 2'000'000;  // per node
};

inline SatResult sat_treewidth(const Cnf& cnf, const TreeDecomposition& td, SatLimits limits = {}) {
  detail::check_lits(cnf.clauses, cnf.num_vars, "clause");
  SatResult res;
  // normalized clauses in flat pools: sorted, duplicate-free, tautologies dropped
  std::vector<Lit> lit_pool;
  std::vector<int> var_pool;
  std::vector<std::uint32_t> start{0};
  LitVec d;
  for (const auto& c : cnf.clauses) {
    if (c.empty()) return res;
    d.assign(c.begin(), c.end());
    std::sort(d.begin(), d.end(), [](Lit a, Lit b) { return var_of(a) < var_of(b) || (var_of(a) == var_of(b) && a < b); });
    d.erase(std::unique(d.begin(), d.end()), d.end());
    bool taut = false;
    for (std::size_t i = 1; i < d.size(); ++i) taut = taut || var_of(d[i]) == var_of(d[i - 1]);
    if (taut) continue;
    for (Lit l : d) {
      lit_pool.push_back(l);
      var_pool.push_back(var_of(l) - 1);
    }
    start.push_back(static_cast<std::uint32_t>(lit_pool.size()));
  }
  const int num_clauses = static_cast<int>(start.size()) - 1;
  auto lits = [&](int i) { return std::span<const Lit>(lit_pool.data() + start[i], start[i + 1] - start[i]); };
  auto vars = [&](int i) { return std::span<const int>(var_pool.data() + start[i], start[i + 1] - start[i]); };
  std::vector<char> val(static_cast<std::size_t>(cnf.num_vars) + 1, 0);
  auto holds = [&](int i) {
    for (Lit l : lits(i))
      if (detail::lit_true(val, l)) return true;
    return false;
  };
  // tree shape and connectivity here; clause containment is checked while placing clauses
  if (auto rep = validate_td(cnf.num_vars, std::vector<std::vector<int>>{}, td); !rep.ok())
    throw ValidationError("decomposition does not cover the primal graph: " + rep.message);
  const int nodes = td.node_count();
  auto children = td.children();
  auto order = postorder(children, td.root);
  std::vector<int> rank(nodes);
  for (int i = 0; i < nodes; ++i) rank[order[i]] = i;
  Occurrences occ(td, cnf.num_vars);

  // clause -> first node in post-order holding all of its variables
  std::vector<std::vector<int>> assigned(nodes);
  for (int i = 0; i < num_clauses; ++i) {
    auto vs = vars(i);
    int rare = vs[0];
    for (int v : vs)
      if (occ[v].size() < occ[rare].size()) rare = v;
    int best = -1;
    for (int t : occ[rare])
      if (bag_contains_all(td.bags[t], vs) &&
          (best < 0 || rank[t] < rank[best]))
        best = t;
    if (best < 0)
      throw ValidationError("decomposition does not cover the primal graph: clause with literal " +
                            std::to_string(lits(i)[0]) + " is not inside any bag");
    assigned[best].push_back(i);
  }

  using Bits = std::vector<std::uint64_t>;
  struct BitsHash {
    std::size_t operator()(const Bits& b) const {
      std::uint64_t h = 0x9e3779b97f4a7c15ull;
      for (auto x : b) h = (h ^ x) * 0xbf58476d1ce4e5b9ull + (h >> 29);
      return static_cast<std::size_t>(h);
    }
  };
  struct Table {
    int words = 0;
    std::vector<std::uint64_t> bits;
    std::vector<std::int32_t> back;  // per state, one entry per child
    std::size_t size = 0;
    bool get(std::size_t s, int p) const { return bits[s * words + p / 64] >> (p % 64) & 1; }
  };
  std::vector<Table> tab(nodes);
  std::vector<int> position(static_cast<std::size_t>(cnf.num_vars), -1);  // within the current bag
  auto over_cap = [&](int t, std::size_t n) {
    if (n > limits.state_cap)
      throw ResourceLimitError("sat-states", "node " + std::to_string(t) + " exceeds " +
                                                 std::to_string(limits.state_cap) + " assignments");
  };

  for (int t : order) {
    const auto& bag = td.bags[t];
    const int w = static_cast<int>(bag.size());
    const int words = std::max(1, (w + 63) / 64);
    for (int p = 0; p < w; ++p) position[bag[p]] = p;
    auto pos_of = [&](int v) { return position[v]; };
    const auto& ch = children[t];
    const int nc = static_cast<int>(ch.size());

    // join the children's tables on shared positions
    std::vector<char> known(w, 0);
    Bits part(words, 0);
    std::vector<std::int32_t> part_back(nc, -1);
    std::size_t np = 1;
    for (int k = 0; k < nc; ++k) {
      const auto& cb = td.bags[ch[k]];
      const auto& ct = tab[ch[k]];
      if (ct.size == 0) return res;
      std::vector<std::pair<int, int>> shared;  // (parent pos, child pos)
      for (int j = 0; j < static_cast<int>(cb.size()); ++j)
        if (position[cb[j]] >= 0) shared.emplace_back(position[cb[j]], j);
      Bits keymask(words, 0);
      for (auto [p, j] : shared)
        if (known[p]) keymask[p / 64] |= std::uint64_t{1} << (p % 64);
      std::unordered_map<Bits, std::vector<std::pair<Bits, std::int32_t>>, BitsHash> by_key;
      std::unordered_set<Bits, BitsHash> seen;
      for (std::size_t s = 0; s < ct.size; ++s) {
        Bits proj(words, 0);
        for (auto [p, j] : shared)
          if (ct.get(s, j)) proj[p / 64] |= std::uint64_t{1} << (p % 64);
        if (!seen.insert(proj).second) continue;
        Bits key(words);
        for (int x = 0; x < words; ++x) key[x] = proj[x] & keymask[x];
        by_key[std::move(key)].emplace_back(std::move(proj), static_cast<std::int32_t>(s));
      }
      Bits next_part, key(words);
      std::vector<std::int32_t> next_back;
      std::size_t nn = 0;
      for (std::size_t i = 0; i < np; ++i) {
        for (int x = 0; x < words; ++x) key[x] = part[i * words + x] & keymask[x];
        auto it = by_key.find(key);
        if (it == by_key.end()) continue;
        for (const auto& [proj, s] : it->second) {
          for (int x = 0; x < words; ++x) next_part.push_back(part[i * words + x] | proj[x]);
          for (int kk = 0; kk < nc; ++kk) next_back.push_back(kk == k ? s : part_back[i * nc + kk]);
          over_cap(t, ++nn);
        }
      }
      part = std::move(next_part);
      part_back = std::move(next_back);
      np = nn;
      for (auto [p, j] : shared) known[p] = 1;
      if (np == 0) return res;
    }

    std::vector<int> free_pos, free_index(w, -1);
    for (int p = 0; p < w; ++p)
      if (!known[p]) {
        free_index[p] = static_cast<int>(free_pos.size());
        free_pos.push_back(p);
      }
    const int nf = static_cast<int>(free_pos.size());
    std::vector<int> upfront;
    std::vector<std::vector<int>> trigger(nf);
    for (int i : assigned[t]) {
      int last = -1;
      for (int v : vars(i)) last = std::max(last, free_index[pos_of(v)]);
      (last < 0 ? upfront : trigger[last]).push_back(i);
    }
    auto& out = tab[t];
    out.words = words;
    Bits cur(words);
    std::size_t partial = 0;
    auto dfs = [&](auto&& self, int f) -> void {
      if (f == nf) {
        out.bits.insert(out.bits.end(), cur.begin(), cur.end());
        out.back.insert(out.back.end(), part_back.begin() + static_cast<std::ptrdiff_t>(partial * nc),
                        part_back.begin() + static_cast<std::ptrdiff_t>((partial + 1) * nc));
        over_cap(t, ++out.size);
        return;
      }
      const int p = free_pos[f];
      const std::uint64_t bit = std::uint64_t{1} << (p % 64);
      for (char b : {0, 1}) {
        val[bag[p] + 1] = b;
        if (b) cur[p / 64] |= bit;
        bool ok = true;
        for (int i : trigger[f])
          if (!holds(i)) {
            ok = false;
            break;
          }
        if (ok) self(self, f + 1);
        cur[p / 64] &= ~bit;
      }
    };
    for (partial = 0; partial < np; ++partial) {
      for (int x = 0; x < words; ++x) cur[x] = part[partial * words + x];
      for (int p = 0; p < w; ++p)
        if (known[p]) val[bag[p] + 1] = cur[p / 64] >> (p % 64) & 1;
      bool ok = true;
      for (int i : upfront)
        if (!holds(i)) {
          ok = false;
          break;
        }
      if (ok) dfs(dfs, 0);
    }
    for (int v : bag) position[v] = -1;
    res.states += out.size;
    res.peak_states = std::max<std::uint64_t>(res.peak_states, out.size);
    if (out.size == 0) return res;
  }

  res.sat = true;
  res.model.assign(static_cast<std::size_t>(cnf.num_vars) + 1, 0);
  std::vector<std::pair<int, std::int32_t>> stack{{td.root, 0}};
  while (!stack.empty()) {
    auto [t, s] = stack.back();
    stack.pop_back();
    const auto& bag = td.bags[t];
    for (int i = 0; i < static_cast<int>(bag.size()); ++i) res.model[bag[i] + 1] = tab[t].get(s, i);
    for (std::size_t k = 0; k < children[t].size(); ++k)
      stack.push_back({children[t][k], tab[t].back[s * children[t].size() + k]});
  }
  for (const auto& c : cnf.clauses)
    if (!detail::clause_true(res.model, c)) throw std::logic_error("sat_treewidth model violates a clause");
  return res;
}

// ---------------------------------------------------------------------------
// Full chain

inline std::string to_dimacs(const Cnf& c);
inline std::string to_qdimacs(const QbfEA& q);

struct QbfPipelineStats {
  int ea_terms = 0, split_terms = 0, primal_width = 0, nice_nodes = 0;
  int cnf_vars = 0, t_exists = 0, t_forall = 0;
  std::size_t cnf_clauses = 0, size_bound = 0;
  std::uint64_t sat_states = 0;
};

struct QbfPipelineOptions {
  SatLimits sat;
  std::size_t cnf_clause_cap = 4'000'000;
  bool keep_formulas = false;  // fill the text dumps below
};

struct QbfPipelineResult {
  bool sat = false;
  std::vector<char> assignment;  // model restricted to the input's variables
  QbfPipelineStats stats;
  std::string qdimacs, dimacs;
};

/// exists-forall DNF with an incidence decomposition: split, go primal, go nice, encode, solve.
inline QbfPipelineResult solve_ea(const QbfEA& q, const AnnotatedTd& incidence_td, const QbfPipelineOptions& opt = {}) {
  QbfPipelineResult r;
  if (opt.keep_formulas) r.qdimacs = to_qdimacs(q);
  auto [q3, td3] = split_to_3dnf(q, incidence_td);
  r.stats.split_terms = static_cast<int>(q3.terms.size());
  auto primal = incidence_to_primal(q3, td3);
  r.stats.primal_width = primal.td.width();
  auto nice = make_nice(primal.td);
  r.stats.nice_nodes = nice.node_count();
  auto enc = qbf_to_cnf(q3, nice, 20, opt.cnf_clause_cap);
  r.stats.cnf_vars = enc.cnf.num_vars;
  r.stats.cnf_clauses = enc.cnf.clauses.size();
  r.stats.size_bound = enc.size_bound;
  r.stats.t_exists = enc.t_exists;
  r.stats.t_forall = enc.t_forall;
  if (opt.keep_formulas) r.dimacs = to_dimacs(enc.cnf);
  auto sat = sat_treewidth(enc.cnf, enc.td.td, opt.sat);
  r.stats.sat_states = sat.states;
  r.sat = sat.sat;
  if (sat.sat) {
    r.assignment.assign(static_cast<std::size_t>(q.num_vars) + 1, 0);
    for (int v : q.x_vars) r.assignment[v] = sat.model[v];
  }
  return r;
}

inline QbfPipelineResult solve_e3cnffdnf(const E3CnfFDnf& phi, const TreeDecomposition& incidence_td,
                                         const QbfPipelineOptions& opt = {}) {
  auto [q, atd] = e3cnffdnf_to_ea(phi, incidence_td);
  auto r = solve_ea(q, atd, opt);
  r.stats.ea_terms = static_cast<int>(q.terms.size());
  if (r.sat) r.assignment.resize(static_cast<std::size_t>(phi.num_vars) + 1);
  return r;
}

inline QbfPipelineResult solve_e3cnffdnf(const E3CnfFDnf& phi, const QbfPipelineOptions& opt = {}) {
  return solve_e3cnffdnf(phi, heuristic_decompose(incidence_graph(phi)), opt);
}

// ---------------------------------------------------------------------------
// Random formulas

/// Variables 1..nx existential, nx+1..nx+ny universal; literals uniform over the allowed block.
inline E3CnfFDnf random_e3cnffdnf(std::mt19937_64& rng, int nx, int ny, int clauses, int terms, int max_term = 4) {
  E3CnfFDnf phi;
  phi.num_vars = nx + ny;
  for (int v = 1; v <= nx; ++v) phi.x_vars.push_back(v);
  for (int v = nx + 1; v <= nx + ny; ++v) phi.y_vars.push_back(v);
  auto lit = [&](int lo, int hi) {
    int v = std::uniform_int_distribution<int>(lo, hi)(rng);
    return rng() % 2 ? v : -v;
  };
  if (nx > 0)
    for (int i = 0; i < clauses; ++i) {
      LitVec c;
      int len = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < len; ++j) c.push_back(lit(1, nx));
      phi.cnf.push_back(std::move(c));
    }
  if (nx + ny > 0)
    for (int i = 0; i < terms; ++i) {
      LitVec t;
      int len = 1 + static_cast<int>(rng() % std::max(1, max_term));
      for (int j = 0; j < len; ++j) t.push_back(lit(1, nx + ny));
      phi.dnf.push_back(std::move(t));
    }
  return phi;
}

// ---------------------------------------------------------------------------
// Text export

inline std::string to_dimacs(const Cnf& c) {
  std::ostringstream os;
  os << "p cnf " << c.num_vars << ' ' << c.clauses.size() << '\n';
  for (const auto& cl : c.clauses) {
    for (Lit l : cl) os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

/// QDIMACS with the DNF matrix turned into CNF by one selector variable per term:
/// e x, a y, e s; clauses (s_1 | ... | s_m) and (-s_j | l) for each literal l of term j.
inline std::string to_qdimacs(const QbfEA& q) {
  validate(q);
  const int m = static_cast<int>(q.terms.size());
  std::size_t count = 1;
  for (const auto& t : q.terms) count += t.size();
  std::ostringstream os;
  os << "p cnf " << q.num_vars + m << ' ' << count << '\n';
  auto block = [&](char tag, const std::vector<int>& vars) {
    if (vars.empty()) return;
    os << tag;
    for (int v : vars) os << ' ' << v;
    os << " 0\n";
  };
  std::vector<int> sel;
  for (int j = 1; j <= m; ++j) sel.push_back(q.num_vars + j);
  block('e', q.x_vars);
  block('a', q.y_vars);
  block('e', sel);
  for (int s : sel) os << s << ' ';
  os << "0\n";
  for (int j = 0; j < m; ++j)
    for (Lit l : q.terms[j]) os << -sel[j] << ' ' << l << " 0\n";
  return os.str();
}

/// DIMACS CNF reader. Clauses may span lines; each ends at a 0.
inline Cnf parse_dimacs(std::string_view text) {
  std::optional<std::size_t> declared;
  Cnf c;
  LitVec cur;
  detail::for_each_line(text, [&](std::string_view line, int no) {
    auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "c" || tok[0] == "%") return;
    if (tok[0] == "p") {
      if (declared) throw ParseError("duplicate header", no);
      if (tok.size() != 4 || tok[1] != "cnf") throw ParseError("malformed header, expected 'p cnf <vars> <clauses>'", no);
      auto nv = detail::parse_int(tok[2], no, "variable count");
      auto mc = detail::parse_int(tok[3], no, "clause count");
      if (nv < 0 || mc < 0) throw ParseError("negative count in header", no);
      c.num_vars = static_cast<int>(nv);
      declared = static_cast<std::size_t>(mc);
      return;
    }
    if (!declared) throw ParseError("missing 'p cnf' header before data", no);
    for (auto t : tok) {
      auto l = detail::parse_int(t, no, "literal");
      if (l == 0) {
        c.clauses.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      if (l > c.num_vars || -l > c.num_vars) throw ParseError("literal " + std::to_string(l) + " out of range", no);
      cur.push_back(static_cast<Lit>(l));
    }
  });
  if (!declared) throw ParseError("missing 'p cnf' header");
  if (!cur.empty()) throw ParseError("last clause is not terminated by 0");
  if (c.clauses.size() != *declared)
    throw ParseError("header declares " + std::to_string(*declared) + " clauses but " +
                     std::to_string(c.clauses.size()) + " were given");
  return c;
}

}  // namespace ashg
