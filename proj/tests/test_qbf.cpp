#include <gtest/gtest.h>

#include <random>

#include "ashg/qbf.hpp"

using namespace ashg;

namespace {

bool cnf_exhaustive(const Cnf& c) {
  std::vector<char> val(c.num_vars + 1, 0);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.num_vars); ++m) {
    for (int v = 1; v <= c.num_vars; ++v) val[v] = m >> (v - 1) & 1;
    bool all = true;
    for (const auto& cl : c.clauses) {
      bool some = false;
      for (Lit l : cl) some = some || ((val[var_of(l)] != 0) == (l > 0));
      all = all && some;
    }
    if (all) return true;
  }
  return false;
}

AnnotatedTd incidence_td(const QbfEA& q) { return {TdKind::Incidence, heuristic_decompose(incidence_graph(q))}; }

bool chain(const QbfEA& q) { return solve_ea(q, incidence_td(q)).sat; }

QbfEA make_ea(int nv, std::vector<int> x, std::vector<int> y, std::vector<LitVec> terms) {
  QbfEA q;
  q.num_vars = nv;
  q.x_vars = std::move(x);
  q.y_vars = std::move(y);
  q.terms = std::move(terms);
  return q;
}

}  // namespace

TEST(ToEa, SingleUniversalTermBecomesFalse) {
  E3CnfFDnf phi;
  phi.num_vars = 1;
  phi.y_vars = {1};
  phi.dnf = {{1}};
  auto q = e3cnffdnf_to_ea(phi);
  EXPECT_EQ(q.terms.size(), 2u);
  EXPECT_EQ(q.terms[0], (LitVec{2, 1}));
  EXPECT_EQ(q.terms[1], (LitVec{-2}));
  EXPECT_FALSE(eval_bruteforce(q).sat);
  EXPECT_FALSE(eval_bruteforce(phi).sat);
}

TEST(ToEa, ExistentialOnly) {
  E3CnfFDnf phi;
  phi.num_vars = 1;
  phi.x_vars = {1};
  phi.dnf = {{1}};
  auto r = eval_bruteforce(phi);
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(r.assignment[1], 1);
  EXPECT_TRUE(eval_bruteforce(e3cnffdnf_to_ea(phi)).sat);
}

TEST(ToEa, TermCount) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    auto phi = random_e3cnffdnf(rng, 3, 2, static_cast<int>(rng() % 4), static_cast<int>(rng() % 4));
    std::size_t expected = phi.dnf.size() + 1;
    for (const auto& c : phi.cnf) expected += c.size();
    auto q = e3cnffdnf_to_ea(phi);
    EXPECT_EQ(q.terms.size(), expected);
    EXPECT_EQ(q.y_vars.size(), phi.y_vars.size() + phi.cnf.size() + 1);
  }
}

TEST(ToEa, CarriedDecompositionIsValid) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    auto phi = random_e3cnffdnf(rng, 1 + static_cast<int>(rng() % 5), static_cast<int>(rng() % 4),
                                static_cast<int>(rng() % 5), static_cast<int>(rng() % 5));
    auto [q, atd] = e3cnffdnf_to_ea(phi, heuristic_decompose(incidence_graph(phi)));
    auto rep = validate_td(incidence_graph(q), atd.td);
    ASSERT_TRUE(rep.ok()) << rep.message;
    EXPECT_EQ(eval_bruteforce(q).sat, eval_bruteforce(phi).sat);
  }
}

TEST(Split, NarrowTermsUnchanged) {
  auto q = make_ea(3, {1}, {2, 3}, {{1, 2, 3}, {-1}});
  auto [q3, td3] = split_to_3dnf(q, incidence_td(q));
  EXPECT_EQ(q3.terms, q.terms);
  EXPECT_EQ(q3.num_vars, 3);
}

TEST(Split, WidthFourGivesTwoTermsAndOneVariable) {
  auto q = make_ea(4, {1, 2}, {3, 4}, {{1, 2, 3, 4}});
  auto [q3, td3] = split_to_3dnf(q, incidence_td(q));
  EXPECT_EQ(q3.terms.size(), 2u);
  EXPECT_EQ(q3.num_vars, 5);
  EXPECT_EQ(q3.y_vars.size(), 3u);
  for (const auto& t : q3.terms) EXPECT_EQ(t.size(), 3u);
  EXPECT_TRUE(validate_td(incidence_graph(q3), td3.td).ok());
}

TEST(Split, RandomWideTermsEquisatisfiable) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 300; ++t) {
    int nv = 4 + static_cast<int>(rng() % 4);
    QbfEA q;
    q.num_vars = nv;
    int nx = 1 + static_cast<int>(rng() % (nv - 1));
    for (int v = 1; v <= nv; ++v) (v <= nx ? q.x_vars : q.y_vars).push_back(v);
    int m = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < m; ++j) {
      LitVec term;
      int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) term.push_back((rng() % 2 ? 1 : -1) * (1 + static_cast<int>(rng() % nv)));
      q.terms.push_back(term);
    }
    auto [q3, td3] = split_to_3dnf(q, incidence_td(q));
    auto rep = validate_td(incidence_graph(q3), td3.td);
    ASSERT_TRUE(rep.ok()) << rep.message;
    for (const auto& term : q3.terms) EXPECT_LE(term.size(), 3u);
    EXPECT_EQ(eval_bruteforce(q3).sat, eval_bruteforce(q).sat);
    EXPECT_TRUE(validate_td(primal_graph(q3), incidence_to_primal(q3, td3).td).ok());
  }
}

TEST(QbfToCnf, NoUniversals) {
  auto sat = make_ea(2, {1, 2}, {}, {{1, -2}, {-1, 2}});
  EXPECT_TRUE(chain(sat));
  auto unsat = make_ea(1, {1}, {}, {{1, -1}});
  EXPECT_FALSE(chain(unsat));
}

TEST(QbfToCnf, Examples) {
  auto q = make_ea(2, {1}, {2}, {{1, 2}, {1, -2}});
  auto r = solve_ea(q, incidence_td(q));
  ASSERT_TRUE(r.sat);
  EXPECT_EQ(r.assignment[1], 1);
  EXPECT_FALSE(chain(make_ea(1, {}, {1}, {{1}})));
}

TEST(QbfToCnf, RejectsNonNiceShape) {
  auto q = make_ea(2, {1}, {2}, {{1, 2}});
  NiceTreeDecomposition bad;
  bad.bags = {{0, 1}};
  bad.parent = {-1};
  bad.children = {{}};
  bad.kind = {NodeKind::Leaf};
  bad.vertex = {-1};
  EXPECT_THROW(qbf_to_cnf(q, bad), ValidationError);
}

TEST(SatTreewidth, Examples) {
  Cnf contra{1, {{1}, {-1}}};
  EXPECT_FALSE(sat_treewidth(contra, heuristic_decompose(primal_graph(contra))).sat);
  Cnf empty{0, {}};
  auto r = sat_treewidth(empty, heuristic_decompose(primal_graph(empty)));
  EXPECT_TRUE(r.sat);
  EXPECT_EQ(r.model.size(), 1u);
  Cnf with_empty{2, {{1, 2}, {}}};
  EXPECT_FALSE(sat_treewidth(with_empty, heuristic_decompose(primal_graph(with_empty))).sat);
}

TEST(SatTreewidth, ClauseOutsideEveryBag) {
  Cnf c{3, {{1, 2, 3}}};
  auto td = TreeDecomposition::from_tree_edges({{0, 1}, {1, 2}}, {{0, 1}});
  EXPECT_THROW(sat_treewidth(c, td), ValidationError);
}

TEST(SatTreewidth, RandomThreeCnfMatchesExhaustive) {
  std::mt19937_64 rng(8);
  int sats = 0;
  for (int t = 0; t < 300; ++t) {
    Cnf c{12, {}};
    int m = 20 + static_cast<int>(rng() % 50);
    for (int i = 0; i < m; ++i) {
      LitVec cl;
      for (int j = 0; j < 3; ++j) cl.push_back((rng() % 2 ? 1 : -1) * (1 + static_cast<int>(rng() % 12)));
      c.clauses.push_back(cl);
    }
    auto td = heuristic_decompose(primal_graph(c));
    auto r = sat_treewidth(c, td);
    EXPECT_EQ(r.sat, cnf_exhaustive(c));
    sats += r.sat;
  }
  EXPECT_GT(sats, 10);
  EXPECT_LT(sats, 290);
}

TEST(Pipeline, RandomFormulasMatchBruteForce) {
  std::mt19937_64 rng(9);
  int sats = 0;
  for (int t = 0; t < 300; ++t) {
    int nx = 1 + static_cast<int>(rng() % 5);
    int ny = static_cast<int>(rng() % 4);
    auto phi = random_e3cnffdnf(rng, nx, ny, static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5));
    auto expect = eval_bruteforce(phi);
    auto got = solve_e3cnffdnf(phi);
    ASSERT_EQ(got.sat, expect.sat) << "trial " << t;
    EXPECT_LE(got.stats.cnf_clauses, got.stats.size_bound);
    if (got.sat) {
      // the returned x must work on its own
      E3CnfFDnf fixed = phi;
      for (int v : phi.x_vars) fixed.cnf.push_back({got.assignment[v] ? v : -v});
      EXPECT_TRUE(eval_bruteforce(fixed).sat);
      ++sats;
    }
  }
  EXPECT_GT(sats, 20);
}

TEST(Export, Dimacs) {
  Cnf c{2, {{1, -2}, {2}}};
  EXPECT_EQ(to_dimacs(c), "p cnf 2 2\n1 -2 0\n2 0\n");
}

TEST(Export, Qdimacs) {
  auto q = make_ea(2, {1}, {2}, {{1, 2}, {-2}});
  EXPECT_EQ(to_qdimacs(q), "p cnf 4 4\ne 1 0\na 2 0\ne 3 4 0\n3 4 0\n-3 1 0\n-3 2 0\n-4 -2 0\n");
}

TEST(Validate, RejectsMalformed) {
  E3CnfFDnf phi;
  phi.num_vars = 2;
  phi.x_vars = {1};
  phi.y_vars = {2};
  phi.cnf = {{2}};
  EXPECT_THROW(validate(phi), PreconditionError);
  phi.cnf = {{1, 1, 1, 1}};
  EXPECT_THROW(validate(phi), PreconditionError);
  phi.cnf = {};
  phi.y_vars = {1};
  EXPECT_THROW(validate(phi), PreconditionError);
}
