#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ashg/generators.hpp"
#include "test_support.hpp"

using namespace ashg;

namespace {

Graph complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

Graph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

Graph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

VerificationResult verify_by_treewidth(const ReductionOutput& out) {
  auto nice = make_nice(heuristic_decompose(out.instance));
  return verify_treewidth(out.instance, *out.partition, nice, SignatureMode::Value);
}

std::multiset<Weight> weights(const AshgInstance& inst) {
  std::multiset<Weight> w;
  for (const auto& e : inst.edges()) w.insert(e.w);
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gadget

TEST(Gadget, WeightTable) {
  auto [h, g] = gadget_h(-16);
  EXPECT_EQ(h.size(), 6);
  EXPECT_EQ(h.edge_count(), 15u);
  std::multiset<Weight> want{5, 5, 5, 4, 4, 4, 3, 3, 3, -16, -16, -16, -16, -16, -16};
  EXPECT_EQ(weights(h), want);
  EXPECT_EQ(h.weight(g.h, g.rest[0]), 5);
  EXPECT_EQ(h.weight(g.rest[4], g.h), 4);
  EXPECT_EQ(max_positive_incidence(h), 15);
}

TEST(Gadget, HasNoCoreButItsRestDoes) {
  auto [h, g] = gadget_h(-16);
  EXPECT_EQ(solve_cs_bruteforce(h).verdict, CsVerdict::NotExists);
  auto rest = induced_subgraph(h, {1, 2, 3, 4, 5});
  Partition split(5, {{0, 1, 2}, {3, 4}});
  EXPECT_TRUE(verify_bruteforce(rest, split).stable());
}

TEST(Attach, SingleVertexHostCounts) {
  AshgInstance one(1, {});
  // h carries 18 of positive weight once attached, so rho must go below -18
  EXPECT_THROW(attach(one, {0}, -16, 9, AttachMode::Plain), PreconditionError);
  auto [inst, g] = attach(one, {0}, -19, 9, AttachMode::Plain);
  EXPECT_EQ(inst.size(), 7);
  EXPECT_EQ(inst.edge_count(), 15u + 1u + 5u);
  EXPECT_EQ(inst.weight(0, g.h), 9);
  for (Vertex r : g.rest) EXPECT_EQ(inst.weight(0, r), -19);
}

TEST(Attach, NeighborhoodModeReachesLeaves) {
  AshgInstance star(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
  auto [plain, gp] = attach(star, {0}, -20, 9, AttachMode::Plain);
  auto [nbh, gn] = attach(star, {0}, -20, 9, AttachMode::Neighborhood);
  EXPECT_EQ(nbh.edge_count(), plain.edge_count() + 3);
  for (Vertex leaf : {1, 2, 3}) {
    EXPECT_FALSE(plain.adjacent(gp.h, leaf));
    EXPECT_EQ(nbh.weight(gn.h, leaf), -20);
  }
}

TEST(Attach, Errors) {
  AshgInstance edge(2, {{0, 1, 1}});
  EXPECT_THROW(attach(edge, {0, 1}, -30, 9, AttachMode::Plain), PreconditionError);
  EXPECT_THROW(attach(edge, {0}, -30, 8, AttachMode::Plain), PreconditionError);
  AshgInstance heavy(2, {{0, 1, 40}});
  EXPECT_THROW(attach(heavy, {0}, -30, 9, AttachMode::Plain), PreconditionError);
  EXPECT_NO_THROW(attach(heavy, {0}, -50, 9, AttachMode::Plain));
}

TEST(Attach, StablePartitionsPairAnchorWithH) {
  std::vector<AshgInstance> hosts{AshgInstance(1, {}), AshgInstance(2, {{0, 1, 2}}),
                                  AshgInstance(3, {{0, 1, 3}, {1, 2, -1}}), AshgInstance(3, {{0, 1, 1}, {0, 2, 1}})};
  for (const auto& host : hosts)
    for (auto mode : {AttachMode::Plain, AttachMode::Neighborhood}) {
      auto [inst, g] = attach(host, {0}, -40, 9, mode);
      auto r = solve_cs_bruteforce(inst);
      ASSERT_TRUE(r.exists()) << emit_instance(inst);
      auto p = normalize_connected(inst, *r.partition);
      ASSERT_EQ(p.block_of(g.h), p.block_of(0));
      for (Vertex x : g.rest) EXPECT_NE(p.block_of(x), p.block_of(0));
      if (mode == AttachMode::Neighborhood) EXPECT_EQ(p.block(p.block_of(0)).size(), 2u);
    }
}

// ---------------------------------------------------------------------------
// Verification reductions

TEST(PartitionCsv, Examples) {
  auto yes = gen_partition_csv({1, 1, 2});
  EXPECT_EQ(yes.instance.size(), 7);
  EXPECT_EQ(yes.expected_verdict, Verdict::Unstable);
  EXPECT_EQ(verify_bruteforce(yes.instance, *yes.partition).verdict, Verdict::Unstable);
  auto no = gen_partition_csv({1, 1, 1});
  EXPECT_EQ(no.expected_verdict, Verdict::Stable);
  EXPECT_TRUE(verify_bruteforce(no.instance, *no.partition).stable());
  EXPECT_EQ(yes.modulator.size(), 2u);
  EXPECT_TRUE(is_vertex_cover(yes.instance, yes.modulator));
  EXPECT_THROW(gen_partition_csv({}), PreconditionError);
}

TEST(PartitionCsv, MatchesSubsetSum) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 60; ++t) {
    std::vector<Weight> a(1 + rng() % 5);
    for (auto& x : a) x = 1 + static_cast<Weight>(rng() % 6);
    auto out = gen_partition_csv(a);
    EXPECT_EQ(verify_vertexcover(out.instance, *out.partition).verdict, *out.expected_verdict);
  }
}

TEST(BinPackingCsv, Examples) {
  auto yes = gen_binpacking_csv({1, 1, 2, 2}, 2);
  EXPECT_EQ(yes.instance.size(), 1 + 2 * 2 + 4 * 2);
  EXPECT_EQ(yes.expected_verdict, Verdict::Unstable);
  EXPECT_EQ(verify_bruteforce(yes.instance, *yes.partition).verdict, Verdict::Unstable);
  auto no = gen_binpacking_csv({1, 1, 1}, 2);
  EXPECT_EQ(no.expected_verdict, Verdict::Stable);
  EXPECT_TRUE(verify_bruteforce(no.instance, *no.partition).stable());
  EXPECT_EQ(yes.modulator.size(), 4u);
}

TEST(BinPackingCsv, MatchesPackingSearch) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 40; ++t) {
    std::vector<Weight> a(1 + rng() % 4);
    for (auto& x : a) x = 1 + static_cast<Weight>(rng() % 4);
    int k = 1 + static_cast<int>(rng() % 3);
    auto out = gen_binpacking_csv(a, k);
    if (!out.expected_verdict) continue;
    EXPECT_EQ(verify_by_treewidth(out).verdict, *out.expected_verdict);
  }
}

// Thirteen unit items, three bins: four items per bin reach the fractional target within the
// margins, so the designated partition is blocked even though no exact packing exists.
TEST(BinPackingCsv, IndivisibleTotalCanStillBlock) {
  auto out = gen_binpacking_csv(std::vector<Weight>(13, 1), 3);
  EXPECT_FALSE(out.expected_verdict.has_value());
  std::vector<Vertex> x;
  for (int j = 0; j < 3; ++j) {
    x.push_back(out.find("y" + std::to_string(j)));
    x.push_back(out.find("z" + std::to_string(j)));
    for (int i = 4 * j; i < 4 * j + 4; ++i) x.push_back(out.find("a" + std::to_string(i) + "." + std::to_string(j)));
  }
  EXPECT_TRUE(is_blocking(out.instance, *out.partition, Coalition(x)));
}

TEST(BddCsv, Examples) {
  auto k3 = complete(3);
  auto one = gen_bdd_csv(k3, 0, 1);
  EXPECT_EQ(one.expected_verdict, Verdict::Unstable);
  EXPECT_EQ(verify_bruteforce(one.instance, *one.partition).verdict, Verdict::Unstable);
  auto two = gen_bdd_csv(k3, 0, 2);
  EXPECT_EQ(two.expected_verdict, Verdict::Stable);
  EXPECT_TRUE(verify_bruteforce(two.instance, *two.partition).stable());
  for (const auto& e : two.instance.edges()) EXPECT_TRUE(e.w == 1 || e.w == -1);
}

TEST(BddCsv, MatchesSubsetSearch) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 40; ++t) {
    int n = 1 + static_cast<int>(rng() % 5);
    auto g = random_graph(rng, n, 0.5);
    int d = static_cast<int>(rng() % 3), s = 1 + static_cast<int>(rng() % n);
    auto out = gen_bdd_csv(g, d, s);
    EXPECT_EQ(verify_by_treewidth(out).verdict, *out.expected_verdict) << emit_gr(g) << d << " " << s;
  }
}

TEST(CliqueKcsv, Examples) {
  auto k4 = gen_clique_kcsv(complete(4), 3);
  EXPECT_EQ(k4.expected_verdict, Verdict::Unstable);
  EXPECT_EQ(verify_kcore(k4.instance, *k4.partition, 3).verdict, Verdict::Unstable);
  auto c5 = gen_clique_kcsv(cycle(5), 3);
  EXPECT_EQ(c5.expected_verdict, Verdict::Stable);
  EXPECT_TRUE(verify_kcore(c5.instance, *c5.partition, 3).stable());
  for (const auto& b : c5.partition->blocks()) EXPECT_EQ(b.size(), 2u);
  auto k5 = gen_clique_kcsv(complete(5), 5);
  for (const auto& b : k5.partition->blocks()) EXPECT_EQ(b.size(), 4u);
  EXPECT_THROW(gen_clique_kcsv(cycle(4), 2), PreconditionError);
}

TEST(CliqueKcsv, MatchesCliqueSearch) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 40; ++t) {
    auto g = random_graph(rng, 1 + static_cast<int>(rng() % 6), 0.5);
    int k = 3 + static_cast<int>(rng() % 2);
    auto out = gen_clique_kcsv(g, k);
    for (const auto& e : out.instance.edges()) EXPECT_EQ(e.w, 1);
    EXPECT_EQ(verify_kcore(out.instance, *out.partition, k).verdict, *out.expected_verdict);
  }
}

// ---------------------------------------------------------------------------
// Existence reductions

TEST(EaPartitionCs, Structure) {
  auto out = gen_eapartition_cs({2}, {1});
  EXPECT_EQ(out.gadgets.size(), 2u);
  EXPECT_EQ(out.instance.size(), 4 + 12);
  EXPECT_EQ(out.instance.weight(out.gadgets[0].h, out.gadgets[1].h), out.gadgets[0].rho);
  EXPECT_EQ(out.modulator.size(), 12u);
  EXPECT_TRUE(is_vertex_cover(out.instance, out.modulator));
  EXPECT_LT(out.gadgets[0].rho, -max_positive_incidence(out.instance));
}

TEST(EaPartitionCs, CanonicalPartitionsFollowWitnesses) {
  auto check = [](const std::vector<Weight>& a, const std::vector<Weight>& b) {
    auto wit = source::exists_forall_witnesses(a, b);
    for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
      auto out = gen_eapartition_cs(a, b, mask);
      bool witness = std::find(wit.begin(), wit.end(), mask) != wit.end();
      EXPECT_EQ(verify_bruteforce(out.instance, *out.partition).stable(), witness) << "mask " << mask;
    }
  };
  check({2}, {1});
  check({1}, {1});
  check({3, 1}, {1, 1});
  check({1, 2}, {2, 1});
  auto one = gen_eapartition_cs({2}, {1});
  EXPECT_EQ(one.expected_core, CsVerdict::Exists);
}

TEST(ThreeColKcs, SingleEdge) {
  auto edge = Graph::from_edges(2, {{0, 1}});
  auto out = gen_3col_kcs(edge, std::vector<int>{0, 1});
  EXPECT_EQ(out.instance.size(), 2 * 9 + 3 * 7);
  EXPECT_EQ(out.gadgets.size(), 3u);
  EXPECT_LE(out.instance.max_degree(), 14);
  EXPECT_TRUE(verify_kcore(out.instance, *out.partition, 3).stable());
  EXPECT_EQ(out.expected_core, CsVerdict::Exists);
  // both ends with the same colour: the shared connector and the two weak corners block
  auto bad = gen_3col_kcs(edge, std::vector<int>{2, 2});
  auto r = verify_kcore(bad.instance, *bad.partition, 3);
  ASSERT_EQ(r.verdict, Verdict::Unstable);
  EXPECT_EQ(r.witness->size(), 3u);
}

TEST(ThreeColKcs, CubicGraphs) {
  auto k4 = gen_3col_kcs(complete(4));
  EXPECT_EQ(k4.expected_core, CsVerdict::NotExists);
  EXPECT_EQ(k4.instance.max_degree(), 14);
  auto k3 = complete(3);
  auto col = source::three_coloring(k3);
  ASSERT_TRUE(col);
  auto out = gen_3col_kcs(k3, *col);
  EXPECT_LE(out.instance.max_degree(), 14);
  EXPECT_TRUE(verify_kcore(out.instance, *out.partition, 3).stable());
  EXPECT_THROW(gen_3col_kcs(complete(5)), PreconditionError);
}

namespace {

// The coalition that selects clause `clause` against the assignment `val` (layout variable ids).
Coalition selection_coalition(const ReductionOutput& out, const Sat33Layout& lay, const std::vector<char>& val,
                              int clause) {
  std::vector<Vertex> x;
  auto bit = [](int c, int k) { return (c >> k) & 1; };
  for (int k = 0; k < lay.bits; ++k) {
    x.push_back(out.find("p" + std::to_string(k)));
    x.push_back(out.find((bit(clause, k) ? "r" : "q") + std::to_string(k)));
  }
  std::map<int, int> seen;
  for (int c = 0; c < static_cast<int>(lay.formula.clauses.size()); ++c)
    for (Lit l : lay.formula.clauses[c]) {
      std::string tag = "x" + std::to_string(var_of(l)) + "#" + std::to_string(++seen[var_of(l)]);
      x.push_back(out.find(tag + ".z"));
      int first_diff = lay.bits + 1;
      for (int k = lay.bits - 1; k >= 0; --k)
        if (bit(c, k) != bit(clause, k)) first_diff = k;
      for (int k = 0; k < lay.bits; ++k) {
        x.push_back(out.find(tag + (bit(clause, k) ? ".v" : ".u") + std::to_string(k)));
        if (bit(c, k) == bit(clause, k)) x.push_back(out.find(tag + ".t" + std::to_string(k)));
        if (k >= first_diff) x.push_back(out.find(tag + ".sb" + std::to_string(k)));
      }
      for (int k = first_diff; k <= lay.bits; ++k) x.push_back(out.find(tag + ".s" + std::to_string(k)));
    }
  for (int v : lay.variables) x.push_back(out.find((val[v] ? "-x" : "x") + std::to_string(v)));
  return Coalition(x);
}

}  // namespace

TEST(Sat33Cs, DegreeWidthAndGadgetCount) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 20; ++t) {
    auto phi = source::random_33sat(rng, 1 + static_cast<int>(rng() % 8));
    auto out = gen_33sat_cs(phi);
    auto lay = layout_33sat(phi);
    const int m = lay.bits;
    EXPECT_LE(out.instance.max_degree(), 20);
    ASSERT_TRUE(out.decomposition);
    auto rep = validate_td(out.instance, *out.decomposition);
    EXPECT_TRUE(rep.ok()) << rep.message;
    EXPECT_LE(out.decomposition->width(), 271 + 195 * m);
    std::size_t occurrences = 0;
    for (const auto& c : lay.formula.clauses) occurrences += c.size();
    // one per variable, (s, sbar, u, v) chains and z per occurrence, p/q/r per bit
    std::size_t want = lay.variables.size() + occurrences * (4 * m + 2) + 3 * m;
    EXPECT_EQ(out.gadgets.size(), want);
    EXPECT_EQ(lay.formula.clauses.size(), std::size_t{1} << m);
    EXPECT_LT(out.gadgets[0].rho, -max_positive_incidence(out.instance));
  }
}

TEST(Sat33Cs, SelectionCoalitionBlocksExactlyFalsifiedClauses) {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 8; ++t) {
    auto phi = source::random_33sat(rng, 2 + static_cast<int>(rng() % 3));
    auto lay = layout_33sat(phi);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<char> assign(phi.num_vars + 1, 0);
      for (int v = 1; v <= phi.num_vars; ++v) assign[v] = rng() % 2;
      auto out = gen_33sat_cs(phi, assign);
      std::vector<char> val(lay.formula.num_vars + 1, 0);
      for (int v = 1; v <= phi.num_vars; ++v) val[v] = assign[v];
      for (auto [v, b] : lay.padding_values) val[v] = b;
      for (int c = 0; c < static_cast<int>(lay.formula.clauses.size()); ++c) {
        bool falsified = !detail::clause_true(val, lay.formula.clauses[c]);
        auto x = selection_coalition(out, lay, val, c);
        EXPECT_EQ(is_blocking(out.instance, *out.partition, x), falsified) << "clause " << c;
      }
    }
  }
}

TEST(Sat33Cs, NormalisationAndErrors) {
  Cnf pure{2, {{1, 2}, {1, -2}}};  // x1 is pure, so both clauses go and only padding remains
  auto lay = layout_33sat(pure);
  EXPECT_EQ(lay.formula.clauses.size(), 2u);
  EXPECT_EQ(lay.variables, (std::vector<int>{3, 4}));
  Cnf unsat{1, {{1}, {-1}}};
  auto out = gen_33sat_cs(unsat);
  EXPECT_EQ(out.expected_core, CsVerdict::NotExists);
  Cnf wide{4, {{1, 2, 3, 4}}};
  EXPECT_THROW(gen_33sat_cs(wide), PreconditionError);
  Cnf often{1, {{1}, {-1}, {1}, {-1}}};
  EXPECT_THROW(gen_33sat_cs(often), PreconditionError);
}

TEST(SourceOracles, SmallCases) {
  EXPECT_TRUE(source::has_equal_split({1, 1, 2}));
  EXPECT_FALSE(source::has_equal_split({1, 1, 1}));
  EXPECT_TRUE(source::has_perfect_packing({1, 1, 2, 2}, 2));
  EXPECT_FALSE(source::has_perfect_packing({5, 1, 1, 1}, 2));
  EXPECT_TRUE(source::has_clique(complete(4), 4));
  EXPECT_FALSE(source::has_clique(cycle(5), 3));
  EXPECT_FALSE(source::three_coloring(complete(4)));
  EXPECT_TRUE(source::has_bounded_degree_set(cycle(4), 0, 2));
  EXPECT_FALSE(source::has_bounded_degree_set(complete(3), 0, 2));
}

TEST(GraphFormats, GrRoundTripAndDimacs) {
  auto g = read_gr("c tri\np tw 3 3\n1 2\n2 3\n1 3\n");
  EXPECT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(read_gr(emit_gr(g)).adj, g.adj);
  EXPECT_THROW(read_gr("p tw 2 1\n1 3\n"), ParseError);
  auto f = parse_dimacs("c x\np cnf 3 2\n1 -2 0\n3\n0\n");
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[0], (LitVec{1, -2}));
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n1\n"), ParseError);
}
