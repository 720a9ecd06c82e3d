#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "ashg/cs.hpp"
#include "ashg/generators.hpp"
#include "test_support.hpp"

using namespace ashg;
using testing_support::triangle;

namespace {

bool formula_sat(const CsEncoding& enc) { return eval_bruteforce(enc.formula, 30).sat; }

}  // namespace

TEST(EncodeCs, SingleEdge) {
  for (Weight w : {1, -1}) {
    AshgInstance e(2, {{0, 1, w}});
    auto enc = encode_cs(e, heuristic_decompose(e));
    auto r = eval_bruteforce(enc.formula);
    ASSERT_TRUE(r.sat);
    EXPECT_EQ(r.assignment[enc.x_var(0, 1)], w > 0 ? 1 : 0);
    EXPECT_EQ(decode_partition(enc, r.assignment), w > 0 ? Partition::grand(2) : Partition::singletons(2));
  }
}

TEST(EncodeCs, TermInequalityAndDegreeCap) {
  AshgInstance star(5, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}});
  auto enc = encode_cs(star, heuristic_decompose(star));
  EXPECT_EQ(enc.augmented.edge_count(), 4u);
  std::size_t center_terms = 0;
  for (Vertex u : enc.term_owner) center_terms += u == 0;
  EXPECT_LE(center_terms, 256u);
  EXPECT_THROW(encode_cs(star, heuristic_decompose(star), EncodeLimits{3}), ResourceLimitError);
}

TEST(EncodeCs, BagPairsBecomeZeroEdges) {
  AshgInstance path(3, {{0, 1, 2}, {1, 2, 2}});
  auto td = TreeDecomposition::from_tree_edges({{0, 1, 2}}, {});
  auto enc = encode_cs(path, td);
  EXPECT_EQ(enc.augmented.edge_count(), 3u);
  EXPECT_EQ(*enc.augmented.weight(0, 2), 0);
  EXPECT_EQ(enc.formula.cnf.size(), 3u);
}

TEST(IncidenceTd, PathAndEmptyGraph) {
  AshgInstance path(4, {{0, 1, 1}, {1, 2, -1}, {2, 3, 2}});
  auto enc = encode_cs(path, heuristic_decompose(path));
  auto itd = build_incidence_td(enc);
  auto rep = validate_td(incidence_graph(enc.formula), itd.td);
  EXPECT_TRUE(rep.ok()) << rep.message;
  AshgInstance empty(0, {});
  auto e2 = encode_cs(empty, heuristic_decompose(empty));
  auto t2 = build_incidence_td(e2);
  ASSERT_EQ(t2.td.node_count(), 1);
  EXPECT_EQ(t2.td.bags[0], (std::vector<int>{0}));
}

TEST(IncidenceTd, BagBoundsOnRandomGraphs) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 60; ++t) {
    int n = 1 + static_cast<int>(rng() % 6);
    auto g = testing_support::random_instance(rng, n, 0.4, 3);
    auto td = heuristic_decompose(g);
    CsEncoding enc;
    try {
      enc = encode_cs(g, td, EncodeLimits{5});
    } catch (const ResourceLimitError&) {
      continue;
    }
    auto itd = build_incidence_td(enc);
    auto rep = validate_td(incidence_graph(enc.formula), itd.td);
    ASSERT_TRUE(rep.ok()) << rep.message;
    const int nv = enc.formula.num_vars;
    const int kcl = static_cast<int>(enc.formula.cnf.size());
    std::vector<int> term_bags(enc.formula.dnf.size(), 0);
    for (const auto& bag : itd.td.bags) {
      int clauses = 0;
      for (int v : bag)
        if (v >= nv) {
          ++clauses;
          if (v >= nv + kcl) ++term_bags[v - nv - kcl];
        }
      EXPECT_LE(clauses, 2);
    }
    for (std::size_t j = 1; j < term_bags.size(); ++j) EXPECT_EQ(term_bags[j], 1);
  }
}

TEST(DecodePartition, Extremes) {
  AshgInstance path(3, {{0, 1, 1}, {1, 2, 1}});
  auto enc = encode_cs(path, heuristic_decompose(path));
  std::vector<char> zeros(enc.formula.num_vars + 1, 0), ones(enc.formula.num_vars + 1, 1);
  EXPECT_EQ(decode_partition(enc, zeros), Partition::singletons(3));
  EXPECT_EQ(decode_partition(enc, ones), Partition::grand(3));
}

TEST(SolveCs, Examples) {
  AshgInstance p3(3, {{0, 1, 1}, {1, 2, 1}});
  EXPECT_TRUE(solve_cs(p3).result.exists());
  auto tri = solve_cs(triangle(1));
  ASSERT_TRUE(tri.result.exists());
  EXPECT_TRUE(verify_bruteforce(triangle(1), *tri.result.partition).stable());
  AshgInstance e(2, {{0, 1, 1}});
  auto r = solve_cs(e);
  ASSERT_TRUE(r.result.exists());
  EXPECT_EQ(*r.result.partition, Partition::grand(2));
}

TEST(SolveCs, EncodingMatchesOracleOnSmallGraphs) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 60; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    auto g = testing_support::random_instance(rng, n, 0.6, 2);
    auto enc = encode_cs(g, heuristic_decompose(g));
    bool expect = solve_cs_bruteforce(g).exists();
    if (enc.formula.num_vars <= 24) EXPECT_EQ(formula_sat(enc), expect);
    EXPECT_EQ(solve_cs(g).result.exists(), expect) << emit_instance(g);
  }
}

TEST(SolveCs, SparseSixVertexAgreement) {
  std::mt19937_64 rng(33);
  CsPipelineOptions opt;
  opt.encode.max_degree = 3;
  int compared = 0;
  for (int t = 0; t < 40 && compared < 10; ++t) {
    auto g = testing_support::random_connected(rng, 5 + static_cast<int>(rng() % 2), 0.1, {-16, -1, 1, 2});
    CsPipelineResult r;
    try {
      r = solve_cs(g, std::nullopt, opt);
    } catch (const ResourceLimitError&) {
      continue;
    }
    ++compared;
    EXPECT_EQ(r.result.exists(), solve_cs_bruteforce(g).exists()) << emit_instance(g);
    if (r.result.exists()) EXPECT_TRUE(verify_bruteforce(g, *r.result.partition).stable());
  }
  EXPECT_EQ(compared, 10);
}

TEST(SolveCs, TdChoiceDoesNotChangeVerdict) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 20; ++t) {
    auto g = testing_support::random_instance(rng, 4, 0.5, 2);
    auto a = solve_cs(g, heuristic_decompose(g, Heuristic::MinDegree)).result.exists();
    auto b = solve_cs(g, heuristic_decompose(g, Heuristic::MinFill)).result.exists();
    EXPECT_EQ(a, b);
  }
}

// The six-vertex gadget has degree 5, past the encoder's default cap. Its encoding is still
// small enough for exhaustive evaluation once the cap is lifted.
TEST(SolveCs, GadgetEncodingUnderRaisedDegreeCap) {
  for (Weight rho : {-16, -10, 0, 5}) {
    auto [h, g] = gadget_h(rho);
    EXPECT_THROW(solve_cs(h), ResourceLimitError);
    auto enc = encode_cs(h, heuristic_decompose(h), {5});
    EXPECT_EQ(eval_bruteforce(enc.formula).sat, solve_cs_bruteforce(h).exists()) << rho;
  }
  auto [h, g] = gadget_h(-16);
  EXPECT_FALSE(solve_cs_bruteforce(h).exists());
}

TEST(SolveCs, ClauseCapStopsCompilation) {
  auto [h, g] = gadget_h(-16);
  CsPipelineOptions opt;
  opt.encode.max_degree = 5;
  opt.qbf.cnf_clause_cap = 100'000;
  try {
    solve_cs(h, std::nullopt, opt);
    FAIL() << "expected a resource cap";
  } catch (const ResourceLimitError& e) {
    EXPECT_EQ(e.cap(), "cnf-clauses");
  }
}
