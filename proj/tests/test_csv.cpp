#include <gtest/gtest.h>

#include <random>

#include "ashg/csv.hpp"
#include "test_support.hpp"

using namespace ashg;
using testing_support::triangle;

namespace {

NiceTreeDecomposition nice_for(const AshgInstance& g) { return make_nice(heuristic_decompose(g)); }

}  // namespace

TEST(BruteForce, TriangleSingletonsWitnessIsWholeTriangle) {
  auto r = verify_bruteforce(triangle(1), Partition::singletons(3));
  ASSERT_EQ(r.verdict, Verdict::Unstable);
  EXPECT_EQ(r.witness->members(), (std::vector<Vertex>{0, 1, 2}));
}

TEST(BruteForce, StableExamples) {
  EXPECT_TRUE(verify_bruteforce(triangle(1), Partition::grand(3)).stable());
  AshgInstance e(2, {{0, 1, -1}});
  EXPECT_TRUE(verify_bruteforce(e, Partition::singletons(2)).stable());
}

TEST(BruteForce, SizeBoundRestrictsSearch) {
  // only the pair {0,1} together gains; size 1 finds nothing
  AshgInstance e(2, {{0, 1, 3}});
  EXPECT_TRUE(verify_bruteforce(e, Partition::singletons(2), 1).stable());
  EXPECT_FALSE(verify_bruteforce(e, Partition::singletons(2), 2).stable());
  EXPECT_THROW(verify_bruteforce(e, Partition::singletons(2), 0), PreconditionError);
}

TEST(BruteForce, CapRaisesResourceLimit) {
  std::mt19937_64 rng(1);
  auto g = testing_support::random_instance(rng, 40, 0.3, 3);
  Partition p = Partition::grand(40);
  try {
    verify_bruteforce(g, p, std::nullopt, BruteForceLimits{100});
    SUCCEED();  // may finish early if a witness is close to the front
  } catch (const ResourceLimitError& e) {
    EXPECT_EQ(e.cap(), "enumeration");
  }
}

TEST(Tree, StarIsUnstable) {
  AshgInstance star(4, {{0, 1, 2}, {0, 2, 2}, {0, 3, 2}});
  auto r = verify_tree(star, Partition::singletons(4));
  ASSERT_EQ(r.verdict, Verdict::Unstable);
  EXPECT_EQ(r.witness->members(), (std::vector<Vertex>{0, 1, 2, 3}));
}

TEST(Tree, PathWithBestPairIsStable) {
  AshgInstance path(3, {{0, 1, 3}, {1, 2, 2}});
  Partition p(3, {{0, 1}, {2}});
  EXPECT_TRUE(verify_tree(path, p).stable());
  EXPECT_TRUE(verify_bruteforce(path, p).stable());
}

TEST(Tree, SingleVertexAndCycle) {
  EXPECT_TRUE(verify_tree(AshgInstance(1, {}), Partition::singletons(1)).stable());
  EXPECT_THROW(verify_tree(triangle(1), Partition::singletons(3)), WrongAlgorithmError);
}

TEST(Treewidth, FourCycle) {
  AshgInstance c4(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});
  auto nice = nice_for(c4);
  EXPECT_EQ(nice.width(), 2);
  for (auto mode : {SignatureMode::Value, SignatureMode::EdgeSet}) {
    auto r = verify_treewidth(c4, Partition::singletons(4), nice, mode);
    ASSERT_EQ(r.verdict, Verdict::Unstable);
    EXPECT_TRUE(is_blocking(c4, Partition::singletons(4), *r.witness));
  }
}

TEST(Treewidth, NegativeTriangleIsStable) {
  auto g = triangle(-1);
  for (auto mode : {SignatureMode::Value, SignatureMode::EdgeSet})
    EXPECT_TRUE(verify_treewidth(g, Partition::singletons(3), nice_for(g), mode).stable());
}

TEST(Treewidth, RejectsInvalidDecomposition) {
  auto g = triangle(1);
  auto nice = make_nice(TreeDecomposition::from_tree_edges({{0, 1}, {1, 2}}, {{0, 1}}));
  EXPECT_THROW(verify_treewidth(g, Partition::singletons(3), nice, SignatureMode::Value), ValidationError);
}

TEST(Treewidth, StateCap) {
  std::mt19937_64 rng(2);
  auto g = testing_support::random_instance(rng, 10, 0.8, 4);
  EXPECT_THROW(verify_treewidth(g, Partition::singletons(10), nice_for(g), SignatureMode::EdgeSet,
                                TreewidthLimits{2}),
               ResourceLimitError);
}

TEST(VertexCover, EdgelessIsStable) {
  auto r = verify_vertexcover(AshgInstance(3, {}), Partition::singletons(3));
  EXPECT_TRUE(r.stable());
  EXPECT_EQ(r.stats.nodes, 1u);
}

TEST(VertexCover, GivenSetMustCover) {
  auto g = triangle(1);
  EXPECT_THROW(verify_vertexcover(g, Partition::singletons(3), std::vector<Vertex>{0}), PreconditionError);
  auto r = verify_vertexcover(g, Partition::singletons(3), std::vector<Vertex>{0, 1});
  ASSERT_EQ(r.verdict, Verdict::Unstable);
  EXPECT_EQ(r.witness->members(), (std::vector<Vertex>{0, 1, 2}));
}

TEST(VertexCover, NegativeWeightsNeedSlackBeyondTarget) {
  // u=0 needs 1; items give +3 then -2: overshooting first is required
  AshgInstance g(3, {{0, 1, 3}, {0, 2, -2}, {1, 2, 5}});
  Partition p = Partition::singletons(3);
  auto r = verify_vertexcover(g, p, std::vector<Vertex>{0, 1});
  EXPECT_EQ(r.stable(), verify_bruteforce(g, p).stable());
}

TEST(VertexCover, FindsMinimumCover) {
  AshgInstance star(5, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}});
  EXPECT_EQ(find_vertex_cover(star), (std::vector<Vertex>{0}));
  EXPECT_EQ(find_vertex_cover(triangle(1)).size(), 2u);
}

TEST(OracleEquivalence, AllSolversAgreeWithBruteForce) {
  std::mt19937_64 rng(2024);
  int unstable = 0;
  for (int t = 0; t < 1000; ++t) {
    int n = 1 + static_cast<int>(rng() % 10);
    bool forest = t % 4 == 0;
    auto g = forest ? testing_support::random_forest(rng, n, 0.8, 5)
                    : testing_support::random_instance(rng, n, std::uniform_real_distribution<double>(0.1, 0.7)(rng), 5);
    auto p = testing_support::random_partition(rng, n);
    auto ref = verify_bruteforce(g, p);
    if (!ref.stable()) {
      ++unstable;
      ASSERT_TRUE(is_blocking(g, p, *ref.witness));
    }
    auto nice = nice_for(g);
    std::vector<VerificationResult> rs{verify_treewidth(g, p, nice, SignatureMode::Value),
                                       verify_treewidth(g, p, nice, SignatureMode::EdgeSet),
                                       verify_vertexcover(g, p)};
    if (forest) rs.push_back(verify_tree(g, p));
    for (const auto& r : rs) {
      ASSERT_EQ(r.verdict, ref.verdict) << "trial " << t << "\n" << emit_instance(g) << emit_partition(p);
      if (!r.stable()) ASSERT_TRUE(is_blocking(g, p, *r.witness));
    }
  }
  EXPECT_GT(unstable, 100);
  EXPECT_LT(unstable, 1000);
}

TEST(Properties, BoundedSearchImpliesUnbounded) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 300; ++t) {
    int n = 1 + static_cast<int>(rng() % 9);
    auto g = testing_support::random_instance(rng, n, 0.5, 5);
    auto p = testing_support::random_partition(rng, n);
    int k = 1 + static_cast<int>(rng() % 3);
    if (!verify_bruteforce(g, p, k).stable()) EXPECT_FALSE(verify_bruteforce(g, p).stable());
  }
}

TEST(Properties, BruteForceMatchesExhaustiveSubsets) {
  std::mt19937_64 rng(78);
  for (int t = 0; t < 300; ++t) {
    int n = 1 + static_cast<int>(rng() % 8);
    auto g = testing_support::random_instance(rng, n, 0.5, 4);
    auto p = testing_support::random_partition(rng, n);
    bool any = false;
    for (unsigned mask = 1; mask < (1u << n) && !any; ++mask) {
      std::vector<Vertex> m;
      for (int v = 0; v < n; ++v)
        if (mask >> v & 1) m.push_back(v);
      any = is_blocking(g, p, Coalition(m));
    }
    EXPECT_EQ(!verify_bruteforce(g, p).stable(), any);
  }
}
