#include <gtest/gtest.h>

#include <random>

#include "ashg/kcore.hpp"
#include "test_support.hpp"

using namespace ashg;
using testing_support::triangle;

TEST(VerifyKcore, TrianglePairsBlock) {
  auto r = verify_kcore(triangle(1), Partition::singletons(3), 2);
  ASSERT_EQ(r.verdict, Verdict::Unstable);
  EXPECT_EQ(r.witness->size(), 2u);
}

TEST(VerifyKcore, EdgeTogetherIsStable) {
  AshgInstance e(2, {{0, 1, 1}});
  EXPECT_TRUE(verify_kcore(e, Partition::grand(2), 2).stable());
  EXPECT_THROW(verify_kcore(e, Partition::grand(2), 0), PreconditionError);
}

TEST(Greedy2Core, Examples) {
  AshgInstance path(3, {{0, 1, 3}, {1, 2, 2}});
  EXPECT_EQ(greedy_2core(path), Partition(3, {{0, 1}, {2}}));
  EXPECT_EQ(greedy_2core(triangle(-2)), Partition::singletons(3));
  AshgInstance matching(4, {{0, 1, 1}, {2, 3, 1}});
  EXPECT_EQ(greedy_2core(matching), Partition(4, {{0, 1}, {2, 3}}));
}

TEST(Greedy2Core, AlwaysTwoCoreStable) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 1000; ++t) {
    int n = 1 + static_cast<int>(rng() % 30);
    auto g = testing_support::random_instance(rng, n, std::uniform_real_distribution<double>(0.05, 0.5)(rng), 5);
    auto r = verify_kcore(g, greedy_2core(g), 2);
    ASSERT_TRUE(r.stable()) << emit_instance(g);
  }
}

TEST(PartitionEnumeration, BellNumbersAndOrder) {
  std::vector<std::uint64_t> bell{1, 1, 2, 5, 15, 52, 203, 877};
  for (int n = 0; n < 8; ++n) {
    std::uint64_t count = 0;
    for_each_partition(n, [&](const Partition&) {
      ++count;
      return false;
    });
    EXPECT_EQ(count, bell[n]);
  }
  std::vector<Partition> seen;
  for_each_partition(3, [&](Partition p) {
    seen.push_back(std::move(p));
    return false;
  });
  EXPECT_EQ(seen.front(), Partition::grand(3));
  EXPECT_EQ(seen.back(), Partition::singletons(3));
}

TEST(SolveCsBruteforce, Examples) {
  auto one = solve_cs_bruteforce(AshgInstance(1, {}));
  ASSERT_TRUE(one.exists());
  EXPECT_EQ(*one.partition, Partition::singletons(1));
  auto neg = solve_cs_bruteforce(triangle(-1));
  ASSERT_TRUE(neg.exists());
  EXPECT_EQ(*neg.partition, Partition::singletons(3));
  EXPECT_THROW(solve_cs_bruteforce(AshgInstance(11, {})), ResourceLimitError);
}

TEST(SolveKcs, TwoAlwaysExistsAndSingleVertex) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    auto g = testing_support::random_instance(rng, 1 + static_cast<int>(rng() % 6), 0.5, 5);
    EXPECT_TRUE(solve_kcs_bruteforce(g, 2).exists());
  }
  EXPECT_TRUE(solve_kcs_bruteforce(AshgInstance(1, {}), 3).exists());
}

TEST(Properties, FullSizeMatchesUnbounded) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    int n = 1 + static_cast<int>(rng() % 10);
    auto g = testing_support::random_instance(rng, n, 0.4, 5);
    auto p = testing_support::random_partition(rng, n);
    EXPECT_EQ(verify_kcore(g, p, n).verdict, verify_bruteforce(g, p).verdict);
  }
}

TEST(Properties, StableAtKIsStableBelow) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 300; ++t) {
    int n = 2 + static_cast<int>(rng() % 8);
    auto g = testing_support::random_instance(rng, n, 0.5, 5);
    auto p = testing_support::random_partition(rng, n);
    int k = 1 + static_cast<int>(rng() % n);
    if (verify_kcore(g, p, k).stable())
      for (int j = 1; j < k; ++j) EXPECT_TRUE(verify_kcore(g, p, j).stable());
  }
}
