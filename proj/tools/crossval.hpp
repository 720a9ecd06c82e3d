/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
// Seeded oracle-agreement suites behind `ashg crossval`.
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ashg/cs.hpp"
#include "ashg/csv.hpp"
#include "ashg/generators.hpp"
#include "ashg/kcore.hpp"
#include "ashg/qbf.hpp"

namespace ashg::crossval {

struct Options {
  std::uint64_t seed = 1;
  int trials = 200;
  int csv_max_n = 9;
  int cs_max_n = 5;
  std::string dump_dir = "crossval-failures";
  std::string inject_fault;  // suite name whose verdicts get flipped; harness self-test only
};

struct SuiteReport {
  std::string name;
  int trials = 0, agree = 0, skipped = 0;
  std::vector<std::string> dumped;
  bool ok() const { return agree + skipped == trials; }
};

namespace detail {

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline AshgInstance random_instance(std::mt19937_64& rng, int n, double p, int wmax, bool forest) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  if (forest) {
    for (int v = 1; v < n; ++v)
      if (coin(rng)) edges.push_back({uniform(rng, 0, v - 1), v, uniform(rng, -wmax, wmax)});
  } else {
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (coin(rng)) edges.push_back({u, v, uniform(rng, -wmax, wmax)});
  }
  return AshgInstance(n, std::move(edges));
}

inline Partition random_partition(std::mt19937_64& rng, int n) {
  int k = uniform(rng, 1, std::max(1, n));
  std::vector<std::vector<Vertex>> blocks(k);
  for (int v = 0; v < n; ++v) blocks[uniform(rng, 0, k - 1)].push_back(v);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return Partition(n, std::move(blocks));
}

inline Graph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

inline Partition restrict(const Partition& p, const std::vector<Vertex>& keep) {
  std::map<int, std::vector<Vertex>> by_block;
  for (std::size_t i = 0; i < keep.size(); ++i) by_block[p.block_of(keep[i])].push_back(static_cast<Vertex>(i));
  std::vector<std::vector<Vertex>> blocks;
  for (auto& [_, b] : by_block) blocks.push_back(std::move(b));
  return Partition(static_cast<int>(keep.size()), std::move(blocks));
}

/// Drops vertices one at a time while `bad` keeps holding.
template <class Bad>
std::pair<AshgInstance, std::optional<Partition>> minimise(AshgInstance inst, std::optional<Partition> p, Bad&& bad) {
  bool shrunk = true;
  while (shrunk && inst.size() > 1) {
    shrunk = false;
    for (Vertex drop = 0; drop < inst.size(); ++drop) {
      std::vector<Vertex> keep;
      for (Vertex v = 0; v < inst.size(); ++v)
        if (v != drop) keep.push_back(v);
      auto sub = induced_subgraph(inst, keep);
      std::optional<Partition> sp;
      if (p) sp = restrict(*p, keep);
      bool still = false;
      try {
        still = bad(sub, sp);
      } catch (const Error&) {
        still = false;
      }
      if (still) {
        inst = std::move(sub);
        p = std::move(sp);
        shrunk = true;
        break;
      }
    }
  }
  return {std::move(inst), std::move(p)};
}

inline std::string dump(const Options& opt, const std::string& suite, int trial, const AshgInstance& inst,
                        const std::optional<Partition>& p) {
  std::filesystem::create_directories(opt.dump_dir);
  auto stem = std::filesystem::path(opt.dump_dir) / (suite + "-" + std::to_string(trial));
  std::ofstream(stem.string() + ".ashg") << emit_instance(inst);
  if (p) std::ofstream(stem.string() + ".part") << emit_partition(*p);
  return stem.string();
}

}  // namespace detail

/// Verification solvers against the exhaustive coalition search.
inline SuiteReport csv_suite(const Options& opt) {
  SuiteReport r{"csv"};
  std::mt19937_64 rng(opt.seed);
  const bool flip = opt.inject_fault == r.name;
  auto disagree = [flip](const AshgInstance& inst, const std::optional<Partition>& p) {
    auto want = verify_bruteforce(inst, *p).verdict;
    if (flip) want = want == Verdict::Stable ? Verdict::Unstable : Verdict::Stable;
    auto nice = make_nice(heuristic_decompose(inst));
    bool bad = verify_treewidth(inst, *p, nice, SignatureMode::Value).verdict != want ||
               verify_treewidth(inst, *p, nice, SignatureMode::EdgeSet).verdict != want ||
               verify_vertexcover(inst, *p).verdict != want;
    if (is_forest(inst)) bad = bad || verify_tree(inst, *p).verdict != want;
    return bad;
  };
  for (int t = 0; t < opt.trials; ++t) {
    int n = detail::uniform(rng, 1, opt.csv_max_n);
    bool forest = rng() % 3 == 0;
    auto inst = detail::random_instance(rng, n, std::uniform_real_distribution<double>(0.2, 0.7)(rng), 5, forest);
    std::optional<Partition> p = detail::random_partition(rng, n);
    ++r.trials;
    try {
      if (!disagree(inst, p)) {
        ++r.agree;
        continue;
      }
    } catch (const ResourceLimitError&) {
      ++r.skipped;
      continue;
    }
    auto [mi, mp] = detail::minimise(inst, p, disagree);
    r.dumped.push_back(detail::dump(opt, r.name, t, mi, mp));
  }
  return r;
}

/// Quantified-formula pipeline against partition enumeration.
inline SuiteReport cs_suite(const Options& opt) {
  SuiteReport r{"cs"};
  std::mt19937_64 rng(opt.seed + 1);
  const bool flip = opt.inject_fault == r.name;
  auto disagree = [flip](const AshgInstance& inst, const std::optional<Partition>&) {
    auto want = solve_cs_bruteforce(inst).verdict;
    if (flip) want = want == CsVerdict::Exists ? CsVerdict::NotExists : CsVerdict::Exists;
    return solve_cs(inst).result.verdict != want;
  };
  for (int t = 0; t < opt.trials; ++t) {
    int n = detail::uniform(rng, 1, opt.cs_max_n);
    auto inst = detail::random_instance(rng, n, 0.5, 2, false);
    ++r.trials;
    try {
      if (!disagree(inst, std::nullopt)) {
        ++r.agree;
        continue;
      }
    } catch (const ResourceLimitError&) {
      ++r.skipped;
      continue;
    }
    auto [mi, mp] = detail::minimise(inst, std::nullopt, disagree);
    r.dumped.push_back(detail::dump(opt, r.name, t, mi, mp));
  }
  return r;
}

/// Formula pipeline against exhaustive evaluation.
inline SuiteReport qbf_suite(const Options& opt) {
  SuiteReport r{"qbf"};
  std::mt19937_64 rng(opt.seed + 2);
  const bool flip = opt.inject_fault == r.name;
  for (int t = 0; t < opt.trials; ++t) {
    int nx = detail::uniform(rng, 1, 5), ny = detail::uniform(rng, 1, 5);
    auto phi = random_e3cnffdnf(rng, nx, ny, detail::uniform(rng, 0, 6), detail::uniform(rng, 1, 5));
    ++r.trials;
    try {
      bool want = eval_bruteforce(phi).sat != flip;
      if (solve_e3cnffdnf(phi).sat == want) {
        ++r.agree;
        continue;
      }
    } catch (const ResourceLimitError&) {
      ++r.skipped;
      continue;
    }
    std::filesystem::create_directories(opt.dump_dir);
    auto path = (std::filesystem::path(opt.dump_dir) / ("qbf-" + std::to_string(t) + ".qdimacs")).string();
    std::ofstream(path) << to_qdimacs(e3cnffdnf_to_ea(phi));
    r.dumped.push_back(path);
  }
  return r;
}

/// Greedy pairing against the size-two coalition scan.
inline SuiteReport kcore_suite(const Options& opt) {
  SuiteReport r{"2core"};
  std::mt19937_64 rng(opt.seed + 3);
  const bool flip = opt.inject_fault == r.name;
  for (int t = 0; t < opt.trials; ++t) {
    int n = detail::uniform(rng, 1, 30);
    auto inst = detail::random_instance(rng, n, 0.2, 5, false);
    auto p = greedy_2core(inst);
    ++r.trials;
    if (verify_kcore(inst, p, 2).stable() != flip) {
      ++r.agree;
      continue;
    }
    r.dumped.push_back(detail::dump(opt, r.name, t, inst, p));
  }
  return r;
}

/// Verification reductions against their source problems.
inline SuiteReport reductions_suite(const Options& opt) {
  SuiteReport r{"reductions"};
  std::mt19937_64 rng(opt.seed + 4);
  const bool flip = opt.inject_fault == r.name;
  auto items = [&](int n, int hi) {
    std::vector<Weight> a(n);
    for (auto& x : a) x = detail::uniform(rng, 1, hi);
    return a;
  };
  for (int t = 0; t < opt.trials; ++t) {
    ReductionOutput out;
    bool source_yes = false;
    int k = 0;
    switch (t % 4) {
      case 0: {
        auto a = items(detail::uniform(rng, 1, 6), 6);
        out = gen_partition_csv(a);
        source_yes = source::has_equal_split(a);
        break;
      }
      case 1: {
        auto a = items(detail::uniform(rng, 1, 5), 4);
        int bins = detail::uniform(rng, 1, 2);
        out = gen_binpacking_csv(a, bins);
        source_yes = source::has_perfect_packing(a, bins);
        break;
      }
      case 2: {
        auto g = detail::random_graph(rng, detail::uniform(rng, 1, 5), 0.5);
        int d = detail::uniform(rng, 0, 2), s = detail::uniform(rng, 1, g.n);
        out = gen_bdd_csv(g, d, s);
        source_yes = source::has_bounded_degree_set(g, d, s);
        break;
      }
      default: {
        auto g = detail::random_graph(rng, detail::uniform(rng, 1, 6), 0.5);
        k = 3;
        out = gen_clique_kcsv(g, k);
        source_yes = source::has_clique(g, k);
        break;
      }
    }
    ++r.trials;
    auto got = k ? verify_kcore(out.instance, *out.partition, k).verdict
                 : verify_bruteforce(out.instance, *out.partition).verdict;
    bool blocked = got == Verdict::Unstable;
    if ((blocked == source_yes) != flip) {
      ++r.agree;
      continue;
    }
    r.dumped.push_back(detail::dump(opt, r.name, t, out.instance, out.partition));
  }
  return r;
}

inline const std::map<std::string, std::function<SuiteReport(const Options&)>>& suites() {
  static const std::map<std::string, std::function<SuiteReport(const Options&)>> all{
      {"csv", csv_suite}, {"cs", cs_suite}, {"qbf", qbf_suite}, {"2core", kcore_suite}, {"reductions", reductions_suite}};
  return all;
}

}  // namespace ashg::crossval
