/*
 * Copyright 2026 The ashg authors
 * License: Apache License 2.0
 */
// ashg: verify, solve, gen, decompose, crossval.
// Exit codes: 0 / 1 verdict, 2 usage or input error, 3 resource cap.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ashg/cs.hpp"
#include "ashg/csv.hpp"
#include "ashg/generators.hpp"
#include "ashg/kcore.hpp"
#include "ashg/treedecomp.hpp"
#include "crossval.hpp"
#include "json.hpp"

using namespace ashg;
using json = nlohmann::json;

namespace {

constexpr int kExitYes = 0, kExitNo = 1, kExitUsage = 2, kExitCap = 3;

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

// Run report: summary line on stderr, full JSON when --report is given.
struct Report {
  json doc = json::object();
  std::string path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void stats(const SolverStats& s) {
    doc["counters"] = {{"nodes", s.nodes}, {"states", s.states}, {"peak_states", s.peak_states}};
  }

  int finish(int code) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    doc["exit"] = code;
    doc["seconds"] = secs;
    std::cerr << "ashg: " << doc.value("verdict", std::string("done"));
    if (doc.contains("cap")) std::cerr << " (cap " << doc["cap"].get<std::string>() << ")";
    std::fprintf(stderr, " in %.3f s\n", secs);
    if (!path.empty()) write_file(path, doc.dump(2) + "\n");
    return code;
  }
};

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string instance, partition, algo = "brute", td, signature = "value";
  std::optional<int> k;
  std::uint64_t node_cap = BruteForceLimits{}.node_cap;
  std::uint64_t state_cap = TreewidthLimits{}.state_cap;
  int max_cover = VertexCoverLimits{}.max_cover;
};

int run_verify(const VerifyArgs& a, Report& rep) {
  auto inst = parse_instance(read_file(a.instance));
  auto p = parse_partition(read_file(a.partition), inst);
  if (a.k && a.algo != "brute") throw UsageError("--k is only supported with --algo brute");
  VerificationResult res;
  if (a.algo == "brute") {
    res = verify_bruteforce(inst, p, a.k, {a.node_cap});
  } else if (a.algo == "tree") {
    res = verify_tree(inst, p);
  } else if (a.algo == "tw") {
    TreeDecomposition td;
    if (a.td.empty()) {
      td = heuristic_decompose(inst);
      rep.doc["decomposition"] = "heuristic";
    } else {
      td = read_td(read_file(a.td), inst);
      rep.doc["decomposition"] = a.td;
    }
    rep.doc["width"] = td.width();
    auto mode = a.signature == "edgeset" ? SignatureMode::EdgeSet : SignatureMode::Value;
    res = verify_treewidth(inst, p, make_nice(td), mode, {a.state_cap});
  } else {
    VertexCoverLimits lim;
    lim.max_cover = a.max_cover;
    res = verify_vertexcover(inst, p, std::nullopt, lim);
  }
  rep.stats(res.stats);
  rep.doc["verdict"] = to_string(res.verdict);
  if (res.stable()) return kExitYes;
  std::cout << emit_coalition(*res.witness);
  rep.doc["witness"] = res.witness->members();
  return kExitNo;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string instance, algo = "brute", td, emit_qdimacs, emit_dimacs;
  std::optional<int> k;
  int max_vertices = PartitionSearchLimits{}.max_vertices;
  int max_degree = EncodeLimits{}.max_degree;
  std::uint64_t state_cap = SatLimits{}.state_cap;
};

int run_solve(const SolveArgs& a, Report& rep) {
  auto inst = parse_instance(read_file(a.instance));
  CsResult res;
  if (a.algo == "brute") {
    if (!a.emit_qdimacs.empty() || !a.emit_dimacs.empty()) throw UsageError("formula dumps need --algo qbf");
    if (a.k && *a.k <= 2) {
      if (*a.k < 1) throw UsageError("--k must be positive");
      res.verdict = CsVerdict::Exists;
      res.partition = greedy_2core(inst);
      res.method = "greedy-2core";
    } else if (a.k) {
      res = solve_kcs_bruteforce(inst, *a.k, {a.max_vertices});
    } else {
      res = solve_cs_bruteforce(inst, {a.max_vertices});
    }
    rep.doc["counters"] = {{"partitions", res.partitions_checked}};
  } else {
    if (a.k) throw UsageError("--k is only supported with --algo brute");
    std::optional<TreeDecomposition> td;
    if (!a.td.empty()) td = read_td(read_file(a.td), inst);
    CsPipelineOptions opt;
    opt.encode.max_degree = a.max_degree;
    opt.qbf.sat.state_cap = a.state_cap;
    opt.qbf.keep_formulas = !a.emit_qdimacs.empty() || !a.emit_dimacs.empty();
    auto r = solve_cs(inst, td, opt);
    if (!a.emit_qdimacs.empty()) write_file(a.emit_qdimacs, r.qdimacs);
    if (!a.emit_dimacs.empty()) write_file(a.emit_dimacs, r.dimacs);
    rep.doc["counters"] = {{"cnf_clauses", r.stats.cnf_clauses},     {"dnf_terms", r.stats.dnf_terms},
                           {"incidence_width", r.stats.incidence_width}, {"sat_vars", r.stats.qbf.cnf_vars},
                           {"sat_clauses", r.stats.qbf.cnf_clauses},  {"sat_states", r.stats.qbf.sat_states}};
    res = std::move(r.result);
  }
  rep.doc["method"] = res.method;
  rep.doc["verdict"] = to_string(res.verdict);
  if (!res.exists()) return kExitNo;
  // never print a partition that does not check out
  auto check = a.k ? verify_kcore(inst, *res.partition, *a.k)
                   : (inst.size() <= 24 ? verify_bruteforce(inst, *res.partition)
                                        : verify_treewidth(inst, *res.partition, make_nice(heuristic_decompose(inst)),
                                                           SignatureMode::Value));
  if (!check.stable()) throw std::logic_error("solver returned a partition that is blocked");
  std::cout << emit_partition(*res.partition);
  return kExitYes;
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string out;
  std::vector<Weight> items, a, b;
  std::string graph, formula;
  std::optional<int> k, dstar, s;
  std::optional<std::uint32_t> chosen;
  std::vector<int> coloring;
  std::vector<int> assignment;  // DIMACS literals
  Weight rho = -16;
};

Graph load_graph(const std::string& path) {
  if (path.empty()) throw UsageError("--graph is required");
  return read_gr(read_file(path));
}

int write_outputs(const ReductionOutput& out, const std::string& prefix, Report& rep) {
  json files = json::array();
  auto put = [&](const std::string& ext, const std::string& text) {
    write_file(prefix + ext, text);
    files.push_back(prefix + ext);
  };
  put(".ashg", emit_instance(out.instance));
  if (out.partition) put(".part", emit_partition(*out.partition));
  if (out.decomposition) put(".td", emit_td(*out.decomposition, out.instance.size()));
  put(".prov", emit_provenance(out));
  rep.doc["files"] = files;
  rep.doc["vertices"] = out.instance.size();
  rep.doc["edges"] = out.instance.edge_count();
  if (out.expected_verdict) rep.doc["expected"] = to_string(*out.expected_verdict);
  if (out.expected_core) rep.doc["expected"] = to_string(*out.expected_core);
  if (out.k) rep.doc["k"] = *out.k;
  for (const auto& f : files) std::cerr << "wrote " << f.get<std::string>() << "\n";
  return kExitYes;
}

ReductionOutput gen_family(const std::string& family, const GenArgs& g) {
  auto need = [](const auto& opt, const char* flag) {
    if (!opt) throw UsageError(std::string(flag) + " is required");
    return *opt;
  };
  if (family == "gadget") {
    auto [inst, h] = gadget_h(g.rho);
    ReductionOutput out;
    out.instance = inst;
    out.provenance = {"h", "h1", "h2", "h3", "h4", "h5"};
    out.gadgets = {h};
    if (g.rho < -15) out.expected_core = CsVerdict::NotExists;
    return out;
  }
  if (family == "partition-csv") return gen_partition_csv(g.items);
  if (family == "binpacking-csv") return gen_binpacking_csv(g.items, need(g.k, "--k"));
  if (family == "bdd-csv") return gen_bdd_csv(load_graph(g.graph), need(g.dstar, "--dstar"), need(g.s, "--s"));
  if (family == "clique-kcsv") return gen_clique_kcsv(load_graph(g.graph), need(g.k, "--k"));
  if (family == "eapartition-cs") return gen_eapartition_cs(g.a, g.b, g.chosen);
  if (family == "3col-kcs") {
    auto host = load_graph(g.graph);
    std::optional<std::vector<int>> col;
    if (!g.coloring.empty()) {
      col = g.coloring;
      for (auto& c : *col) --c;  // 1-based on the command line
    } else if (host.n <= 20) {
      col = source::three_coloring(host);
    }
    return gen_3col_kcs(host, col);
  }
  if (family == "33sat-cs") {
    if (g.formula.empty()) throw UsageError("--formula is required");
    auto phi = parse_dimacs(read_file(g.formula));
    std::optional<std::vector<char>> val;
    if (!g.assignment.empty()) {
      val = std::vector<char>(static_cast<std::size_t>(phi.num_vars) + 1, 0);
      for (int l : g.assignment) {
        if (l == 0 || var_of(l) > phi.num_vars) throw UsageError("assignment literal out of range");
        (*val)[var_of(l)] = l > 0;
      }
    } else if (phi.num_vars <= 22) {
      val = source::satisfying_assignment(phi);
    }
    return gen_33sat_cs(phi, val);
  }
  throw UsageError("unknown family '" + family + "'");
}

// --- decompose -------------------------------------------------------------

struct DecomposeArgs {
  std::string instance, graph, heuristic = "min-fill", check;
};

int run_decompose(const DecomposeArgs& a, Report& rep) {
  if (a.instance.empty() == a.graph.empty()) throw UsageError("give exactly one of --instance or --graph");
  Graph g = a.instance.empty() ? read_gr(read_file(a.graph))
                               : Graph::from_instance(parse_instance(read_file(a.instance)));
  if (!a.check.empty()) {
    auto td = read_td(read_file(a.check), g.n);
    auto r = validate_td(g, td);
    rep.doc["width"] = td.width();
    rep.doc["verdict"] = r.ok() ? "valid" : "invalid";
    if (!r.ok()) {
      std::cerr << "ashg: " << r.message << "\n";
      return kExitNo;
    }
    return kExitYes;
  }
  auto td = heuristic_decompose(g, a.heuristic == "min-degree" ? Heuristic::MinDegree : Heuristic::MinFill);
  rep.doc["width"] = td.width();
  rep.doc["verdict"] = "width " + std::to_string(td.width());
  std::cout << emit_td(td, g.n);
  return kExitYes;
}

// --- crossval --------------------------------------------------------------

int run_crossval(const crossval::Options& opt, const std::vector<std::string>& names, Report& rep) {
  bool all_ok = true;
  json rows = json::array();
  std::printf("%-12s %7s %7s %7s %9s\n", "suite", "trials", "agree", "skipped", "mismatch");
  for (const auto& name : names) {
    auto it = crossval::suites().find(name);
    if (it == crossval::suites().end()) throw UsageError("unknown suite '" + name + "'");
    auto r = it->second(opt);
    int bad = r.trials - r.agree - r.skipped;
    std::printf("%-12s %7d %7d %7d %9d\n", r.name.c_str(), r.trials, r.agree, r.skipped, bad);
    std::fflush(stdout);
    for (const auto& d : r.dumped) std::cerr << "counterexample: " << d << "\n";
    rows.push_back({{"suite", r.name}, {"trials", r.trials}, {"agree", r.agree}, {"skipped", r.skipped},
                    {"dumped", r.dumped}});
    all_ok = all_ok && r.ok();
  }
  rep.doc["suites"] = rows;
  rep.doc["verdict"] = all_ok ? "agree" : "disagree";
  return all_ok ? kExitYes : kExitNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core stability toolkit for additively separable hedonic games"};
  app.require_subcommand(1);
  Report rep;
  app.add_option("--report", rep.path, "Write a JSON run report to this file");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a partition for blocking coalitions");
  verify->add_option("-i,--instance", va.instance, "Instance file")->required();
  verify->add_option("-p,--partition", va.partition, "Partition file")->required();
  verify->add_option("-a,--algo", va.algo, "brute | tree | tw | vc")
      ->check(CLI::IsMember({"brute", "tree", "tw", "vc"}));
  verify->add_option("-k,--k", va.k, "Only coalitions of at most k agents (brute)");
  verify->add_option("--td", va.td, "Tree decomposition (PACE .td) for --algo tw");
  verify->add_option("--signature", va.signature, "value | edgeset")->check(CLI::IsMember({"value", "edgeset"}));
  verify->add_option("--node-cap", va.node_cap, "Subset enumeration cap (brute)");
  verify->add_option("--state-cap", va.state_cap, "DP states per node (tw)");
  verify->add_option("--max-cover", va.max_cover, "Largest vertex cover tried (vc)");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Decide whether a core stable partition exists");
  solve->add_option("-i,--instance", sa.instance, "Instance file")->required();
  solve->add_option("-a,--algo", sa.algo, "brute | qbf")->check(CLI::IsMember({"brute", "qbf"}));
  solve->add_option("-k,--k", sa.k, "Coalition size bound (brute)");
  solve->add_option("--td", sa.td, "Tree decomposition (PACE .td) for --algo qbf");
  solve->add_option("--emit-qdimacs", sa.emit_qdimacs, "Write the quantified formula here");
  solve->add_option("--emit-dimacs", sa.emit_dimacs, "Write the compiled CNF here");
  solve->add_option("--max-vertices", sa.max_vertices, "Partition enumeration limit (brute)");
  solve->add_option("--max-degree", sa.max_degree, "Encoder degree limit (qbf)");
  solve->add_option("--state-cap", sa.state_cap, "SAT DP states per node (qbf)");

  GenArgs ga;
  std::string family;
  auto* gen = app.add_subcommand("gen", "Emit a reduction instance");
  gen->add_option("family", family,
                  "gadget | partition-csv | binpacking-csv | bdd-csv | clique-kcsv | eapartition-cs | 3col-kcs | "
                  "33sat-cs")
      ->required();
  gen->add_option("items", ga.items, "Item sizes (partition-csv, binpacking-csv)");
  gen->add_option("-o,--out", ga.out, "Output prefix (default: family name)");
  gen->add_option("-k,--k", ga.k, "Bins (binpacking-csv) or clique size (clique-kcsv)");
  gen->add_option("--graph", ga.graph, "Source graph, PACE .gr");
  gen->add_option("--dstar", ga.dstar, "Degree bound (bdd-csv)");
  gen->add_option("--s", ga.s, "Set size (bdd-csv)");
  gen->add_option("--a", ga.a, "Existential items (eapartition-cs)");
  gen->add_option("--b", ga.b, "Universal items (eapartition-cs)");
  gen->add_option("--chosen", ga.chosen, "Bit mask over A for the emitted partition (eapartition-cs)");
  gen->add_option("--coloring", ga.coloring, "Colours 1..3 per vertex (3col-kcs)");
  gen->add_option("--formula", ga.formula, "DIMACS CNF (33sat-cs)");
  gen->add_option("--assignment", ga.assignment, "DIMACS literals of a model (33sat-cs)");
  gen->add_option("--rho", ga.rho, "Gadget weight (gadget)");

  DecomposeArgs da;
  auto* decompose = app.add_subcommand("decompose", "Heuristic tree decomposition, or check one");
  decompose->add_option("-i,--instance", da.instance, "Instance file");
  decompose->add_option("--graph", da.graph, "Graph file, PACE .gr");
  decompose->add_option("--heuristic", da.heuristic, "min-fill | min-degree")
      ->check(CLI::IsMember({"min-fill", "min-degree"}));
  decompose->add_option("--check", da.check, "Validate this .td instead of computing one");

  crossval::Options co;
  std::vector<std::string> suites{"csv", "cs", "qbf", "2core", "reductions"};
  auto* cv = app.add_subcommand("crossval", "Run the seeded oracle-agreement suites");
  cv->add_option("--seed", co.seed, "RNG seed");
  cv->add_option("--trials", co.trials, "Trials per suite");
  cv->add_option("--csv-max-n", co.csv_max_n, "Largest instance for the verification suite");
  cv->add_option("--cs-max-n", co.cs_max_n, "Largest instance for the existence suite");
  cv->add_option("--suites", suites, "Subset of csv, cs, qbf, 2core, reductions");
  cv->add_option("--dump", co.dump_dir, "Directory for counterexample files");
  cv->add_option("--inject-fault", co.inject_fault, "Flip one suite's expected verdicts (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  rep.doc["command"] = joined_args(argc, argv);

  try {
    if (*verify) return rep.finish(run_verify(va, rep));
    if (*solve) return rep.finish(run_solve(sa, rep));
    if (*gen) {
      auto out = gen_family(family, ga);
      return rep.finish(write_outputs(out, ga.out.empty() ? family : ga.out, rep));
    }
    if (*decompose) return rep.finish(run_decompose(da, rep));
    return rep.finish(run_crossval(co, suites, rep));
  } catch (const ResourceLimitError& e) {
    std::cerr << "ashg: " << e.what() << "\n";
    rep.doc["verdict"] = "unknown";
    rep.doc["cap"] = e.cap();
    return rep.finish(kExitCap);
  } catch (const Error& e) {
    std::cerr << "ashg: " << e.what() << "\n";
    rep.doc["verdict"] = "error";
    rep.doc["error"] = e.what();
    return rep.finish(kExitUsage);
  }
}
