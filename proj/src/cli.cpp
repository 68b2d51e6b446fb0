#include "tradenet/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tradenet/audit.hpp"
#include "tradenet/io.hpp"
#include "tradenet/reduce.hpp"
#include "tradenet/solve.hpp"

namespace tn {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

enum class Verdict { yes, no, unknown };

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown-budget";
  }
  return "?";
}

// Exit codes are a function of the verdict alone.
int exit_for(Verdict v) {
  switch (v) {
    case Verdict::yes: return kExitYes;
    case Verdict::no: return kExitNo;
    case Verdict::unknown: return kExitUnknown;
  }
  return kExitInternal;
}

unsigned default_budget_bits() {
  if (const char* env = std::getenv("TN_BUDGET_BITS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 62) return static_cast<unsigned>(v);
  }
  return 22;
}

Concept parse_concept(const std::string& s) {
  if (s == "trail") return Concept::trail;
  if (s == "weak-trail") return Concept::weak_trail;
  if (s == "pc") return Concept::path_or_cycle;
  if (s == "stable") return Concept::stable;
  throw SchemaError("unknown concept: " + s);
}

struct Report {
  std::string command;
  std::vector<std::string> argv;
  Verdict verdict = Verdict::yes;
  json extra = json::object();
  std::optional<json> witness;
  std::optional<std::string> reason;
  json counters = json::object();
  double wall_ms = 0.0;

  json to_json() const {
    json doc{{"schema_version", kSchemaVersion},
             {"command", command},
             {"argv", argv},
             {"verdict", to_string(verdict)},
             {"counters", counters},
             {"wall_ms", wall_ms}};
    doc["witness"] = witness ? *witness : json(nullptr);
    doc["reason"] = reason ? json(*reason) : json(nullptr);
    for (const auto& [k, v] : extra.items()) doc[k] = v;
    return doc;
  }

  void print(bool as_json) const {
    if (as_json) {
      std::cout << to_json().dump(2) << "\n";
      return;
    }
    std::cout << command << ": verdict=" << to_string(verdict);
    if (reason) std::cout << "  (" << *reason << ")";
    std::cout << "\n";
    if (witness) std::cout << "witness: " << witness->dump() << "\n";
    if (!extra.empty()) std::cout << "report: " << extra.dump() << "\n";
    std::cout << "counters: " << counters.dump() << "  wall_ms=" << wall_ms << "\n";
  }
};

json ids_of(const TradingNetwork& net, const std::vector<ContractIndex>& seq) {
  json a = json::array();
  for (ContractIndex c : seq) a.push_back(net.contract_id(c));
  return a;
}

json witness_json(const TradingNetwork& net, const ContractSet& A,
                  const BlockReport& block) {
  json evidence = json::array();
  for (const auto& ev : block_evidence(net, A, block)) {
    json row{{"firm", net.firm_id(ev.firm)},
             {"contracts", ids_of(net, ev.checked.indices())},
             {"accepted", ev.accepted}};
    evidence.push_back(std::move(row));
  }
  return {{"kind", to_string(block.kind)},
          {"contracts", ids_of(net, block.sequence)},
          {"evidence", std::move(evidence)}};
}

std::optional<std::string> unacceptable_reason(const TradingNetwork& net,
                                               const ContractSet& A) {
  for (FirmIndex f = 0; f < net.firm_count(); ++f)
    if (!net.is_individually_rational(A, f))
      return "outcome is not individually rational for firm " + net.firm_id(f);
  return std::nullopt;
}

json counters_json(const TradingNetwork& net, std::uint64_t steps,
                   std::uint64_t rounds = 0, std::uint64_t rejections = 0) {
  return {{"choice_evaluations", net.choice_evaluations()},
          {"oracle_queries", net.oracle_queries()},
          {"steps", steps},
          {"rounds", rounds},
          {"rejections", rejections}};
}

struct CliOptions {
  std::string net_path, outcome_path, out_path, map_path, digraph_path;
  std::string concept_name = "stable";
  std::string property = "irc";
  std::string firm;
  std::vector<std::int64_t> weights;
  unsigned budget_bits = default_budget_bits();
  std::size_t audit_cap = 12;
  bool as_json = false;
  std::uint64_t seed = 1;
  std::size_t n_firms = 6;
  double density = 0.3;
  std::uint32_t oracle_n = 2;
};

int cmd_solve(const CliOptions& o, Report& rep) {
  TradingNetwork net = load_network(o.net_path);
  net.reset_counters();
  auto da = deferred_acceptance(net);
  rep.verdict = Verdict::yes;
  rep.witness = json{{"kind", "trail_stable_outcome"},
                     {"contracts", ids_of(net, da.outcome.indices())}};
  rep.counters = counters_json(net, 0, da.rounds, da.rejections);
  if (!o.out_path.empty()) save_outcome(net, da.outcome, o.out_path);
  return exit_for(rep.verdict);
}

int cmd_check(const CliOptions& o, Report& rep) {
  TradingNetwork net = load_network(o.net_path);
  ContractSet a = load_outcome(o.outcome_path, net);
  Concept cpt = parse_concept(o.concept_name);
  SearchLimits limits = SearchLimits::from_bits(o.budget_bits);
  net.reset_counters();
  rep.extra["concept"] = o.concept_name;

  if (auto reason = unacceptable_reason(net, a)) {
    rep.verdict = Verdict::no;
    rep.reason = reason;
    rep.counters = counters_json(net, 0);
    return exit_for(rep.verdict);
  }

  SearchStatus status = SearchStatus::exhausted;
  std::optional<BlockReport> block;
  std::uint64_t steps = 0;
  switch (cpt) {
    case Concept::trail: {
      auto trail = find_locally_blocking_trail(net, a);
      status = trail ? SearchStatus::found : SearchStatus::exhausted;
      if (trail) {
        ContractSet member = net.empty_set();
        for (ContractIndex c : *trail) member.insert(c);
        block = BlockReport{BlockKind::locally_blocking_trail, *trail, member};
      }
      break;
    }
    case Concept::weak_trail: {
      auto res = find_sequentially_blocking_trail(net, a, limits);
      status = res.status;
      steps = res.steps;
      if (res.trail) {
        ContractSet member = net.empty_set();
        for (ContractIndex c : *res.trail) member.insert(c);
        block = BlockReport{BlockKind::sequentially_blocking_trail, *res.trail, member};
      }
      break;
    }
    case Concept::path_or_cycle: {
      auto res = find_blocking_path_or_cycle(net, a, limits);
      status = res.status;
      steps = res.steps;
      block = res.block;
      break;
    }
    case Concept::stable: {
      auto res = find_blocking_set(net, a, BlockingSetOptions{limits, true});
      status = res.status;
      steps = res.steps;
      block = res.block;
      break;
    }
  }

  rep.counters = counters_json(net, steps);
  if (status == SearchStatus::capped) {
    rep.verdict = Verdict::unknown;
    rep.reason = "search budget exceeded (2^" + std::to_string(o.budget_bits) + " steps)";
  } else if (status == SearchStatus::found) {
    if (!replay_block(net, a, *block))
      throw ModelError("internal: witness failed replay");
    rep.verdict = Verdict::no;
    rep.witness = witness_json(net, a, *block);
  } else {
    rep.verdict = Verdict::yes;
  }
  return exit_for(rep.verdict);
}

int cmd_exists(const CliOptions& o, Report& rep) {
  TradingNetwork net = load_network(o.net_path);
  Concept cpt = parse_concept(o.concept_name);
  SearchLimits limits = SearchLimits::from_bits(o.budget_bits);
  net.reset_counters();
  rep.extra["concept"] = o.concept_name;

  auto res = exists_outcome(net, cpt, limits);
  rep.counters = counters_json(net, res.steps);
  switch (res.status) {
    case SearchStatus::found: {
      rep.verdict = Verdict::yes;
      rep.witness = json{{"kind", "outcome"},
                         {"contracts", ids_of(net, res.witness->indices())}};
      if (!o.out_path.empty()) save_outcome(net, *res.witness, o.out_path);
      break;
    }
    case SearchStatus::exhausted:
      rep.verdict = Verdict::no;
      rep.reason = "no outcome satisfies the concept (exhaustive)";
      break;
    case SearchStatus::capped:
      rep.verdict = Verdict::unknown;
      rep.reason = "enumeration budget exceeded";
      break;
  }
  return exit_for(rep.verdict);
}

int cmd_reduce_bipartition(const CliOptions& o, Report& rep) {
  Digraph d = load_digraph(o.digraph_path);
  auto red = reduce_acyclic_bipartition(d);
  if (!o.out_path.empty())
    save_network(red.network, o.out_path);
  else
    std::cout << network_to_json(red.network).dump(2) << "\n";
  if (!o.map_path.empty())
    write_text_file(o.map_path, reduction_map_to_json(red.map).dump(2) + "\n");
  rep.verdict = Verdict::yes;
  rep.extra["firms"] = red.network.firm_count();
  rep.extra["contracts"] = red.network.contract_count();
  return exit_for(rep.verdict);
}

int cmd_reduce_partition(const CliOptions& o, Report& rep) {
  PartitionInstance inst{o.weights};
  auto red = reduce_partition_to_instability(inst);
  if (!o.out_path.empty())
    save_network(red.network, o.out_path);
  else
    std::cout << network_to_json(red.network).dump(2) << "\n";
  if (!o.map_path.empty())
    write_text_file(o.map_path, partition_map_to_json(red, inst).dump(2) + "\n");
  rep.verdict = Verdict::yes;
  rep.extra["firms"] = red.network.firm_count();
  rep.extra["contracts"] = red.network.contract_count();
  return exit_for(rep.verdict);
}

int cmd_audit(const CliOptions& o, Report& rep) {
  TradingNetwork net = load_network(o.net_path);
  net.reset_counters();
  AuditOptions opts;
  opts.max_contracts = o.audit_cap;
  std::vector<FirmIndex> targets;
  if (!o.firm.empty())
    targets.push_back(net.firm_index(o.firm));
  else
    for (FirmIndex f = 0; f < net.firm_count(); ++f) targets.push_back(f);

  json findings = json::array();
  for (FirmIndex f : targets) {
    if (o.property == "irc") {
      for (const auto& v : audit_irc(net, f, opts)) {
        findings.push_back({{"firm", net.firm_id(f)},
                            {"offered", ids_of(net, v.offered.indices())},
                            {"reduced", ids_of(net, v.reduced.indices())},
                            {"chosen_offered", ids_of(net, v.chosen_offered.indices())},
                            {"chosen_reduced", ids_of(net, v.chosen_reduced.indices())}});
      }
    } else if (o.property == "full-sub") {
      for (const auto& v : audit_full_substitutability(net, f, opts)) {
        findings.push_back({{"firm", net.firm_id(f)},
                            {"clause", to_string(v.clause)},
                            {"small", ids_of(net, v.small.indices())},
                            {"big", ids_of(net, v.big.indices())},
                            {"context", ids_of(net, v.context.indices())},
                            {"witness", net.contract_id(v.witness)}});
      }
    } else {
      throw SchemaError("unknown property: " + o.property);
    }
  }
  rep.extra["property"] = o.property;
  rep.extra["violations"] = findings;
  rep.counters = counters_json(net, 0);
  rep.verdict = findings.empty() ? Verdict::yes : Verdict::no;
  if (!findings.empty())
    rep.reason = std::to_string(findings.size()) + " violation(s) found";
  return exit_for(rep.verdict);
}

int cmd_experiment(const CliOptions& o, Report& rep) {
  auto report = oracle_lower_bound_experiment(o.oracle_n);
  rep.verdict = Verdict::yes;
  json queries = json::array();
  for (const auto& q : report.distinguishing_queries) queries.push_back(q);
  rep.extra = {{"n", report.n},
               {"candidate_count", report.candidate_count},
               {"required_queries", report.required_queries},
               {"distinguishing_queries", std::move(queries)},
               {"family_verified", report.family_verified},
               {"verdict_flips", report.verdict_flips},
               {"unique_blocks", report.unique_blocks},
               {"searcher_queries_plain", report.searcher_queries_plain},
               {"searcher_distinct_distinguishing",
                report.searcher_distinct_distinguishing}};
  if (!report.family_verified || !report.verdict_flips || !report.unique_blocks)
    throw ModelError("oracle experiment self-check failed");
  return exit_for(rep.verdict);
}

int cmd_gen_flow(const CliOptions& o, Report& rep) {
  TradingNetwork net = random_flow_network(o.seed, o.n_firms, o.density);
  if (!o.out_path.empty())
    save_network(net, o.out_path);
  else
    std::cout << network_to_json(net).dump(2) << "\n";
  rep.verdict = Verdict::yes;
  rep.extra["firms"] = net.firm_count();
  rep.extra["contracts"] = net.contract_count();
  rep.extra["is_flow_network"] = net.is_flow_network();
  return exit_for(rep.verdict);
}

int cmd_export_dot(const CliOptions& o, Report& rep) {
  TradingNetwork net = load_network(o.net_path);
  std::optional<ContractSet> a;
  if (!o.outcome_path.empty()) a = load_outcome(o.outcome_path, net);
  std::string dot = export_dot(net, a ? &*a : nullptr);
  if (!o.out_path.empty())
    write_text_file(o.out_path, dot);
  else
    std::cout << dot;
  rep.verdict = Verdict::yes;
  return exit_for(rep.verdict);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"exact stability workbench for trading networks with bilateral contracts"};
  app.require_subcommand(1);
  CliOptions o;

  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--budget-bits", o.budget_bits,
                    "cap exhaustive searches at 2^bits steps");
    cmd->add_flag("--json", o.as_json, "machine-readable report");
  };

  auto* solve = app.add_subcommand("solve", "compute a trail-stable outcome");
  solve->add_option("--net", o.net_path, "network JSON")->required();
  solve->add_option("--out", o.out_path, "write the outcome JSON here");
  add_budget(solve);

  auto* check = app.add_subcommand("check", "verify an outcome against a concept");
  check->add_option("--net", o.net_path)->required();
  check->add_option("--outcome", o.outcome_path)->required();
  check->add_option("--concept", o.concept_name, "trail|weak-trail|pc|stable")->required();
  add_budget(check);

  auto* exists = app.add_subcommand("exists", "decide whether a concept-satisfying outcome exists");
  exists->add_option("--net", o.net_path)->required();
  exists->add_option("--concept", o.concept_name, "trail|weak-trail|pc|stable")->required();
  exists->add_option("--out", o.out_path, "write the witness outcome here");
  add_budget(exists);

  auto* reduce = app.add_subcommand("reduce", "instance generators");
  reduce->require_subcommand(1);
  auto* red_ab = reduce->add_subcommand("acyclic-bipartition",
                                        "digraph to flow-network instance");
  red_ab->add_option("--digraph", o.digraph_path, "digraph JSON")->required();
  red_ab->add_option("--out", o.out_path, "write the network JSON here");
  red_ab->add_option("--map", o.map_path, "write the id correspondence here");
  add_budget(red_ab);
  auto* red_pt = reduce->add_subcommand("partition", "weight list to two-firm instance");
  red_pt->add_option("--weights", o.weights, "non-decreasing positive integers")
      ->required()
      ->delimiter(',');
  red_pt->add_option("--out", o.out_path, "write the network JSON here");
  red_pt->add_option("--map", o.map_path, "write the id correspondence here");
  add_budget(red_pt);

  auto* audit = app.add_subcommand("audit", "exhaustive choice-function audits");
  audit->add_option("--net", o.net_path)->required();
  audit->add_option("--property", o.property, "irc|full-sub")->required();
  audit->add_option("--firm", o.firm, "restrict to one firm");
  audit->add_option("--cap", o.audit_cap, "per-firm contract cap (default 12)");
  add_budget(audit);

  auto* experiment = app.add_subcommand("experiment", "built-in experiments");
  experiment->require_subcommand(1);
  auto* oracle = experiment->add_subcommand("oracle-calls",
                                            "query lower bound for stability verification");
  oracle->add_option("--n", o.oracle_n, "half the number of counted contracts (1..4)")
      ->required();
  add_budget(oracle);

  auto* gen = app.add_subcommand("gen", "instance sampling");
  gen->require_subcommand(1);
  auto* gen_flow = gen->add_subcommand("flow", "seeded random flow network");
  gen_flow->add_option("--seed", o.seed)->required();
  gen_flow->add_option("--firms", o.n_firms)->required();
  gen_flow->add_option("--density", o.density)->required();
  gen_flow->add_option("--out", o.out_path, "write the network JSON here");
  add_budget(gen_flow);

  auto* dot = app.add_subcommand("export-dot", "render the network as DOT");
  dot->add_option("--net", o.net_path)->required();
  dot->add_option("--outcome", o.outcome_path, "style members solid, the rest dashed");
  dot->add_option("--out", o.out_path, "write the DOT text here");
  add_budget(dot);

  std::vector<const char*> argv;
  argv.push_back("tradenet");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Report rep;
  rep.argv = args;
  auto t0 = Clock::now();
  int code = kExitInternal;
  try {
    if (app.got_subcommand(solve)) {
      rep.command = "solve";
      code = cmd_solve(o, rep);
    } else if (app.got_subcommand(check)) {
      rep.command = "check";
      code = cmd_check(o, rep);
    } else if (app.got_subcommand(exists)) {
      rep.command = "exists";
      code = cmd_exists(o, rep);
    } else if (app.got_subcommand(reduce)) {
      rep.command = "reduce";
      code = reduce->got_subcommand(red_ab) ? cmd_reduce_bipartition(o, rep)
                                            : cmd_reduce_partition(o, rep);
    } else if (app.got_subcommand(audit)) {
      rep.command = "audit";
      code = cmd_audit(o, rep);
    } else if (app.got_subcommand(experiment)) {
      rep.command = "experiment oracle-calls";
      code = cmd_experiment(o, rep);
    } else if (app.got_subcommand(gen)) {
      rep.command = "gen flow";
      code = cmd_gen_flow(o, rep);
    } else if (app.got_subcommand(dot)) {
      rep.command = "export-dot";
      code = cmd_export_dot(o, rep);
    }
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const SchemaError& e) {
    std::cerr << "schema: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    std::cerr << "model: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << "\n";
    return kExitInternal;
  }
  rep.wall_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  rep.print(o.as_json);
  return code;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace tn
