#include "tradenet/reduce.hpp"

#include <algorithm>
#include <set>

namespace tn {

Digraph::Digraph(std::vector<std::string> vertices,
                 std::vector<std::pair<std::string, std::string>> arcs) {
  std::set<std::string> vs(vertices.begin(), vertices.end());
  if (vs.size() != vertices.size()) throw SchemaError("duplicate vertex");
  vertices_.assign(vs.begin(), vs.end());
  std::set<std::pair<std::size_t, std::size_t>> as;
  for (const auto& [u, v] : arcs)
    as.emplace(vertex_index(u), vertex_index(v));
  arcs_.assign(as.begin(), as.end());
}

std::size_t Digraph::vertex_index(const std::string& v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) throw SchemaError("unknown vertex: " + v);
  return static_cast<std::size_t>(it - vertices_.begin());
}

bool Digraph::induced_acyclic(const std::vector<bool>& keep) const {
  const std::size_t n = vertices_.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : arcs_) {
    if (!keep[u] || !keep[v]) continue;
    if (u == v) return false;  // self-loop is a cycle
    adj[u].push_back(v);
  }
  std::vector<int> color(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (!keep[s] || color[s] != 0) continue;
    color[s] = 1;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj[v].size()) {
        std::size_t w = adj[v][i++];
        if (color[w] == 1) return false;
        if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

BipartitionReduction reduce_acyclic_bipartition(const Digraph& d) {
  std::vector<FirmDecl> firms;
  std::vector<ContractDecl> contracts;
  ReductionMap map;
  map.source = "s";
  map.sink = "t";

  firms.push_back({"s", ChoiceDecl{}});
  firms.push_back({"t", ChoiceDecl{}});

  // Per-firm preference lists, assembled below and attached at the end.
  std::map<std::string, std::vector<std::string>> up_pref, down_pref;
  auto add_contract = [&](const std::string& id, const std::string& seller,
                          const std::string& buyer) {
    contracts.push_back({id, seller, buyer});
  };

  for (const std::string& v : d.vertices()) {
    GadgetIds g;
    g.f_s = v + ":s";
    g.f_a = v + ":a";
    g.f_ap = v + ":ap";
    g.f_b = v + ":b";
    g.f_bp = v + ":bp";
    g.f_t = v + ":t";
    g.c_src = v + ":src";
    g.c_sa = v + ":s>a";
    g.c_sb = v + ":s>b";
    g.c_aap = v + ":a>ap";
    g.c_bbp = v + ":b>bp";
    g.c_apt = v + ":ap>t";
    g.c_bpt = v + ":bp>t";
    g.c_snk = v + ":snk";

    add_contract(g.c_src, "s", g.f_s);
    add_contract(g.c_sa, g.f_s, g.f_a);
    add_contract(g.c_sb, g.f_s, g.f_b);
    add_contract(g.c_aap, g.f_a, g.f_ap);
    add_contract(g.c_bbp, g.f_b, g.f_bp);
    add_contract(g.c_apt, g.f_ap, g.f_t);
    add_contract(g.c_bpt, g.f_bp, g.f_t);
    add_contract(g.c_snk, g.f_t, "t");

    up_pref[g.f_s] = {g.c_src};
    down_pref[g.f_s] = {g.c_sa, g.c_sb};  // stated order: the a-lane first
    up_pref[g.f_t] = {g.c_bpt, g.c_apt};  // stated order: the b-lane first
    down_pref[g.f_t] = {g.c_snk};
    up_pref[g.f_a] = {g.c_sa};  // connector contracts appended below
    down_pref[g.f_a] = {g.c_aap};
    up_pref[g.f_ap] = {g.c_aap};
    down_pref[g.f_ap] = {g.c_apt};
    up_pref[g.f_b] = {g.c_sb};
    down_pref[g.f_b] = {g.c_bbp};
    up_pref[g.f_bp] = {g.c_bbp};
    down_pref[g.f_bp] = {g.c_bpt};

    map.vertices.push_back(v);
    map.gadgets.emplace(v, std::move(g));
  }

  // Connector contracts, ranked below every in-gadget contract.
  for (const auto& [ui, vi] : d.arcs()) {
    const std::string& u = d.vertex_name(ui);
    const std::string& v = d.vertex_name(vi);
    const GadgetIds& gu = map.gadgets.at(u);
    const GadgetIds& gv = map.gadgets.at(v);
    std::string za = u + ">" + v + ":a";
    std::string zb = u + ">" + v + ":b";
    add_contract(za, gu.f_ap, gv.f_a);
    add_contract(zb, gu.f_bp, gv.f_b);
    down_pref[gu.f_ap].push_back(za);
    down_pref[gu.f_bp].push_back(zb);
    up_pref[gv.f_a].push_back(za);
    up_pref[gv.f_b].push_back(zb);
    map.arc_contracts.emplace(std::make_pair(u, v), std::make_pair(za, zb));
  }
  // Complete the partial preference order reproducibly: connector tails in
  // canonical contract-id order. Only lane firms grow past two entries, and
  // their single in-gadget contract stays at the head.
  for (auto* prefs : {&up_pref, &down_pref})
    for (auto& [fid, list] : *prefs)
      if (list.size() > 2) std::sort(list.begin() + 1, list.end());

  for (auto& [fid, ups] : up_pref) {
    ChoiceDecl decl;
    decl.kind = ChoiceKind::flow_based;
    decl.buyer_prefs = ups;
    decl.seller_prefs = down_pref.at(fid);
    firms.push_back({fid, std::move(decl)});
  }

  return {TradingNetwork(std::move(firms), std::move(contracts)), std::move(map)};
}

ContractSet bipartition_to_outcome(const TradingNetwork& net, const ReductionMap& map,
                                   const std::vector<std::string>& q,
                                   const std::vector<std::string>& r) {
  std::set<std::string> qs(q.begin(), q.end()), rs(r.begin(), r.end());
  if (qs.size() + rs.size() != map.vertices.size())
    throw ModelError("bipartition does not cover the vertex set exactly");
  for (const std::string& v : map.vertices)
    if (qs.contains(v) == rs.contains(v))
      throw ModelError("bipartition is not a partition: vertex " + v);

  ContractSet a = net.empty_set();
  auto take = [&](const std::string& id) { a.insert(net.contract_index(id)); };
  for (const std::string& v : map.vertices) {
    const GadgetIds& g = map.gadgets.at(v);
    take(g.c_src);
    take(g.c_snk);
    if (qs.contains(v)) {  // Q saturates the b-lane
      take(g.c_sb);
      take(g.c_bbp);
      take(g.c_bpt);
    } else {  // R saturates the a-lane
      take(g.c_sa);
      take(g.c_aap);
      take(g.c_apt);
    }
  }
  return a;
}

std::pair<std::vector<std::string>, std::vector<std::string>> outcome_to_bipartition(
    const TradingNetwork& net, const ReductionMap& map, const Digraph& d,
    const ContractSet& a) {
  for (const auto& [arc, ids] : map.arc_contracts) {
    if (a.contains(net.contract_index(ids.first)) ||
        a.contains(net.contract_index(ids.second)))
      throw ModelError("outcome uses connector contract of arc " + arc.first + "->" +
                       arc.second + "; it cannot be path-or-cycle stable");
  }
  std::vector<std::string> q, r;
  std::vector<bool> in_q(d.vertex_count(), false);
  for (const std::string& v : map.vertices) {
    const GadgetIds& g = map.gadgets.at(v);
    if (!a.contains(net.contract_index(g.c_aap))) {
      q.push_back(v);
      in_q[d.vertex_index(v)] = true;
    } else {
      r.push_back(v);
    }
  }
  std::vector<bool> in_r(d.vertex_count(), false);
  for (std::size_t i = 0; i < d.vertex_count(); ++i) in_r[i] = !in_q[i];
  if (!d.induced_acyclic(in_q) || !d.induced_acyclic(in_r))
    throw ModelError("recovered bipartition is not acyclic; "
                     "the outcome was not path-or-cycle stable");
  return {std::move(q), std::move(r)};
}

std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>>
solve_acyclic_bipartition(const Digraph& d, std::size_t max_vertices) {
  const std::size_t n = d.vertex_count();
  if (n > max_vertices)
    throw BudgetError("acyclic bipartition brute force capped at " +
                      std::to_string(max_vertices) + " vertices");
  std::vector<bool> in_q(n), in_r(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      in_r[i] = (mask >> i) & 1;  // bit set: vertex goes to R
      in_q[i] = !in_r[i];
    }
    if (!d.induced_acyclic(in_q) || !d.induced_acyclic(in_r)) continue;
    std::vector<std::string> q, r;
    for (std::size_t i = 0; i < n; ++i)
      (in_q[i] ? q : r).push_back(d.vertex_name(i));
    return std::make_pair(std::move(q), std::move(r));
  }
  return std::nullopt;
}

namespace {

void validate_partition_instance(const PartitionInstance& inst) {
  if (inst.weights.empty()) throw SchemaError("partition instance needs k >= 1");
  for (std::size_t i = 0; i < inst.weights.size(); ++i) {
    if (inst.weights[i] <= 0) throw SchemaError("partition weights must be positive");
    if (i > 0 && inst.weights[i - 1] > inst.weights[i])
      throw SchemaError("partition weights must be non-decreasing");
  }
}

std::string x_name(std::size_t i) {  // 1-based, zero-padded to two digits
  std::string num = std::to_string(i);
  if (num.size() < 2) num.insert(num.begin(), '0');
  return "x" + num;
}

}  // namespace

PartitionReduction reduce_partition_to_instability(const PartitionInstance& inst) {
  validate_partition_instance(inst);
  const std::size_t k = inst.weights.size();
  if (k > 98) throw SchemaError("partition reduction capped at 98 weights");

  std::vector<ContractDecl> contracts;
  contracts.push_back({"y", "f", "g"});
  std::vector<std::string> x_ids;
  for (std::size_t i = 1; i <= k; ++i) {
    x_ids.push_back(x_name(i));
    contracts.push_back({x_ids.back(), "g", "f"});
  }

  ChoiceDecl f_decl;
  f_decl.kind = ChoiceKind::partition_f;
  ChoiceDecl g_decl;
  g_decl.kind = ChoiceKind::partition_g;
  for (std::size_t i = 0; i < k; ++i) {
    f_decl.weighted.emplace_back(x_ids[i], inst.weights[i]);
    g_decl.weighted.emplace_back(x_ids[i], inst.weights[i]);
  }

  std::vector<FirmDecl> firms;
  firms.push_back({"f", std::move(f_decl)});
  firms.push_back({"g", std::move(g_decl)});
  return {TradingNetwork(std::move(firms), std::move(contracts)), "y", std::move(x_ids)};
}

std::optional<std::vector<std::size_t>> solve_partition(const PartitionInstance& inst,
                                                        std::size_t max_items) {
  validate_partition_instance(inst);
  const std::size_t k = inst.weights.size();
  if (k > max_items)
    throw BudgetError("partition brute force capped at " + std::to_string(max_items) +
                      " weights");
  std::int64_t total = 0;
  for (std::int64_t w : inst.weights) total += w;
  if (total % 2 != 0) return std::nullopt;

  std::vector<std::int64_t> suffix(k + 1, 0);
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + inst.weights[i];

  // Lexicographically first index set: depth-first, smallest index included
  // first.
  std::vector<std::size_t> chosen;
  auto dfs = [&](auto&& self, std::size_t i, std::int64_t sum) -> bool {
    if (2 * sum == total) return true;
    if (i == k || 2 * sum > total || 2 * (sum + suffix[i]) < total) return false;
    chosen.push_back(i);
    if (self(self, i + 1, sum + inst.weights[i])) return true;
    chosen.pop_back();
    return self(self, i + 1, sum);
  };
  if (dfs(dfs, 0, 0)) return chosen;
  return std::nullopt;
}

OracleExperimentReport oracle_lower_bound_experiment(std::uint32_t n) {
  if (n == 0 || n > 4) throw SchemaError("oracle experiment supports 1 <= n <= 4");
  OracleExperimentReport report;
  report.n = n;

  // The plain network: 2n unit weights at g, counting choice at f.
  auto build = [&](std::optional<std::vector<std::string>> hidden) {
    std::vector<ContractDecl> contracts;
    contracts.push_back({"y", "f", "g"});
    std::vector<std::string> xs;
    for (std::size_t i = 1; i <= 2 * n; ++i) {
      xs.push_back(x_name(i));
      contracts.push_back({xs.back(), "g", "f"});
    }
    ChoiceDecl f_decl;
    f_decl.kind = ChoiceKind::oracle_family;
    f_decl.n = n;
    f_decl.hidden = std::move(hidden);
    ChoiceDecl g_decl;
    g_decl.kind = ChoiceKind::partition_g;
    for (const auto& x : xs) g_decl.weighted.emplace_back(x, 1);
    std::vector<FirmDecl> firms;
    firms.push_back({"f", std::move(f_decl)});
    firms.push_back({"g", std::move(g_decl)});
    return TradingNetwork(std::move(firms), std::move(contracts));
  };

  TradingNetwork plain = build(std::nullopt);
  const FirmIndex f_plain = plain.firm_index("f");
  std::vector<std::string> xs;
  for (std::size_t i = 1; i <= 2 * n; ++i) xs.push_back(x_name(i));

  // Enumerate hidden candidates in lexicographic index order.
  std::vector<std::vector<std::size_t>> candidates;
  std::vector<std::size_t> comb(n);
  for (std::size_t i = 0; i < n; ++i) comb[i] = i;
  for (;;) {
    candidates.push_back(comb);
    std::size_t i = n;
    while (i > 0 && comb[i - 1] == 2 * n - n + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  report.candidate_count = candidates.size();
  report.required_queries = candidates.size();

  // Adversary bookkeeping: each variant must answer exactly like the plain
  // choice function except on its own distinguishing query, so any decider
  // that skips a candidate's query cannot separate that variant from the
  // plain one. Verified exhaustively over all offers.
  report.family_verified = true;
  report.verdict_flips = true;
  report.unique_blocks = true;

  ContractSet a0 = plain.empty_set();
  {
    BlockingSetOptions opts;
    plain.reset_counters();
    auto res = find_blocking_set(plain, a0, opts);
    if (res.status != SearchStatus::exhausted) report.verdict_flips = false;
    report.searcher_queries_plain = plain.oracle_queries();
  }

  // Distinct distinguishing offers the real decider evaluated on the plain
  // network: it must have covered all of them to soundly declare stability.
  std::set<std::vector<ContractIndex>> seen_distinguishing;
  {
    TradingNetwork probe = build(std::nullopt);
    auto log = std::make_shared<std::vector<ContractSet>>();
    probe.attach_oracle_log(probe.firm_index("f"), log);
    find_blocking_set(probe, probe.empty_set(), BlockingSetOptions{});
    const FirmIndex fi = probe.firm_index("f");
    const ContractIndex yi = probe.contract_index("y");
    for (const ContractSet& offered : *log) {
      if (!offered.contains(yi)) continue;
      ContractSet up = offered & probe.upstream_contracts(fi);
      if (up.count() != n) continue;
      ContractSet rest = offered - up;
      rest.erase(yi);
      if (!rest.empty()) continue;
      seen_distinguishing.insert(up.indices());
    }
  }
  report.searcher_distinct_distinguishing = seen_distinguishing.size();

  for (const auto& idxs : candidates) {
    std::vector<std::string> hidden;
    for (std::size_t i : idxs) hidden.push_back(xs[i]);
    TradingNetwork variant = build(hidden);
    const FirmIndex fv = variant.firm_index("f");

    // Expected lone difference: offering exactly X_I together with y.
    ContractSet xi_set = variant.empty_set();
    for (const auto& x : hidden) xi_set.insert(variant.contract_index(x));
    ContractSet expect_diff = xi_set;
    expect_diff.insert(variant.contract_index("y"));

    const std::size_t m = 2 * n + 1;  // |X_f|
    std::vector<ContractIndex> pool = variant.firm_contracts(fv).indices();
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
      ContractSet offered = variant.empty_set();
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::uint32_t{1} << i)) offered.insert(pool[i]);
      ContractSet via_variant = variant.choose(fv, offered);
      ContractSet via_plain = plain.choose(f_plain, offered);
      bool differs = via_variant != via_plain;
      if (differs != (offered == expect_diff)) report.family_verified = false;
    }

    std::vector<std::string> query;
    expect_diff.for_each(
        [&](ContractIndex c) { query.push_back(variant.contract_id(c)); });
    report.distinguishing_queries.push_back(std::move(query));

    // The real decider must flip to unstable with the unique block X_I ∪ {y}.
    auto res = find_blocking_set(variant, variant.empty_set(), BlockingSetOptions{});
    if (res.status != SearchStatus::found || res.block->contracts != expect_diff)
      report.verdict_flips = false;
    std::size_t block_count = 0;
    std::vector<ContractIndex> pool2 = (variant.all_contracts()).indices();
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
      ContractSet z = variant.empty_set();
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::uint32_t{1} << i)) z.insert(pool2[i]);
      bool ok = true;
      for (FirmIndex fi : variant.firms_of(z))
        if (!variant.is_w_acceptable(z, variant.empty_set(), fi)) ok = false;
      if (ok && z != expect_diff) report.unique_blocks = false;
      if (ok) ++block_count;
    }
    if (block_count != 1) report.unique_blocks = false;
  }

  return report;
}

}  // namespace tn
