#include "tradenet/io.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace tn {

using nlohmann::json;

namespace {

ChoiceKind parse_kind(const std::string& s) {
  if (s == "terminal") return ChoiceKind::terminal;
  if (s == "flow_based") return ChoiceKind::flow_based;
  if (s == "partition_f") return ChoiceKind::partition_f;
  if (s == "partition_g") return ChoiceKind::partition_g;
  if (s == "oracle_family") return ChoiceKind::oracle_family;
  if (s == "table") return ChoiceKind::table;
  throw SchemaError("unknown choice kind: " + s);
}

const json& require(const json& doc, const char* field, const std::string& where) {
  auto it = doc.find(field);
  if (it == doc.end())
    throw SchemaError(where + ": missing field '" + field + "'");
  return *it;
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array of ids");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw SchemaError(where + ": expected string ids");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void check_version(const json& doc, const std::string& where) {
  auto it = doc.find("schema_version");
  if (it == doc.end()) throw SchemaError(where + ": missing schema_version");
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion)
    throw SchemaError(where + ": unsupported schema_version");
}

}  // namespace

TradingNetwork parse_network(const json& doc) {
  if (!doc.is_object()) throw SchemaError("network document must be an object");
  check_version(doc, "network");
  std::vector<FirmDecl> firms;
  for (const auto& jf : require(doc, "firms", "network")) {
    FirmDecl fd;
    fd.id = require(jf, "id", "firm").get<std::string>();
    const json& jc = require(jf, "choice", "firm " + fd.id);
    const std::string where = "firm " + fd.id;
    fd.choice.kind = parse_kind(require(jc, "kind", where).get<std::string>());
    switch (fd.choice.kind) {
      case ChoiceKind::terminal:
        break;
      case ChoiceKind::flow_based:
        fd.choice.buyer_prefs = string_list(require(jc, "buyer_prefs", where), where);
        fd.choice.seller_prefs = string_list(require(jc, "seller_prefs", where), where);
        break;
      case ChoiceKind::partition_f: {
        const json& jw = require(jc, "weights", where);
        if (!jw.is_object()) throw SchemaError(where + ": weights must be an object");
        for (const auto& [cid, w] : jw.items())
          fd.choice.weighted.emplace_back(cid, w.get<std::int64_t>());
        break;
      }
      case ChoiceKind::partition_g: {
        auto order = string_list(require(jc, "order", where), where);
        const json& jw = require(jc, "weights", where);
        if (!jw.is_array() || jw.size() != order.size())
          throw SchemaError(where + ": weights must parallel the order list");
        for (std::size_t i = 0; i < order.size(); ++i)
          fd.choice.weighted.emplace_back(order[i], jw[i].get<std::int64_t>());
        break;
      }
      case ChoiceKind::oracle_family: {
        fd.choice.n = require(jc, "n", where).get<std::uint32_t>();
        auto it = jc.find("hidden");
        if (it != jc.end() && !it->is_null())
          fd.choice.hidden = string_list(*it, where);
        break;
      }
      case ChoiceKind::table: {
        for (const auto& je : require(jc, "entries", where)) {
          fd.choice.table.emplace_back(
              string_list(require(je, "offered", where), where),
              string_list(require(je, "chosen", where), where));
        }
        break;
      }
    }
    firms.push_back(std::move(fd));
  }
  std::vector<ContractDecl> contracts;
  for (const auto& jc : require(doc, "contracts", "network")) {
    contracts.push_back({require(jc, "id", "contract").get<std::string>(),
                         require(jc, "seller", "contract").get<std::string>(),
                         require(jc, "buyer", "contract").get<std::string>()});
  }
  return TradingNetwork(std::move(firms), std::move(contracts));
}

json network_to_json(const TradingNetwork& net) {
  json firms = json::array();
  for (FirmIndex f = 0; f < net.firm_count(); ++f) {
    json jc;
    const ChoiceFunction& cf = net.choice(f);
    jc["kind"] = to_string(kind_of(cf));
    auto ids = [&](const std::vector<ContractIndex>& cs) {
      json a = json::array();
      for (ContractIndex c : cs) a.push_back(net.contract_id(c));
      return a;
    };
    if (const auto* fc = std::get_if<FlowBasedChoice>(&cf)) {
      jc["buyer_prefs"] = ids(fc->buyer_pref);
      jc["seller_prefs"] = ids(fc->seller_pref);
    } else if (const auto* pf = std::get_if<PartitionFChoice>(&cf)) {
      json w = json::object();
      for (std::size_t i = 0; i < pf->weighted.size(); ++i)
        w[net.contract_id(pf->weighted[i])] = pf->weights[i];
      jc["weights"] = std::move(w);
    } else if (const auto* pg = std::get_if<PartitionGChoice>(&cf)) {
      jc["order"] = ids(pg->weighted);
      jc["weights"] = pg->weights;
    } else if (const auto* oc = std::get_if<OracleFamilyChoice>(&cf)) {
      jc["n"] = oc->n;
      if (oc->hidden) {
        json h = json::array();
        oc->hidden->for_each([&](ContractIndex c) { h.push_back(net.contract_id(c)); });
        jc["hidden"] = std::move(h);
      } else {
        jc["hidden"] = nullptr;
      }
    } else if (const auto* tc = std::get_if<TableChoice>(&cf)) {
      json entries = json::array();
      for (std::uint32_t mask = 0; mask < tc->image.size(); ++mask) {
        json offered = json::array(), chosen = json::array();
        for (std::size_t i = 0; i < tc->domain.size(); ++i) {
          if (mask & (std::uint32_t{1} << i))
            offered.push_back(net.contract_id(tc->domain[i]));
          if (tc->image[mask] & (std::uint32_t{1} << i))
            chosen.push_back(net.contract_id(tc->domain[i]));
        }
        entries.push_back({{"offered", std::move(offered)}, {"chosen", std::move(chosen)}});
      }
      jc["entries"] = std::move(entries);
    }
    firms.push_back({{"id", net.firm_id(f)}, {"choice", std::move(jc)}});
  }
  json contracts = json::array();
  for (ContractIndex c = 0; c < net.contract_count(); ++c)
    contracts.push_back({{"id", net.contract_id(c)},
                         {"seller", net.firm_id(net.seller(c))},
                         {"buyer", net.firm_id(net.buyer(c))}});
  return {{"schema_version", kSchemaVersion},
          {"firms", std::move(firms)},
          {"contracts", std::move(contracts)}};
}

ContractSet parse_outcome(const json& doc, const TradingNetwork& net) {
  if (!doc.is_object()) throw SchemaError("outcome document must be an object");
  check_version(doc, "outcome");
  ContractSet a = net.empty_set();
  for (const auto& id : string_list(require(doc, "contracts", "outcome"), "outcome")) {
    ContractIndex c = net.contract_index(id);
    if (a.contains(c)) throw SchemaError("outcome repeats contract " + id);
    a.insert(c);
  }
  return a;
}

json outcome_to_json(const TradingNetwork& net, const ContractSet& a) {
  json ids = json::array();
  a.for_each([&](ContractIndex c) { ids.push_back(net.contract_id(c)); });
  return {{"schema_version", kSchemaVersion}, {"contracts", std::move(ids)}};
}

Digraph parse_digraph(const json& doc) {
  if (!doc.is_object()) throw SchemaError("digraph document must be an object");
  auto vertices = string_list(require(doc, "vertices", "digraph"), "digraph");
  std::vector<std::pair<std::string, std::string>> arcs;
  for (const auto& ja : require(doc, "arcs", "digraph")) {
    if (!ja.is_array() || ja.size() != 2)
      throw SchemaError("digraph: each arc must be a [from, to] pair");
    arcs.emplace_back(ja[0].get<std::string>(), ja[1].get<std::string>());
  }
  return Digraph(std::move(vertices), std::move(arcs));
}

json digraph_to_json(const Digraph& d) {
  json arcs = json::array();
  for (const auto& [u, v] : d.arcs())
    arcs.push_back({d.vertex_name(u), d.vertex_name(v)});
  return {{"schema_version", kSchemaVersion},
          {"vertices", d.vertices()},
          {"arcs", std::move(arcs)}};
}

json reduction_map_to_json(const ReductionMap& map) {
  json gadgets = json::object();
  for (const auto& [v, g] : map.gadgets) {
    gadgets[v] = {{"firms",
                   {{"s", g.f_s},
                    {"a", g.f_a},
                    {"ap", g.f_ap},
                    {"b", g.f_b},
                    {"bp", g.f_bp},
                    {"t", g.f_t}}},
                  {"contracts",
                   {{"src", g.c_src},
                    {"sa", g.c_sa},
                    {"sb", g.c_sb},
                    {"aap", g.c_aap},
                    {"bbp", g.c_bbp},
                    {"apt", g.c_apt},
                    {"bpt", g.c_bpt},
                    {"snk", g.c_snk}}}};
  }
  json arcs = json::array();
  for (const auto& [arc, ids] : map.arc_contracts)
    arcs.push_back({{"from", arc.first},
                    {"to", arc.second},
                    {"a", ids.first},
                    {"b", ids.second}});
  return {{"schema_version", kSchemaVersion},
          {"kind", "acyclic_bipartition"},
          {"source", map.source},
          {"sink", map.sink},
          {"vertices", map.vertices},
          {"gadgets", std::move(gadgets)},
          {"arcs", std::move(arcs)}};
}

ReductionMap parse_reduction_map(const json& doc) {
  check_version(doc, "reduction map");
  if (require(doc, "kind", "reduction map").get<std::string>() != "acyclic_bipartition")
    throw SchemaError("reduction map: unsupported kind");
  ReductionMap map;
  map.source = require(doc, "source", "reduction map").get<std::string>();
  map.sink = require(doc, "sink", "reduction map").get<std::string>();
  map.vertices = string_list(require(doc, "vertices", "reduction map"), "reduction map");
  for (const auto& [v, jg] : require(doc, "gadgets", "reduction map").items()) {
    GadgetIds g;
    const json& jf = require(jg, "firms", "gadget " + v);
    const json& jc = require(jg, "contracts", "gadget " + v);
    g.f_s = jf.at("s");
    g.f_a = jf.at("a");
    g.f_ap = jf.at("ap");
    g.f_b = jf.at("b");
    g.f_bp = jf.at("bp");
    g.f_t = jf.at("t");
    g.c_src = jc.at("src");
    g.c_sa = jc.at("sa");
    g.c_sb = jc.at("sb");
    g.c_aap = jc.at("aap");
    g.c_bbp = jc.at("bbp");
    g.c_apt = jc.at("apt");
    g.c_bpt = jc.at("bpt");
    g.c_snk = jc.at("snk");
    map.gadgets.emplace(v, std::move(g));
  }
  for (const auto& ja : require(doc, "arcs", "reduction map"))
    map.arc_contracts.emplace(
        std::make_pair(ja.at("from").get<std::string>(), ja.at("to").get<std::string>()),
        std::make_pair(ja.at("a").get<std::string>(), ja.at("b").get<std::string>()));
  return map;
}

json partition_map_to_json(const PartitionReduction& red, const PartitionInstance& inst) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "partition"},
          {"y", red.y_id},
          {"x", red.x_ids},
          {"weights", inst.weights}};
}

std::string export_dot(const TradingNetwork& net, const ContractSet* a) {
  std::ostringstream out;
  out << "digraph trading_network {\n";
  out << "  rankdir=LR;\n";
  for (FirmIndex f = 0; f < net.firm_count(); ++f) {
    out << "  \"" << net.firm_id(f) << "\" [shape="
        << (net.is_terminal(f) ? "doublecircle" : "ellipse") << "];\n";
  }
  for (ContractIndex c = 0; c < net.contract_count(); ++c) {
    bool solid = a == nullptr || a->contains(c);
    out << "  \"" << net.firm_id(net.seller(c)) << "\" -> \""
        << net.firm_id(net.buyer(c)) << "\" [label=\"" << net.contract_id(c)
        << "\", style=" << (solid ? "solid" : "dashed") << "];\n";
  }
  out << "}\n";
  return out.str();
}

TradingNetwork random_flow_network(std::uint64_t seed, std::size_t n_firms,
                                   double density) {
  if (n_firms < 2) throw SchemaError("random flow network needs at least 2 firms");
  if (density < 0.0 || density > 1.0) throw SchemaError("density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution arc(density);

  // Layered positions: 0 is the source, n-1 the sink; arcs only go forward,
  // so the firm graph is acyclic and the designated terminals are the only
  // candidates for terminal agents.
  const std::size_t n = n_firms;
  auto firm_name = [&](std::size_t pos) -> std::string {
    if (pos == 0) return "s";
    if (pos == n - 1) return "t";
    std::string num = std::to_string(pos);
    if (num.size() < 2) num.insert(num.begin(), '0');
    return "f" + num;
  };

  std::vector<std::vector<std::size_t>> ins(n), outs(n);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (arc(rng)) {
        arcs.emplace_back(i, j);
        outs[i].push_back(j);
        ins[j].push_back(i);
      }

  // Drop intermediates that sampled no contracts; give the rest a missing
  // side so they stay non-terminal.
  std::vector<bool> keep(n, true);
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (ins[i].empty() && outs[i].empty()) keep[i] = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!keep[i]) continue;
    if (ins[i].empty()) {
      std::vector<std::size_t> pool;
      for (std::size_t j = 0; j < i; ++j)
        if (keep[j]) pool.push_back(j);
      std::size_t j = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      arcs.emplace_back(j, i);
    }
    if (outs[i].empty()) {
      std::vector<std::size_t> pool;
      for (std::size_t j = i + 1; j < n; ++j)
        if (keep[j]) pool.push_back(j);
      std::size_t j = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      arcs.emplace_back(i, j);
    }
  }

  std::sort(arcs.begin(), arcs.end());
  std::vector<ContractDecl> contracts;
  std::vector<std::vector<std::string>> up_ids(n), down_ids(n);
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    auto [i, j] = arcs[k];
    std::string num = std::to_string(k);
    while (num.size() < 3) num.insert(num.begin(), '0');
    std::string id = "c" + num;
    contracts.push_back({id, firm_name(i), firm_name(j)});
    down_ids[i].push_back(id);
    up_ids[j].push_back(id);
  }

  std::vector<FirmDecl> firms;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    FirmDecl fd;
    fd.id = firm_name(i);
    if (i == 0 || i == n - 1) {
      fd.choice.kind = ChoiceKind::terminal;
    } else {
      fd.choice.kind = ChoiceKind::flow_based;
      std::shuffle(up_ids[i].begin(), up_ids[i].end(), rng);
      std::shuffle(down_ids[i].begin(), down_ids[i].end(), rng);
      fd.choice.buyer_prefs = up_ids[i];
      fd.choice.seller_prefs = down_ids[i];
    }
    firms.push_back(std::move(fd));
  }
  return TradingNetwork(std::move(firms), std::move(contracts));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open " + path + " for writing");
  out << text;
}

TradingNetwork load_network(const std::string& path) {
  return parse_network(read_json_file(path));
}

void save_network(const TradingNetwork& net, const std::string& path) {
  write_text_file(path, network_to_json(net).dump(2) + "\n");
}

ContractSet load_outcome(const std::string& path, const TradingNetwork& net) {
  return parse_outcome(read_json_file(path), net);
}

void save_outcome(const TradingNetwork& net, const ContractSet& a, const std::string& path) {
  write_text_file(path, outcome_to_json(net, a).dump(2) + "\n");
}

Digraph load_digraph(const std::string& path) {
  return parse_digraph(read_json_file(path));
}

void save_digraph(const Digraph& d, const std::string& path) {
  write_text_file(path, digraph_to_json(d).dump(2) + "\n");
}

}  // namespace tn
