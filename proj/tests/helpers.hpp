#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tradenet/network.hpp"

namespace tt {

using namespace tn;

inline ChoiceDecl terminal() { return {}; }

inline ChoiceDecl flow(std::vector<std::string> up, std::vector<std::string> down) {
  ChoiceDecl d;
  d.kind = ChoiceKind::flow_based;
  d.buyer_prefs = std::move(up);
  d.seller_prefs = std::move(down);
  return d;
}

inline ChoiceDecl partition_f(std::vector<std::pair<std::string, std::int64_t>> w) {
  ChoiceDecl d;
  d.kind = ChoiceKind::partition_f;
  d.weighted = std::move(w);
  return d;
}

inline ChoiceDecl partition_g(std::vector<std::pair<std::string, std::int64_t>> w) {
  ChoiceDecl d;
  d.kind = ChoiceKind::partition_g;
  d.weighted = std::move(w);
  return d;
}

/// Builds a total table choice from a chooser over id lists. `domain` must
/// list the firm's contracts; subsets are enumerated over it.
inline ChoiceDecl table_from(
    const std::vector<std::string>& domain,
    const std::function<std::vector<std::string>(const std::vector<std::string>&)>& pick) {
  ChoiceDecl d;
  d.kind = ChoiceKind::table;
  for (std::size_t mask = 0; mask < (std::size_t{1} << domain.size()); ++mask) {
    std::vector<std::string> offered;
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (mask & (std::size_t{1} << i)) offered.push_back(domain[i]);
    d.table.emplace_back(offered, pick(offered));
  }
  return d;
}

inline ContractSet ids(const TradingNetwork& net, const std::vector<std::string>& v) {
  ContractSet s = net.empty_set();
  for (const auto& id : v) s.insert(net.contract_index(id));
  return s;
}

inline std::vector<std::string> names(const TradingNetwork& net, const ContractSet& s) {
  std::vector<std::string> out;
  s.for_each([&](ContractIndex c) { out.push_back(net.contract_id(c)); });
  return out;
}

inline std::vector<ContractIndex> seq_of(const TradingNetwork& net,
                                         const std::vector<std::string>& v) {
  std::vector<ContractIndex> out;
  for (const auto& id : v) out.push_back(net.contract_index(id));
  return out;
}

/// s -> f -> t line with one middleman.
inline TradingNetwork line_network() {
  return TradingNetwork(
      {{"s", terminal()}, {"t", terminal()}, {"f", flow({"c1"}, {"c2"})}},
      {{"c1", "s", "f"}, {"c2", "f", "t"}});
}

/// Two terminals, one contract.
inline TradingNetwork single_contract_network() {
  return TradingNetwork({{"a", terminal()}, {"b", terminal()}}, {{"x", "a", "b"}});
}

}  // namespace tt
