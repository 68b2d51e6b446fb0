#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tradenet/network.hpp"
#include "tradenet/reduce.hpp"

namespace tn {

inline constexpr int kSchemaVersion = 1;

// Network documents. Emitted documents are canonical: firms and contracts
// sorted by id, id lists sorted except where order is meaningful
// (preference lists, partition_g index order).
TradingNetwork parse_network(const nlohmann::json& doc);
nlohmann::json network_to_json(const TradingNetwork& net);
TradingNetwork load_network(const std::string& path);
void save_network(const TradingNetwork& net, const std::string& path);

ContractSet parse_outcome(const nlohmann::json& doc, const TradingNetwork& net);
nlohmann::json outcome_to_json(const TradingNetwork& net, const ContractSet& a);
ContractSet load_outcome(const std::string& path, const TradingNetwork& net);
void save_outcome(const TradingNetwork& net, const ContractSet& a, const std::string& path);

Digraph parse_digraph(const nlohmann::json& doc);
nlohmann::json digraph_to_json(const Digraph& d);
Digraph load_digraph(const std::string& path);
void save_digraph(const Digraph& d, const std::string& path);

nlohmann::json reduction_map_to_json(const ReductionMap& map);
ReductionMap parse_reduction_map(const nlohmann::json& doc);
nlohmann::json partition_map_to_json(const PartitionReduction& red,
                                     const PartitionInstance& inst);

/// Deterministic DOT rendering: firm nodes (terminals doubled), one edge per
/// contract. With an outcome, members are solid and the rest dashed.
std::string export_dot(const TradingNetwork& net, const ContractSet* a = nullptr);

/// Seeded layered flow-network generator: two designated terminals, forward
/// arcs sampled per ordered pair with the given probability, uniformly
/// random preference orders. Intermediates left with no contracts are
/// dropped; intermediates missing one side get one forced contract, so the
/// result is always a flow network. Same seed, same instance.
TradingNetwork random_flow_network(std::uint64_t seed, std::size_t n_firms, double density);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tn
