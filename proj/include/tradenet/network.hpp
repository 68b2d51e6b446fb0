#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tradenet/choice.hpp"
#include "tradenet/core.hpp"

namespace tn {

/// String-level choice specification, resolved against the network at
/// construction. Only the fields of the declared kind are consulted.
struct ChoiceDecl {
  ChoiceKind kind = ChoiceKind::terminal;
  std::vector<std::string> buyer_prefs;   // flow_based
  std::vector<std::string> seller_prefs;  // flow_based
  std::vector<std::pair<std::string, std::int64_t>> weighted;  // partition_f / partition_g (ordered)
  std::uint32_t n = 0;                                         // oracle_family
  std::optional<std::vector<std::string>> hidden;              // oracle_family
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> table;
};

struct FirmDecl {
  std::string id;
  ChoiceDecl choice;
};

struct ContractDecl {
  std::string id;
  std::string seller;
  std::string buyer;
};

/// Immutable trading network: firms, directed bilateral contracts, and one
/// choice function per firm. Firms and contracts are stored in canonical
/// (id-sorted) order, so every index-based iteration is deterministic.
/// All predicates are const and safe for unsynchronized concurrent use;
/// the evaluation counters are atomic.
class TradingNetwork {
 public:
  TradingNetwork(std::vector<FirmDecl> firms, std::vector<ContractDecl> contracts);

  std::size_t firm_count() const { return firm_ids_.size(); }
  std::size_t contract_count() const { return contract_ids_.size(); }

  const std::string& firm_id(FirmIndex f) const { return firm_ids_[f]; }
  const std::string& contract_id(ContractIndex c) const { return contract_ids_[c]; }
  FirmIndex firm_index(const std::string& id) const;          // throws SchemaError
  ContractIndex contract_index(const std::string& id) const;  // throws SchemaError

  FirmIndex seller(ContractIndex c) const { return seller_[c]; }
  FirmIndex buyer(ContractIndex c) const { return buyer_[c]; }

  const ContractSet& upstream_contracts(FirmIndex f) const { return up_[f]; }    // X_f^B
  const ContractSet& downstream_contracts(FirmIndex f) const { return down_[f]; }  // X_f^S
  const ContractSet& firm_contracts(FirmIndex f) const { return own_[f]; }         // X_f
  const ContractSet& all_contracts() const { return all_; }
  ContractSet empty_set() const { return ContractSet(contract_count()); }

  const ChoiceFunction& choice(FirmIndex f) const { return choice_[f]; }
  ChoiceKind choice_kind(FirmIndex f) const { return kind_of(choice_[f]); }

  /// C^f(offered). Precondition: offered ⊆ X_f (hard error otherwise).
  ContractSet choose(FirmIndex f, const ContractSet& offered) const;

  ContractSet upstream_of(FirmIndex f, const ContractSet& Y) const;    // Y ∩ X_f^B
  ContractSet downstream_of(FirmIndex f, const ContractSet& Y) const;  // Y ∩ X_f^S

  ContractSet chosen_buyer(FirmIndex f, const ContractSet& Y, const ContractSet& Z) const;
  ContractSet chosen_seller(FirmIndex f, const ContractSet& Z, const ContractSet& Y) const;
  ContractSet rejected_buyer(FirmIndex f, const ContractSet& Y, const ContractSet& Z) const;
  ContractSet rejected_seller(FirmIndex f, const ContractSet& Z, const ContractSet& Y) const;

  bool is_individually_rational(const ContractSet& A, FirmIndex f) const;
  bool is_acceptable(const ContractSet& A) const;

  /// S is acceptable to f alongside W: S_f ⊆ C^f(W_f ∪ S_f).
  bool is_w_acceptable(const ContractSet& S, const ContractSet& W, FirmIndex f) const;
  bool is_w_acceptable_all(const ContractSet& S, const ContractSet& W) const;

  SequenceKind validate_sequence(const std::vector<ContractIndex>& seq) const;

  bool is_terminal_seller(FirmIndex f) const { return up_[f].empty(); }
  bool is_terminal_buyer(FirmIndex f) const { return down_[f].empty(); }
  bool is_terminal(FirmIndex f) const { return up_[f].empty() || down_[f].empty(); }
  /// (terminal sellers, terminal buyers), each in canonical firm order.
  std::pair<std::vector<FirmIndex>, std::vector<FirmIndex>> classify_terminals() const;
  bool is_flow_network() const { return is_flow_; }
  bool is_acyclic() const;

  std::vector<FirmIndex> firms_of(const ContractSet& Y) const;

  std::uint64_t choice_evaluations() const { return counter_->load(); }
  std::uint64_t oracle_queries() const;
  void reset_counters() const;

  /// Attaches an offer log to an oracle-family firm (experiment plumbing).
  void attach_oracle_log(FirmIndex f, std::shared_ptr<std::vector<ContractSet>> log);

 private:
  void validate_choice_decl(FirmIndex f, const ChoiceDecl& decl);

  std::vector<std::string> firm_ids_;
  std::vector<std::string> contract_ids_;
  std::map<std::string, FirmIndex> firm_by_id_;
  std::map<std::string, ContractIndex> contract_by_id_;
  std::vector<FirmIndex> seller_, buyer_;
  std::vector<ContractSet> up_, down_, own_;
  ContractSet all_;
  std::vector<ChoiceFunction> choice_;
  bool is_flow_ = false;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

}  // namespace tn
