#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "tradenet/core.hpp"

namespace tn {

enum class ChoiceKind {
  terminal,
  flow_based,
  partition_f,
  partition_g,
  oracle_family,
  table,
};

const char* to_string(ChoiceKind k);

/// Accepts every offered contract.
struct TerminalChoice {};

/// Keeps the k most preferred contracts on each side, k = min of the two
/// offered counts. Firms with no upstream (or no downstream) contracts at all
/// accept everything instead.
struct FlowBasedChoice {
  std::vector<ContractIndex> buyer_pref;   // covers the firm's upstream contracts, best first
  std::vector<ContractIndex> seller_pref;  // covers the firm's downstream contracts, best first
};

/// Weighted buyer: keeps all upstream contracts; keeps downstream contracts
/// only when the offered upstream weight reaches half the total.
/// Sums are kept doubled so odd totals never need fractions.
struct PartitionFChoice {
  std::vector<ContractIndex> weighted;  // upstream contracts
  std::vector<std::int64_t> weights;    // parallel to `weighted`, positive
  std::int64_t total = 0;               // sum of weights == 2 * threshold
};

/// Weighted seller: rejects everything without an upstream offer; otherwise
/// keeps the longest prefix (in index order) whose weight stays within half
/// the total.
struct PartitionGChoice {
  std::vector<ContractIndex> weighted;  // downstream contracts, index order x_1..x_k
  std::vector<std::int64_t> weights;    // non-decreasing, positive
  std::int64_t total = 0;
};

/// Counting buyer with an optional hidden upstream subset: keeps downstream
/// contracts iff more than n upstream contracts are offered, or the offered
/// upstream set equals the hidden n-subset exactly. Every evaluation is
/// tallied; a query log can be attached for experiments.
struct OracleFamilyChoice {
  std::uint32_t n = 0;
  std::optional<ContractSet> hidden;  // n of the firm's 2n upstream contracts
  std::shared_ptr<std::atomic<std::uint64_t>> queries;
  std::shared_ptr<std::vector<ContractSet>> query_log;  // optional
};

/// Explicit map from every subset of the firm's contracts to its choice.
struct TableChoice {
  std::vector<ContractIndex> domain;  // the firm's contracts, ascending
  std::vector<std::uint32_t> image;   // image[mask] ⊆ mask, 1 << domain.size() entries
};

using ChoiceFunction = std::variant<TerminalChoice, FlowBasedChoice,
                                    PartitionFChoice, PartitionGChoice,
                                    OracleFamilyChoice, TableChoice>;

ChoiceKind kind_of(const ChoiceFunction& cf);

/// The firm-side context a choice function evaluates against.
struct FirmContext {
  const ContractSet& upstream;    // contracts the firm buys
  const ContractSet& downstream;  // contracts the firm sells
};

/// Evaluates cf on `offered` (must be a subset of the firm's contracts).
/// The result is always a subset of `offered`.
ContractSet evaluate_choice(const ChoiceFunction& cf, const FirmContext& ctx,
                            const ContractSet& offered);

}  // namespace tn
