#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tradenet/network.hpp"

namespace tn {

/// Cap on exhaustive work (candidate subsets examined / search nodes
/// expanded). Every exponential search returns a three-valued result
/// instead of silently truncating.
struct SearchLimits {
  std::uint64_t max_steps = std::uint64_t{1} << 22;

  static SearchLimits from_bits(unsigned bits) {
    return SearchLimits{bits >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits)};
  }
};

enum class SearchStatus { found, exhausted, capped };

struct DeferredAcceptanceResult {
  ContractSet outcome;
  std::uint64_t rounds = 0;
  std::uint64_t rejections = 0;  // contracts rejected on either side at the fixed point
};

/// Generalized Gale–Shapley iteration to the fixed point of
///   Phi(Y, Z) = (X \ R_S(Z|Y), X \ R_B(Y|Z)),  (Y0, Z0) = (X, ∅),
/// returning Y* ∩ Z*. The result is re-verified to be acceptable and free of
/// locally blocking trails; any failure (or exceeding 2|X|+1 rounds, or a
/// non-monotone round) signals a non-fully-substitutable input and throws
/// ModelError.
DeferredAcceptanceResult deferred_acceptance(const TradingNetwork& net);

/// Breadth-first reachability over contracts of X\A: sources are contracts
/// unilaterally acceptable to their seller alongside A, edges are
/// consecutive pairs acceptable to the shared firm, accepting states are
/// contracts acceptable to their buyer. Exact and linear in pair-edges.
std::optional<std::vector<ContractIndex>> find_locally_blocking_trail(
    const TradingNetwork& net, const ContractSet& A);

bool is_trail_stable(const TradingNetwork& net, const ContractSet& A);

enum class BlockKind {
  locally_blocking_trail,
  blocking_path,
  blocking_cycle,
  blocking_set,
  sequentially_blocking_trail,
};

const char* to_string(BlockKind k);

struct BlockReport {
  BlockKind kind;
  std::vector<ContractIndex> sequence;  // ordered for trails/paths/cycles, ascending for sets
  ContractSet contracts;
};

/// Per-firm acceptability facts backing a block report.
struct FirmEvidence {
  FirmIndex firm;
  ContractSet checked;  // the subset whose acceptability alongside A was required
  bool accepted;
};

std::vector<FirmEvidence> block_evidence(const TradingNetwork& net,
                                         const ContractSet& A,
                                         const BlockReport& report);

/// Structure + acceptability re-verification of a report against the network.
bool replay_block(const TradingNetwork& net, const ContractSet& A,
                  const BlockReport& report);

struct BlockSearchResult {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<BlockReport> block;
  std::uint64_t steps = 0;
};

/// Flow networks with acceptable A: any cycle in X\A blocks, otherwise a
/// path from a seller-acceptable contract to a buyer-acceptable one (linear,
/// DFS/BFS). General networks: exhaustive path/cycle enumeration under the
/// step cap.
BlockSearchResult find_blocking_path_or_cycle(const TradingNetwork& net,
                                              const ContractSet& A,
                                              const SearchLimits& limits = {});

/// Throws BudgetError when the underlying search is capped.
bool is_path_or_cycle_stable(const TradingNetwork& net, const ContractSet& A,
                             const SearchLimits& limits = {});

struct BlockingSetOptions {
  SearchLimits limits{};
  /// On flow networks with acceptable A, blocking sets exist iff blocking
  /// paths or cycles do; the linear check replaces subset enumeration.
  bool allow_flow_shortcut = true;
};

/// Exact search over non-empty Z ⊆ X\A in increasing cardinality, canonical
/// id order within a cardinality. No pruning assumptions: acceptability is
/// checked per candidate.
BlockSearchResult find_blocking_set(const TradingNetwork& net, const ContractSet& A,
                                    const BlockingSetOptions& opts = {});

bool is_stable(const TradingNetwork& net, const ContractSet& A,
               const BlockingSetOptions& opts = {});

struct TrailSearchResult {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<std::vector<ContractIndex>> trail;
  std::uint64_t steps = 0;
};

/// Exhaustive search for a sequentially blocking trail: first contract
/// unilaterally seller-acceptable, every intermediate firm accepts its
/// cumulative prefix sets (or every intermediate firm accepts its cumulative
/// suffix sets), last contract buyer-acceptable.
TrailSearchResult find_sequentially_blocking_trail(const TradingNetwork& net,
                                                   const ContractSet& A,
                                                   const SearchLimits& limits = {});

bool is_weakly_trail_stable(const TradingNetwork& net, const ContractSet& A,
                            const SearchLimits& limits = {});

/// Emits exactly the acceptable outcomes, each once, in a deterministic
/// order starting from ∅. Flow networks enumerate balance-feasible subsets
/// (every acceptable outcome keeps each non-terminal's upstream and
/// downstream counts equal); general networks sweep all subsets. The
/// callback returns false to stop early.
SearchStatus enumerate_acceptable_outcomes(
    const TradingNetwork& net,
    const std::function<bool(const ContractSet&)>& emit,
    const SearchLimits& limits = {});

enum class Concept { trail, weak_trail, path_or_cycle, stable };

const char* to_string(Concept c);

struct ExistsResult {
  SearchStatus status = SearchStatus::exhausted;  // found / exhausted(no) / capped(unknown)
  std::optional<ContractSet> witness;
  std::uint64_t steps = 0;
};

/// Decides whether the network admits an outcome satisfying the concept.
/// Trail stability needs no enumeration (deferred acceptance always
/// produces a witness); the other concepts scan acceptable outcomes.
ExistsResult exists_outcome(const TradingNetwork& net, Concept what,
                            const SearchLimits& limits = {});

}  // namespace tn
