#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tradenet/network.hpp"
#include "tradenet/solve.hpp"

namespace tn {

/// Directed graph with labeled vertices. Parallel arcs collapse; self-loops
/// are legal and count as directed cycles.
class Digraph {
 public:
  Digraph() = default;
  Digraph(std::vector<std::string> vertices,
          std::vector<std::pair<std::string, std::string>> arcs);

  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& arcs() const { return arcs_; }
  std::size_t vertex_index(const std::string& v) const;  // throws SchemaError
  const std::string& vertex_name(std::size_t i) const { return vertices_[i]; }

  /// True iff the subgraph induced by the marked vertices has no directed cycle.
  bool induced_acyclic(const std::vector<bool>& keep) const;

 private:
  std::vector<std::string> vertices_;  // sorted, unique
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;  // sorted, unique
};

/// Per-vertex gadget ids in the generated flow network.
struct GadgetIds {
  std::string f_s, f_a, f_ap, f_b, f_bp, f_t;                   // firms
  std::string c_src, c_sa, c_sb, c_aap, c_bbp, c_apt, c_bpt, c_snk;  // contracts
};

struct ReductionMap {
  std::string source;  // terminal firm fed into every gadget
  std::string sink;
  std::vector<std::string> vertices;
  std::map<std::string, GadgetIds> gadgets;  // by vertex name
  // per arc (u,v): the a-side and b-side connector contract ids
  std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> arc_contracts;
};

struct BipartitionReduction {
  TradingNetwork network;
  ReductionMap map;
};

/// Builds the flow network whose path-or-cycle-stable outcomes correspond to
/// 2-partitions of the digraph into acyclic vertex sets: one 6-firm gadget
/// per vertex, connector contracts per arc, terminals feeding and draining
/// every gadget. 6n+2 firms, 8n+2m contracts.
BipartitionReduction reduce_acyclic_bipartition(const Digraph& d);

/// Maps a vertex partition (Q, R) to the outcome that saturates the b-lane
/// of every Q gadget and the a-lane of every R gadget.
ContractSet bipartition_to_outcome(const TradingNetwork& net, const ReductionMap& map,
                                   const std::vector<std::string>& q,
                                   const std::vector<std::string>& r);

/// Reads the partition back from an outcome (Q = vertices whose a-lane
/// bridge contract is absent) and verifies both parts are acyclic.
/// Precondition: the outcome is path-or-cycle stable; in particular it must
/// avoid every connector contract.
std::pair<std::vector<std::string>, std::vector<std::string>> outcome_to_bipartition(
    const TradingNetwork& net, const ReductionMap& map, const Digraph& d,
    const ContractSet& a);

/// Exhaustive 2-coloring search; parts must induce acyclic subgraphs.
std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>>
solve_acyclic_bipartition(const Digraph& d, std::size_t max_vertices = 20);

struct PartitionInstance {
  std::vector<std::int64_t> weights;  // positive, non-decreasing
};

struct PartitionReduction {
  TradingNetwork network;
  std::string y_id;                // the single f→g contract
  std::vector<std::string> x_ids;  // g→f contracts, index order
};

/// Two-firm network whose empty outcome is unstable iff the weights split
/// into two equal halves. Blocking sets are exactly {y} ∪ X_I for index sets
/// I of weight-sum s.
PartitionReduction reduce_partition_to_instability(const PartitionInstance& inst);

/// Exhaustive subset-sum: lexicographically first index set (0-based,
/// ascending) whose weights sum to half the total, if any.
std::optional<std::vector<std::size_t>> solve_partition(const PartitionInstance& inst,
                                                        std::size_t max_items = 30);

struct OracleExperimentReport {
  std::uint32_t n = 0;
  std::uint64_t candidate_count = 0;   // number of hidden n-subsets, C(2n, n)
  std::uint64_t required_queries = 0;  // == candidate_count
  // Each distinguishing query: the one offered set on which the hidden-set
  // variant answers differently from the plain variant.
  std::vector<std::vector<std::string>> distinguishing_queries;
  bool family_verified = false;   // variants differ exactly at their distinguishing query
  bool verdict_flips = false;     // plain variant stable, every hidden variant unstable
  bool unique_blocks = false;     // each hidden variant blocked only by X_I ∪ {y}
  std::uint64_t searcher_queries_plain = 0;        // oracle calls by the real decider on C_0
  std::uint64_t searcher_distinct_distinguishing = 0;  // distinct distinguishing sets it evaluated
};

/// Mechanical adversary argument for the oracle lower bound: enumerates the
/// hidden-set family, verifies each variant differs from the plain choice
/// function on exactly one query, and cross-validates with the real
/// blocking-set decider. n ≤ 4.
OracleExperimentReport oracle_lower_bound_experiment(std::uint32_t n);

}  // namespace tn
