#include "tradenet/choice.hpp"

namespace tn {

const char* to_string(ChoiceKind k) {
  switch (k) {
    case ChoiceKind::terminal: return "terminal";
    case ChoiceKind::flow_based: return "flow_based";
    case ChoiceKind::partition_f: return "partition_f";
    case ChoiceKind::partition_g: return "partition_g";
    case ChoiceKind::oracle_family: return "oracle_family";
    case ChoiceKind::table: return "table";
  }
  return "?";
}

ChoiceKind kind_of(const ChoiceFunction& cf) {
  return static_cast<ChoiceKind>(cf.index());
}

namespace {

ContractSet flow_choose(const FlowBasedChoice& fc, const FirmContext& ctx,
                        const ContractSet& offered) {
  // A firm with no upstream or no downstream contracts in the network is a
  // terminal agent and accepts everything.
  if (ctx.upstream.empty() || ctx.downstream.empty()) return offered;
  ContractSet up = offered & ctx.upstream;
  ContractSet down = offered & ctx.downstream;
  std::size_t k = std::min(up.count(), down.count());
  ContractSet chosen(offered.universe());
  std::size_t taken = 0;
  for (ContractIndex c : fc.buyer_pref) {
    if (taken == k) break;
    if (up.contains(c)) {
      chosen.insert(c);
      ++taken;
    }
  }
  taken = 0;
  for (ContractIndex c : fc.seller_pref) {
    if (taken == k) break;
    if (down.contains(c)) {
      chosen.insert(c);
      ++taken;
    }
  }
  return chosen;
}

ContractSet partition_f_choose(const PartitionFChoice& pf, const FirmContext& ctx,
                               const ContractSet& offered) {
  ContractSet up = offered & ctx.upstream;
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < pf.weighted.size(); ++i)
    if (up.contains(pf.weighted[i])) sum += pf.weights[i];
  // Keep downstream contracts only when the offered upstream weight reaches
  // the threshold; upstream contracts are always kept. Doubled comparison:
  // sum >= total/2.
  if (2 * sum >= pf.total) return offered;
  return up;
}

ContractSet partition_g_choose(const PartitionGChoice& pg, const FirmContext& ctx,
                               const ContractSet& offered) {
  ContractSet up = offered & ctx.upstream;
  if (up.empty()) return ContractSet(offered.universe());
  ContractSet down = offered & ctx.downstream;
  // Longest prefix (in index order) of the offered downstream contracts
  // whose weight stays within half the total; with a small offered sum this
  // keeps everything.
  ContractSet chosen = up;
  std::int64_t run = 0;
  for (std::size_t i = 0; i < pg.weighted.size(); ++i) {
    if (!down.contains(pg.weighted[i])) continue;
    if (2 * (run + pg.weights[i]) > pg.total) break;
    run += pg.weights[i];
    chosen.insert(pg.weighted[i]);
  }
  return chosen;
}

ContractSet oracle_choose(const OracleFamilyChoice& oc, const FirmContext& ctx,
                          const ContractSet& offered) {
  if (oc.queries) oc.queries->fetch_add(1, std::memory_order_relaxed);
  if (oc.query_log) oc.query_log->push_back(offered);
  ContractSet up = offered & ctx.upstream;
  bool keep_down = up.count() >= oc.n + std::size_t{1} ||
                   (oc.hidden.has_value() && up == *oc.hidden);
  return keep_down ? offered : up;
}

ContractSet table_choose(const TableChoice& tc, const ContractSet& offered) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < tc.domain.size(); ++i)
    if (offered.contains(tc.domain[i])) mask |= std::uint32_t{1} << i;
  std::uint32_t out = tc.image[mask];
  ContractSet chosen(offered.universe());
  for (std::size_t i = 0; i < tc.domain.size(); ++i)
    if (out & (std::uint32_t{1} << i)) chosen.insert(tc.domain[i]);
  return chosen;
}

}  // namespace

ContractSet evaluate_choice(const ChoiceFunction& cf, const FirmContext& ctx,
                            const ContractSet& offered) {
  switch (kind_of(cf)) {
    case ChoiceKind::terminal:
      return offered;
    case ChoiceKind::flow_based:
      return flow_choose(std::get<FlowBasedChoice>(cf), ctx, offered);
    case ChoiceKind::partition_f:
      return partition_f_choose(std::get<PartitionFChoice>(cf), ctx, offered);
    case ChoiceKind::partition_g:
      return partition_g_choose(std::get<PartitionGChoice>(cf), ctx, offered);
    case ChoiceKind::oracle_family:
      return oracle_choose(std::get<OracleFamilyChoice>(cf), ctx, offered);
    case ChoiceKind::table:
      return table_choose(std::get<TableChoice>(cf), offered);
  }
  throw ModelError("unhandled choice kind");
}

}  // namespace tn
