#include "tradenet/audit.hpp"

namespace tn {

const char* to_string(FullSubClause c) {
  switch (c) {
    case FullSubClause::sss_buyer: return "sss_buyer";
    case FullSubClause::sss_seller: return "sss_seller";
    case FullSubClause::csc_buyer: return "csc_buyer";
    case FullSubClause::csc_seller: return "csc_seller";
  }
  return "?";
}

namespace {

ContractSet from_mask(std::size_t universe, const std::vector<ContractIndex>& pool,
                      std::uint32_t mask) {
  ContractSet s(universe);
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (mask & (std::uint32_t{1} << i)) s.insert(pool[i]);
  return s;
}

}  // namespace

std::vector<IrcViolation> audit_irc(const TradingNetwork& net, FirmIndex f,
                                    const AuditOptions& opts) {
  const ContractSet& own = net.firm_contracts(f);
  const std::size_t m = own.count();
  if (m > opts.max_contracts)
    throw BudgetError("audit cap exceeded: firm " + net.firm_id(f) + " has " +
                      std::to_string(m) + " contracts (cap " +
                      std::to_string(opts.max_contracts) + ")");
  std::vector<ContractIndex> pool = own.indices();
  const std::size_t universe = net.contract_count();
  std::vector<IrcViolation> out;

  // Dropping rejected contracts one at a time covers every C(Y) ⊆ Z ⊆ Y by
  // induction, since each intermediate set keeps the same chosen set.
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    ContractSet offered = from_mask(universe, pool, mask);
    ContractSet chosen = net.choose(f, offered);
    ContractSet rejected = offered - chosen;
    bool done = false;
    rejected.for_each([&](ContractIndex r) {
      if (done) return;
      ContractSet reduced = offered;
      reduced.erase(r);
      ContractSet chosen_reduced = net.choose(f, reduced);
      if (chosen_reduced != chosen) {
        out.push_back({offered, reduced, chosen, chosen_reduced});
        done = out.size() >= opts.max_violations;
      }
    });
    if (out.size() >= opts.max_violations) break;
  }
  return out;
}

std::vector<FullSubViolation> audit_full_substitutability(const TradingNetwork& net,
                                                          FirmIndex f,
                                                          const AuditOptions& opts) {
  const std::size_t m = net.firm_contracts(f).count();
  if (m > opts.max_contracts)
    throw BudgetError("audit cap exceeded: firm " + net.firm_id(f) + " has " +
                      std::to_string(m) + " contracts (cap " +
                      std::to_string(opts.max_contracts) + ")");
  std::vector<ContractIndex> up = net.upstream_contracts(f).indices();
  std::vector<ContractIndex> down = net.downstream_contracts(f).indices();
  const std::size_t universe = net.contract_count();
  std::vector<FullSubViolation> out;

  auto rejected = [&](bool buyer_side, const ContractSet& y, const ContractSet& z) {
    return buyer_side ? net.rejected_buyer(f, y, z) : net.rejected_seller(f, z, y);
  };

  // Adjacent (one-contract) nested pairs imply all nested pairs by
  // transitivity of set inclusion, so checking covers is exhaustive.
  //
  // SSS: rejections on one side grow with that side's offers.
  // CSC: rejections on one side shrink as the *other* side's offers grow.
  auto check = [&](FullSubClause clause) {
    bool buyer_side = clause == FullSubClause::sss_buyer || clause == FullSubClause::csc_buyer;
    bool same_side = clause == FullSubClause::sss_buyer || clause == FullSubClause::sss_seller;
    // The varied side is the rejection side for SSS, the other side for CSC.
    const auto& varied_pool = (buyer_side == same_side) ? up : down;
    const auto& fixed_pool = (buyer_side == same_side) ? down : up;
    const std::uint32_t varied_count = std::uint32_t{1} << varied_pool.size();
    const std::uint32_t fixed_count = std::uint32_t{1} << fixed_pool.size();

    for (std::uint32_t fm = 0; fm < fixed_count; ++fm) {
      ContractSet fixed = from_mask(universe, fixed_pool, fm);
      std::vector<ContractSet> rej(varied_count);
      for (std::uint32_t vm = 0; vm < varied_count; ++vm) {
        ContractSet varied = from_mask(universe, varied_pool, vm);
        const ContractSet& y = buyer_side == same_side ? varied : fixed;
        const ContractSet& z = buyer_side == same_side ? fixed : varied;
        rej[vm] = buyer_side ? rejected(true, y, z) : rejected(false, z, y);
      }
      for (std::uint32_t vm = 0; vm < varied_count; ++vm) {
        for (std::size_t i = 0; i < varied_pool.size(); ++i) {
          if (vm & (std::uint32_t{1} << i)) continue;
          std::uint32_t bigger = vm | (std::uint32_t{1} << i);
          // SSS wants rej[small] ⊆ rej[big]; CSC wants rej[big] ⊆ rej[small].
          const ContractSet& lhs = same_side ? rej[vm] : rej[bigger];
          const ContractSet& rhs = same_side ? rej[bigger] : rej[vm];
          if (lhs.subset_of(rhs)) continue;
          ContractSet diff = lhs - rhs;
          out.push_back({clause, from_mask(universe, varied_pool, vm),
                         from_mask(universe, varied_pool, bigger), fixed,
                         static_cast<ContractIndex>(diff.first())});
          if (out.size() >= opts.max_violations) return;
        }
      }
    }
  };

  for (FullSubClause clause :
       {FullSubClause::sss_buyer, FullSubClause::sss_seller, FullSubClause::csc_buyer,
        FullSubClause::csc_seller}) {
    if (out.size() >= opts.max_violations) break;
    check(clause);
  }
  return out;
}

bool replay_violation(const TradingNetwork& net, FirmIndex f, const IrcViolation& v) {
  if (!v.chosen_offered.subset_of(v.reduced) || !v.reduced.subset_of(v.offered))
    return false;
  return net.choose(f, v.offered) == v.chosen_offered &&
         net.choose(f, v.reduced) == v.chosen_reduced &&
         v.chosen_reduced != v.chosen_offered;
}

bool replay_violation(const TradingNetwork& net, FirmIndex f, const FullSubViolation& v) {
  if (!v.small.subset_of(v.big)) return false;
  auto rej = [&](const ContractSet& varied) {
    switch (v.clause) {
      case FullSubClause::sss_buyer: return net.rejected_buyer(f, varied, v.context);
      case FullSubClause::sss_seller: return net.rejected_seller(f, varied, v.context);
      case FullSubClause::csc_buyer: return net.rejected_buyer(f, v.context, varied);
      case FullSubClause::csc_seller: return net.rejected_seller(f, v.context, varied);
    }
    throw ModelError("unreachable");
  };
  bool same_side =
      v.clause == FullSubClause::sss_buyer || v.clause == FullSubClause::sss_seller;
  ContractSet lhs = rej(same_side ? v.small : v.big);
  ContractSet rhs = rej(same_side ? v.big : v.small);
  return lhs.contains(v.witness) && !rhs.contains(v.witness);
}

}  // namespace tn
