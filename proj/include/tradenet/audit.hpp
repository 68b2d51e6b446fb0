#pragma once

#include <cstddef>
#include <vector>

#include "tradenet/network.hpp"

namespace tn {

struct AuditOptions {
  std::size_t max_contracts = 12;  // firms with more contracts are refused
  std::size_t max_violations = 16;
};

/// Irrelevance of rejected contracts failed: C(reduced) != C(offered) even
/// though C(offered) ⊆ reduced ⊆ offered.
struct IrcViolation {
  ContractSet offered;
  ContractSet reduced;
  ContractSet chosen_offered;
  ContractSet chosen_reduced;
};

enum class FullSubClause { sss_buyer, sss_seller, csc_buyer, csc_seller };

const char* to_string(FullSubClause c);

/// One failed rejection-inclusion instance of the four substitutability
/// clauses. `small`/`big` are the nested sets on the varied side (same side
/// for SSS, opposite side for CSC); `context` is the fixed other-side set.
/// `witness` is rejected where the clause forbids it.
struct FullSubViolation {
  FullSubClause clause;
  ContractSet small;
  ContractSet big;
  ContractSet context;
  ContractIndex witness;
};

/// Exhaustive IRC audit of firm f's choice function over 2^{X_f}.
/// Empty result means verified; throws BudgetError past the cap.
std::vector<IrcViolation> audit_irc(const TradingNetwork& net, FirmIndex f,
                                    const AuditOptions& opts = {});

/// Exhaustive same-side-substitutability / cross-side-complementarity audit.
std::vector<FullSubViolation> audit_full_substitutability(
    const TradingNetwork& net, FirmIndex f, const AuditOptions& opts = {});

/// Re-evaluates a reported violation from scratch; true iff it still holds.
bool replay_violation(const TradingNetwork& net, FirmIndex f, const IrcViolation& v);
bool replay_violation(const TradingNetwork& net, FirmIndex f, const FullSubViolation& v);

}  // namespace tn
