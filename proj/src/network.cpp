#include "tradenet/network.hpp"

#include <algorithm>
#include <set>

namespace tn {

namespace {

template <class Decl>
void sort_by_id(std::vector<Decl>& decls) {
  std::sort(decls.begin(), decls.end(),
            [](const Decl& a, const Decl& b) { return a.id < b.id; });
}

}  // namespace

TradingNetwork::TradingNetwork(std::vector<FirmDecl> firms,
                               std::vector<ContractDecl> contracts)
    : counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  sort_by_id(firms);
  sort_by_id(contracts);

  firm_ids_.reserve(firms.size());
  for (const auto& f : firms) {
    if (!firm_by_id_.emplace(f.id, static_cast<FirmIndex>(firm_ids_.size())).second)
      throw SchemaError("duplicate firm id: " + f.id);
    firm_ids_.push_back(f.id);
  }

  const std::size_t n = contracts.size();
  all_ = ContractSet::full(n);
  contract_ids_.reserve(n);
  seller_.reserve(n);
  buyer_.reserve(n);
  for (const auto& c : contracts) {
    if (!contract_by_id_.emplace(c.id, static_cast<ContractIndex>(contract_ids_.size())).second)
      throw SchemaError("duplicate contract id: " + c.id);
    auto s = firm_by_id_.find(c.seller);
    auto b = firm_by_id_.find(c.buyer);
    if (s == firm_by_id_.end())
      throw SchemaError("contract " + c.id + ": unknown seller " + c.seller);
    if (b == firm_by_id_.end())
      throw SchemaError("contract " + c.id + ": unknown buyer " + c.buyer);
    if (s->second == b->second)
      throw SchemaError("contract " + c.id + ": seller and buyer coincide");
    contract_ids_.push_back(c.id);
    seller_.push_back(s->second);
    buyer_.push_back(b->second);
  }

  up_.assign(firm_ids_.size(), ContractSet(n));
  down_.assign(firm_ids_.size(), ContractSet(n));
  own_.assign(firm_ids_.size(), ContractSet(n));
  for (ContractIndex c = 0; c < n; ++c) {
    up_[buyer_[c]].insert(c);
    down_[seller_[c]].insert(c);
    own_[buyer_[c]].insert(c);
    own_[seller_[c]].insert(c);
  }

  choice_.reserve(firms.size());
  for (FirmIndex f = 0; f < firms.size(); ++f)
    validate_choice_decl(f, firms[f].choice);

  // Flow network: exactly two terminal agents, every non-terminal firm
  // declares a flow-based choice function.
  std::size_t terminals = 0;
  bool kinds_ok = true;
  for (FirmIndex f = 0; f < firm_ids_.size(); ++f) {
    ChoiceKind k = choice_kind(f);
    if (is_terminal(f)) {
      ++terminals;
      kinds_ok = kinds_ok && (k == ChoiceKind::terminal || k == ChoiceKind::flow_based);
    } else {
      kinds_ok = kinds_ok && k == ChoiceKind::flow_based;
    }
  }
  is_flow_ = kinds_ok && terminals == 2;
}

void TradingNetwork::validate_choice_decl(FirmIndex f, const ChoiceDecl& decl) {
  const std::string& fid = firm_ids_[f];
  auto resolve = [&](const std::string& cid) {
    auto it = contract_by_id_.find(cid);
    if (it == contract_by_id_.end())
      throw SchemaError("firm " + fid + ": choice references unknown contract " + cid);
    if (!own_[f].contains(it->second))
      throw SchemaError("firm " + fid + ": choice references foreign contract " + cid);
    return it->second;
  };
  auto check_cover = [&](const std::vector<ContractIndex>& list, const ContractSet& side,
                         const char* what) {
    ContractSet seen(contract_count());
    for (ContractIndex c : list) {
      if (!side.contains(c) || seen.contains(c))
        throw SchemaError("firm " + fid + ": " + what + " list is not a permutation of its side");
      seen.insert(c);
    }
    if (seen != side)
      throw SchemaError("firm " + fid + ": " + what + " list does not cover its side");
  };

  switch (decl.kind) {
    case ChoiceKind::terminal: {
      choice_.emplace_back(TerminalChoice{});
      return;
    }
    case ChoiceKind::flow_based: {
      FlowBasedChoice fc;
      for (const auto& cid : decl.buyer_prefs) fc.buyer_pref.push_back(resolve(cid));
      for (const auto& cid : decl.seller_prefs) fc.seller_pref.push_back(resolve(cid));
      check_cover(fc.buyer_pref, up_[f], "buyer preference");
      check_cover(fc.seller_pref, down_[f], "seller preference");
      choice_.emplace_back(std::move(fc));
      return;
    }
    case ChoiceKind::partition_f:
    case ChoiceKind::partition_g: {
      const ContractSet& side = decl.kind == ChoiceKind::partition_f ? up_[f] : down_[f];
      std::vector<ContractIndex> weighted;
      std::vector<std::int64_t> weights;
      std::int64_t total = 0;
      for (const auto& [cid, w] : decl.weighted) {
        if (w <= 0) throw SchemaError("firm " + fid + ": weights must be positive");
        weighted.push_back(resolve(cid));
        weights.push_back(w);
        total += w;
      }
      check_cover(weighted, side, "weight");
      if (decl.kind == ChoiceKind::partition_f) {
        // Order is immaterial for the threshold test; canonicalize.
        std::vector<std::size_t> perm(weighted.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return weighted[a] < weighted[b]; });
        PartitionFChoice pf;
        for (std::size_t i : perm) {
          pf.weighted.push_back(weighted[i]);
          pf.weights.push_back(weights[i]);
        }
        pf.total = total;
        choice_.emplace_back(std::move(pf));
      } else {
        for (std::size_t i = 1; i < weights.size(); ++i)
          if (weights[i - 1] > weights[i])
            throw SchemaError("firm " + fid + ": partition_g weights must be non-decreasing");
        PartitionGChoice pg{std::move(weighted), std::move(weights), total};
        choice_.emplace_back(std::move(pg));
      }
      return;
    }
    case ChoiceKind::oracle_family: {
      if (decl.n == 0) throw SchemaError("firm " + fid + ": oracle_family needs n >= 1");
      if (up_[f].count() != 2 * static_cast<std::size_t>(decl.n))
        throw SchemaError("firm " + fid + ": oracle_family needs exactly 2n upstream contracts");
      OracleFamilyChoice oc;
      oc.n = decl.n;
      if (decl.hidden.has_value()) {
        ContractSet hidden(contract_count());
        for (const auto& cid : *decl.hidden) {
          ContractIndex c = resolve(cid);
          if (!up_[f].contains(c) || hidden.contains(c))
            throw SchemaError("firm " + fid + ": hidden set must be distinct upstream contracts");
          hidden.insert(c);
        }
        if (hidden.count() != decl.n)
          throw SchemaError("firm " + fid + ": hidden set must have exactly n contracts");
        oc.hidden = std::move(hidden);
      }
      oc.queries = std::make_shared<std::atomic<std::uint64_t>>(0);
      choice_.emplace_back(std::move(oc));
      return;
    }
    case ChoiceKind::table: {
      const std::size_t m = own_[f].count();
      if (m > 12)
        throw SchemaError("firm " + fid + ": table choice capped at 12 contracts");
      TableChoice tc;
      tc.domain = own_[f].indices();
      tc.image.assign(std::size_t{1} << m, UINT32_MAX);
      auto local_mask = [&](const std::vector<std::string>& ids) {
        std::uint32_t mask = 0;
        for (const auto& cid : ids) {
          ContractIndex c = resolve(cid);
          auto pos = std::lower_bound(tc.domain.begin(), tc.domain.end(), c) - tc.domain.begin();
          std::uint32_t bit = std::uint32_t{1} << pos;
          if (mask & bit)
            throw SchemaError("firm " + fid + ": duplicate contract in table entry");
          mask |= bit;
        }
        return mask;
      };
      for (const auto& [offered, chosen] : decl.table) {
        std::uint32_t key = local_mask(offered);
        std::uint32_t val = local_mask(chosen);
        if (val & ~key)
          throw SchemaError("firm " + fid + ": table chooses contracts it was not offered");
        if (tc.image[key] != UINT32_MAX)
          throw SchemaError("firm " + fid + ": duplicate table entry");
        tc.image[key] = val;
      }
      for (std::uint32_t v : tc.image)
        if (v == UINT32_MAX)
          throw SchemaError("firm " + fid + ": table must cover every subset of the firm's contracts");
      choice_.emplace_back(std::move(tc));
      return;
    }
  }
  throw SchemaError("firm " + fid + ": unknown choice kind");
}

FirmIndex TradingNetwork::firm_index(const std::string& id) const {
  auto it = firm_by_id_.find(id);
  if (it == firm_by_id_.end()) throw SchemaError("unknown firm: " + id);
  return it->second;
}

ContractIndex TradingNetwork::contract_index(const std::string& id) const {
  auto it = contract_by_id_.find(id);
  if (it == contract_by_id_.end()) throw SchemaError("unknown contract: " + id);
  return it->second;
}

ContractSet TradingNetwork::choose(FirmIndex f, const ContractSet& offered) const {
  if (!offered.subset_of(own_[f]))
    throw ModelError("choice function of " + firm_ids_[f] +
                     " consulted on contracts outside its own set");
  counter_->fetch_add(1, std::memory_order_relaxed);
  FirmContext ctx{up_[f], down_[f]};
  ContractSet chosen = evaluate_choice(choice_[f], ctx, offered);
  if (!chosen.subset_of(offered))
    throw ModelError("choice function of " + firm_ids_[f] + " returned a non-subset");
  return chosen;
}

ContractSet TradingNetwork::upstream_of(FirmIndex f, const ContractSet& Y) const {
  if (f >= firm_count()) throw SchemaError("unknown firm index");
  return Y & up_[f];
}

ContractSet TradingNetwork::downstream_of(FirmIndex f, const ContractSet& Y) const {
  if (f >= firm_count()) throw SchemaError("unknown firm index");
  return Y & down_[f];
}

ContractSet TradingNetwork::chosen_buyer(FirmIndex f, const ContractSet& Y,
                                         const ContractSet& Z) const {
  return choose(f, (Y & up_[f]) | (Z & down_[f])) & up_[f];
}

ContractSet TradingNetwork::chosen_seller(FirmIndex f, const ContractSet& Z,
                                          const ContractSet& Y) const {
  return choose(f, (Z & down_[f]) | (Y & up_[f])) & down_[f];
}

ContractSet TradingNetwork::rejected_buyer(FirmIndex f, const ContractSet& Y,
                                           const ContractSet& Z) const {
  return (Y & up_[f]) - chosen_buyer(f, Y, Z);
}

ContractSet TradingNetwork::rejected_seller(FirmIndex f, const ContractSet& Z,
                                            const ContractSet& Y) const {
  return (Z & down_[f]) - chosen_seller(f, Z, Y);
}

bool TradingNetwork::is_individually_rational(const ContractSet& A, FirmIndex f) const {
  ContractSet af = A & own_[f];
  return choose(f, af) == af;
}

bool TradingNetwork::is_acceptable(const ContractSet& A) const {
  for (FirmIndex f = 0; f < firm_count(); ++f)
    if (!is_individually_rational(A, f)) return false;
  return true;
}

bool TradingNetwork::is_w_acceptable(const ContractSet& S, const ContractSet& W,
                                     FirmIndex f) const {
  ContractSet sf = S & own_[f];
  if (sf.empty()) return true;
  return sf.subset_of(choose(f, (W & own_[f]) | sf));
}

bool TradingNetwork::is_w_acceptable_all(const ContractSet& S, const ContractSet& W) const {
  for (FirmIndex f : firms_of(S))
    if (!is_w_acceptable(S, W, f)) return false;
  return true;
}

SequenceKind TradingNetwork::validate_sequence(const std::vector<ContractIndex>& seq) const {
  if (seq.empty()) return SequenceKind::invalid;
  ContractSet seen(contract_count());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    ContractIndex c = seq[i];
    if (c >= contract_count()) throw ModelError("sequence references unknown contract index");
    if (seen.contains(c)) return SequenceKind::invalid;
    seen.insert(c);
    if (i + 1 < seq.size() && buyer_[c] != seller_[seq[i + 1]]) return SequenceKind::invalid;
  }
  std::set<FirmIndex> sellers;
  for (ContractIndex c : seq) sellers.insert(seller_[c]);
  if (sellers.size() != seq.size()) return SequenceKind::trail;
  FirmIndex last_buyer = buyer_[seq.back()];
  if (last_buyer == seller_[seq.front()]) return SequenceKind::cycle;
  if (!sellers.contains(last_buyer)) return SequenceKind::path;
  return SequenceKind::trail;
}

std::pair<std::vector<FirmIndex>, std::vector<FirmIndex>>
TradingNetwork::classify_terminals() const {
  std::vector<FirmIndex> sellers, buyers;
  for (FirmIndex f = 0; f < firm_count(); ++f) {
    if (is_terminal_seller(f)) sellers.push_back(f);
    if (is_terminal_buyer(f)) buyers.push_back(f);
  }
  return {std::move(sellers), std::move(buyers)};
}

bool TradingNetwork::is_acyclic() const {
  // Color DFS on the firm graph induced by contracts.
  std::vector<std::vector<FirmIndex>> adj(firm_count());
  for (ContractIndex c = 0; c < contract_count(); ++c)
    adj[seller_[c]].push_back(buyer_[c]);
  std::vector<int> color(firm_count(), 0);
  std::vector<std::pair<FirmIndex, std::size_t>> stack;
  for (FirmIndex start = 0; start < firm_count(); ++start) {
    if (color[start] != 0) continue;
    stack.emplace_back(start, 0);
    color[start] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj[v].size()) {
        FirmIndex w = adj[v][i++];
        if (color[w] == 1) return false;
        if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

std::vector<FirmIndex> TradingNetwork::firms_of(const ContractSet& Y) const {
  std::vector<bool> mark(firm_count(), false);
  Y.for_each([&](ContractIndex c) {
    mark[seller_[c]] = true;
    mark[buyer_[c]] = true;
  });
  std::vector<FirmIndex> out;
  for (FirmIndex f = 0; f < firm_count(); ++f)
    if (mark[f]) out.push_back(f);
  return out;
}

std::uint64_t TradingNetwork::oracle_queries() const {
  std::uint64_t total = 0;
  for (const auto& cf : choice_)
    if (const auto* oc = std::get_if<OracleFamilyChoice>(&cf))
      total += oc->queries->load();
  return total;
}

void TradingNetwork::reset_counters() const {
  counter_->store(0);
  for (const auto& cf : choice_)
    if (const auto* oc = std::get_if<OracleFamilyChoice>(&cf)) oc->queries->store(0);
}

void TradingNetwork::attach_oracle_log(FirmIndex f,
                                       std::shared_ptr<std::vector<ContractSet>> log) {
  auto* oc = std::get_if<OracleFamilyChoice>(&choice_[f]);
  if (!oc) throw ModelError("firm " + firm_ids_[f] + " has no oracle-family choice");
  oc->query_log = std::move(log);
}

}  // namespace tn
