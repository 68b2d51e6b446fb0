#include "tradenet/solve.hpp"

#include <algorithm>
#include <deque>

namespace tn {

const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::locally_blocking_trail: return "locally_blocking_trail";
    case BlockKind::blocking_path: return "blocking_path";
    case BlockKind::blocking_cycle: return "blocking_cycle";
    case BlockKind::blocking_set: return "blocking_set";
    case BlockKind::sequentially_blocking_trail: return "sequentially_blocking_trail";
  }
  return "?";
}

const char* to_string(Concept c) {
  switch (c) {
    case Concept::trail: return "trail";
    case Concept::weak_trail: return "weak-trail";
    case Concept::path_or_cycle: return "pc";
    case Concept::stable: return "stable";
  }
  return "?";
}

namespace {

ContractSet singleton(std::size_t universe, ContractIndex c) {
  ContractSet s(universe);
  s.insert(c);
  return s;
}

ContractSet set_of(std::size_t universe, std::initializer_list<ContractIndex> cs) {
  ContractSet s(universe);
  for (ContractIndex c : cs) s.insert(c);
  return s;
}

}  // namespace

DeferredAcceptanceResult deferred_acceptance(const TradingNetwork& net) {
  const std::size_t n = net.contract_count();
  ContractSet offered = net.all_contracts();  // weakly shrinks
  ContractSet requested(n);                   // weakly grows
  const std::uint64_t max_rounds = 2 * static_cast<std::uint64_t>(n) + 1;
  std::uint64_t rounds = 0;
  std::uint64_t rejections = 0;
  bool fixed = false;

  while (rounds < max_rounds) {
    ++rounds;
    ContractSet rej_seller(n), rej_buyer(n);
    for (FirmIndex f = 0; f < net.firm_count(); ++f) {
      rej_seller |= net.rejected_seller(f, requested, offered);
      rej_buyer |= net.rejected_buyer(f, offered, requested);
    }
    ContractSet next_offered = net.all_contracts() - rej_seller;
    ContractSet next_requested = net.all_contracts() - rej_buyer;
    if (next_offered == offered && next_requested == requested) {
      rejections = rej_seller.count() + rej_buyer.count();
      fixed = true;
      break;
    }
    if (!next_offered.subset_of(offered) || !requested.subset_of(next_requested))
      throw ModelError(
          "generalized deferred acceptance lost monotonicity; "
          "choice functions are not fully substitutable");
    offered = next_offered;
    requested = next_requested;
  }
  if (!fixed)
    throw ModelError(
        "deferred acceptance exceeded the 2|X|+1 round bound; "
        "choice functions are not fully substitutable");

  ContractSet outcome = offered & requested;
  if (!net.is_acceptable(outcome))
    throw ModelError(
        "deferred acceptance fixed point is not acceptable; "
        "choice functions are not fully substitutable");
  if (find_locally_blocking_trail(net, outcome).has_value())
    throw ModelError(
        "deferred acceptance fixed point admits a locally blocking trail; "
        "choice functions are not fully substitutable");
  return {std::move(outcome), rounds, rejections};
}

std::optional<std::vector<ContractIndex>> find_locally_blocking_trail(
    const TradingNetwork& net, const ContractSet& A) {
  const std::size_t n = net.contract_count();
  ContractSet free = net.all_contracts() - A;

  auto seller_accepts = [&](ContractIndex c) {
    return net.is_w_acceptable(singleton(n, c), A, net.seller(c));
  };
  auto buyer_accepts = [&](ContractIndex c) {
    return net.is_w_acceptable(singleton(n, c), A, net.buyer(c));
  };

  std::vector<int> parent(n, -2);  // -2 unvisited, -1 source
  std::deque<ContractIndex> queue;
  auto emit = [&](ContractIndex last) {
    std::vector<ContractIndex> trail;
    for (int c = static_cast<int>(last); c != -1; c = parent[c])
      trail.push_back(static_cast<ContractIndex>(c));
    std::reverse(trail.begin(), trail.end());
    return trail;
  };

  std::vector<ContractIndex> order = free.indices();
  for (ContractIndex c : order) {
    if (!seller_accepts(c)) continue;
    parent[c] = -1;
    if (buyer_accepts(c)) return emit(c);
    queue.push_back(c);
  }
  while (!queue.empty()) {
    ContractIndex x = queue.front();
    queue.pop_front();
    FirmIndex join = net.buyer(x);
    ContractSet next = net.downstream_contracts(join) & free;
    std::optional<std::vector<ContractIndex>> found;
    next.for_each([&](ContractIndex y) {
      if (found || parent[y] != -2) return;
      if (!net.is_w_acceptable(set_of(n, {x, y}), A, join)) return;
      parent[y] = static_cast<int>(x);
      if (buyer_accepts(y)) {
        found = emit(y);
        return;
      }
      queue.push_back(y);
    });
    if (found) return found;
  }
  return std::nullopt;
}

bool is_trail_stable(const TradingNetwork& net, const ContractSet& A) {
  return net.is_acceptable(A) && !find_locally_blocking_trail(net, A).has_value();
}

std::vector<FirmEvidence> block_evidence(const TradingNetwork& net,
                                         const ContractSet& A,
                                         const BlockReport& report) {
  const std::size_t n = net.contract_count();
  std::vector<FirmEvidence> out;
  auto add = [&](FirmIndex f, const ContractSet& s) {
    out.push_back({f, s, net.is_w_acceptable(s, A, f)});
  };
  switch (report.kind) {
    case BlockKind::blocking_set:
    case BlockKind::blocking_path:
    case BlockKind::blocking_cycle: {
      for (FirmIndex f : net.firms_of(report.contracts))
        add(f, report.contracts & net.firm_contracts(f));
      return out;
    }
    case BlockKind::locally_blocking_trail: {
      const auto& seq = report.sequence;
      add(net.seller(seq.front()), singleton(n, seq.front()));
      for (std::size_t m = 1; m < seq.size(); ++m)
        add(net.buyer(seq[m - 1]), set_of(n, {seq[m - 1], seq[m]}));
      add(net.buyer(seq.back()), singleton(n, seq.back()));
      return out;
    }
    case BlockKind::sequentially_blocking_trail: {
      const auto& seq = report.sequence;
      add(net.seller(seq.front()), singleton(n, seq.front()));
      // Prefix-cumulative facts; if any fails, replay falls back to the
      // suffix-cumulative reading.
      ContractSet prefix(n);
      prefix.insert(seq.front());
      for (std::size_t m = 1; m < seq.size(); ++m) {
        prefix.insert(seq[m]);
        FirmIndex f = net.seller(seq[m]);
        add(f, prefix & net.firm_contracts(f));
      }
      add(net.buyer(seq.back()), singleton(n, seq.back()));
      return out;
    }
  }
  return out;
}

namespace {

bool sequential_trail_ok(const TradingNetwork& net, const ContractSet& A,
                         const std::vector<ContractIndex>& seq) {
  const std::size_t n = net.contract_count();
  if (!net.is_w_acceptable(singleton(n, seq.front()), A, net.seller(seq.front())))
    return false;
  if (!net.is_w_acceptable(singleton(n, seq.back()), A, net.buyer(seq.back())))
    return false;
  auto variant_ok = [&](bool use_prefix) {
    for (std::size_t m = 1; m < seq.size(); ++m) {
      FirmIndex f = net.seller(seq[m]);
      ContractSet part(n);
      if (use_prefix) {
        for (std::size_t j = 0; j <= m; ++j) part.insert(seq[j]);
      } else {
        for (std::size_t j = m - 1; j < seq.size(); ++j) part.insert(seq[j]);
      }
      if (!net.is_w_acceptable(part & net.firm_contracts(f), A, f)) return false;
    }
    return true;
  };
  return variant_ok(true) || variant_ok(false);
}

}  // namespace

bool replay_block(const TradingNetwork& net, const ContractSet& A,
                  const BlockReport& report) {
  if (report.contracts.empty()) return false;
  if (report.contracts.intersects(A)) return false;
  switch (report.kind) {
    case BlockKind::blocking_set: {
      for (FirmIndex f : net.firms_of(report.contracts))
        if (!net.is_w_acceptable(report.contracts, A, f)) return false;
      return true;
    }
    case BlockKind::blocking_path:
    case BlockKind::blocking_cycle: {
      SequenceKind sk = net.validate_sequence(report.sequence);
      if (report.kind == BlockKind::blocking_path && sk != SequenceKind::path) return false;
      if (report.kind == BlockKind::blocking_cycle && sk != SequenceKind::cycle) return false;
      ContractSet member(net.contract_count());
      for (ContractIndex c : report.sequence) member.insert(c);
      if (member != report.contracts) return false;
      for (FirmIndex f : net.firms_of(report.contracts))
        if (!net.is_w_acceptable(report.contracts, A, f)) return false;
      return true;
    }
    case BlockKind::locally_blocking_trail: {
      if (net.validate_sequence(report.sequence) == SequenceKind::invalid) return false;
      for (const auto& ev : block_evidence(net, A, report))
        if (!ev.accepted) return false;
      return true;
    }
    case BlockKind::sequentially_blocking_trail: {
      if (net.validate_sequence(report.sequence) == SequenceKind::invalid) return false;
      return sequential_trail_ok(net, A, report.sequence);
    }
  }
  return false;
}

namespace {

// Directed cycle among the given contracts, viewed as arcs of the firm
// multigraph. Deterministic: firms and contracts scanned in ascending order.
std::optional<std::vector<ContractIndex>> find_contract_cycle(
    const TradingNetwork& net, const ContractSet& free) {
  const std::size_t nf = net.firm_count();
  std::vector<std::vector<ContractIndex>> out(nf);
  free.for_each([&](ContractIndex c) { out[net.seller(c)].push_back(c); });

  std::vector<int> color(nf, 0);
  std::vector<int> via(nf, -1);  // contract that discovered the firm
  struct Frame {
    FirmIndex firm;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  for (FirmIndex start = 0; start < nf; ++start) {
    if (color[start] != 0) continue;
    color[start] = 1;
    stack.push_back({start});
    while (!stack.empty()) {
      Frame& fr = stack.back();
      if (fr.next < out[fr.firm].size()) {
        ContractIndex c = out[fr.firm][fr.next++];
        FirmIndex w = net.buyer(c);
        if (color[w] == 1) {
          // Found: walk the stack back from fr.firm to w.
          std::vector<ContractIndex> cycle{c};
          FirmIndex cur = fr.firm;
          while (cur != w) {
            ContractIndex d = static_cast<ContractIndex>(via[cur]);
            cycle.push_back(d);
            cur = net.seller(d);
          }
          std::reverse(cycle.begin(), cycle.end());
          // Rotate so the smallest contract leads.
          auto mn = std::min_element(cycle.begin(), cycle.end());
          std::rotate(cycle.begin(), mn, cycle.end());
          return cycle;
        }
        if (color[w] == 0) {
          color[w] = 1;
          via[w] = static_cast<int>(c);
          stack.push_back({w});
        }
      } else {
        color[fr.firm] = 2;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

BlockReport make_sequence_report(const TradingNetwork& net, BlockKind kind,
                                 std::vector<ContractIndex> seq) {
  ContractSet member(net.contract_count());
  for (ContractIndex c : seq) member.insert(c);
  return {kind, std::move(seq), std::move(member)};
}

// Linear method for flow networks with acceptable A: any cycle disjoint from
// A blocks; otherwise X\A is firm-acyclic and a blocking path is exactly a
// contract walk from a seller-acceptable contract to a buyer-acceptable one.
BlockSearchResult flow_blocking_path_or_cycle(const TradingNetwork& net,
                                              const ContractSet& A) {
  const std::size_t n = net.contract_count();
  ContractSet free = net.all_contracts() - A;
  BlockSearchResult res;

  if (auto cycle = find_contract_cycle(net, free)) {
    res.status = SearchStatus::found;
    res.block = make_sequence_report(net, BlockKind::blocking_cycle, std::move(*cycle));
    if (!replay_block(net, A, *res.block))
      throw ModelError("flow cycle detection produced a non-replaying block");
    return res;
  }

  std::vector<int> parent(n, -2);
  std::deque<ContractIndex> queue;
  std::optional<ContractIndex> hit;
  auto buyer_accepts = [&](ContractIndex c) {
    return net.is_w_acceptable(singleton(n, c), A, net.buyer(c));
  };
  for (ContractIndex c : free.indices()) {
    if (!net.is_w_acceptable(singleton(n, c), A, net.seller(c))) continue;
    parent[c] = -1;
    if (buyer_accepts(c)) {
      hit = c;
      break;
    }
    queue.push_back(c);
  }
  while (!hit && !queue.empty()) {
    ContractIndex x = queue.front();
    queue.pop_front();
    ++res.steps;
    ContractSet next = net.downstream_contracts(net.buyer(x)) & free;
    next.for_each([&](ContractIndex y) {
      if (hit || parent[y] != -2) return;
      parent[y] = static_cast<int>(x);
      if (buyer_accepts(y)) hit = y;
      else queue.push_back(y);
    });
  }
  if (hit) {
    std::vector<ContractIndex> seq;
    for (int c = static_cast<int>(*hit); c != -1; c = parent[c])
      seq.push_back(static_cast<ContractIndex>(c));
    std::reverse(seq.begin(), seq.end());
    res.status = SearchStatus::found;
    res.block = make_sequence_report(net, BlockKind::blocking_path, std::move(seq));
    if (!replay_block(net, A, *res.block))
      throw ModelError("flow path search produced a non-replaying block");
    return res;
  }
  res.status = SearchStatus::exhausted;
  return res;
}

// Exhaustive enumeration for general networks. A blocking path constrains
// each firm locally (singleton at the ends, adjacent pair at intermediates),
// so extension checks are exact, not heuristic pruning.
BlockSearchResult general_blocking_path_or_cycle(const TradingNetwork& net,
                                                 const ContractSet& A,
                                                 const SearchLimits& limits) {
  const std::size_t n = net.contract_count();
  ContractSet free = net.all_contracts() - A;
  std::vector<ContractIndex> order = free.indices();
  BlockSearchResult res;
  bool capped = false;

  auto pair_ok = [&](ContractIndex a, ContractIndex b, FirmIndex f) {
    return net.is_w_acceptable(set_of(n, {a, b}), A, f);
  };

  // Cycles first, deduplicated by their smallest contract.
  std::vector<ContractIndex> seq;
  std::vector<bool> firm_used(net.firm_count(), false);
  std::optional<BlockReport> found;

  auto step = [&]() {
    if (res.steps >= limits.max_steps) {
      capped = true;
      return false;
    }
    ++res.steps;
    return true;
  };

  auto cycle_dfs = [&](auto&& self, ContractIndex start) -> void {
    if (found || capped) return;
    ContractIndex last = seq.back();
    FirmIndex join = net.buyer(last);
    if (join == net.seller(start)) {
      if (pair_ok(last, start, join))
        found = make_sequence_report(net, BlockKind::blocking_cycle, seq);
      return;  // revisiting the origin either closes the cycle or dead-ends
    }
    if (firm_used[join]) return;
    ContractSet nexts = net.downstream_contracts(join) & free;
    firm_used[join] = true;
    nexts.for_each([&](ContractIndex y) {
      if (found || capped || y <= start) return;
      if (!step()) return;
      if (!pair_ok(last, y, join)) return;
      seq.push_back(y);
      self(self, start);
      seq.pop_back();
    });
    firm_used[join] = false;
  };
  for (ContractIndex c : order) {
    if (found || capped) break;
    if (!step()) break;
    std::fill(firm_used.begin(), firm_used.end(), false);
    firm_used[net.seller(c)] = true;
    seq.assign(1, c);
    cycle_dfs(cycle_dfs, c);
  }

  if (!found && !capped) {
    auto path_dfs = [&](auto&& self) -> void {
      if (found || capped) return;
      ContractIndex last = seq.back();
      FirmIndex tail = net.buyer(last);
      if (net.is_w_acceptable(singleton(n, last), A, tail)) {
        found = make_sequence_report(net, BlockKind::blocking_path, seq);
        return;
      }
      if (firm_used[tail]) return;
      ContractSet nexts = net.downstream_contracts(tail) & free;
      firm_used[tail] = true;
      nexts.for_each([&](ContractIndex y) {
        if (found || capped) return;
        if (firm_used[net.buyer(y)] && net.buyer(y) != tail) return;
        if (net.buyer(y) == tail) return;  // would repeat the joining firm
        if (!step()) return;
        if (!pair_ok(last, y, tail)) return;
        seq.push_back(y);
        self(self);
        seq.pop_back();
      });
      firm_used[tail] = false;
    };
    for (ContractIndex c : order) {
      if (found || capped) break;
      if (!step()) break;
      if (!net.is_w_acceptable(singleton(n, c), A, net.seller(c))) continue;
      std::fill(firm_used.begin(), firm_used.end(), false);
      firm_used[net.seller(c)] = true;
      seq.assign(1, c);
      path_dfs(path_dfs);
    }
  }

  if (found) {
    res.status = SearchStatus::found;
    res.block = std::move(found);
    if (!replay_block(net, A, *res.block))
      throw ModelError("path/cycle enumeration produced a non-replaying block");
  } else {
    res.status = capped ? SearchStatus::capped : SearchStatus::exhausted;
  }
  return res;
}

}  // namespace

BlockSearchResult find_blocking_path_or_cycle(const TradingNetwork& net,
                                              const ContractSet& A,
                                              const SearchLimits& limits) {
  if (net.is_flow_network() && net.is_acceptable(A))
    return flow_blocking_path_or_cycle(net, A);
  return general_blocking_path_or_cycle(net, A, limits);
}

bool is_path_or_cycle_stable(const TradingNetwork& net, const ContractSet& A,
                             const SearchLimits& limits) {
  if (!net.is_acceptable(A)) return false;
  auto res = find_blocking_path_or_cycle(net, A, limits);
  if (res.status == SearchStatus::capped)
    throw BudgetError("path-or-cycle search exceeded its budget");
  return res.status == SearchStatus::exhausted;
}

BlockSearchResult find_blocking_set(const TradingNetwork& net, const ContractSet& A,
                                    const BlockingSetOptions& opts) {
  if (opts.allow_flow_shortcut && net.is_flow_network() && net.is_acceptable(A)) {
    // A blocking path or cycle is itself a blocking set, and on flow
    // networks a blocking set implies one of those exists.
    BlockSearchResult pc = find_blocking_path_or_cycle(net, A, opts.limits);
    if (pc.status == SearchStatus::found) {
      BlockReport report{BlockKind::blocking_set, pc.block->contracts.indices(),
                         pc.block->contracts};
      if (!replay_block(net, A, report))
        throw ModelError("flow shortcut produced a non-replaying blocking set");
      return {SearchStatus::found, std::move(report), pc.steps};
    }
    return pc;
  }

  const std::size_t n = net.contract_count();
  ContractSet free = net.all_contracts() - A;
  std::vector<ContractIndex> pool = free.indices();
  BlockSearchResult res;

  std::vector<FirmIndex> firms;
  auto blocks = [&](const ContractSet& z) {
    firms.clear();
    z.for_each([&](ContractIndex c) {
      firms.push_back(net.seller(c));
      firms.push_back(net.buyer(c));
    });
    std::sort(firms.begin(), firms.end());
    firms.erase(std::unique(firms.begin(), firms.end()), firms.end());
    for (FirmIndex f : firms)
      if (!net.is_w_acceptable(z, A, f)) return false;
    return true;
  };

  std::vector<std::size_t> comb;
  ContractSet z(n);
  for (std::size_t k = 1; k <= pool.size(); ++k) {
    comb.resize(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    for (;;) {
      if (res.steps >= opts.limits.max_steps) {
        res.status = SearchStatus::capped;
        return res;
      }
      ++res.steps;
      z = ContractSet(n);
      for (std::size_t i : comb) z.insert(pool[i]);
      if (blocks(z)) {
        res.status = SearchStatus::found;
        res.block = BlockReport{BlockKind::blocking_set, z.indices(), z};
        return res;
      }
      // next k-combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == pool.size() - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  res.status = SearchStatus::exhausted;
  return res;
}

bool is_stable(const TradingNetwork& net, const ContractSet& A,
               const BlockingSetOptions& opts) {
  if (!net.is_acceptable(A)) return false;
  auto res = find_blocking_set(net, A, opts);
  if (res.status == SearchStatus::capped)
    throw BudgetError("blocking-set search exceeded its budget");
  return res.status == SearchStatus::exhausted;
}

TrailSearchResult find_sequentially_blocking_trail(const TradingNetwork& net,
                                                   const ContractSet& A,
                                                   const SearchLimits& limits) {
  const std::size_t n = net.contract_count();
  ContractSet free = net.all_contracts() - A;
  std::vector<ContractIndex> order = free.indices();
  TrailSearchResult res;
  bool capped = false;

  ContractSet used(n);
  std::vector<ContractIndex> seq;
  std::optional<std::vector<ContractIndex>> found;

  auto step = [&]() {
    if (res.steps >= limits.max_steps) {
      capped = true;
      return false;
    }
    ++res.steps;
    return true;
  };
  auto singleton_ok = [&](ContractIndex c, FirmIndex f) {
    return net.is_w_acceptable(singleton(n, c), A, f);
  };

  // Forward pass: every prefix set at the joining firm must stay acceptable.
  ContractSet prefix(n);
  auto forward = [&](auto&& self) -> void {
    if (found || capped) return;
    ContractIndex last = seq.back();
    if (singleton_ok(last, net.buyer(last))) {
      found = seq;
      return;
    }
    FirmIndex join = net.buyer(last);
    ContractSet nexts = (net.downstream_contracts(join) & free) - used;
    nexts.for_each([&](ContractIndex y) {
      if (found || capped) return;
      if (!step()) return;
      prefix.insert(y);
      if (net.is_w_acceptable(prefix & net.firm_contracts(join), A, join)) {
        seq.push_back(y);
        used.insert(y);
        self(self);
        used.erase(y);
        seq.pop_back();
      }
      prefix.erase(y);
    });
  };
  for (ContractIndex c : order) {
    if (found || capped) break;
    if (!step()) break;
    if (!singleton_ok(c, net.seller(c))) continue;
    seq.assign(1, c);
    used = singleton(n, c);
    prefix = singleton(n, c);
    forward(forward);
  }

  // Backward pass: build the trail from its last contract; every suffix set
  // at the joining firm must stay acceptable.
  if (!found && !capped) {
    ContractSet suffix(n);
    auto backward = [&](auto&& self) -> void {
      if (found || capped) return;
      ContractIndex front = seq.front();
      if (singleton_ok(front, net.seller(front))) {
        found = seq;
        return;
      }
      FirmIndex join = net.seller(front);
      ContractSet prevs = (net.upstream_contracts(join) & free) - used;
      prevs.for_each([&](ContractIndex y) {
        if (found || capped) return;
        if (!step()) return;
        suffix.insert(y);
        if (net.is_w_acceptable(suffix & net.firm_contracts(join), A, join)) {
          seq.insert(seq.begin(), y);
          used.insert(y);
          self(self);
          used.erase(y);
          seq.erase(seq.begin());
        }
        suffix.erase(y);
      });
    };
    for (ContractIndex c : order) {
      if (found || capped) break;
      if (!step()) break;
      if (!singleton_ok(c, net.buyer(c))) continue;
      seq.assign(1, c);
      used = singleton(n, c);
      suffix = singleton(n, c);
      backward(backward);
    }
  }

  if (found) {
    res.status = SearchStatus::found;
    res.trail = std::move(found);
    BlockReport rep = make_sequence_report(net, BlockKind::sequentially_blocking_trail,
                                           *res.trail);
    if (!replay_block(net, A, rep))
      throw ModelError("sequential trail search produced a non-replaying block");
  } else {
    res.status = capped ? SearchStatus::capped : SearchStatus::exhausted;
  }
  return res;
}

bool is_weakly_trail_stable(const TradingNetwork& net, const ContractSet& A,
                            const SearchLimits& limits) {
  if (!net.is_acceptable(A)) return false;
  auto res = find_sequentially_blocking_trail(net, A, limits);
  if (res.status == SearchStatus::capped)
    throw BudgetError("sequentially blocking trail search exceeded its budget");
  return res.status == SearchStatus::exhausted;
}

namespace {

SearchStatus enumerate_flow_outcomes(const TradingNetwork& net,
                                     const std::function<bool(const ContractSet&)>& emit,
                                     const SearchLimits& limits, std::uint64_t& steps) {
  const std::size_t n = net.contract_count();
  const std::size_t nf = net.firm_count();
  std::vector<int> imbal(nf, 0), rem_in(nf, 0), rem_out(nf, 0);
  std::vector<bool> terminal(nf);
  for (FirmIndex f = 0; f < nf; ++f) terminal[f] = net.is_terminal(f);
  for (ContractIndex c = 0; c < n; ++c) {
    ++rem_in[net.buyer(c)];
    ++rem_out[net.seller(c)];
  }

  ContractSet chosen(n);
  bool stop = false, capped = false;
  // Non-terminal firms must end balanced; prune a branch once the remaining
  // contracts cannot repair the imbalance.
  auto feasible = [&](FirmIndex f) {
    return terminal[f] ||
           (imbal[f] <= rem_out[f] && -imbal[f] <= rem_in[f]);
  };
  auto rec = [&](auto&& self, ContractIndex idx) -> void {
    if (stop || capped) return;
    if (steps >= limits.max_steps) {
      capped = true;
      return;
    }
    ++steps;
    if (idx == n) {
      if (net.is_acceptable(chosen) && !emit(chosen)) stop = true;
      return;
    }
    FirmIndex s = net.seller(idx), b = net.buyer(idx);
    --rem_out[s];
    --rem_in[b];
    if (feasible(s) && feasible(b)) self(self, idx + 1);
    if (!stop && !capped) {
      chosen.insert(idx);
      ++imbal[b];
      --imbal[s];
      if (feasible(s) && feasible(b)) self(self, idx + 1);
      ++imbal[s];
      --imbal[b];
      chosen.erase(idx);
    }
    ++rem_out[s];
    ++rem_in[b];
  };
  rec(rec, 0);
  if (capped) return SearchStatus::capped;
  return SearchStatus::exhausted;
}

}  // namespace

SearchStatus enumerate_acceptable_outcomes(
    const TradingNetwork& net, const std::function<bool(const ContractSet&)>& emit,
    const SearchLimits& limits) {
  std::uint64_t steps = 0;
  if (net.is_flow_network())
    return enumerate_flow_outcomes(net, emit, limits, steps);

  const std::size_t n = net.contract_count();
  if (n >= 63) return SearchStatus::capped;
  const std::uint64_t total = std::uint64_t{1} << n;
  ContractSet a(n);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (steps >= limits.max_steps) return SearchStatus::capped;
    ++steps;
    a = ContractSet(n);
    for (std::uint64_t m = mask; m; m &= m - 1)
      a.insert(static_cast<ContractIndex>(std::countr_zero(m)));
    if (net.is_acceptable(a) && !emit(a)) return SearchStatus::exhausted;
  }
  return SearchStatus::exhausted;
}

ExistsResult exists_outcome(const TradingNetwork& net, Concept what,
                            const SearchLimits& limits) {
  ExistsResult res;
  if (what == Concept::trail) {
    auto da = deferred_acceptance(net);
    res.status = SearchStatus::found;
    res.witness = std::move(da.outcome);
    res.steps = da.rounds;
    return res;
  }

  bool saw_capped_check = false;
  auto status = enumerate_acceptable_outcomes(
      net,
      [&](const ContractSet& a) {
        SearchStatus s;
        switch (what) {
          case Concept::path_or_cycle: {
            auto r = find_blocking_path_or_cycle(net, a, limits);
            s = r.status;
            res.steps += r.steps;
            break;
          }
          case Concept::stable: {
            auto r = find_blocking_set(net, a, BlockingSetOptions{limits, true});
            s = r.status;
            res.steps += r.steps;
            break;
          }
          case Concept::weak_trail: {
            auto r = find_sequentially_blocking_trail(net, a, limits);
            s = r.status;
            res.steps += r.steps;
            break;
          }
          default:
            throw ModelError("unreachable");
        }
        if (s == SearchStatus::exhausted) {  // no block: a is a witness
          res.witness = a;
          return false;
        }
        if (s == SearchStatus::capped) saw_capped_check = true;
        return true;
      },
      limits);

  if (res.witness) {
    res.status = SearchStatus::found;
  } else if (status == SearchStatus::capped || saw_capped_check) {
    res.status = SearchStatus::capped;
  } else {
    res.status = SearchStatus::exhausted;
  }
  return res;
}

}  // namespace tn
