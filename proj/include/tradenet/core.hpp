#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace tn {

// Input document or declaration violates the schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model-level contract was violated (foreign contracts, broken invariant,
// a fixed point that fails post-verification, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive operation would exceed its configured cap.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using FirmIndex = std::uint32_t;
using ContractIndex = std::uint32_t;

/// Set of contracts over a fixed universe, one bit per contract index.
/// Two inline words cover every instance this toolkit targets; larger
/// universes spill to the heap transparently.
class ContractSet {
 public:
  ContractSet() = default;
  explicit ContractSet(std::size_t universe)
      : n_(universe), w_((universe + 63) / 64, 0) {}

  static ContractSet full(std::size_t universe) {
    ContractSet s(universe);
    for (auto& w : s.w_) w = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  static ContractSet of(std::size_t universe,
                        std::initializer_list<ContractIndex> items) {
    ContractSet s(universe);
    for (ContractIndex i : items) s.insert(i);
    return s;
  }

  std::size_t universe() const { return n_; }

  bool contains(ContractIndex i) const {
    assert(i < n_);
    return (w_[i >> 6] >> (i & 63)) & 1;
  }
  void insert(ContractIndex i) {
    assert(i < n_);
    w_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  void erase(ContractIndex i) {
    assert(i < n_);
    w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }
  bool any() const { return !empty(); }

  bool subset_of(const ContractSet& o) const {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  bool intersects(const ContractSet& o) const {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  ContractSet& operator&=(const ContractSet& o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  ContractSet& operator|=(const ContractSet& o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  /// Set difference.
  ContractSet& operator-=(const ContractSet& o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    return *this;
  }

  friend ContractSet operator&(ContractSet a, const ContractSet& b) { return a &= b; }
  friend ContractSet operator|(ContractSet a, const ContractSet& b) { return a |= b; }
  friend ContractSet operator-(ContractSet a, const ContractSet& b) { return a -= b; }

  friend bool operator==(const ContractSet& a, const ContractSet& b) {
    return a.n_ == b.n_ && a.w_ == b.w_;
  }
  friend bool operator!=(const ContractSet& a, const ContractSet& b) {
    return !(a == b);
  }

  /// Visits members in ascending index order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        f(static_cast<ContractIndex>(wi * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  std::vector<ContractIndex> indices() const {
    std::vector<ContractIndex> out;
    out.reserve(count());
    for_each([&](ContractIndex i) { out.push_back(i); });
    return out;
  }

  /// Smallest member, or -1 when empty.
  int first() const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi)
      if (w_[wi]) return static_cast<int>(wi * 64 + std::countr_zero(w_[wi]));
    return -1;
  }

 private:
  void trim() {
    if ((n_ & 63) != 0 && !w_.empty())
      w_.back() &= (std::uint64_t{1} << (n_ & 63)) - 1;
  }

  std::size_t n_ = 0;
  boost::container::small_vector<std::uint64_t, 2> w_;
};

enum class SequenceKind { invalid, trail, path, cycle };

const char* to_string(SequenceKind k);

}  // namespace tn
