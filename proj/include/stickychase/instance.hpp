#pragma once

#include <cassert>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stickychase/atom.hpp"

namespace stickychase {

/// A finite set of ground atoms with a per-predicate index.
class Instance {
 public:
  Instance() = default;

  bool insert(const Atom& a) {
    assert(a.is_ground());
    auto [it, added] = atoms_.insert(a);
    if (added) index_[a.predicate()].insert(a);
    return added;
  }

  bool contains(const Atom& a) const { return atoms_.count(a) != 0; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  const std::set<Atom>& atoms() const { return atoms_; }

  /// Atoms of one predicate, in atom order; empty set if none.
  const std::set<Atom>& with_predicate(const std::string& pred) const {
    static const std::set<Atom> kEmpty;
    auto it = index_.find(pred);
    return it == index_.end() ? kEmpty : it->second;
  }

  std::set<Term> active_domain() const {
    std::set<Term> dom;
    for (const auto& a : atoms_)
      for (const auto& t : a.args()) dom.insert(t);
    return dom;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.atoms_ == b.atoms_;
  }

 private:
  std::set<Atom> atoms_;
  std::map<std::string, std::set<Atom>> index_;
};

}  // namespace stickychase
