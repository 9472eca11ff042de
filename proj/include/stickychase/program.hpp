#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stickychase/instance.hpp"
#include "stickychase/rule.hpp"

namespace stickychase {

/// A rule set plus its extensional database, with the inferred schema.
struct Program {
  std::vector<Rule> rules;
  Instance edb;
  std::map<std::string, std::size_t> schema;  // predicate -> arity

  void declare(const std::string& pred, std::size_t arity) {
    auto [it, added] = schema.emplace(pred, arity);
    if (!added && it->second != arity)
      throw ProgramError("predicate " + pred + " used with arity " +
                         std::to_string(arity) + " after arity " +
                         std::to_string(it->second));
  }

  void add_rule(Rule r) {
    r.validate();
    declare(r.head.predicate(), r.head.arity());
    for (const auto& a : r.body) declare(a.predicate(), a.arity());
    rules.push_back(std::move(r));
  }

  void add_fact(const Atom& a) {
    if (!a.is_ground())
      throw ProgramError("fact " + a.text() + " is not ground");
    for (const auto& t : a.args())
      if (t.is_any_null())
        throw ProgramError("fact " + a.text() + " contains a null");
    declare(a.predicate(), a.arity());
    edb.insert(a);
  }

  std::set<Position> positions() const {
    std::set<Position> out;
    for (const auto& [pred, arity] : schema)
      for (std::size_t i = 1; i <= arity; ++i) out.insert({pred, i});
    return out;
  }

  /// Predicates defined by some rule head.
  std::set<std::string> intensional_predicates() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.head.predicate());
    return out;
  }
};

}  // namespace stickychase
