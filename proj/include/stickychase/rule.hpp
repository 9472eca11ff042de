#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "stickychase/atom.hpp"

namespace stickychase {

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tgd: conjunctive body, single head atom, existential head variables.
struct Rule {
  std::string id;
  std::vector<Atom> body;
  Atom head;
  /// In source declaration order; doubles as the fresh-null assignment
  /// order during the chase.
  std::vector<std::string> exist_vars;

  bool is_existential(const std::string& var) const {
    for (const auto& v : exist_vars)
      if (v == var) return true;
    return false;
  }

  std::set<std::string> body_variables() const {
    std::set<std::string> vars;
    for (const auto& a : body)
      for (const auto& t : a.args())
        if (t.is_variable()) vars.insert(t.name());
    return vars;
  }

  std::set<std::string> head_variables() const {
    std::set<std::string> vars;
    for (const auto& t : head.args())
      if (t.is_variable()) vars.insert(t.name());
    return vars;
  }

  /// Frontier condition of a tgd; throws ProgramError on violation.
  void validate() const {
    if (body.empty()) throw ProgramError("rule " + id + ": empty body");
    auto bvars = body_variables();
    for (const auto& z : exist_vars) {
      if (bvars.count(z))
        throw ProgramError("rule " + id + ": existential variable " + z +
                           " occurs in the body");
    }
    for (const auto& v : head_variables()) {
      if (!is_existential(v) && !bvars.count(v))
        throw ProgramError("rule " + id + ": head variable " + v +
                           " is neither existential nor bound in the body");
    }
    for (const auto& z : exist_vars) {
      if (!head_variables().count(z))
        throw ProgramError("rule " + id + ": existential variable " + z +
                           " does not occur in the head");
    }
  }

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].text();
    }
    out += " -> ";
    if (!exist_vars.empty()) {
      out += "exists ";
      for (std::size_t i = 0; i < exist_vars.size(); ++i) {
        if (i) out += ",";
        out += exist_vars[i];
      }
      out += " ";
    }
    out += head.text();
    return out;
  }
};

/// A conjunctive query; every body variable is either free or existential.
struct ConjunctiveQuery {
  std::string name = "Q";
  std::vector<std::string> free_vars;
  std::set<std::string> exist_vars;
  std::vector<Atom> body;

  /// M_Q, the default resumption count of the query-driven chase.
  std::size_t exist_count() const { return exist_vars.size(); }

  void validate() const {
    if (body.empty())
      throw ProgramError("query " + name + ": empty body");
    std::set<std::string> bvars;
    for (const auto& a : body)
      for (const auto& t : a.args())
        if (t.is_variable()) bvars.insert(t.name());
    for (const auto& v : free_vars) {
      if (exist_vars.count(v))
        throw ProgramError("query " + name + ": variable " + v +
                           " is both free and existential");
      if (!bvars.count(v))
        throw ProgramError("query " + name + ": unsafe free variable " + v);
    }
    for (const auto& v : bvars) {
      bool is_free = false;
      for (const auto& f : free_vars) is_free |= (f == v);
      if (!is_free && !exist_vars.count(v))
        throw ProgramError("query " + name + ": variable " + v +
                           " is neither free nor existential");
    }
  }

  std::string text() const {
    std::string out = "?" + name;
    if (!free_vars.empty()) {
      out += "(";
      for (std::size_t i = 0; i < free_vars.size(); ++i) {
        if (i) out += ",";
        out += free_vars[i];
      }
      out += ")";
    }
    out += " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].text();
    }
    out += ".";
    return out;
  }
};

}  // namespace stickychase
