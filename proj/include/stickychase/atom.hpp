#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "stickychase/term.hpp"

namespace stickychase {

/// A predicate argument slot P[i], 1-based as in the literature.
struct Position {
  std::string predicate;
  std::size_t index = 0;

  std::string text() const {
    return predicate + "[" + std::to_string(index) + "]";
  }

  friend bool operator==(const Position&, const Position&) = default;
  friend std::strong_ordering operator<=>(const Position& a,
                                          const Position& b) {
    return std::tie(a.predicate, a.index) <=> std::tie(b.predicate, b.index);
  }
};

class Atom {
 public:
  Atom() = default;
  Atom(std::string predicate, std::vector<Term> args)
      : predicate_(std::move(predicate)), args_(std::move(args)) {}

  const std::string& predicate() const { return predicate_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }

  bool is_ground() const {
    return std::all_of(args_.begin(), args_.end(),
                       [](const Term& t) { return t.is_ground(); });
  }

  std::string text() const {
    std::string out = predicate_ + "(";
    for (std::size_t i = 0; i < args_.size(); ++i) {
      if (i) out += ",";
      out += args_[i].text();
    }
    out += ")";
    return out;
  }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.predicate_ == b.predicate_ && a.args_ == b.args_;
  }
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.predicate_ <=> b.predicate_; c != 0) return c;
    return a.args_ <=> b.args_;
  }

 private:
  std::string predicate_;
  std::vector<Term> args_;
};

}  // namespace stickychase
