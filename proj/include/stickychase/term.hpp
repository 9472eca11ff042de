#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <string>
#include <tuple>

namespace stickychase {

/// Kind order matters: it is the tie-breaker that makes chase-level
/// sorting (constants before nulls) and rendered dumps deterministic.
enum class TermKind : std::uint8_t {
  Constant = 0,
  FrozenNull = 1,
  Null = 2,
  Variable = 3,
};

/// A term of the language: EDB constant, labeled null, frozen null or
/// variable. Nulls and frozen nulls are identified by ordinal; a frozen
/// null keeps the ordinal of the null it was promoted from.
class Term {
 public:
  Term() : kind_(TermKind::Constant) {}

  static Term constant(std::string name) {
    Term t;
    t.kind_ = TermKind::Constant;
    t.name_ = std::move(name);
    return t;
  }
  static Term null(std::uint64_t ordinal) {
    Term t;
    t.kind_ = TermKind::Null;
    t.ordinal_ = ordinal;
    return t;
  }
  static Term frozen_null(std::uint64_t ordinal) {
    Term t;
    t.kind_ = TermKind::FrozenNull;
    t.ordinal_ = ordinal;
    return t;
  }
  static Term variable(std::string name) {
    Term t;
    t.kind_ = TermKind::Variable;
    t.name_ = std::move(name);
    return t;
  }

  TermKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::uint64_t ordinal() const { return ordinal_; }

  bool is_constant() const { return kind_ == TermKind::Constant; }
  bool is_null() const { return kind_ == TermKind::Null; }
  bool is_frozen_null() const { return kind_ == TermKind::FrozenNull; }
  bool is_variable() const { return kind_ == TermKind::Variable; }
  bool is_ground() const { return kind_ != TermKind::Variable; }
  /// Constants and frozen nulls are rigid under homomorphisms.
  bool is_rigid() const {
    return kind_ == TermKind::Constant || kind_ == TermKind::FrozenNull;
  }
  /// Any kind of null, frozen or not; answers containing these are not
  /// certain answers.
  bool is_any_null() const {
    return kind_ == TermKind::Null || kind_ == TermKind::FrozenNull;
  }

  std::string text() const {
    switch (kind_) {
      case TermKind::Constant:
      case TermKind::Variable:
        return name_;
      case TermKind::Null:
        return "_:n" + std::to_string(ordinal_);
      case TermKind::FrozenNull:
        return "_:f" + std::to_string(ordinal_);
    }
    return {};
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind_ == b.kind_ && a.ordinal_ == b.ordinal_ && a.name_ == b.name_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    return std::tie(a.kind_, a.ordinal_, a.name_) <=>
           std::tie(b.kind_, b.ordinal_, b.name_);
  }

 private:
  TermKind kind_;
  std::string name_;            // constants and variables
  std::uint64_t ordinal_ = 0;   // nulls and frozen nulls
};

}  // namespace stickychase
