#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stickychase/classes.hpp"
#include "stickychase/homomorphism.hpp"
#include "stickychase/program.hpp"

namespace stickychase {

class UnknownAtomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One successful chase step: the pair (rule, assignment) plus the atoms it
/// consumed and the one it produced.
struct ChaseStep {
  std::size_t index = 0;
  std::string rule_id;
  Assignment assignment;
  std::vector<Atom> consumed;
  Atom produced;
};

/// <_{P,D} as recorded by the steps; ⇒_{P,D} is its transitive closure,
/// computed on demand.
class DerivationRelation {
 public:
  void record(const std::vector<Atom>& consumed, const Atom& produced) {
    for (const auto& a : consumed) forward_[a].insert(produced);
  }
  void know(const Atom& a) { known_.insert(a); }

  bool direct(const Atom& a, const Atom& b) const {
    auto it = forward_.find(a);
    return it != forward_.end() && it->second.count(b) != 0;
  }

  /// a ⇒ b. The source atom must belong to the chased instance; an atom
  /// that was never produced is derived by nothing.
  bool derives(const Atom& a, const Atom& b) const {
    require_known(a);
    if (!known_.count(b)) return false;
    std::set<Atom> seen;
    std::vector<Atom> work{a};
    while (!work.empty()) {
      Atom cur = work.back();
      work.pop_back();
      auto it = forward_.find(cur);
      if (it == forward_.end()) continue;
      for (const auto& next : it->second) {
        if (next == b) return true;
        if (seen.insert(next).second) work.push_back(next);
      }
    }
    return false;
  }

  /// All atoms reachable from a through ⇒, in atom order.
  std::set<Atom> descendants(const Atom& a) const {
    std::set<Atom> out;
    std::vector<Atom> work{a};
    while (!work.empty()) {
      Atom cur = work.back();
      work.pop_back();
      auto it = forward_.find(cur);
      if (it == forward_.end()) continue;
      for (const auto& next : it->second)
        if (out.insert(next).second) work.push_back(next);
    }
    return out;
  }

  const std::map<Atom, std::set<Atom>>& direct_edges() const {
    return forward_;
  }

 private:
  void require_known(const Atom& a) const {
    if (!known_.count(a))
      throw UnknownAtomError("atom " + a.text() +
                             " is not part of the chased instance");
  }

  std::map<Atom, std::set<Atom>> forward_;
  std::set<Atom> known_;
};

struct ChaseResult {
  Instance instance;
  std::vector<ChaseStep> steps;
  DerivationRelation derivation;
  bool terminated = false;
  std::uint64_t nulls_created = 0;
};

namespace detail {

struct PendingPair {
  std::size_t rule_index;
  std::vector<Atom> body_image;
  Assignment theta;

  // Canonical application order: body image first, rule index as the
  // tie-breaker. This is what makes the worked chase prefixes
  // reproducible byte for byte.
  friend bool operator<(const PendingPair& a, const PendingPair& b) {
    if (a.body_image != b.body_image) return a.body_image < b.body_image;
    return a.rule_index < b.rule_index;
  }
};

inline Assignment extend_with_fresh_nulls(const Rule& rule,
                                          const Assignment& theta,
                                          std::uint64_t& null_counter) {
  Assignment extended = theta;
  for (const auto& z : rule.exist_vars)
    extended.bind(z, Term::null(++null_counter));
  return extended;
}

}  // namespace detail

/// The budgeted semi-oblivious chase: a (rule, body image) pair is applied
/// at most once; every pair applicable on the current instance is applied
/// in canonical order before newly produced atoms enable further pairs.
/// The budget counts atoms added; exhausting it with applicable pairs left
/// reports terminated=false.
inline ChaseResult classic_chase(const Program& program, std::uint64_t budget) {
  ChaseResult result;
  result.instance = program.edb;
  for (const auto& a : program.edb.atoms()) result.derivation.know(a);

  std::set<std::pair<std::size_t, std::vector<Atom>>> memo;
  std::uint64_t steps_done = 0;

  // Semi-naive collection: a new pair must touch at least one atom added in
  // the previous level (every pair is seen when its last body atom lands).
  std::set<Atom> delta;
  bool first_level = true;

  while (true) {
    std::vector<detail::PendingPair> pending;
    for (std::size_t r = 0; r < program.rules.size(); ++r) {
      const Rule& rule = program.rules[r];
      for_each_body_match(
          std::span<const Atom>(rule.body), result.instance,
          [&](const Assignment& theta) {
            std::vector<Atom> image = apply_assignment(theta, rule.body);
            if (!first_level) {
              bool touches_delta = false;
              for (const auto& a : image) touches_delta |= delta.count(a) != 0;
              if (!touches_delta) return;
            }
            if (memo.count({r, image})) return;
            pending.push_back({r, std::move(image), theta});
          });
    }
    std::sort(pending.begin(), pending.end());
    pending.erase(std::unique(pending.begin(), pending.end(),
                              [](const auto& a, const auto& b) {
                                return a.rule_index == b.rule_index &&
                                       a.body_image == b.body_image;
                              }),
                  pending.end());
    if (pending.empty()) {
      result.terminated = true;
      break;
    }
    delta.clear();
    first_level = false;
    bool out_of_budget = false;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (steps_done == budget) {
        // Unapplied applicable pairs remain.
        out_of_budget = true;
        break;
      }
      auto& p = pending[i];
      const Rule& rule = program.rules[p.rule_index];
      memo.insert({p.rule_index, p.body_image});
      Assignment extended = detail::extend_with_fresh_nulls(
          rule, p.theta, result.nulls_created);
      Atom produced = extended(rule.head);
      if (result.instance.contains(produced)) continue;  // no-op application
      result.instance.insert(produced);
      result.derivation.know(produced);
      result.derivation.record(p.body_image, produced);
      result.steps.push_back({++steps_done, rule.id, extended,
                              p.body_image, produced});
      delta.insert(produced);
    }
    if (out_of_budget) {
      result.terminated = false;
      break;
    }
  }
  return result;
}

inline bool derives(const DerivationRelation& rel, const Atom& a,
                    const Atom& b) {
  return rel.derives(a, b);
}

/// A refutation of P ∪ D ∈ sch(S) found within the chase budget.
struct StickinessViolation {
  std::size_t step_index = 0;
  std::string rule_id;
  std::string var;
  Term value;
  Atom produced;
  Atom offending;  // the atom the value failed to propagate into
};

struct StickinessVerdict {
  std::optional<StickinessViolation> violation;
  bool chase_terminated = false;

  bool violated() const { return violation.has_value(); }
};

/// Bounded semantic refuter for sch(S): runs the classic chase and checks
/// that every value replacing a join variable with no occurrence at a
/// selected position sticks through all recorded subsequent steps. Can
/// prove non-membership only; a clean run is "no violation within budget".
inline StickinessVerdict check_s_stickiness(const Program& program,
                                            const SelectionFunction& sel,
                                            std::uint64_t budget) {
  auto selected = select(sel, program);
  auto chase = classic_chase(program, budget);
  StickinessVerdict verdict;
  verdict.chase_terminated = chase.terminated;

  // Join variables per rule that escape the selected positions.
  std::vector<std::vector<std::string>> checked_vars(program.rules.size());
  for (std::size_t r = 0; r < program.rules.size(); ++r) {
    std::map<std::string, std::vector<Position>> occurrences;
    for (const auto& a : program.rules[r].body)
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args()[i].is_variable())
          occurrences[a.args()[i].name()].push_back({a.predicate(), i + 1});
    for (const auto& [var, positions] : occurrences) {
      if (positions.size() < 2) continue;
      bool covered = false;
      for (const auto& p : positions) covered |= selected.count(p) != 0;
      if (!covered) checked_vars[r].push_back(var);
    }
  }
  std::map<std::string, std::size_t> rule_index;
  for (std::size_t r = 0; r < program.rules.size(); ++r)
    rule_index[program.rules[r].id] = r;

  auto contains_value = [](const Atom& a, const Term& value) {
    for (const auto& t : a.args())
      if (t == value) return true;
    return false;
  };

  for (const auto& step : chase.steps) {
    for (const auto& var : checked_vars[rule_index[step.rule_id]]) {
      Term value = step.assignment.at(var);
      if (!contains_value(step.produced, value)) {
        verdict.violation = {step.index, step.rule_id, var, value,
                             step.produced, step.produced};
        return verdict;
      }
      for (const auto& descendant : chase.derivation.descendants(step.produced))
        if (!contains_value(descendant, value)) {
          verdict.violation = {step.index, step.rule_id, var, value,
                               step.produced, descendant};
          return verdict;
        }
    }
  }
  return verdict;
}

}  // namespace stickychase
