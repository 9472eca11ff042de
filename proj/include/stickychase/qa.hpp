#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stickychase/chase.hpp"
#include "stickychase/classes.hpp"
#include "stickychase/homomorphism.hpp"
#include "stickychase/program.hpp"

namespace stickychase {

/// Strict-mode refusal: the program was refuted to be outside the class.
class NotInClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Working state of the query-driven chase. Owns its program copy so that
/// states can be kept, resumed and queried independently.
struct ChaseState {
  Program program;
  std::set<Position> sel_positions;
  Instance instance;
  std::set<std::pair<std::size_t, std::vector<Atom>>> applied;
  std::uint64_t null_counter = 0;
  std::uint32_t resumptions_done = 0;
};

/// Applicability under S: the body embeds, the head image (with fresh
/// nulls for the existential variables) is not S-homomorphic to any atom
/// already present, and the pair has not been applied before.
inline bool is_applicable(const Rule& rule, std::size_t rule_index,
                          const Assignment& theta, const ChaseState& state) {
  std::vector<Atom> image = apply_assignment(theta, rule.body);
  for (const auto& a : image)
    if (!state.instance.contains(a)) return false;
  if (state.applied.count({rule_index, image})) return false;
  std::uint64_t hypothetical = state.null_counter;
  Assignment extended =
      detail::extend_with_fresh_nulls(rule, theta, hypothetical);
  Atom head_image = extended(rule.head);
  for (const auto& b : state.instance.with_predicate(rule.head.predicate()))
    if (is_pi_homomorphic(head_image, b, state.sel_positions)) return false;
  return true;
}

namespace detail {

/// Step 1 of the query-driven chase: saturate under S-applicability. Pairs
/// rejected by the homomorphism check stay unapplied; a later resumption
/// may unblock them.
inline void saturate(ChaseState& state) {
  while (true) {
    std::vector<PendingPair> pending;
    for (std::size_t r = 0; r < state.program.rules.size(); ++r) {
      const Rule& rule = state.program.rules[r];
      for_each_body_match(
          std::span<const Atom>(rule.body), state.instance,
          [&](const Assignment& theta) {
            std::vector<Atom> image = apply_assignment(theta, rule.body);
            if (state.applied.count({r, image})) return;
            pending.push_back({r, std::move(image), theta});
          });
    }
    std::sort(pending.begin(), pending.end());
    bool progress = false;
    for (auto& p : pending) {
      const Rule& rule = state.program.rules[p.rule_index];
      if (state.applied.count({p.rule_index, p.body_image})) continue;
      // The homomorphism side is re-checked against the live instance.
      std::uint64_t hypothetical = state.null_counter;
      Assignment extended =
          extend_with_fresh_nulls(rule, p.theta, hypothetical);
      Atom head_image = extended(rule.head);
      bool absorbed = false;
      for (const auto& b :
           state.instance.with_predicate(rule.head.predicate())) {
        if (is_pi_homomorphic(head_image, b, state.sel_positions)) {
          absorbed = true;
          break;
        }
      }
      if (absorbed) continue;
      state.null_counter = hypothetical;
      state.applied.insert({p.rule_index, p.body_image});
      state.instance.insert(head_image);
      progress = true;
    }
    if (!progress) break;
  }
}

inline void freeze_state(ChaseState& state) {
  auto [frozen, renaming] = freeze_nulls(state.instance);
  state.instance = std::move(frozen);
  if (renaming.empty()) return;
  std::set<std::pair<std::size_t, std::vector<Atom>>> renamed;
  for (const auto& [rule_index, image] : state.applied) {
    std::vector<Atom> copy;
    copy.reserve(image.size());
    for (const auto& a : image) copy.push_back(rename_atom(a, renaming));
    renamed.insert({rule_index, std::move(copy)});
  }
  state.applied = std::move(renamed);
}

}  // namespace detail

/// Applies `extra` further resumption rounds (freeze all nulls, then
/// saturate) to an existing state. Resuming a state k times equals running
/// the chase with k more resumptions from scratch.
inline ChaseState resume(ChaseState state, std::uint32_t extra) {
  for (std::uint32_t i = 0; i < extra; ++i) {
    detail::freeze_state(state);
    ++state.resumptions_done;
    detail::saturate(state);
  }
  return state;
}

/// The query-driven chase: saturate, then resume M_Q times (or an explicit
/// override). Terminates with a finite instance for selection functions
/// whose positions really are finite.
inline ChaseState qchase(const Program& program, const ConjunctiveQuery& query,
                         const SelectionFunction& sel,
                         std::optional<std::uint32_t> resumptions = {}) {
  ChaseState state;
  state.program = program;
  state.sel_positions = select(sel, program);
  state.instance = program.edb;
  detail::saturate(state);
  std::uint32_t rounds = resumptions.value_or(
      static_cast<std::uint32_t>(query.exist_count()));
  return resume(std::move(state), rounds);
}

/// Answers of a query over a finished chase state.
struct AnswerSet {
  std::set<std::vector<Term>> tuples;  // null-free: the certain answers
  std::set<std::vector<Term>> raw;     // including null-bearing tuples
  bool boolean = false;
  bool holds = false;  // meaningful for Boolean queries
};

inline AnswerSet collect_answers(const ConjunctiveQuery& query,
                                 const Instance& instance) {
  AnswerSet answers;
  answers.raw = evaluate_cq(query, instance);
  answers.boolean = query.free_vars.empty();
  for (const auto& tuple : answers.raw) {
    bool has_null = false;
    for (const auto& t : tuple) has_null |= t.is_any_null();
    if (!has_null) answers.tuples.insert(tuple);
  }
  answers.holds = !answers.tuples.empty();
  return answers;
}

struct SchqaOptions {
  bool strict = false;
  std::uint64_t refuter_budget = 500;
  std::optional<std::uint32_t> resumptions;
};

/// SChQA^S: optional class gate (syntactic test, then the bounded semantic
/// refuter), then the query-driven chase, then null-free filtering. In
/// non-strict mode the answers are sound but possibly incomplete when the
/// program is outside sch(S).
inline AnswerSet schqa(const Program& program, const ConjunctiveQuery& query,
                       const SelectionFunction& sel,
                       const SchqaOptions& options = {}) {
  if (options.strict) {
    auto [syntactic, witnesses] = is_syn_sch(program, sel);
    if (!syntactic) {
      auto verdict = check_s_stickiness(program, sel, options.refuter_budget);
      if (verdict.violated()) {
        const auto& v = *verdict.violation;
        throw NotInClassError(
            "not in the class: value " + v.value.text() + " for join variable " +
            v.var + " of rule " + v.rule_id + " does not stick (missing from " +
            v.offending.text() + ")");
      }
    }
  }
  ChaseState state = qchase(program, query, sel, options.resumptions);
  return collect_answers(query, state.instance);
}

/// Diagnostic bound p·(s+q+1)^r on the height of a proof-tree schema, with
/// s the number of values seen at selected positions.
inline std::uint64_t proof_height_bound(const Program& program,
                                        const ConjunctiveQuery& query,
                                        std::uint64_t s) {
  std::uint64_t p = program.schema.size();
  std::uint64_t r = 0;
  for (const auto& [pred, arity] : program.schema)
    r = std::max<std::uint64_t>(r, arity);
  std::set<std::string> vars;
  for (const auto& a : query.body)
    for (const auto& t : a.args())
      if (t.is_variable()) vars.insert(t.name());
  std::uint64_t q = vars.size();
  std::uint64_t base = s + q + 1;
  std::uint64_t result = p;
  for (std::uint64_t i = 0; i < r; ++i) result *= base;
  return result;
}

/// The measured s for the bound above: distinct values occurring at
/// selected positions of the state's instance.
inline std::uint64_t count_selected_values(const ChaseState& state) {
  std::set<Term> values;
  for (const auto& a : state.instance.atoms())
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (state.sel_positions.count({a.predicate(), i + 1}))
        values.insert(a.args()[i]);
  return values.size();
}

}  // namespace stickychase
