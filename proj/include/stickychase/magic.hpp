#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stickychase/classes.hpp"
#include "stickychase/program.hpp"

namespace stickychase {

inline std::string adorned_name(const std::string& base,
                                const std::string& pattern) {
  return base + "__" + pattern;
}

inline std::string magic_name(const std::string& base,
                              const std::string& pattern) {
  return "mg__" + base + "__" + pattern;
}

/// Magic atom of A wrt. its adornment: the terms at bound positions.
inline Atom magic_atom(const Atom& a, const std::string& pattern,
                       const std::string& base) {
  std::vector<Term> args;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (pattern[i] == 'b') args.push_back(a.args()[i]);
  return Atom(magic_name(base, pattern), std::move(args));
}

/// A sideways information passing strategy for one (rule, head adornment):
/// the body processing order plus the variables bound before/after each
/// body atom. Every body atom precedes the head; the head's bound set is
/// exactly the variables at bound head positions.
struct Sips {
  std::vector<std::size_t> order;             // body atom indices
  std::set<std::string> head_bound;
  std::vector<std::set<std::string>> bound_before;  // per order slot
  std::vector<std::set<std::string>> bound_after;
};

/// Produces the body processing order for a (rule, head adornment).
using SipsOrder =
    std::function<std::vector<std::size_t>(const Rule&, const std::string&)>;

inline SipsOrder left_to_right_sips() {
  return [](const Rule& rule, const std::string&) {
    std::vector<std::size_t> order(rule.body.size());
    std::iota(order.begin(), order.end(), 0);
    return order;
  };
}

/// A reproducible scrambled order; the permutation depends only on the
/// seed, the rule id and the adornment.
inline SipsOrder seeded_sips(std::uint64_t seed) {
  return [seed](const Rule& rule, const std::string& pattern) {
    std::vector<std::size_t> order(rule.body.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t h = seed;
    for (char c : rule.id + "/" + pattern)
      h = h * 1099511628211ULL + static_cast<unsigned char>(c);
    std::mt19937_64 rng(h);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
  };
}

inline Sips make_sips(const Rule& rule, const std::string& pattern,
                      const SipsOrder& order_of) {
  Sips sips;
  sips.order = order_of(rule, pattern);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Term& t = rule.head.args()[i];
    if (pattern[i] == 'b' && t.is_variable()) sips.head_bound.insert(t.name());
  }
  std::set<std::string> bound = sips.head_bound;
  for (std::size_t k = 0; k < sips.order.size(); ++k) {
    sips.bound_before.push_back(bound);
    for (const auto& t : rule.body[sips.order[k]].args())
      if (t.is_variable()) bound.insert(t.name());
    sips.bound_after.push_back(bound);
  }
  return sips;
}

inline Sips default_sips(const Rule& rule, const std::string& pattern) {
  return make_sips(rule, pattern, left_to_right_sips());
}

/// One rule of P_m in the making: the rewritten (adorned) rule plus the
/// bookkeeping the magic-rule step needs.
struct AdornedRule {
  std::size_t source_rule = 0;
  std::string head_pattern;
  Rule rewritten;                         // body in original atom order
  Sips sips;
  std::vector<std::string> body_patterns;  // per body atom; "" = extensional
};

struct MagicProgram {
  Program rewritten;  // adorned + magic + load rules; EDB plus the seeds
  ConjunctiveQuery query;
  std::vector<Rule> adorned_rules;
  std::vector<Rule> magic_rules;
  std::vector<Rule> load_rules;
  std::vector<Atom> seeds;
  std::vector<std::string> worklist_trace;  // adorned predicates, in order
  std::map<std::pair<std::string, std::string>, std::string> adorned_names;
  std::map<std::pair<std::string, std::string>, std::string> magic_names;
};

namespace detail {

inline std::string adorn_pattern(const Atom& a,
                                 const std::set<std::string>& bound) {
  std::string pattern;
  pattern.reserve(a.arity());
  for (const auto& t : a.args()) {
    bool b = !t.is_variable() || bound.count(t.name()) != 0;
    pattern.push_back(b ? 'b' : 'f');
  }
  return pattern;
}

inline Atom rename_predicate(const Atom& a, const std::string& name) {
  return Atom(name, a.args());
}

}  // namespace detail

struct AdornResult {
  std::vector<AdornedRule> rules;
  ConjunctiveQuery query;
  std::vector<std::string> trace;
  std::vector<Atom> seeds;
  std::set<std::pair<std::string, std::string>> predicates;  // (base, pattern)
};

/// Step 1: generation of adorned rules, driven by a worklist that starts
/// from the query. Query atoms over intensional predicates are adorned b at
/// constants and f at variables; extensional atoms keep their base name
/// everywhere. A rule is skipped for an adornment that would bind one of
/// its existential head positions.
inline AdornResult adorn(const Program& program, const ConjunctiveQuery& query,
                         const SipsOrder& order_of) {
  AdornResult out;
  auto intensional = program.intensional_predicates();

  std::deque<std::pair<std::string, std::string>> worklist;
  std::set<std::pair<std::string, std::string>> seen;
  auto enqueue = [&](const std::string& base, const std::string& pattern) {
    if (seen.insert({base, pattern}).second) worklist.push_back({base, pattern});
  };

  out.query = query;
  for (auto& atom : out.query.body) {
    if (!intensional.count(atom.predicate())) continue;
    std::string pattern = detail::adorn_pattern(atom, {});
    out.seeds.push_back(magic_atom(atom, pattern, atom.predicate()));
    enqueue(atom.predicate(), pattern);
    atom = detail::rename_predicate(atom,
                                    adorned_name(atom.predicate(), pattern));
  }

  while (!worklist.empty()) {
    auto [base, pattern] = worklist.front();
    worklist.pop_front();
    out.trace.push_back(adorned_name(base, pattern));
    out.predicates.insert({base, pattern});

    for (std::size_t r = 0; r < program.rules.size(); ++r) {
      const Rule& rule = program.rules[r];
      if (rule.head.predicate() != base) continue;

      bool binds_existential = false;
      for (std::size_t i = 0; i < pattern.size(); ++i) {
        const Term& t = rule.head.args()[i];
        if (pattern[i] == 'b' && t.is_variable() &&
            rule.is_existential(t.name()))
          binds_existential = true;
      }
      if (binds_existential) continue;

      AdornedRule adorned;
      adorned.source_rule = r;
      adorned.head_pattern = pattern;
      adorned.sips = make_sips(rule, pattern, order_of);
      adorned.body_patterns.assign(rule.body.size(), "");

      std::set<std::string> bound = adorned.sips.head_bound;
      for (std::size_t idx : adorned.sips.order) {
        const Atom& atom = rule.body[idx];
        if (intensional.count(atom.predicate())) {
          std::string body_pattern = detail::adorn_pattern(atom, bound);
          adorned.body_patterns[idx] = body_pattern;
          enqueue(atom.predicate(), body_pattern);
        }
        for (const auto& t : atom.args())
          if (t.is_variable()) bound.insert(t.name());
      }

      adorned.rewritten = rule;
      adorned.rewritten.id = rule.id + "__" + pattern;
      adorned.rewritten.head = detail::rename_predicate(
          rule.head, adorned_name(base, pattern));
      for (std::size_t idx = 0; idx < rule.body.size(); ++idx)
        if (!adorned.body_patterns[idx].empty())
          adorned.rewritten.body[idx] = detail::rename_predicate(
              rule.body[idx], adorned_name(rule.body[idx].predicate(),
                                           adorned.body_patterns[idx]));
      out.rules.push_back(std::move(adorned));
    }
  }
  return out;
}

/// Step 2: guard each adorned rule with the magic atom of its head.
inline Rule add_magic_atom(const AdornedRule& adorned, const Program& program) {
  const Rule& source = program.rules[adorned.source_rule];
  Rule guarded = adorned.rewritten;
  Atom guard =
      magic_atom(source.head, adorned.head_pattern, source.head.predicate());
  guarded.body.insert(guarded.body.begin(), guard);
  return guarded;
}

/// Step 3: one magic rule per adorned body occurrence; its body is the
/// guard of the host rule plus the atoms preceding the occurrence in the
/// sips order. Magic rules never have existential variables.
inline std::vector<Rule> magic_rules_for(const AdornedRule& adorned,
                                         const Program& program) {
  const Rule& source = program.rules[adorned.source_rule];
  Atom guard =
      magic_atom(source.head, adorned.head_pattern, source.head.predicate());
  std::vector<Rule> rules;
  for (std::size_t k = 0; k < adorned.sips.order.size(); ++k) {
    std::size_t idx = adorned.sips.order[k];
    if (adorned.body_patterns[idx].empty()) continue;  // extensional
    Rule magic;
    magic.head = magic_atom(source.body[idx], adorned.body_patterns[idx],
                            source.body[idx].predicate());
    magic.body.push_back(guard);
    for (std::size_t j = 0; j < k; ++j)
      magic.body.push_back(adorned.rewritten.body[adorned.sips.order[j]]);
    rules.push_back(std::move(magic));
  }
  return rules;
}

/// Step 4: if any intensional predicate carries extensional data, every
/// adorned predicate gets a rule loading its base extension on demand.
inline std::vector<Rule> load_rules(
    const Program& program,
    const std::set<std::pair<std::string, std::string>>& adorned_preds) {
  bool applies = false;
  for (const auto& pred : program.intensional_predicates())
    applies |= !program.edb.with_predicate(pred).empty();
  if (!applies) return {};

  std::vector<Rule> rules;
  for (const auto& [base, pattern] : adorned_preds) {
    std::vector<Term> vars;
    for (std::size_t i = 0; i < pattern.size(); ++i)
      vars.push_back(Term::variable("X" + std::to_string(i + 1)));
    Atom base_atom(base, vars);
    Rule load;
    load.body.push_back(magic_atom(base_atom, pattern, base));
    load.body.push_back(base_atom);
    load.head = Atom(adorned_name(base, pattern), vars);
    rules.push_back(std::move(load));
  }
  return rules;
}

struct MagicReport {
  ClassReport input;
  ClassReport output;
  bool input_jws = false;
  bool output_jws = false;
  bool jws_closed = false;  // input JWS implies output JWS
};

/// MagicD+: the four-step query-driven rewriting. Returns P_m (same EDB
/// plus the seed facts) and Q_m with Q(P ∪ D) = Q_m(P_m ∪ D).
inline std::pair<MagicProgram, MagicReport> magicd_plus(
    const Program& program, const ConjunctiveQuery& query,
    const SipsOrder& order_of) {
  MagicProgram magic;
  AdornResult adorned = adorn(program, query, order_of);
  magic.query = adorned.query;
  magic.seeds = adorned.seeds;
  magic.worklist_trace = adorned.trace;
  for (const auto& [base, pattern] : adorned.predicates) {
    magic.adorned_names[{base, pattern}] = adorned_name(base, pattern);
    magic.magic_names[{base, pattern}] = magic_name(base, pattern);
  }

  for (const auto& ar : adorned.rules)
    magic.adorned_rules.push_back(add_magic_atom(ar, program));

  std::set<std::string> seen_magic;  // dedupe structurally equal magic rules
  for (const auto& ar : adorned.rules)
    for (auto& rule : magic_rules_for(ar, program))
      if (seen_magic.insert(rule.text()).second)
        magic.magic_rules.push_back(std::move(rule));

  magic.load_rules = load_rules(program, adorned.predicates);

  std::size_t counter = 0;
  auto finish = [&](Rule r, const std::string& prefix) {
    if (r.id.empty()) r.id = prefix + std::to_string(++counter);
    magic.rewritten.add_rule(std::move(r));
  };
  for (const auto& r : magic.adorned_rules) finish(r, "a");
  counter = 0;
  for (const auto& r : magic.magic_rules) finish(r, "m");
  counter = 0;
  for (const auto& r : magic.load_rules) finish(r, "l");
  for (const auto& a : program.edb.atoms()) magic.rewritten.add_fact(a);
  for (const auto& seed : magic.seeds) magic.rewritten.add_fact(seed);
  // Adorned predicates may end up with neither rules nor data; keep them
  // in the schema so queries over them stay well-formed.
  for (const auto& [base, pattern] : adorned.predicates)
    magic.rewritten.declare(adorned_name(base, pattern),
                            program.schema.at(base));

  MagicReport report;
  report.input = classify(program);
  report.output = classify(magic.rewritten);
  report.input_jws = report.input.jws;
  report.output_jws = report.output.jws;
  report.jws_closed = !report.input.jws || report.output.jws;
  return {std::move(magic), report};
}

inline std::pair<MagicProgram, MagicReport> magicd_plus(
    const Program& program, const ConjunctiveQuery& query) {
  return magicd_plus(program, query, left_to_right_sips());
}

}  // namespace stickychase
