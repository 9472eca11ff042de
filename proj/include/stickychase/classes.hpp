#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stickychase/graphs.hpp"
#include "stickychase/program.hpp"

namespace stickychase {

/// Result of the body-variable marking procedure. Marks are per
/// (rule, variable); all occurrences of a variable in one body share the
/// mark, which the occurrence expansion below makes explicit.
struct Marking {
  std::set<std::pair<std::size_t, std::string>> marked;  // (rule index, var)

  bool is_marked(std::size_t rule_index, const std::string& var) const {
    return marked.count({rule_index, var}) != 0;
  }

  /// (rule index, body atom index, argument index) per marked occurrence.
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> occurrences(
      const std::vector<Rule>& rules) const {
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> out;
    for (std::size_t r = 0; r < rules.size(); ++r)
      for (std::size_t a = 0; a < rules[r].body.size(); ++a) {
        const auto& atom = rules[r].body[a];
        for (std::size_t i = 0; i < atom.arity(); ++i)
          if (atom.args()[i].is_variable() &&
              is_marked(r, atom.args()[i].name()))
            out.insert({r, a, i});
      }
    return out;
  }
};

/// Two-phase marking: body variables missing from the head are marked, then
/// marks propagate backwards through head positions until fixpoint.
inline Marking mark_variables(const std::vector<Rule>& rules) {
  Marking m;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto hvars = rules[r].head_variables();
    for (const auto& v : rules[r].body_variables())
      if (!hvars.count(v)) m.marked.insert({r, v});
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<Position> marked_positions;
    for (const auto& [r, v] : m.marked)
      for (const auto& a : rules[r].body)
        for (std::size_t i = 0; i < a.arity(); ++i)
          if (a.args()[i].is_variable() && a.args()[i].name() == v)
            marked_positions.insert({a.predicate(), i + 1});
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const Atom& head = rules[r].head;
      auto bvars = rules[r].body_variables();
      for (std::size_t i = 0; i < head.arity(); ++i) {
        const Term& t = head.args()[i];
        if (!t.is_variable() || !bvars.count(t.name())) continue;
        if (!marked_positions.count({head.predicate(), i + 1})) continue;
        changed |= m.marked.insert({r, t.name()}).second;
      }
    }
  }
  return m;
}

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A selection function as a value: S⊥, S^rank, S^∃, or an explicit oracle
/// position set (the stand-in for non-computable selections such as S⊤).
struct SelectionFunction {
  enum class Kind { Bottom, Rank, Exists, Oracle };

  Kind kind = Kind::Bottom;
  std::set<Position> oracle_payload;

  static SelectionFunction bottom() { return {Kind::Bottom, {}}; }
  static SelectionFunction rank() { return {Kind::Rank, {}}; }
  static SelectionFunction exists() { return {Kind::Exists, {}}; }
  static SelectionFunction oracle(std::set<Position> payload) {
    return {Kind::Oracle, std::move(payload)};
  }

  std::string name() const {
    switch (kind) {
      case Kind::Bottom: return "bot";
      case Kind::Rank: return "rank";
      case Kind::Exists: return "exists";
      case Kind::Oracle: return "oracle";
    }
    return {};
  }
};

inline std::set<Position> select(const SelectionFunction& sel,
                                 const Program& program) {
  switch (sel.kind) {
    case SelectionFunction::Kind::Bottom:
      return {};
    case SelectionFunction::Kind::Rank:
      return finite_rank_positions(program).first;
    case SelectionFunction::Kind::Exists:
      return finite_existential_positions(program).first;
    case SelectionFunction::Kind::Oracle: {
      auto all = program.positions();
      for (const auto& p : sel.oracle_payload)
        if (!all.count(p))
          throw SelectionError("oracle selection names unknown position " +
                               p.text());
      return sel.oracle_payload;
    }
  }
  return {};
}

/// A syn-sch(S) violation: a marked join variable with no occurrence at a
/// selected position.
struct SynSchWitness {
  std::string rule_id;
  std::string var;
  std::vector<Position> body_positions;
};

/// The syn-sch(S) test: every repeated body variable is unmarked or occurs
/// at a selected position. Sticky, WS and JWS are this test under S⊥,
/// S^rank and S^∃.
inline std::pair<bool, std::vector<SynSchWitness>> is_syn_sch(
    const Program& program, const SelectionFunction& sel) {
  auto selected = select(sel, program);
  auto marking = mark_variables(program.rules);
  std::vector<SynSchWitness> witnesses;
  for (std::size_t r = 0; r < program.rules.size(); ++r) {
    const Rule& rule = program.rules[r];
    std::map<std::string, std::vector<Position>> occurrences;
    std::map<std::string, std::size_t> count;
    for (const auto& a : rule.body)
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args()[i].is_variable()) {
          occurrences[a.args()[i].name()].push_back({a.predicate(), i + 1});
          ++count[a.args()[i].name()];
        }
    for (const auto& [var, positions] : occurrences) {
      if (count[var] < 2) continue;  // occurrences counted, not atoms
      if (!marking.is_marked(r, var)) continue;
      bool covered = false;
      for (const auto& p : positions) covered |= selected.count(p) != 0;
      if (!covered) witnesses.push_back({rule.id, var, positions});
    }
  }
  return {witnesses.empty(), witnesses};
}

struct ClassReport {
  bool wa = false;
  bool ja = false;
  bool sticky = false;
  bool ws = false;
  bool jws = false;
  std::vector<Position> infinite_rank_positions;       // WA witnesses
  std::vector<std::string> edg_cycle_nodes;            // JA witnesses
  std::vector<SynSchWitness> sticky_witnesses;
  std::vector<SynSchWitness> ws_witnesses;
  std::vector<SynSchWitness> jws_witnesses;
};

inline ClassReport classify(const Program& program) {
  ClassReport report;
  auto [finite, ranks] = finite_rank_positions(program);
  report.wa = finite.size() == ranks.size();
  for (const auto& [p, r] : ranks)
    if (!r.has_value()) report.infinite_rank_positions.push_back(p);

  report.ja = is_jointly_acyclic(program.rules);
  if (!report.ja) {
    auto g = build_edg(program.rules);
    std::vector<std::vector<std::size_t>> adj(g.nodes.size());
    for (const auto& [a, b] : g.edges) adj[a].push_back(b);
    std::size_t scc_count = 0;
    auto comp = detail::scc_assignment(g.nodes.size(), adj, scc_count);
    std::vector<std::size_t> comp_size(scc_count, 0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) ++comp_size[comp[i]];
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      bool self_loop = g.edges.count({i, i}) != 0;
      if (comp_size[comp[i]] > 1 || self_loop)
        report.edg_cycle_nodes.push_back(g.nodes[i].text());
    }
  }

  auto [sticky, sw] = is_syn_sch(program, SelectionFunction::bottom());
  report.sticky = sticky;
  report.sticky_witnesses = std::move(sw);
  auto [ws, ww] = is_syn_sch(program, SelectionFunction::rank());
  report.ws = ws;
  report.ws_witnesses = std::move(ww);
  auto [jws, jw] = is_syn_sch(program, SelectionFunction::exists());
  report.jws = jws;
  report.jws_witnesses = std::move(jw);
  return report;
}

}  // namespace stickychase
