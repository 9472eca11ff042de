#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "stickychase/classes.hpp"
#include "stickychase/parser.hpp"
#include "stickychase/render.hpp"
#include "support/generators.hpp"
#include "support/paper_programs.hpp"

using namespace stickychase;

namespace {

Program prog(const char* text) { return parse_program(text).program; }

Position P(const char* pred, std::size_t i) { return Position{pred, i}; }

/// Worklist reimplementation of the propagation step with a shuffled
/// processing order; confluence oracle for mark_variables.
Marking shuffled_marking(const std::vector<Rule>& rules,
                         std::mt19937_64& rng) {
  Marking m;
  std::vector<std::pair<std::size_t, std::string>> work;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto hvars = rules[r].head_variables();
    for (const auto& v : rules[r].body_variables())
      if (!hvars.count(v)) {
        m.marked.insert({r, v});
        work.push_back({r, v});
      }
  }
  while (!work.empty()) {
    std::shuffle(work.begin(), work.end(), rng);
    auto [r, v] = work.back();
    work.pop_back();
    std::set<Position> positions;
    for (const auto& a : rules[r].body)
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args()[i].is_variable() && a.args()[i].name() == v)
          positions.insert({a.predicate(), i + 1});
    for (std::size_t r2 = 0; r2 < rules.size(); ++r2) {
      const Atom& head = rules[r2].head;
      auto bvars = rules[r2].body_variables();
      for (std::size_t i = 0; i < head.arity(); ++i) {
        const Term& t = head.args()[i];
        if (!t.is_variable() || !bvars.count(t.name())) continue;
        if (!positions.count({head.predicate(), i + 1})) continue;
        if (m.marked.insert({r2, t.name()}).second)
          work.push_back({r2, t.name()});
      }
    }
  }
  return m;
}

}  // namespace

TEST(MarkVariables, StickyExample) {
  auto program = prog(fixtures::kSticky);
  auto m = mark_variables(program.rules);
  EXPECT_TRUE(m.is_marked(0, "X"));
  EXPECT_TRUE(m.is_marked(0, "Y"));
  EXPECT_FALSE(m.is_marked(1, "X"));
  EXPECT_FALSE(m.is_marked(1, "Y"));
  EXPECT_FALSE(m.is_marked(1, "Z"));
}

TEST(MarkVariables, NonStickyExampleMarksJoin) {
  auto program = prog(fixtures::kNonSticky);
  auto m = mark_variables(program.rules);
  EXPECT_TRUE(m.is_marked(1, "Y"));
  // Both occurrences of Y in rule 2's body are marked.
  auto occ = m.occurrences(program.rules);
  EXPECT_TRUE(occ.count({1, 0, 1}));  // R(X,Y): Y at arg 2
  EXPECT_TRUE(occ.count({1, 1, 0}));  // R(Y,Z): Y at arg 1
  EXPECT_FALSE(m.is_marked(1, "X"));
  EXPECT_FALSE(m.is_marked(1, "Z"));
  EXPECT_TRUE(m.is_marked(2, "Y"));
}

TEST(MarkVariables, IdentityRuleMarksNothing) {
  auto program = prog("R(X,Y) -> R(X,Y).");
  auto m = mark_variables(program.rules);
  EXPECT_TRUE(m.marked.empty());
}

TEST(MarkVariables, FixpointIsOrderIndependent) {
  std::mt19937_64 rng(211);
  for (int round = 0; round < 150; ++round) {
    Program p = testsupport::random_program(rng);
    auto reference = mark_variables(p.rules);
    auto shuffled = shuffled_marking(p.rules, rng);
    EXPECT_EQ(reference.marked, shuffled.marked) << render_program(p);
  }
}

TEST(Select, BottomIsEmpty) {
  auto program = prog(fixtures::kJws);
  EXPECT_TRUE(select(SelectionFunction::bottom(), program).empty());
}

TEST(Select, RankOnWeaklyStickyExample) {
  auto program = prog(fixtures::kWeaklySticky);
  std::set<Position> expect{P("U", 1)};
  EXPECT_EQ(select(SelectionFunction::rank(), program), expect);
}

TEST(Select, ExistsOnJwsExample) {
  auto program = prog(fixtures::kJws);
  std::set<Position> expect{P("U", 1), P("R", 1), P("R", 2)};
  EXPECT_EQ(select(SelectionFunction::exists(), program), expect);
}

TEST(Select, OracleValidatesPositions) {
  auto program = prog(fixtures::kJws);
  auto ok = SelectionFunction::oracle({P("U", 1)});
  EXPECT_EQ(select(ok, program).size(), 1u);
  auto bad = SelectionFunction::oracle({P("Nope", 1)});
  EXPECT_THROW(select(bad, program), SelectionError);
}

TEST(IsSynSch, StickyUnderBottom) {
  auto program = prog(fixtures::kSticky);
  auto [ok, witnesses] = is_syn_sch(program, SelectionFunction::bottom());
  EXPECT_TRUE(ok);
  EXPECT_TRUE(witnesses.empty());
}

TEST(IsSynSch, NotWeaklyStickyWitness) {
  auto program = prog(fixtures::kNotWeaklySticky);
  auto [ok, witnesses] = is_syn_sch(program, SelectionFunction::rank());
  EXPECT_FALSE(ok);
  ASSERT_EQ(witnesses.size(), 1u);
  EXPECT_EQ(witnesses[0].rule_id, "r2");
  EXPECT_EQ(witnesses[0].var, "Y");
  std::vector<Position> expect{P("R", 2), P("R", 1)};
  EXPECT_EQ(witnesses[0].body_positions, expect);
}

TEST(IsSynSch, JwsUnderExists) {
  auto program = prog(fixtures::kJws);
  auto [ok, witnesses] = is_syn_sch(program, SelectionFunction::exists());
  EXPECT_TRUE(ok);
}

TEST(Classify, JwsExampleFlags) {
  auto report = classify(prog(fixtures::kJws));
  EXPECT_FALSE(report.wa);
  EXPECT_FALSE(report.sticky);
  EXPECT_FALSE(report.ws);
  EXPECT_TRUE(report.jws);
}

TEST(Classify, EmptyProgramAllTrue) {
  auto report = classify(prog(""));
  EXPECT_TRUE(report.wa && report.ja && report.sticky && report.ws &&
              report.jws);
}

TEST(Classify, MagicExampleIsJws) {
  auto report = classify(prog(fixtures::kMagic));
  EXPECT_TRUE(report.jws);
}

TEST(Classify, ReportsAreInclusionConsistent) {
  std::mt19937_64 rng(223);
  for (int round = 0; round < 300; ++round) {
    Program p = testsupport::random_program(rng);
    auto report = classify(p);
    if (report.sticky) EXPECT_TRUE(report.ws) << render_program(p);
    if (report.ws) EXPECT_TRUE(report.jws) << render_program(p);
    if (report.wa) EXPECT_TRUE(report.ja) << render_program(p);
  }
}

TEST(IsSynSch, MonotoneInTheSelection) {
  std::mt19937_64 rng(227);
  for (int round = 0; round < 150; ++round) {
    Program p = testsupport::random_program(rng);
    auto positions = p.positions();
    std::vector<Position> pool(positions.begin(), positions.end());
    std::set<Position> small, large;
    for (const auto& pos : pool) {
      if (rng() % 2) {
        large.insert(pos);
        if (rng() % 2) small.insert(pos);
      }
    }
    auto [ok_small, w1] = is_syn_sch(p, SelectionFunction::oracle(small));
    auto [ok_large, w2] = is_syn_sch(p, SelectionFunction::oracle(large));
    if (ok_small) EXPECT_TRUE(ok_large) << render_program(p);
  }
}

TEST(Classify, ScalesToLargerPrograms) {
  // Membership testing stays comfortably fast as programs grow.
  std::mt19937_64 rng(229);
  testsupport::GenOptions opt;
  opt.max_predicates = 6;
  opt.max_rules = 60;
  opt.max_body_atoms = 3;
  opt.max_facts = 40;
  Program p = testsupport::random_program(rng, opt);
  auto start = std::chrono::steady_clock::now();
  auto report = classify(p);
  auto elapsed = std::chrono::steady_clock::now() - start;
  (void)report;
  EXPECT_LT(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
                .count(),
            1000);
}
