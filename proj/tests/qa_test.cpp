#include <gtest/gtest.h>

#include <random>

#include "stickychase/parser.hpp"
#include "stickychase/qa.hpp"
#include "stickychase/render.hpp"
#include "support/canonical.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/paper_programs.hpp"

using namespace stickychase;
using testsupport::embeds_modulo_nulls;
using testsupport::equal_up_to_nulls;
using testsupport::instance_of;

namespace {

Program prog(const char* text) { return parse_program(text).program; }

ConjunctiveQuery query(const char* text, const Program& p) {
  return parse_query(text, "<q>", &p);
}

std::set<std::vector<Term>> constants(std::initializer_list<const char*> cs) {
  std::set<std::vector<Term>> out;
  for (const char* c : cs) out.insert({Term::constant(c)});
  return out;
}

}  // namespace

TEST(IsApplicable, HomomorphicHeadBlocksThePair) {
  Program p = prog("P(a,b). P(X,Y) -> exists Z P(Y,Z).");
  ChaseState state;
  state.program = p;
  state.sel_positions = {};
  state.instance = p.edb;
  state.instance.insert(*instance_of("P(b,_:n1).").atoms().begin());
  state.null_counter = 1;

  Assignment theta;
  theta.bind("X", Term::constant("b"));
  theta.bind("Y", Term::null(1));
  EXPECT_FALSE(is_applicable(p.rules[0], 0, theta, state));
}

TEST(IsApplicable, FreezingUnblocksThePair) {
  Program p = prog("P(a,b). P(X,Y) -> exists Z P(Y,Z).");
  ChaseState state;
  state.program = p;
  state.instance = p.edb;
  state.instance.insert(*instance_of("P(b,_:f1).").atoms().begin());
  state.null_counter = 1;

  Assignment theta;
  theta.bind("X", Term::constant("b"));
  theta.bind("Y", Term::frozen_null(1));
  EXPECT_TRUE(is_applicable(p.rules[0], 0, theta, state));
}

TEST(IsApplicable, BodyMustEmbed) {
  Program p = prog("P(a,b). P(X,Y) -> exists Z P(Y,Z).");
  ChaseState state;
  state.program = p;
  state.instance = p.edb;
  Assignment theta;
  theta.bind("X", Term::constant("b"));
  theta.bind("Y", Term::constant("c"));
  EXPECT_FALSE(is_applicable(p.rules[0], 0, theta, state));
}

TEST(Qchase, BottomSelectionGolden) {
  Program p = prog(fixtures::kAlg);
  auto q = query(fixtures::kAlgQuery, p);
  auto state = qchase(p, q, SelectionFunction::bottom());
  Instance expect = instance_of(
      "P(a,b). P(b,_:f1). R(a,b). P(_:f1,_:n2). R(b,_:f1).");
  EXPECT_EQ(state.instance, expect);
  EXPECT_EQ(state.resumptions_done, 1u);
}

TEST(Qchase, AllPositionsSelectionGolden) {
  Program p = prog(fixtures::kAlgS);
  auto q = query(fixtures::kAlgSQuery, p);
  auto sel = SelectionFunction::oracle(p.positions());
  auto state = qchase(p, q, sel);
  Instance expect = instance_of(
      "P(a,b). P(b,c). V(b). V(c). "
      "P(c,_:n1). U(a). U(b). P(_:n1,_:n2). U(c).");
  EXPECT_EQ(state.instance, expect);
  EXPECT_EQ(state.resumptions_done, 0u);  // M_Q = 0
}

TEST(Qchase, RankSelectionStopsEarly) {
  Program p = prog(fixtures::kAlgS);
  auto q = query(fixtures::kAlgSQuery, p);
  auto state = qchase(p, q, SelectionFunction::rank());
  Instance expect = instance_of(
      "P(a,b). P(b,c). V(b). V(c). P(c,_:n1). U(a). U(b).");
  EXPECT_EQ(state.instance, expect);
}

TEST(Resume, GainsThePaperExtension) {
  Program p = prog(fixtures::kAlgSUnguarded);
  auto q1 = query(fixtures::kResumeQuery, p);  // M = 1
  auto state = qchase(p, q1, SelectionFunction::bottom());
  Instance base = instance_of(
      "P(a,b). P(b,c). V(b). V(c). "
      "P(c,_:f1). U(a). U(b). P(_:f1,_:n2). U(c).");
  EXPECT_EQ(state.instance, base);

  auto resumed = resume(state, 1);
  Instance extended = instance_of(
      "P(a,b). P(b,c). V(b). V(c). "
      "P(c,_:f1). U(a). U(b). P(_:f1,_:f2). U(c). "
      "P(_:f2,_:n3). U(_:f1).");
  EXPECT_EQ(resumed.instance, extended);
}

TEST(Resume, ZeroIsIdentity) {
  Program p = prog(fixtures::kAlg);
  auto q = query(fixtures::kAlgQuery, p);
  auto state = qchase(p, q, SelectionFunction::bottom());
  auto same = resume(state, 0);
  EXPECT_EQ(same.instance, state.instance);
  EXPECT_EQ(same.resumptions_done, state.resumptions_done);
}

TEST(Resume, IncrementalEqualsFreshRun) {
  Program p = prog(fixtures::kAlgSUnguarded);
  auto q = query(fixtures::kAlgSQuery, p);
  auto fresh = qchase(p, q, SelectionFunction::bottom(), 2u);
  auto incremental =
      resume(qchase(p, q, SelectionFunction::bottom(), 1u), 1);
  EXPECT_EQ(fresh.instance, incremental.instance);

  std::mt19937_64 rng(401);
  for (int round = 0; round < 40; ++round) {
    Program rp = testsupport::random_program(rng);
    auto rq = testsupport::random_query(rng, rp);
    auto a = qchase(rp, rq, SelectionFunction::exists(), 2u);
    auto b = resume(qchase(rp, rq, SelectionFunction::exists(), 1u), 1);
    EXPECT_TRUE(equal_up_to_nulls(a.instance, b.instance))
        << render_program(rp);
  }
}

TEST(Schqa, PaperAnswers) {
  Program algS = prog(fixtures::kAlgS);
  auto q = query(fixtures::kAlgSQuery, algS);
  auto all = SelectionFunction::oracle(algS.positions());
  EXPECT_EQ(schqa(algS, q, all).tuples, constants({"a", "b", "c"}));
  EXPECT_EQ(schqa(algS, q, SelectionFunction::rank()).tuples,
            constants({"a", "b"}));

  Program alg = prog(fixtures::kAlg);
  auto q2 = query(fixtures::kAlgQuery, alg);
  EXPECT_EQ(schqa(alg, q2, SelectionFunction::bottom()).tuples,
            constants({"a", "b"}));
}

TEST(Schqa, StrictModeRefutesNonMembers) {
  Program algS = prog(fixtures::kAlgS);
  auto q = query(fixtures::kAlgSQuery, algS);
  SchqaOptions options;
  options.strict = true;
  EXPECT_THROW(schqa(algS, q, SelectionFunction::rank(), options),
               NotInClassError);
  // Under the all-positions oracle the syntactic test passes vacuously.
  auto all = SelectionFunction::oracle(algS.positions());
  EXPECT_NO_THROW(schqa(algS, q, all, options));
}

TEST(Schqa, NullBearingTuplesAreFiltered) {
  Program p = prog("P(a,b). P(X,Y) -> exists Z P(Y,Z).");
  auto q = query("?Q(X) :- P(b,X).", p);
  auto answers = schqa(p, q, SelectionFunction::bottom());
  EXPECT_TRUE(answers.tuples.empty());
  EXPECT_FALSE(answers.raw.empty());  // the null witness is in the raw set
}

TEST(ProofHeightBound, FormulaValues) {
  Program tiny = prog("U(a).");
  auto q0 = query("?Q :- U(a).", tiny);
  EXPECT_EQ(proof_height_bound(tiny, q0, 0), 1u);  // 1·(0+0+1)^1

  Program alg = prog(fixtures::kAlg);
  auto q = query(fixtures::kAlgQuery, alg);
  EXPECT_EQ(proof_height_bound(alg, q, 0), 18u);  // 2·(0+2+1)^2

  Program wide = prog("T(a,b,c). W(a,b,c). T(X,Y,Z) -> W(X,Y,Z).");
  auto q1 = query("?Q(X) :- T(X,X,X).", wide);
  EXPECT_EQ(proof_height_bound(wide, q1, 3), 250u);  // 2·(3+1+1)^3
}

TEST(ProofHeightBound, MeasuredSelectionValues) {
  Program p = prog(fixtures::kAlgS);
  auto q = query(fixtures::kAlgSQuery, p);
  auto state = qchase(p, q, SelectionFunction::rank());
  EXPECT_EQ(count_selected_values(state), 2u);  // b and c at V[1]
}

TEST(Schqa, SoundnessAgainstTheCertainAnswerOracle) {
  std::mt19937_64 rng(409);
  SelectionFunction sels[] = {SelectionFunction::bottom(),
                              SelectionFunction::rank(),
                              SelectionFunction::exists()};
  int compared = 0;
  for (int round = 0; round < 60; ++round) {
    Program p = testsupport::random_program(rng);
    auto q = testsupport::random_query(rng, p);
    auto oracle = testsupport::certain_answers_oracle(p, q, 800);
    if (!oracle) continue;
    for (const auto& sel : sels) {
      auto answers = schqa(p, q, sel);
      for (const auto& tuple : answers.tuples)
        EXPECT_TRUE(oracle->count(tuple)) << render_program(p);
      ++compared;
    }
  }
  EXPECT_GT(compared, 60);
}

TEST(Schqa, CompleteOnSyntacticMembers) {
  std::mt19937_64 rng(419);
  int compared = 0;
  SelectionFunction sels[] = {SelectionFunction::bottom(),
                              SelectionFunction::rank(),
                              SelectionFunction::exists()};
  for (int round = 0; round < 80; ++round) {
    Program p = testsupport::random_program(rng);
    if (!is_weakly_acyclic(p)) continue;  // oracle must terminate
    auto q = testsupport::random_query(rng, p);
    auto oracle = testsupport::certain_answers_oracle(p, q, 2000);
    if (!oracle) continue;
    for (const auto& sel : sels) {
      auto [member, witnesses] = is_syn_sch(p, sel);
      if (!member) continue;
      auto answers = schqa(p, q, sel);
      EXPECT_EQ(answers.tuples, *oracle)
          << render_program(p) << " under " << sel.name();
      ++compared;
    }
  }
  EXPECT_GT(compared, 30);
}

TEST(Qchase, InstanceEmbedsIntoTheClassicChase) {
  std::mt19937_64 rng(421);
  int compared = 0;
  for (int round = 0; round < 60 && compared < 25; ++round) {
    Program p = testsupport::random_program(rng);
    auto chase = classic_chase(p, 2000);
    if (!chase.terminated) continue;
    auto q = testsupport::random_query(rng, p);
    auto state = qchase(p, q, SelectionFunction::exists());
    EXPECT_TRUE(embeds_modulo_nulls(state.instance, chase.instance))
        << render_program(p);
    ++compared;
  }
  EXPECT_GT(compared, 15);
}

TEST(Qchase, ReuseForQueriesWithFewerExistentials) {
  std::mt19937_64 rng(431);
  int compared = 0;
  for (int round = 0; round < 80 && compared < 25; ++round) {
    Program p = testsupport::random_program(rng);
    auto [member, w] = is_syn_sch(p, SelectionFunction::exists());
    if (!member) continue;
    auto q_big = testsupport::random_query(rng, p);
    auto q_small = testsupport::random_query(rng, p);
    if (q_small.exist_count() > q_big.exist_count()) std::swap(q_big, q_small);
    auto state = qchase(p, q_big, SelectionFunction::exists());
    auto on_state = collect_answers(q_small, state.instance);
    auto direct = schqa(p, q_small, SelectionFunction::exists());
    EXPECT_EQ(on_state.tuples, direct.tuples) << render_program(p);
    ++compared;
  }
  EXPECT_GT(compared, 15);
}

TEST(Qchase, InstanceSizeWithinTheSchemaBound) {
  // Size stays below p·(c+s+1)^r, with c counting constants and frozen
  // nulls of the final instance and s the values at selected positions.
  std::mt19937_64 rng(433);
  for (int round = 0; round < 40; ++round) {
    Program p = testsupport::random_program(rng);
    auto q = testsupport::random_query(rng, p);
    auto state = qchase(p, q, SelectionFunction::exists());
    std::set<Term> rigid;
    for (const auto& t : state.instance.active_domain())
      if (t.is_rigid()) rigid.insert(t);
    std::uint64_t c = rigid.size();
    std::uint64_t s = count_selected_values(state);
    std::uint64_t preds = p.schema.size();
    std::uint64_t r = 0;
    for (const auto& [pred, arity] : p.schema)
      r = std::max<std::uint64_t>(r, arity);
    long double bound = static_cast<long double>(preds);
    for (std::uint64_t i = 0; i < r; ++i) bound *= (c + s + 1);
    EXPECT_LE(static_cast<long double>(state.instance.size()), bound)
        << render_program(p);
  }
}
