#include <gtest/gtest.h>

#include <random>

#include "stickychase/parser.hpp"
#include "stickychase/render.hpp"
#include "support/generators.hpp"
#include "support/paper_programs.hpp"

using namespace stickychase;

TEST(ParseProgram, FactAndExistentialRule) {
  auto parsed = parse_program("R(a,b). R(X,Y) -> exists Z R(Y,Z).");
  EXPECT_EQ(parsed.program.edb.size(), 1u);
  ASSERT_EQ(parsed.program.rules.size(), 1u);
  const Rule& r = parsed.program.rules[0];
  EXPECT_EQ(r.exist_vars, std::vector<std::string>{"Z"});
  EXPECT_EQ(r.body.size(), 1u);
}

TEST(ParseProgram, EmptyInput) {
  auto parsed = parse_program("");
  EXPECT_TRUE(parsed.program.rules.empty());
  EXPECT_TRUE(parsed.program.edb.empty());
  EXPECT_TRUE(parsed.queries.empty());
}

TEST(ParseProgram, DatalogRuleWithoutExistentials) {
  auto parsed = parse_program("R(X,Y), R(Y,Z) -> S(X,Y,Z).");
  ASSERT_EQ(parsed.program.rules.size(), 1u);
  EXPECT_EQ(parsed.program.rules[0].body.size(), 2u);
  EXPECT_TRUE(parsed.program.rules[0].exist_vars.empty());
}

TEST(ParseProgram, CommentsAndQuotedConstants) {
  auto parsed = parse_program(
      "% a comment line\n"
      "R('Hello World', b). % trailing comment\n");
  EXPECT_EQ(parsed.program.edb.size(), 1u);
  const Atom& fact = *parsed.program.edb.atoms().begin();
  EXPECT_EQ(fact.args()[0], Term::constant("Hello World"));
}

TEST(ParseProgram, EmbeddedQueriesAreCollected) {
  auto parsed = parse_program("R(a,b). ?Q(X) :- R(X,Y).");
  ASSERT_EQ(parsed.queries.size(), 1u);
  EXPECT_EQ(parsed.queries[0].name, "Q");
}

TEST(ParseQuery, FreeAndExistentialSplit) {
  auto q = parse_query("?Q(X) :- R(X,Y).");
  EXPECT_EQ(q.free_vars, std::vector<std::string>{"X"});
  EXPECT_EQ(q.exist_vars, std::set<std::string>{"Y"});
  EXPECT_EQ(q.exist_count(), 1u);

  auto q2 = parse_query("?Q(X) :- U(X).");
  EXPECT_TRUE(q2.exist_vars.empty());
  EXPECT_EQ(q2.exist_count(), 0u);

  auto q3 = parse_query("?Q :- P(a1,X).");
  EXPECT_TRUE(q3.free_vars.empty());
  EXPECT_EQ(q3.exist_vars, std::set<std::string>{"X"});
  EXPECT_EQ(q3.exist_count(), 1u);
}

TEST(ParseQuery, EmptyAnswerTupleRejected) {
  EXPECT_THROW(parse_query("?Q() :- P(a1,X)."), ParseError);
}

TEST(ParseErrors, PositionsReported) {
  try {
    parse_program("R(a,b).\nR(X Y) -> S(X).");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(ParseErrors, ArityMismatch) {
  EXPECT_THROW(parse_program("R(a,b). R(a)."), ParseError);
  EXPECT_THROW(parse_program("R(a,b). R(X) -> S(X)."), ParseError);
}

TEST(ParseErrors, ExistentialInBody) {
  EXPECT_THROW(parse_program("R(X,Z) -> exists Z S(X,Z)."), ParseError);
}

TEST(ParseErrors, UnboundHeadVariable) {
  EXPECT_THROW(parse_program("R(X,Y) -> S(X,W)."), ParseError);
}

TEST(ParseErrors, UnsafeQuery) {
  EXPECT_THROW(parse_query("?Q(W) :- R(X,Y)."), ParseError);
}

TEST(ParseErrors, NonGroundFact) {
  EXPECT_THROW(parse_program("R(a,X)."), ParseError);
}

TEST(ParseErrors, NullInProgramFact) {
  EXPECT_THROW(parse_program("R(a,_:n1)."), ParseError);
}

TEST(RenderInstance, WorkedExamples) {
  Instance single;
  single.insert(Atom("R", {Term::constant("a"), Term::constant("b")}));
  EXPECT_EQ(render_instance(single), "R(a,b).\n");

  Instance with_frozen;
  with_frozen.insert(Atom("P", {Term::constant("b"), Term::frozen_null(1)}));
  EXPECT_EQ(render_instance(with_frozen), "P(b,_:f1).\n");

  EXPECT_EQ(render_instance(single, RenderFormat::Json),
            R"({"atoms":[{"args":["a","b"],"pred":"R"}]})");
}

TEST(RenderInstance, SortedDeterministically) {
  Instance inst;
  inst.insert(Atom("S", {Term::constant("z")}));
  inst.insert(Atom("R", {Term::null(2)}));
  inst.insert(Atom("R", {Term::constant("a")}));
  inst.insert(Atom("R", {Term::frozen_null(1)}));
  EXPECT_EQ(render_instance(inst), "R(a).\nR(_:f1).\nR(_:n2).\nS(z).\n");
}

TEST(RoundTrip, PaperProgramsAreStable) {
  const char* sources[] = {fixtures::kIntro,      fixtures::kTransitiveClosure,
                           fixtures::kEdg,        fixtures::kJws,
                           fixtures::kMagic,      fixtures::kNotClosed,
                           fixtures::kAlgS,       fixtures::kWeaklySticky};
  for (const char* source : sources) {
    auto once = parse_program(source);
    std::string rendered = render_program(once.program);
    auto twice = parse_program(rendered, "<rendered>");
    EXPECT_EQ(render_program(twice.program), rendered) << source;
    EXPECT_EQ(twice.program.edb, once.program.edb);
    ASSERT_EQ(twice.program.rules.size(), once.program.rules.size());
    for (std::size_t i = 0; i < once.program.rules.size(); ++i)
      EXPECT_EQ(twice.program.rules[i].text(), once.program.rules[i].text());
  }
}

TEST(RoundTrip, RandomProgramsAndInstances) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 100; ++round) {
    Program p = testsupport::random_program(rng);
    std::string rendered = render_program(p);
    auto reparsed = parse_program(rendered, "<rendered>");
    EXPECT_EQ(render_program(reparsed.program), rendered);
  }
}

TEST(RoundTrip, InstanceWithNulls) {
  Instance inst = parse_instance("P(b,_:f1). P(_:f1,_:n2). R(a,b).");
  std::string rendered = render_instance(inst);
  EXPECT_EQ(render_instance(parse_instance(rendered)), rendered);
}

TEST(RoundTrip, QueryText) {
  auto q = parse_query("?Q(X) :- R(X,Y), S(Y).");
  auto q2 = parse_query(render_query(q));
  EXPECT_EQ(render_query(q2), render_query(q));
}

TEST(Fuzz, MutatedInputsEitherParseOrReportPosition) {
  std::mt19937_64 rng(47);
  std::string base = fixtures::kMagic;
  std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
  std::uniform_int_distribution<int> ch(32, 126);
  for (int round = 0; round < 300; ++round) {
    std::string mutated = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e)
      mutated[pos(rng)] = static_cast<char>(ch(rng));
    try {
      parse_program(mutated, "<fuzz>");
    } catch (const ParseError&) {
      // positioned failure is the contract
    }
  }
}

TEST(Fuzz, ZeroArityAtomsSupported) {
  auto parsed = parse_program("mg__P__ff(). mg__P__ff(), R(X,Y) -> S(X).");
  EXPECT_EQ(parsed.program.schema.at("mg__P__ff"), 0u);
  EXPECT_EQ(parsed.program.edb.size(), 1u);
}
