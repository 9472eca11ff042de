#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stickychase/program.hpp"

namespace stickychase {

/// Parse failure with a 1-based source location.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string provenance, std::size_t line, std::size_t column,
             const std::string& message)
      : std::runtime_error(provenance + ":" + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ParsedProgram {
  Program program;
  std::vector<ConjunctiveQuery> queries;
};

namespace detail {

enum class TokKind {
  Ident,      // starts with a letter or digit; classified at use sites
  Quoted,     // 'single quoted' constant
  NullTok,    // _:n<k> or _:f<k>, in rendered instances only
  LParen,
  RParen,
  Comma,
  Dot,
  Arrow,      // ->
  Question,   // ?
  Turnstile,  // :-
  End,
};

struct Token {
  TokKind kind;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  Lexer(std::string_view input, std::string provenance)
      : input_(input), provenance_(std::move(provenance)) {}

  Token next() {
    skip_blank();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= input_.size()) {
      tok.kind = TokKind::End;
      return tok;
    }
    char c = input_[pos_];
    if (c == '(') return take(tok, TokKind::LParen, 1);
    if (c == ')') return take(tok, TokKind::RParen, 1);
    if (c == ',') return take(tok, TokKind::Comma, 1);
    if (c == '.') return take(tok, TokKind::Dot, 1);
    if (c == '?') return take(tok, TokKind::Question, 1);
    if (c == '-' && pos_ + 1 < input_.size() && input_[pos_ + 1] == '>')
      return take(tok, TokKind::Arrow, 2);
    if (c == ':' && pos_ + 1 < input_.size() && input_[pos_ + 1] == '-')
      return take(tok, TokKind::Turnstile, 2);
    if (c == '\'') {
      std::size_t end = pos_ + 1;
      while (end < input_.size() && input_[end] != '\'' && input_[end] != '\n')
        ++end;
      if (end >= input_.size() || input_[end] != '\'')
        fail(tok.line, tok.column, "unterminated quoted constant");
      tok.kind = TokKind::Quoted;
      tok.text = std::string(input_.substr(pos_ + 1, end - pos_ - 1));
      advance(end + 1 - pos_);
      return tok;
    }
    if (c == '_' && pos_ + 1 < input_.size() && input_[pos_ + 1] == ':') {
      std::size_t end = pos_ + 2;
      while (end < input_.size() &&
             std::isalnum(static_cast<unsigned char>(input_[end])))
        ++end;
      tok.kind = TokKind::NullTok;
      tok.text = std::string(input_.substr(pos_ + 2, end - pos_ - 2));
      if (tok.text.size() < 2 || (tok.text[0] != 'n' && tok.text[0] != 'f'))
        fail(tok.line, tok.column, "malformed null token; expected _:n<k> or _:f<k>");
      advance(end - pos_);
      return tok;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < input_.size() &&
             (std::isalnum(static_cast<unsigned char>(input_[end])) ||
              input_[end] == '_'))
        ++end;
      tok.kind = TokKind::Ident;
      tok.text = std::string(input_.substr(pos_, end - pos_));
      advance(end - pos_);
      return tok;
    }
    fail(tok.line, tok.column, std::string("unexpected character '") + c + "'");
    return tok;  // unreachable
  }

  [[noreturn]] void fail(std::size_t line, std::size_t column,
                         const std::string& message) const {
    throw ParseError(provenance_, line, column, message);
  }

 private:
  Token take(Token tok, TokKind kind, std::size_t len) {
    tok.kind = kind;
    tok.text = std::string(input_.substr(pos_, len));
    advance(len);
    return tok;
  }

  void skip_blank() {
    while (pos_ < input_.size()) {
      char c = input_[pos_];
      if (c == '%') {
        while (pos_ < input_.size() && input_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < input_.size(); ++i, ++pos_) {
      if (input_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  std::string_view input_;
  std::string provenance_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

inline bool is_variable_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  Parser(std::string_view input, std::string provenance)
      : lexer_(input, provenance), provenance_(std::move(provenance)) {
    advance();
  }

  ParsedProgram parse_all() {
    ParsedProgram out;
    std::size_t rule_counter = 0;
    while (cur_.kind != TokKind::End) {
      if (cur_.kind == TokKind::Question) {
        out.queries.push_back(parse_query_clause(out.program));
        continue;
      }
      parse_fact_or_rule(out.program, rule_counter);
    }
    return out;
  }

  ConjunctiveQuery parse_single_query(Program* schema_sink) {
    if (cur_.kind != TokKind::Question)
      fail(cur_, "expected a query starting with '?'");
    Program scratch;
    ConjunctiveQuery q = parse_query_clause(schema_sink ? *schema_sink : scratch);
    if (cur_.kind != TokKind::End) fail(cur_, "trailing input after query");
    return q;
  }

  Instance parse_instance_atoms() {
    allow_nulls_ = true;
    Instance out;
    while (cur_.kind != TokKind::End) {
      Token start = cur_;
      Atom a = parse_atom();
      expect(TokKind::Dot, "'.'");
      if (!a.is_ground()) fail(start, "instance atom contains variables");
      out.insert(a);
    }
    return out;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const Token& at, const std::string& message) {
    lexer_.fail(at.line, at.column, message);
  }

  Token expect(TokKind kind, const std::string& what) {
    if (cur_.kind != kind) fail(cur_, "expected " + what);
    Token tok = cur_;
    advance();
    return tok;
  }

  Term parse_term() {
    if (cur_.kind == TokKind::Quoted) {
      Term t = Term::constant(cur_.text);
      advance();
      return t;
    }
    if (cur_.kind == TokKind::NullTok) {
      Token tok = cur_;
      advance();
      if (!allow_nulls_) fail(tok, "null terms are not allowed here");
      std::uint64_t ordinal = 0;
      for (std::size_t i = 1; i < tok.text.size(); ++i) {
        char c = tok.text[i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
          fail(tok, "malformed null ordinal");
        ordinal = ordinal * 10 + static_cast<std::uint64_t>(c - '0');
      }
      return tok.text[0] == 'n' ? Term::null(ordinal)
                                : Term::frozen_null(ordinal);
    }
    Token tok = expect(TokKind::Ident, "a term");
    if (tok.text == "exists")
      fail(tok, "reserved word 'exists' used as a term");
    if (is_variable_name(tok.text)) return Term::variable(tok.text);
    return Term::constant(tok.text);
  }

  Atom parse_atom() {
    Token name = cur_;
    if (cur_.kind != TokKind::Ident) fail(cur_, "expected a predicate name");
    if (name.text == "exists")
      fail(name, "reserved word 'exists' used as a predicate");
    advance();
    expect(TokKind::LParen, "'('");
    std::vector<Term> args;
    if (cur_.kind != TokKind::RParen) {  // zero-arity atoms are allowed
      args.push_back(parse_term());
      while (cur_.kind == TokKind::Comma) {
        advance();
        args.push_back(parse_term());
      }
    }
    expect(TokKind::RParen, "')'");
    return Atom(name.text, std::move(args));
  }

  void check_arity(Program& program, const Atom& a, const Token& at) {
    auto it = program.schema.find(a.predicate());
    if (it != program.schema.end() && it->second != a.arity())
      fail(at, "predicate " + a.predicate() + " used with arity " +
                   std::to_string(a.arity()) + " but declared with arity " +
                   std::to_string(it->second));
  }

  void parse_fact_or_rule(Program& program, std::size_t& rule_counter) {
    Token start = cur_;
    std::vector<Atom> atoms;
    std::vector<Token> atom_starts;
    atom_starts.push_back(cur_);
    atoms.push_back(parse_atom());
    while (cur_.kind == TokKind::Comma) {
      advance();
      atom_starts.push_back(cur_);
      atoms.push_back(parse_atom());
    }
    if (cur_.kind == TokKind::Dot) {
      advance();
      if (atoms.size() != 1)
        fail(start, "a fact must be a single atom");
      if (!atoms[0].is_ground())
        fail(start, "fact " + atoms[0].text() + " contains variables");
      check_arity(program, atoms[0], start);
      program.add_fact(atoms[0]);
      return;
    }
    expect(TokKind::Arrow, "'.', ',' or '->'");
    Rule rule;
    rule.id = "r" + std::to_string(++rule_counter);
    rule.body = std::move(atoms);
    if (cur_.kind == TokKind::Ident && cur_.text == "exists") {
      advance();
      Token var = expect(TokKind::Ident, "an existential variable");
      if (!is_variable_name(var.text))
        fail(var, "existential variable must start with an uppercase letter");
      rule.exist_vars.push_back(var.text);
      while (cur_.kind == TokKind::Comma) {
        advance();
        var = expect(TokKind::Ident, "an existential variable");
        if (!is_variable_name(var.text))
          fail(var,
               "existential variable must start with an uppercase letter");
        rule.exist_vars.push_back(var.text);
      }
    }
    Token head_start = cur_;
    rule.head = parse_atom();
    expect(TokKind::Dot, "'.'");
    for (const auto& a : rule.body) check_arity(program, a, start);
    check_arity(program, rule.head, head_start);
    // Report rule-shape violations with the positions the parser has.
    auto bvars = rule.body_variables();
    for (const auto& z : rule.exist_vars)
      if (bvars.count(z))
        fail(head_start,
             "existential variable " + z + " occurs in the rule body");
    for (const auto& v : rule.head_variables())
      if (!rule.is_existential(v) && !bvars.count(v))
        fail(head_start, "head variable " + v +
                             " is neither existential nor bound in the body");
    try {
      program.add_rule(std::move(rule));
    } catch (const ProgramError& e) {
      fail(start, e.what());
    }
  }

  ConjunctiveQuery parse_query_clause(Program& program) {
    Token start = expect(TokKind::Question, "'?'");
    ConjunctiveQuery q;
    Token name = expect(TokKind::Ident, "a query name");
    q.name = name.text;
    if (cur_.kind == TokKind::LParen) {
      advance();
      if (cur_.kind == TokKind::RParen)
        fail(cur_, "empty answer tuple; write '?" + q.name +
                       " :- ...' for a Boolean query");
      Token var = expect(TokKind::Ident, "a free variable");
      if (!is_variable_name(var.text))
        fail(var, "free variable must start with an uppercase letter");
      q.free_vars.push_back(var.text);
      while (cur_.kind == TokKind::Comma) {
        advance();
        var = expect(TokKind::Ident, "a free variable");
        if (!is_variable_name(var.text))
          fail(var, "free variable must start with an uppercase letter");
        q.free_vars.push_back(var.text);
      }
      expect(TokKind::RParen, "')'");
    }
    expect(TokKind::Turnstile, "':-'");
    Token body_start = cur_;
    q.body.push_back(parse_atom());
    while (cur_.kind == TokKind::Comma) {
      advance();
      q.body.push_back(parse_atom());
    }
    expect(TokKind::Dot, "'.'");
    for (const auto& a : q.body) check_arity(program, a, body_start);
    for (const auto& a : q.body) program.declare(a.predicate(), a.arity());
    std::set<std::string> bvars;
    for (const auto& a : q.body)
      for (const auto& t : a.args())
        if (t.is_variable()) bvars.insert(t.name());
    for (const auto& v : q.free_vars)
      if (!bvars.count(v))
        fail(start, "unsafe query: free variable " + v +
                        " does not occur in the body");
    for (const auto& v : bvars) {
      bool is_free = false;
      for (const auto& f : q.free_vars) is_free |= (f == v);
      if (!is_free) q.exist_vars.insert(v);
    }
    q.validate();
    return q;
  }

  Lexer lexer_;
  std::string provenance_;
  Token cur_{TokKind::End, "", 1, 1};
  bool allow_nulls_ = false;
};

}  // namespace detail

/// Parses a .dlp source: facts, rules and (optionally) embedded queries.
inline ParsedProgram parse_program(std::string_view text,
                                   const std::string& provenance = "<input>") {
  detail::Parser parser(text, provenance);
  return parser.parse_all();
}

/// Parses a single .dlq query. The optional program supplies a schema to
/// check arities against.
inline ConjunctiveQuery parse_query(std::string_view text,
                                    const std::string& provenance = "<input>",
                                    const Program* schema_of = nullptr) {
  detail::Parser parser(text, provenance);
  Program scratch;
  if (schema_of) scratch.schema = schema_of->schema;
  return parser.parse_single_query(&scratch);
}

/// Parses a rendered instance: ground atoms that may contain null terms
/// (_:n<k>) and frozen nulls (_:f<k>).
inline Instance parse_instance(std::string_view text,
                               const std::string& provenance = "<input>") {
  detail::Parser parser(text, provenance);
  return parser.parse_instance_atoms();
}

}  // namespace stickychase
