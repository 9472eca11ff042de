// Command-line front end: classification, chase runs, query answering and
// magic-sets rewriting over .dlp/.dlq files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _WIN32
#else
#include <unistd.h>
#endif

#include "stickychase/stickychase.hpp"

namespace {

using namespace stickychase;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNotInClass = 1;
constexpr int kExitUsage = 2;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool color_enabled() {
  const char* env = std::getenv("STICKYCHASE_COLOR");
  if (env) {
    std::string v = env;
    return !(v == "0" || v == "off" || v == "no" || v == "false" || v.empty());
  }
  return isatty(fileno(stdout));
}

std::string yes_no(bool value) {
  if (!color_enabled()) return value ? "yes" : "no";
  return value ? "\x1b[32myes\x1b[0m" : "\x1b[31mno\x1b[0m";
}

ParsedProgram load_program(const std::string& path) {
  return parse_program(read_input(path), path);
}

ConjunctiveQuery load_query(const std::string& path, const Program& program) {
  return parse_query(read_input(path), path, &program);
}

SelectionFunction parse_selection(const std::string& text) {
  if (text == "bot" || text == "bottom") return SelectionFunction::bottom();
  if (text == "rank") return SelectionFunction::rank();
  if (text == "exists") return SelectionFunction::exists();
  if (text.rfind("oracle:", 0) == 0) {
    std::string path = text.substr(7);
    std::istringstream in(read_input(path));
    std::set<Position> positions;
    std::string tok;
    while (in >> tok) {
      auto lb = tok.find('[');
      auto rb = tok.find(']');
      if (lb == std::string::npos || rb == std::string::npos || rb < lb)
        throw std::runtime_error("oracle file " + path +
                                 ": expected tokens like P[1], got " + tok);
      positions.insert({tok.substr(0, lb),
                        static_cast<std::size_t>(
                            std::stoul(tok.substr(lb + 1, rb - lb - 1)))});
    }
    return SelectionFunction::oracle(std::move(positions));
  }
  throw std::runtime_error("unknown selection '" + text +
                           "' (use bot|rank|exists|oracle:<file>)");
}

std::string rank_text(const Rank& r) {
  return r.has_value() ? std::to_string(*r) : "inf";
}

json witnesses_json(const std::vector<SynSchWitness>& ws) {
  json out = json::array();
  for (const auto& w : ws) {
    json positions = json::array();
    for (const auto& p : w.body_positions) positions.push_back(p.text());
    out.push_back({{"rule", w.rule_id}, {"var", w.var}, {"positions", positions}});
  }
  return out;
}

json classify_json(const Program& program) {
  auto report = classify(program);
  auto dg = build_dg(program.rules);
  auto [finite, ranks] = finite_rank_positions(program);
  auto edg = build_edg(program.rules);
  auto [efinite, eranks] = finite_existential_positions(program);

  json classes{{"WA", report.wa},
               {"JA", report.ja},
               {"Sticky", report.sticky},
               {"WS", report.ws},
               {"JWS", report.jws}};
  json rank_table, erank_table;
  for (const auto& [p, r] : ranks) rank_table[p.text()] = rank_text(r);
  for (const auto& [p, r] : eranks) erank_table[p.text()] = rank_text(r);

  json dg_nodes = json::array(), dg_edges = json::array();
  for (const auto& p : dg.nodes) dg_nodes.push_back(p.text());
  for (const auto& [a, b] : dg.normal_edges)
    dg_edges.push_back({{"from", a.text()}, {"to", b.text()}, {"kind", "normal"}});
  for (const auto& [a, b] : dg.special_edges)
    dg_edges.push_back({{"from", a.text()}, {"to", b.text()}, {"kind", "special"}});

  json edg_nodes = json::array(), edg_edges = json::array(), targets;
  for (const auto& n : edg.nodes) edg_nodes.push_back(n.text());
  for (const auto& [a, b] : edg.edges)
    edg_edges.push_back(
        {{"from", edg.nodes[a].text()}, {"to", edg.nodes[b].text()}});
  for (std::size_t i = 0; i < edg.nodes.size(); ++i) {
    json t = json::array();
    for (const auto& p : edg.targets[i]) t.push_back(p.text());
    targets[edg.nodes[i].text()] = t;
  }

  json witnesses;
  json inf_positions = json::array();
  for (const auto& p : report.infinite_rank_positions)
    inf_positions.push_back(p.text());
  witnesses["WA"] = inf_positions;
  witnesses["JA"] = report.edg_cycle_nodes;
  witnesses["Sticky"] = witnesses_json(report.sticky_witnesses);
  witnesses["WS"] = witnesses_json(report.ws_witnesses);
  witnesses["JWS"] = witnesses_json(report.jws_witnesses);

  return json{{"format_version", 1},
              {"classes", classes},
              {"witnesses", witnesses},
              {"rank", rank_table},
              {"erank", erank_table},
              {"dependency_graph", {{"nodes", dg_nodes}, {"edges", dg_edges}}},
              {"existential_dependency_graph",
               {{"nodes", edg_nodes}, {"edges", edg_edges}, {"targets", targets}}}};
}

void print_classify_text(const Program& program) {
  auto report = classify(program);
  std::cout << "WA      " << yes_no(report.wa) << "\n";
  std::cout << "JA      " << yes_no(report.ja) << "\n";
  std::cout << "Sticky  " << yes_no(report.sticky) << "\n";
  std::cout << "WS      " << yes_no(report.ws) << "\n";
  std::cout << "JWS     " << yes_no(report.jws) << "\n";
  if (!report.wa) {
    std::cout << "  infinite-rank:";
    for (const auto& p : report.infinite_rank_positions)
      std::cout << " " << p.text();
    std::cout << "\n";
  }
  if (!report.ja) {
    std::cout << "  EDG cycle:";
    for (const auto& n : report.edg_cycle_nodes) std::cout << " " << n;
    std::cout << "\n";
  }
  auto describe = [](const char* cls, const std::vector<SynSchWitness>& ws) {
    for (const auto& w : ws) {
      std::cout << "  " << cls << " violation: " << w.var << " in " << w.rule_id
                << " at";
      for (const auto& p : w.body_positions) std::cout << " " << p.text();
      std::cout << "\n";
    }
  };
  if (!report.sticky) describe("Sticky", report.sticky_witnesses);
  if (!report.ws) describe("WS", report.ws_witnesses);
  if (!report.jws) describe("JWS", report.jws_witnesses);
}

json tuple_json(const std::vector<Term>& tuple) {
  json out = json::array();
  for (const auto& t : tuple) out.push_back(t.text());
  return out;
}

void print_answers(const AnswerSet& answers, const std::string& format) {
  if (format == "json") {
    json doc{{"format_version", 1}, {"boolean", answers.boolean}};
    json tuples = json::array();
    for (const auto& t : answers.tuples) tuples.push_back(tuple_json(t));
    doc["answers"] = tuples;
    if (answers.boolean) doc["holds"] = answers.holds;
    std::cout << doc.dump() << "\n";
    return;
  }
  if (answers.boolean) {
    std::cout << (answers.holds ? "true" : "false") << "\n";
    return;
  }
  for (const auto& tuple : answers.tuples) {
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) std::cout << ",";
      std::cout << tuple[i].text();
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Datalog± chase, classification, query answering and "
               "magic-sets rewriting"};
  app.require_subcommand(1);

  // classify
  std::string classify_input;
  std::string classify_format = "text";
  auto* cmd_classify = app.add_subcommand("classify", "Classify a program");
  cmd_classify->add_option("program", classify_input, "program file (.dlp, - for stdin)")
      ->required();
  cmd_classify->add_option("--format", classify_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // chase
  std::string chase_input;
  std::uint64_t chase_budget = 1000;
  bool chase_trace = false;
  std::string chase_format = "text";
  auto* cmd_chase = app.add_subcommand("chase", "Run the budgeted classic chase");
  cmd_chase->add_option("program", chase_input, "program file")->required();
  cmd_chase->add_option("--budget", chase_budget, "max chase steps");
  cmd_chase->add_flag("--trace", chase_trace, "emit chase steps as JSON lines");
  cmd_chase->add_option("--format", chase_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // answer
  std::string answer_input, answer_query, answer_selection = "exists";
  std::string answer_format = "text", answer_dump;
  bool answer_strict = false;
  std::optional<std::uint32_t> answer_resumptions;
  std::uint64_t answer_refuter_budget = 500;
  auto* cmd_answer = app.add_subcommand("answer", "Answer a query with SChQA");
  cmd_answer->add_option("program", answer_input, "program file")->required();
  cmd_answer->add_option("query", answer_query, "query file (.dlq)")->required();
  cmd_answer->add_option("--selection", answer_selection,
                         "bot|rank|exists|oracle:<file>");
  cmd_answer->add_option("--resumptions", answer_resumptions,
                         "override the M_Q resumption count");
  cmd_answer->add_flag("--strict", answer_strict,
                       "refuse programs refuted to be outside the class");
  cmd_answer->add_option("--refuter-budget", answer_refuter_budget,
                         "chase budget of the strict-mode refuter");
  cmd_answer->add_option("--dump-instance", answer_dump,
                         "write the chased instance to this path");
  cmd_answer->add_option("--format", answer_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // check-semantic
  std::string check_input, check_selection = "exists";
  std::uint64_t check_budget = 500;
  std::string check_format = "text";
  auto* cmd_check = app.add_subcommand(
      "check-semantic", "Bounded refuter for S-stickiness of the chase");
  cmd_check->add_option("program", check_input, "program file")->required();
  cmd_check->add_option("--selection", check_selection,
                        "bot|rank|exists|oracle:<file>");
  cmd_check->add_option("--budget", check_budget, "chase budget");
  cmd_check->add_option("--format", check_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // oracle-answer
  std::string oracle_input, oracle_query;
  std::uint64_t oracle_budget = 1000;
  std::string oracle_format = "text";
  auto* cmd_oracle = app.add_subcommand(
      "oracle-answer", "Certain answers via the budgeted classic chase");
  cmd_oracle->add_option("program", oracle_input, "program file")->required();
  cmd_oracle->add_option("query", oracle_query, "query file")->required();
  cmd_oracle->add_option("--budget", oracle_budget, "chase budget");
  cmd_oracle->add_option("--format", oracle_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // rewrite
  std::string rewrite_input, rewrite_query, rewrite_format = "text";
  std::string rewrite_report;
  std::optional<std::uint64_t> rewrite_sips_seed;
  auto* cmd_rewrite =
      app.add_subcommand("rewrite", "MagicD+ magic-sets rewriting");
  cmd_rewrite->add_option("program", rewrite_input, "program file")->required();
  cmd_rewrite->add_option("query", rewrite_query, "query file")->required();
  cmd_rewrite->add_option("--format", rewrite_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_rewrite->add_option("--report", rewrite_report,
                          "also write the JSON report to this path");
  cmd_rewrite->add_option("--sips-seed", rewrite_sips_seed,
                          "use a seeded random sips instead of left-to-right");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_classify) {
      auto parsed = load_program(classify_input);
      if (classify_format == "json")
        std::cout << classify_json(parsed.program).dump() << "\n";
      else
        print_classify_text(parsed.program);
      return kExitOk;
    }

    if (*cmd_chase) {
      auto parsed = load_program(chase_input);
      auto result = classic_chase(parsed.program, chase_budget);
      if (chase_trace) {
        for (const auto& step : result.steps) {
          json consumed = json::array();
          for (const auto& a : step.consumed) consumed.push_back(a.text());
          json line{{"step", step.index},
                    {"rule", step.rule_id},
                    {"consumed", consumed},
                    {"produced", step.produced.text()}};
          std::cout << line.dump() << "\n";
        }
        json done{{"terminated", result.terminated},
                  {"steps", result.steps.size()}};
        std::cout << done.dump() << "\n";
      } else if (chase_format == "json") {
        json doc = json::parse(render_instance(result.instance, RenderFormat::Json));
        doc["format_version"] = 1;
        doc["terminated"] = result.terminated;
        doc["steps"] = result.steps.size();
        std::cout << doc.dump() << "\n";
      } else {
        std::cout << render_instance(result.instance);
        std::cout << "% steps=" << result.steps.size()
                  << " terminated=" << (result.terminated ? "true" : "false")
                  << "\n";
      }
      return kExitOk;
    }

    if (*cmd_answer) {
      auto parsed = load_program(answer_input);
      auto query = load_query(answer_query, parsed.program);
      auto sel = parse_selection(answer_selection);
      SchqaOptions options;
      options.strict = answer_strict;
      options.refuter_budget = answer_refuter_budget;
      options.resumptions = answer_resumptions;
      try {
        if (options.strict) {
          auto [syntactic, witnesses] = is_syn_sch(parsed.program, sel);
          if (!syntactic) {
            auto verdict =
                check_s_stickiness(parsed.program, sel, options.refuter_budget);
            if (verdict.violated()) {
              const auto& v = *verdict.violation;
              std::cerr << "not in the class: value " << v.value.text()
                        << " for join variable " << v.var << " of rule "
                        << v.rule_id << " does not stick (missing from "
                        << v.offending.text() << ")\n";
              return kExitNotInClass;
            }
          }
        }
        ChaseState state = qchase(parsed.program, query, sel,
                                  options.resumptions);
        if (!answer_dump.empty()) {
          std::ofstream out(answer_dump, std::ios::binary);
          out << render_instance(state.instance);
        }
        print_answers(collect_answers(query, state.instance), answer_format);
      } catch (const NotInClassError& e) {
        std::cerr << e.what() << "\n";
        return kExitNotInClass;
      }
      return kExitOk;
    }

    if (*cmd_check) {
      auto parsed = load_program(check_input);
      auto sel = parse_selection(check_selection);
      auto verdict = check_s_stickiness(parsed.program, sel, check_budget);
      if (check_format == "json") {
        json doc{{"format_version", 1},
                 {"violated", verdict.violated()},
                 {"chase_terminated", verdict.chase_terminated},
                 {"budget", check_budget}};
        if (verdict.violated()) {
          const auto& v = *verdict.violation;
          doc["witness"] = {{"step", v.step_index},
                            {"rule", v.rule_id},
                            {"var", v.var},
                            {"value", v.value.text()},
                            {"produced", v.produced.text()},
                            {"offending", v.offending.text()}};
        }
        std::cout << doc.dump() << "\n";
      } else if (verdict.violated()) {
        const auto& v = *verdict.violation;
        std::cout << "violation at step " << v.step_index << ": value "
                  << v.value.text() << " for join variable " << v.var
                  << " of rule " << v.rule_id << " missing from "
                  << v.offending.text() << "\n";
      } else {
        std::cout << "no-violation-within-budget (budget=" << check_budget
                  << ", chase terminated="
                  << (verdict.chase_terminated ? "true" : "false") << ")\n";
      }
      return verdict.violated() ? kExitNotInClass : kExitOk;
    }

    if (*cmd_oracle) {
      auto parsed = load_program(oracle_input);
      auto query = load_query(oracle_query, parsed.program);
      auto result = classic_chase(parsed.program, oracle_budget);
      if (!result.terminated)
        std::cerr << "% warning: chase budget " << oracle_budget
                  << " exhausted; answers may be incomplete\n";
      print_answers(collect_answers(query, result.instance), oracle_format);
      return kExitOk;
    }

    if (*cmd_rewrite) {
      auto parsed = load_program(rewrite_input);
      auto query = load_query(rewrite_query, parsed.program);
      SipsOrder sips = rewrite_sips_seed ? seeded_sips(*rewrite_sips_seed)
                                         : left_to_right_sips();
      auto [magic, report] = magicd_plus(parsed.program, query, sips);

      json adorned_map, magic_map;
      for (const auto& [key, name] : magic.adorned_names)
        adorned_map[key.first + "/" + key.second] = name;
      for (const auto& [key, name] : magic.magic_names)
        magic_map[key.first + "/" + key.second] = name;
      json report_doc{
          {"format_version", 1},
          {"input", classify_json(parsed.program)["classes"]},
          {"output", classify_json(magic.rewritten)["classes"]},
          {"jws_closed", report.jws_closed},
          {"adorned_predicates", adorned_map},
          {"magic_predicates", magic_map},
          {"seeds", [&] {
             json seeds = json::array();
             for (const auto& s : magic.seeds) seeds.push_back(s.text());
             return seeds;
           }()}};
      if (!rewrite_report.empty()) {
        std::ofstream out(rewrite_report, std::ios::binary);
        out << report_doc.dump() << "\n";
      }
      if (rewrite_format == "json") {
        json doc{{"format_version", 1},
                 {"program", render_program(magic.rewritten)},
                 {"query", render_query(magic.query)},
                 {"report", report_doc}};
        std::cout << doc.dump() << "\n";
      } else {
        std::cout << render_program(magic.rewritten);
        std::cout << render_query(magic.query);
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
