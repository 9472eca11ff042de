#pragma once

#include <string>

#include <json.hpp>

#include "stickychase/program.hpp"

namespace stickychase {

enum class RenderFormat { Text, Json };

/// Deterministic dump of an instance: atoms in their natural (sorted)
/// order, nulls as _:n<k>, frozen nulls as _:f<k>.
inline std::string render_instance(const Instance& instance,
                                   RenderFormat format = RenderFormat::Text) {
  if (format == RenderFormat::Text) {
    std::string out;
    for (const auto& a : instance.atoms()) {
      out += a.text();
      out += ".\n";
    }
    return out;
  }
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : instance.atoms()) {
    nlohmann::json args = nlohmann::json::array();
    for (const auto& t : a.args()) args.push_back(t.text());
    atoms.push_back({{"pred", a.predicate()}, {"args", args}});
  }
  nlohmann::json doc{{"atoms", atoms}};
  return doc.dump();
}

inline std::string render_program(const Program& program) {
  std::string out;
  for (const auto& a : program.edb.atoms()) {
    out += a.text();
    out += ".\n";
  }
  for (const auto& r : program.rules) {
    out += r.text();
    out += ".\n";
  }
  return out;
}

inline std::string render_query(const ConjunctiveQuery& q) {
  return q.text() + "\n";
}

}  // namespace stickychase
