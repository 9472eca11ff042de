#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stickychase/program.hpp"

namespace stickychase {

struct DependencyGraph {
  std::set<Position> nodes;
  std::set<std::pair<Position, Position>> normal_edges;
  std::set<std::pair<Position, Position>> special_edges;
};

/// A finite rank, or infinite (nullopt).
using Rank = std::optional<std::uint32_t>;

struct RankTable {
  std::map<Position, Rank> rank;
  std::map<Position, Rank> erank;
};

namespace detail {

/// Tarjan SCC over a generic adjacency map keyed by node index.
inline std::vector<std::size_t> scc_assignment(
    std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
    std::size_t& scc_count) {
  std::vector<std::size_t> comp(n, static_cast<std::size_t>(-1));
  std::vector<std::uint32_t> index(n, 0), low(n, 0);
  std::vector<bool> on_stack(n, false), visited(n, false);
  std::vector<std::size_t> stack;
  std::uint32_t next_index = 1;
  scc_count = 0;

  struct Frame {
    std::size_t node;
    std::size_t edge = 0;
  };
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::vector<Frame> frames{{start}};
    while (!frames.empty()) {
      Frame& f = frames.back();
      std::size_t v = f.node;
      if (f.edge == 0) {
        visited[v] = true;
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (f.edge < adj[v].size()) {
        std::size_t w = adj[v][f.edge++];
        if (!visited[w]) {
          frames.push_back({w});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          while (true) {
            std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = scc_count;
            if (w == v) break;
          }
          ++scc_count;
        }
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().node] = std::min(low[frames.back().node], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace detail

/// Positions-and-edges graph of §-style dependency analysis. One edge per
/// (body position of a head variable, head position); a special edge from
/// every body variable's position to every existential head position.
/// Drawing specials from all body variables (not just head ones) is what
/// makes the rank analysis match the chase that applies each
/// rule/body-assignment pair once.
inline DependencyGraph build_dg(const std::vector<Rule>& rules) {
  DependencyGraph g;
  auto add_positions = [&g](const Atom& a) {
    for (std::size_t i = 1; i <= a.arity(); ++i)
      g.nodes.insert({a.predicate(), i});
  };
  for (const auto& r : rules) {
    for (const auto& a : r.body) add_positions(a);
    add_positions(r.head);

    std::map<std::string, std::vector<Position>> body_pos, head_pos;
    for (const auto& a : r.body)
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args()[i].is_variable())
          body_pos[a.args()[i].name()].push_back({a.predicate(), i + 1});
    for (std::size_t i = 0; i < r.head.arity(); ++i)
      if (r.head.args()[i].is_variable())
        head_pos[r.head.args()[i].name()].push_back({r.head.predicate(), i + 1});

    std::vector<Position> exist_positions;
    for (const auto& z : r.exist_vars)
      for (const auto& p : head_pos[z]) exist_positions.push_back(p);

    for (const auto& [var, bps] : body_pos) {
      auto hit = head_pos.find(var);
      if (hit != head_pos.end())
        for (const auto& bp : bps)
          for (const auto& hp : hit->second) g.normal_edges.insert({bp, hp});
      for (const auto& bp : bps)
        for (const auto& ep : exist_positions) g.special_edges.insert({bp, ep});
    }
  }
  return g;
}

/// Ranks per §-rank semantics: the supremum, over all walks ending at p, of
/// the number of special-edge traversals. A special edge inside a strongly
/// connected component can be traversed arbitrarily often, so everything
/// reachable from it has infinite rank; the rest is a longest-path DP over
/// the condensation.
inline std::map<Position, Rank> compute_ranks(const DependencyGraph& g,
                                              const std::set<Position>& all) {
  std::vector<Position> nodes(all.begin(), all.end());
  for (const auto& p : g.nodes)
    if (!all.count(p)) nodes.push_back(p);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::map<Position, std::size_t> id;
  for (std::size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = i;

  std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  struct Edge {
    std::size_t from, to;
    bool special;
  };
  std::vector<Edge> edges;
  for (const auto& [a, b] : g.normal_edges) {
    adj[id[a]].push_back(id[b]);
    edges.push_back({id[a], id[b], false});
  }
  for (const auto& [a, b] : g.special_edges) {
    adj[id[a]].push_back(id[b]);
    edges.push_back({id[a], id[b], true});
  }

  std::size_t scc_count = 0;
  auto comp = detail::scc_assignment(n, adj, scc_count);

  // A node is infinite-rank when reachable from the target of a special
  // edge whose endpoints share an SCC.
  std::vector<bool> infinite(n, false);
  std::vector<std::size_t> seeds;
  for (const auto& e : edges)
    if (e.special && comp[e.from] == comp[e.to]) seeds.push_back(e.to);
  std::vector<std::size_t> work(seeds);
  for (auto s : seeds) infinite[s] = true;
  while (!work.empty()) {
    std::size_t v = work.back();
    work.pop_back();
    for (auto w : adj[v])
      if (!infinite[w]) {
        infinite[w] = true;
        work.push_back(w);
      }
  }

  // Finite part: DP over the condensation; every member of an SCC shares
  // the value (internal edges are all normal here).
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> cadj(
      scc_count);  // (target component, special weight)
  std::vector<std::size_t> indeg(scc_count, 0);
  for (const auto& e : edges) {
    if (comp[e.from] == comp[e.to]) continue;
    cadj[comp[e.from]].push_back({comp[e.to], e.special ? 1u : 0u});
    ++indeg[comp[e.to]];
  }
  std::vector<std::uint32_t> val(scc_count, 0);
  std::vector<std::size_t> queue;
  for (std::size_t c = 0; c < scc_count; ++c)
    if (indeg[c] == 0) queue.push_back(c);
  while (!queue.empty()) {
    std::size_t c = queue.back();
    queue.pop_back();
    for (auto [d, w] : cadj[c]) {
      val[d] = std::max(val[d], val[c] + w);
      if (--indeg[d] == 0) queue.push_back(d);
    }
  }

  std::map<Position, Rank> out;
  for (std::size_t i = 0; i < n; ++i)
    out[nodes[i]] = infinite[i] ? Rank{} : Rank{val[comp[i]]};
  return out;
}

/// Π_F(P) plus the underlying rank table, over every position of the
/// program (EDB-only predicates have rank 0).
inline std::pair<std::set<Position>, std::map<Position, Rank>>
finite_rank_positions(const Program& program) {
  auto g = build_dg(program.rules);
  auto ranks = compute_ranks(g, program.positions());
  std::set<Position> finite;
  for (const auto& [p, r] : ranks)
    if (r.has_value()) finite.insert(p);
  return {finite, ranks};
}

inline bool is_weakly_acyclic(const Program& program) {
  auto [finite, ranks] = finite_rank_positions(program);
  return finite.size() == ranks.size();
}

struct ExistVarNode {
  std::size_t rule_index = 0;
  std::string rule_id;
  std::string var;

  std::string text() const { return rule_id + "." + var; }
  friend bool operator==(const ExistVarNode&, const ExistVarNode&) = default;
  friend std::strong_ordering operator<=>(const ExistVarNode& a,
                                          const ExistVarNode& b) {
    return std::tie(a.rule_index, a.var) <=> std::tie(b.rule_index, b.var);
  }
};

struct ExistentialDependencyGraph {
  std::vector<ExistVarNode> nodes;
  std::set<std::pair<std::size_t, std::size_t>> edges;  // node indices
  std::vector<std::set<Position>> targets;              // T_z per node
};

/// EDG per joint acyclicity: T_z is the least fixpoint of the two target
/// closure conditions; edge z -> z' when some body variable of z''s rule
/// occurs only at positions of T_z. Variables are scoped per rule, which
/// is standardizing apart without the renaming.
inline ExistentialDependencyGraph build_edg(const std::vector<Rule>& rules) {
  ExistentialDependencyGraph g;
  struct VarOcc {
    std::set<Position> body;
    std::set<Position> head;
    bool in_body = false;
  };
  // occ[rule][var]
  std::vector<std::map<std::string, VarOcc>> occ(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (const auto& a : rules[r].body)
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.args()[i].is_variable()) {
          auto& o = occ[r][a.args()[i].name()];
          o.body.insert({a.predicate(), i + 1});
          o.in_body = true;
        }
    const Atom& h = rules[r].head;
    for (std::size_t i = 0; i < h.arity(); ++i)
      if (h.args()[i].is_variable())
        occ[r][h.args()[i].name()].head.insert({h.predicate(), i + 1});
  }

  for (std::size_t r = 0; r < rules.size(); ++r)
    for (const auto& z : rules[r].exist_vars)
      g.nodes.push_back({r, rules[r].id, z});

  for (const auto& node : g.nodes) {
    std::set<Position> target = occ[node.rule_index][node.var].head;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t r = 0; r < rules.size(); ++r)
        for (const auto& [var, o] : occ[r]) {
          if (!o.in_body || rules[r].is_existential(var)) continue;
          if (!std::includes(target.begin(), target.end(), o.body.begin(),
                             o.body.end()))
            continue;
          for (const auto& hp : o.head)
            changed |= target.insert(hp).second;
        }
    }
    g.targets.push_back(std::move(target));
  }

  for (std::size_t from = 0; from < g.nodes.size(); ++from) {
    const auto& target = g.targets[from];
    for (std::size_t to = 0; to < g.nodes.size(); ++to) {
      std::size_t r = g.nodes[to].rule_index;
      for (const auto& [var, o] : occ[r]) {
        if (!o.in_body || rules[r].is_existential(var)) continue;
        if (std::includes(target.begin(), target.end(), o.body.begin(),
                          o.body.end())) {
          g.edges.insert({from, to});
          break;
        }
      }
    }
  }
  return g;
}

/// ∃-ranks: for p in some T_z, the longest path (node count) ending at such
/// a z; infinite when such a z lies on or downstream of a cycle; zero when
/// no T_z contains p.
inline std::map<Position, Rank> compute_existential_ranks(
    const ExistentialDependencyGraph& g, const std::set<Position>& all) {
  std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : g.edges) adj[a].push_back(b);

  std::size_t scc_count = 0;
  auto comp = detail::scc_assignment(n, adj, scc_count);
  std::vector<std::size_t> comp_size(scc_count, 0);
  for (std::size_t i = 0; i < n; ++i) ++comp_size[comp[i]];
  std::vector<bool> comp_cyclic(scc_count, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (comp_size[comp[i]] > 1) comp_cyclic[comp[i]] = true;
    for (auto w : adj[i])
      if (w == i) comp_cyclic[comp[i]] = true;
  }

  std::vector<bool> infinite(n, false);
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < n; ++i)
    if (comp_cyclic[comp[i]]) {
      infinite[i] = true;
      work.push_back(i);
    }
  while (!work.empty()) {
    std::size_t v = work.back();
    work.pop_back();
    for (auto w : adj[v])
      if (!infinite[w]) {
        infinite[w] = true;
        work.push_back(w);
      }
  }

  // Longest node-count path ending at each node, on the acyclic part.
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto w : adj[i]) ++indeg[w];
  std::vector<std::uint32_t> depth(n, 1);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  while (!queue.empty()) {
    std::size_t v = queue.back();
    queue.pop_back();
    for (auto w : adj[v]) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      if (--indeg[w] == 0) queue.push_back(w);
    }
  }

  std::map<Position, Rank> out;
  for (const auto& p : all) out[p] = Rank{0};
  for (const auto& target : g.targets)
    for (const auto& p : target) out.emplace(p, Rank{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : g.targets[i]) {
      auto& slot = out[p];
      if (infinite[i]) {
        slot = Rank{};
      } else if (slot.has_value()) {
        slot = Rank{std::max(*slot, depth[i])};
      }
    }
  }
  return out;
}

/// Π_F^∃(P) plus the ∃-rank table.
inline std::pair<std::set<Position>, std::map<Position, Rank>>
finite_existential_positions(const Program& program) {
  auto g = build_edg(program.rules);
  auto eranks = compute_existential_ranks(g, program.positions());
  std::set<Position> finite;
  for (const auto& [p, r] : eranks)
    if (r.has_value()) finite.insert(p);
  return {finite, eranks};
}

inline bool is_jointly_acyclic(const std::vector<Rule>& rules) {
  auto g = build_edg(rules);
  std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : g.edges) {
    if (a == b) return false;
    adj[a].push_back(b);
  }
  std::size_t scc_count = 0;
  auto comp = detail::scc_assignment(n, adj, scc_count);
  std::vector<std::size_t> comp_size(scc_count, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (++comp_size[comp[i]] > 1) return false;
  return true;
}

}  // namespace stickychase
