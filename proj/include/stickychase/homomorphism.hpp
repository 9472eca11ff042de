#pragma once

#include <cassert>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stickychase/instance.hpp"
#include "stickychase/rule.hpp"

namespace stickychase {

class UnboundVariableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A total map from variables to ground terms.
class Assignment {
 public:
  Assignment() = default;

  void bind(const std::string& var, const Term& value) {
    assert(value.is_ground());
    mapping_[var] = value;
  }

  bool bound(const std::string& var) const { return mapping_.count(var) != 0; }

  void unbind(const std::string& var) { mapping_.erase(var); }

  const Term& at(const std::string& var) const {
    auto it = mapping_.find(var);
    if (it == mapping_.end())
      throw UnboundVariableError("unbound variable " + var);
    return it->second;
  }

  const std::map<std::string, Term>& mapping() const { return mapping_; }

  Term operator()(const Term& t) const {
    return t.is_variable() ? at(t.name()) : t;
  }

  Atom operator()(const Atom& a) const {
    std::vector<Term> args;
    args.reserve(a.arity());
    for (const auto& t : a.args()) args.push_back((*this)(t));
    return Atom(a.predicate(), std::move(args));
  }

 private:
  std::map<std::string, Term> mapping_;
};

inline std::vector<Atom> apply_assignment(const Assignment& theta,
                                          std::span<const Atom> atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(theta(a));
  return out;
}

inline std::vector<Atom> apply_assignment(const Assignment& theta,
                                          const std::vector<Atom>& atoms) {
  return apply_assignment(theta, std::span<const Atom>(atoms));
}

/// Whether ground atom `a` maps onto ground atom `b` by a homomorphism that
/// is the identity on constants and frozen nulls, and additionally the
/// identity on every argument of `a` sitting at a position in `pi`.
/// With pi = {} this is the ordinary single-atom homomorphism check.
inline bool is_pi_homomorphic(const Atom& a, const Atom& b,
                              const std::set<Position>& pi) {
  assert(a.is_ground() && b.is_ground());
  if (a.predicate() != b.predicate() || a.arity() != b.arity()) return false;
  std::map<Term, Term> h;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term& s = a.args()[i];
    const Term& t = b.args()[i];
    if (pi.count(Position{a.predicate(), i + 1}) || s.is_rigid()) {
      if (!(s == t)) return false;
      continue;
    }
    auto [it, added] = h.emplace(s, t);
    if (!added && !(it->second == t)) return false;
  }
  return true;
}

/// Replaces every null ζ_k by the frozen null ζ^f_k, everywhere in the
/// instance. Returns the renaming so memo tables can be renamed in step.
/// Idempotent: an already-frozen instance comes back unchanged.
inline std::pair<Instance, std::map<Term, Term>> freeze_nulls(
    const Instance& in) {
  std::map<Term, Term> renaming;
  for (const auto& a : in.atoms())
    for (const auto& t : a.args())
      if (t.is_null()) renaming.emplace(t, Term::frozen_null(t.ordinal()));
  if (renaming.empty()) return {in, renaming};
  Instance out;
  for (const auto& a : in.atoms()) {
    std::vector<Term> args;
    args.reserve(a.arity());
    for (const auto& t : a.args()) {
      auto it = renaming.find(t);
      args.push_back(it == renaming.end() ? t : it->second);
    }
    out.insert(Atom(a.predicate(), std::move(args)));
  }
  return {out, renaming};
}

inline Atom rename_atom(const Atom& a, const std::map<Term, Term>& renaming) {
  std::vector<Term> args;
  args.reserve(a.arity());
  for (const auto& t : a.args()) {
    auto it = renaming.find(t);
    args.push_back(it == renaming.end() ? t : it->second);
  }
  return Atom(a.predicate(), std::move(args));
}

namespace detail {

/// Backtracking matcher over the body atoms in their given order.
template <typename OnMatch>
void match_atoms(std::span<const Atom> atoms, std::size_t idx,
                 const Instance& instance, Assignment& theta,
                 const OnMatch& on_match) {
  if (idx == atoms.size()) {
    on_match(theta);
    return;
  }
  const Atom& pattern = atoms[idx];
  for (const Atom& candidate : instance.with_predicate(pattern.predicate())) {
    if (candidate.arity() != pattern.arity()) continue;
    std::vector<std::string> bound_here;
    bool ok = true;
    for (std::size_t i = 0; i < pattern.arity() && ok; ++i) {
      const Term& p = pattern.args()[i];
      const Term& c = candidate.args()[i];
      if (!p.is_variable()) {
        ok = (p == c);
      } else if (theta.bound(p.name())) {
        ok = (theta.at(p.name()) == c);
      } else {
        theta.bind(p.name(), c);
        bound_here.push_back(p.name());
      }
    }
    if (ok) match_atoms(atoms, idx + 1, instance, theta, on_match);
    for (const auto& v : bound_here) theta.unbind(v);
  }
}

}  // namespace detail

/// Enumerates every assignment of the atoms' variables that embeds all of
/// them into the instance.
template <typename OnMatch>
void for_each_body_match(std::span<const Atom> atoms, const Instance& instance,
                         const OnMatch& on_match) {
  Assignment theta;
  detail::match_atoms(atoms, 0, instance, theta, on_match);
}

/// Q(I): all answers, projected on the free variables, over constants and
/// (possibly) nulls. Boolean queries yield a single empty tuple when true.
inline std::set<std::vector<Term>> evaluate_cq(const ConjunctiveQuery& q,
                                               const Instance& instance) {
  std::set<std::vector<Term>> answers;
  for_each_body_match(
      std::span<const Atom>(q.body), instance, [&](const Assignment& theta) {
        std::vector<Term> tuple;
        tuple.reserve(q.free_vars.size());
        for (const auto& v : q.free_vars) tuple.push_back(theta.at(v));
        answers.insert(std::move(tuple));
      });
  return answers;
}

}  // namespace stickychase
