#pragma once

// Structural-congruence normal form. Compositions are flattened into
// multisets sorted by printed form, units are dropped, 0<>@mu membranes are
// erased, !! collapses, and ! distributes over composition. The replication
// unfolding law (!P == P o !P) is deliberately not part of the normal form;
// it is realized as a semantics step rule.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "brane/ast.hpp"

namespace brane {

ProcessPtr canonicalize_process(const ProcessPtr& p);
SystemPtr canonicalize_system(const SystemPtr& s);

// An action with its parameter in normal form. Actions compare by this key
// everywhere outside the raw AST, so congruent parameters coincide.
inline Action canon_action(const Action& a) {
  Action c = a;
  if (act_carries_process(a.kind) && a.arg) c.arg = canonicalize_process(a.arg);
  return c;
}

inline std::string action_key(const Action& a) { return pretty(canon_action(a)); }

inline bool operator==(const Action& a, const Action& b) {
  return action_key(a) == action_key(b);
}

struct ActionLt {
  bool operator()(const Action& a, const Action& b) const {
    return action_key(a) < action_key(b);
  }
};
using ActionSet = std::set<Action, ActionLt>;

// ---------------------------------------------------------------------------
// Multiset views of canonical forms.

struct ProcAtom {
  bool bang = false;
  Action act;        // parameter canonicalized
  ProcessPtr cont;   // canonical continuation
};

struct SysAtom {
  bool bang = false;
  ProcessPtr proc;    // canonical
  SystemPtr content;  // canonical
  MembraneId label;
};

namespace detail {

inline void proc_atoms_rec(const ProcessPtr& p, bool under_bang,
                           std::vector<ProcAtom>& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Zero: return;
    case Process::Kind::Par:
      proc_atoms_rec(p->left, under_bang, out);
      proc_atoms_rec(p->right, under_bang, out);
      return;
    case Process::Kind::Bang:
      proc_atoms_rec(p->body, true, out);
      return;
    case Process::Kind::Seq:
      out.push_back({under_bang, canon_action(p->act), canonicalize_process(p->cont)});
      return;
  }
}

inline void sys_atoms_rec(const SystemPtr& s, bool under_bang,
                          std::vector<SysAtom>& out) {
  if (!s) return;
  switch (s->kind) {
    case System::Kind::Diamond: return;
    case System::Kind::Compose:
      sys_atoms_rec(s->left, under_bang, out);
      sys_atoms_rec(s->right, under_bang, out);
      return;
    case System::Kind::Bang:
      sys_atoms_rec(s->body, true, out);
      return;
    case System::Kind::Membrane: {
      ProcessPtr sigma = canonicalize_process(s->proc);
      SystemPtr content = canonicalize_system(s->content);
      if (sigma->kind == Process::Kind::Zero &&
          content->kind == System::Kind::Diamond)
        return;  // 0<>@mu is erased
      out.push_back({under_bang, std::move(sigma), std::move(content), s->label});
      return;
    }
  }
}

}  // namespace detail

inline ProcessPtr proc_atom_term(const ProcAtom& a) {
  ProcessPtr t = Process::seq(a.act, a.cont);
  return a.bang ? Process::bang(t) : t;
}

inline SystemPtr sys_atom_term(const SysAtom& a) {
  SystemPtr t = System::membrane(a.proc, a.content, a.label);
  return a.bang ? System::bang(t) : t;
}

// Rebuilds a canonical process from atoms: sorted by print, left-nested.
inline ProcessPtr build_process(std::vector<ProcAtom> atoms) {
  std::vector<std::pair<std::string, ProcessPtr>> keyed;
  keyed.reserve(atoms.size());
  for (auto& a : atoms) {
    ProcessPtr t = proc_atom_term(a);
    keyed.emplace_back(pretty(t), std::move(t));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  if (keyed.empty()) return Process::zero();
  ProcessPtr acc = keyed[0].second;
  for (size_t i = 1; i < keyed.size(); ++i) acc = Process::par(acc, keyed[i].second);
  return acc;
}

inline SystemPtr build_system(std::vector<SysAtom> atoms) {
  std::vector<std::pair<std::string, SystemPtr>> keyed;
  keyed.reserve(atoms.size());
  for (auto& a : atoms) {
    SystemPtr t = sys_atom_term(a);
    keyed.emplace_back(pretty(t), std::move(t));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  if (keyed.empty()) return System::diamond();
  SystemPtr acc = keyed[0].second;
  for (size_t i = 1; i < keyed.size(); ++i) acc = System::compose(acc, keyed[i].second);
  return acc;
}

inline ProcessPtr canonicalize_process(const ProcessPtr& p) {
  std::vector<ProcAtom> atoms;
  detail::proc_atoms_rec(p, false, atoms);
  return build_process(std::move(atoms));
}

inline SystemPtr canonicalize_system(const SystemPtr& s) {
  std::vector<SysAtom> atoms;
  detail::sys_atoms_rec(s, false, atoms);
  return build_system(std::move(atoms));
}

// Atom views of terms already in (or being put into) normal form.
inline std::vector<ProcAtom> proc_atoms(const ProcessPtr& p) {
  std::vector<ProcAtom> atoms;
  detail::proc_atoms_rec(p, false, atoms);
  return atoms;
}
inline std::vector<SysAtom> sys_atoms(const SystemPtr& s) {
  std::vector<SysAtom> atoms;
  detail::sys_atoms_rec(s, false, atoms);
  return atoms;
}

// A canonical system together with its identity string.
struct Canonical {
  SystemPtr term;
  std::string key;

  bool operator==(const Canonical& o) const { return key == o.key; }
  bool operator<(const Canonical& o) const { return key < o.key; }
};

inline Canonical canonicalize(const SystemPtr& s) {
  SystemPtr t = canonicalize_system(s);
  std::string k = pretty(t);
  return {std::move(t), std::move(k)};
}

// ---------------------------------------------------------------------------
// A: the set of actions occurring in a membrane process, prefix order lost.
//   A(0) = {}   A(a.s) = {a} u A(s)   A(!s) = A(s)   A(s|t) = A(s) u A(t)

inline void actions_of_rec(const ProcessPtr& p, ActionSet& out) {
  if (!p) return;
  switch (p->kind) {
    case Process::Kind::Zero: return;
    case Process::Kind::Par:
      actions_of_rec(p->left, out);
      actions_of_rec(p->right, out);
      return;
    case Process::Kind::Bang:
      actions_of_rec(p->body, out);
      return;
    case Process::Kind::Seq:
      out.insert(canon_action(p->act));
      actions_of_rec(p->cont, out);
      return;
  }
}

inline ActionSet actions_of(const ProcessPtr& p) {
  ActionSet out;
  actions_of_rec(p, out);
  return out;
}

}  // namespace brane
