#pragma once

// Concrete reduction semantics over canonical systems plus a bounded
// breadth-first exploration used as the ground-truth oracle for the static
// analysis. Reductions are enumerated anywhere in the term (closure under
// composition and membrane contexts). A replicated system atom !P may be
// materialized a bounded number of times per reduction; firing a replicated
// prefix !a.s keeps the replica, so process replication never consumes
// budget.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "brane/canonical.hpp"
#include "brane/estimate.hpp"
#include "brane/mi.hpp"
#include "json.hpp"

namespace brane {

struct StateCapError : std::runtime_error {
  explicit StateCapError(size_t cap)
      : std::runtime_error("state cap exceeded (" + std::to_string(cap) + " states)") {}
};

struct Redex {
  enum class Rule { Mate, Bud, Drip, Phago, Exo, Pino };
  Rule rule{Rule::Mate};
  std::string channel;   // empty for Drip/Pino
  MembraneId principal;  // membrane carrying the action
  MembraneId co;         // membrane carrying the co-action; empty if none
  std::string rho;       // parameter of the created membrane; empty if none
  Slot ctx;              // closest membrane surrounding the participants

  static const char* rule_name(Rule r) {
    switch (r) {
      case Rule::Mate: return "mate";
      case Rule::Bud: return "bud";
      case Rule::Drip: return "drip";
      case Rule::Phago: return "phago";
      case Rule::Exo: return "exo";
      case Rule::Pino: return "pino";
    }
    return "?";
  }

  std::string label() const {
    std::string out = rule_name(rule);
    if (!channel.empty()) out += "@" + channel;
    return out;
  }

  std::string key() const {
    return label() + "(" + principal + (co.empty() ? "" : "," + co) +
           (rho.empty() ? "" : ";" + rho) + ")@" + ctx.str();
  }
};

struct Transition {
  size_t src, dst;
  Redex redex;
};

struct TransitionSystem {
  std::vector<Canonical> states;
  std::vector<Transition> edges;
  size_t initial = 0;
  bool truncated = false;
};

namespace detail {

// One participating membrane occurrence: the atom index in its level and
// whether it is a materialized copy of a replicated atom.
struct Part {
  size_t idx;
  bool copy;
  int cost() const { return copy ? 1 : 0; }
};

inline std::vector<ProcAtom> fire_prefix(const std::vector<ProcAtom>& atoms, size_t k) {
  std::vector<ProcAtom> out;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (i == k && !atoms[i].bang) continue;  // consumed; a replicated prefix stays
    out.push_back(atoms[i]);
  }
  for (auto& a : proc_atoms(atoms[k].cont)) out.push_back(a);
  return out;
}

inline ProcessPtr fire_proc(const std::vector<ProcAtom>& atoms, size_t k) {
  return build_process(fire_prefix(atoms, k));
}

struct LevelStep {
  Redex redex;
  std::vector<SysAtom> atoms;  // the transformed level
  int cost;                    // replica materializations used
};

class Enumerator {
 public:
  explicit Enumerator(MiRegistry& reg) : reg_(reg) {}

  bool budget_hit() const { return budget_hit_; }

  std::vector<LevelStep> level(const std::vector<SysAtom>& atoms, const Slot& ctx,
                               int budget_left) {
    std::vector<LevelStep> out;
    std::vector<Part> parts = participants(atoms, budget_left);

    for (const Part& pi : parts) {
      const SysAtom& mi = atoms[pi.idx];
      auto pi_atoms = proc_atoms(mi.proc);
      for (size_t a = 0; a < pi_atoms.size(); ++a) {
        const Action& act = pi_atoms[a].act;
        switch (act.kind) {
          case ActKind::Drip:
            emit_drip(atoms, ctx, pi, a, out);
            break;
          case ActKind::Pino:
            emit_pino(atoms, ctx, pi, a, out);
            break;
          case ActKind::Mate:
            emit_mate(atoms, ctx, pi, a, parts, budget_left, out);
            break;
          case ActKind::Phago:
            emit_phago(atoms, ctx, pi, a, parts, budget_left, out);
            break;
          case ActKind::CoBud:
            emit_bud(atoms, ctx, pi, a, budget_left, out);
            break;
          case ActKind::CoExo:
            emit_exo(atoms, ctx, pi, a, budget_left, out);
            break;
          default:
            break;  // co-mate/co-phago/bud/exo fire from the partner's side
        }
      }
      // reductions inside the membrane's content
      Slot inner{ctx.p, ctx.m, mi.label};
      int sub_budget = budget_left - pi.cost();
      for (auto& child_step : level(sys_atoms(mi.content), inner, sub_budget)) {
        SysAtom changed{false, mi.proc, build_system(std::move(child_step.atoms)),
                        mi.label};
        std::vector<SysAtom> next = keep_except(atoms, pi);
        next.push_back(std::move(changed));
        out.push_back({std::move(child_step.redex), std::move(next),
                       pi.cost() + child_step.cost});
      }
    }
    return out;
  }

 private:
  MiRegistry& reg_;
  bool budget_hit_ = false;

  // Each plain atom participates once; each replicated atom offers up to two
  // copies so that two replicas of the same membrane can interact.
  std::vector<Part> participants(const std::vector<SysAtom>& atoms, int budget_left) {
    std::vector<Part> out;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (!atoms[i].bang) {
        out.push_back({i, false});
      } else if (budget_left >= 1) {
        out.push_back({i, true});
      } else {
        budget_hit_ = true;
      }
    }
    return out;
  }

  // Level with the participant's real atom removed (replicas remain).
  static std::vector<SysAtom> keep_except(const std::vector<SysAtom>& atoms,
                                          const Part& p) {
    std::vector<SysAtom> out;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i == p.idx && !p.copy) continue;
      out.push_back(atoms[i]);
    }
    return out;
  }
  static std::vector<SysAtom> keep_except2(const std::vector<SysAtom>& atoms,
                                           const Part& p, const Part& q) {
    std::vector<SysAtom> out;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i == p.idx && !p.copy) continue;
      if (i == q.idx && !q.copy) continue;
      out.push_back(atoms[i]);
    }
    return out;
  }

  static std::string rho_key(const Action& a) {
    return a.arg ? pretty(a.arg) : std::string("0");
  }

  void emit_drip(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                 size_t a, std::vector<LevelStep>& out) {
    const SysAtom& m = atoms[pi.idx];
    auto patoms = proc_atoms(m.proc);
    const Action& act = patoms[a].act;
    MembraneId fresh = reg_.fresh(MiKey::drip(m.label, rho_key(act), ctx));
    std::vector<SysAtom> next = keep_except(atoms, pi);
    next.push_back({false, fire_proc(patoms, a), m.content, m.label});
    next.push_back({false, act.arg ? act.arg : Process::zero(), System::diamond(), fresh});
    out.push_back({Redex{Redex::Rule::Drip, "", m.label, "", rho_key(act), ctx},
                   std::move(next), pi.cost()});
  }

  void emit_pino(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                 size_t a, std::vector<LevelStep>& out) {
    const SysAtom& m = atoms[pi.idx];
    auto patoms = proc_atoms(m.proc);
    const Action& act = patoms[a].act;
    MembraneId fresh = reg_.fresh(MiKey::pino(m.label, rho_key(act), ctx));
    std::vector<SysAtom> content = sys_atoms(m.content);
    content.push_back({false, act.arg ? act.arg : Process::zero(), System::diamond(), fresh});
    std::vector<SysAtom> next = keep_except(atoms, pi);
    next.push_back({false, fire_proc(patoms, a), build_system(std::move(content)), m.label});
    out.push_back({Redex{Redex::Rule::Pino, "", m.label, "", rho_key(act), ctx},
                   std::move(next), pi.cost()});
  }

  void emit_mate(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                 size_t a, const std::vector<Part>& parts, int budget_left,
                 std::vector<LevelStep>& out) {
    const SysAtom& mp = atoms[pi.idx];
    auto p_atoms = proc_atoms(mp.proc);
    const Action& act = p_atoms[a].act;
    for (const Part& pj : parts) {
      if (pj.idx == pi.idx && !(pi.copy && pj.copy)) continue;
      // pj.idx == pi.idx here means two copies of one replicated atom
      int cost = pj.idx == pi.idx ? 2 : pi.cost() + pj.cost();
      const SysAtom& mq = atoms[pj.idx];
      auto q_atoms = proc_atoms(mq.proc);
      for (size_t b = 0; b < q_atoms.size(); ++b) {
        const Action& coact = q_atoms[b].act;
        if (coact.kind != ActKind::CoMate || coact.channel != act.channel) continue;
        if (cost > budget_left) {
          budget_hit_ = true;
          continue;
        }
        MembraneId fresh = reg_.fresh(MiKey::mate(act.channel, mp.label, mq.label, ctx));
        std::vector<ProcAtom> merged = fire_prefix(p_atoms, a);
        for (auto& x : fire_prefix(q_atoms, b)) merged.push_back(x);
        std::vector<SysAtom> content = sys_atoms(mp.content);
        for (auto& x : sys_atoms(mq.content)) content.push_back(x);
        std::vector<SysAtom> next = keep_except2(atoms, pi, pj);
        next.push_back({false, build_process(std::move(merged)),
                        build_system(std::move(content)), fresh});
        out.push_back({Redex{Redex::Rule::Mate, act.channel, mp.label, mq.label, "", ctx},
                       std::move(next), cost});
      }
    }
  }

  void emit_phago(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                  size_t a, const std::vector<Part>& parts, int budget_left,
                  std::vector<LevelStep>& out) {
    const SysAtom& mp = atoms[pi.idx];
    auto p_atoms = proc_atoms(mp.proc);
    const Action& act = p_atoms[a].act;
    for (const Part& pj : parts) {
      if (pj.idx == pi.idx && !(pi.copy && pj.copy)) continue;
      int cost = pj.idx == pi.idx ? 2 : pi.cost() + pj.cost();
      const SysAtom& mq = atoms[pj.idx];
      auto q_atoms = proc_atoms(mq.proc);
      for (size_t b = 0; b < q_atoms.size(); ++b) {
        const Action& coact = q_atoms[b].act;
        if (coact.kind != ActKind::CoPhago || coact.channel != act.channel) continue;
        if (cost > budget_left) {
          budget_hit_ = true;
          continue;
        }
        MembraneId fresh =
            reg_.fresh(MiKey::phago(act.channel, mp.label, mq.label, rho_key(coact), ctx));
        SysAtom engulfed{false, fire_proc(p_atoms, a), mp.content, mp.label};
        SysAtom wrapper{false, coact.arg ? coact.arg : Process::zero(),
                        build_system({engulfed}), fresh};
        std::vector<SysAtom> q_content = sys_atoms(mq.content);
        q_content.push_back(std::move(wrapper));
        std::vector<SysAtom> next = keep_except2(atoms, pi, pj);
        next.push_back({false, fire_proc(q_atoms, b), build_system(std::move(q_content)),
                        mq.label});
        out.push_back(
            {Redex{Redex::Rule::Phago, act.channel, mp.label, mq.label, rho_key(coact), ctx},
             std::move(next), cost});
      }
    }
  }

  // pi carries cobud(n,rho); a child of pi carries bud(n).
  void emit_bud(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                size_t a, int budget_left, std::vector<LevelStep>& out) {
    const SysAtom& mq = atoms[pi.idx];
    auto q_atoms = proc_atoms(mq.proc);
    const Action& coact = q_atoms[a].act;
    std::vector<SysAtom> kids = sys_atoms(mq.content);
    for (size_t c = 0; c < kids.size(); ++c) {
      int cost = pi.cost() + (kids[c].bang ? 1 : 0);
      auto c_atoms = proc_atoms(kids[c].proc);
      for (size_t b = 0; b < c_atoms.size(); ++b) {
        const Action& act = c_atoms[b].act;
        if (act.kind != ActKind::Bud || act.channel != coact.channel) continue;
        if (cost > budget_left) {
          budget_hit_ = true;
          continue;
        }
        MembraneId fresh = reg_.fresh(
            MiKey::bud(act.channel, kids[c].label, mq.label, rho_key(coact), ctx));
        SysAtom budded{false, fire_proc(c_atoms, b), kids[c].content, kids[c].label};
        SysAtom wrapper{false, coact.arg ? coact.arg : Process::zero(),
                        build_system({budded}), fresh};
        std::vector<SysAtom> rest;
        for (size_t k = 0; k < kids.size(); ++k)
          if (k != c || kids[k].bang) rest.push_back(kids[k]);
        std::vector<SysAtom> next = keep_except(atoms, pi);
        next.push_back({false, fire_proc(q_atoms, a), build_system(std::move(rest)),
                        mq.label});
        next.push_back(std::move(wrapper));
        out.push_back(
            {Redex{Redex::Rule::Bud, act.channel, kids[c].label, mq.label,
                   rho_key(coact), ctx},
             std::move(next), cost});
      }
    }
  }

  // pi carries coexo(n); a child of pi carries exo(n). The child dissolves,
  // its content pours out beside pi and its remaining process merges onto pi.
  void emit_exo(const std::vector<SysAtom>& atoms, const Slot& ctx, const Part& pi,
                size_t a, int budget_left, std::vector<LevelStep>& out) {
    const SysAtom& mq = atoms[pi.idx];
    auto q_atoms = proc_atoms(mq.proc);
    const Action& coact = q_atoms[a].act;
    std::vector<SysAtom> kids = sys_atoms(mq.content);
    for (size_t c = 0; c < kids.size(); ++c) {
      int cost = pi.cost() + (kids[c].bang ? 1 : 0);
      auto c_atoms = proc_atoms(kids[c].proc);
      for (size_t b = 0; b < c_atoms.size(); ++b) {
        const Action& act = c_atoms[b].act;
        if (act.kind != ActKind::Exo || act.channel != coact.channel) continue;
        if (cost > budget_left) {
          budget_hit_ = true;
          continue;
        }
        std::vector<ProcAtom> merged = fire_prefix(q_atoms, a);
        for (auto& x : fire_prefix(c_atoms, b)) merged.push_back(x);
        std::vector<SysAtom> rest;
        for (size_t k = 0; k < kids.size(); ++k)
          if (k != c || kids[k].bang) rest.push_back(kids[k]);
        std::vector<SysAtom> next = keep_except(atoms, pi);
        next.push_back({false, build_process(std::move(merged)),
                        build_system(std::move(rest)), mq.label});
        for (auto& poured : sys_atoms(kids[c].content)) next.push_back(poured);
        out.push_back({Redex{Redex::Rule::Exo, act.channel, kids[c].label, mq.label,
                             "", ctx},
                       std::move(next), cost});
      }
    }
  }
};

}  // namespace detail

// All successors reachable by one reduction anywhere in the term. The
// returned pairs are sorted and deduplicated on (redex, successor).
inline std::vector<std::pair<Redex, Canonical>> step(const Canonical& state,
                                                     MiRegistry& reg,
                                                     int unfold_budget,
                                                     bool* budget_hit = nullptr) {
  detail::Enumerator e(reg);
  auto raw = e.level(sys_atoms(state.term), Slot{kRoot, kRoot, kRoot}, unfold_budget);
  if (budget_hit) *budget_hit = *budget_hit || e.budget_hit();
  std::map<std::pair<std::string, std::string>, std::pair<Redex, Canonical>> dedup;
  for (auto& r : raw) {
    Canonical succ = canonicalize(build_system(std::move(r.atoms)));
    dedup.emplace(std::make_pair(r.redex.key(), succ.key),
                  std::make_pair(r.redex, std::move(succ)));
  }
  std::vector<std::pair<Redex, Canonical>> out;
  out.reserve(dedup.size());
  for (auto& [k, v] : dedup) out.push_back(std::move(v));
  return out;
}

struct ExploreOptions {
  int depth = 4;
  int unfold_budget = 2;
  size_t state_cap = 10000;
};

inline TransitionSystem explore(const SystemPtr& term, const ExploreOptions& opt,
                                MiRegistry& reg) {
  TransitionSystem ts;
  std::map<std::string, size_t> index;
  Canonical init = canonicalize(term);
  index[init.key] = 0;
  ts.states.push_back(std::move(init));
  std::vector<size_t> frontier{0};
  bool budget_hit = false;

  for (int d = 0; d < opt.depth && !frontier.empty(); ++d) {
    std::vector<size_t> next_frontier;
    for (size_t sid : frontier) {
      for (auto& [redex, succ] : step(ts.states[sid], reg, opt.unfold_budget, &budget_hit)) {
        auto it = index.find(succ.key);
        size_t did;
        if (it == index.end()) {
          if (ts.states.size() >= opt.state_cap) throw StateCapError(opt.state_cap);
          did = ts.states.size();
          index.emplace(succ.key, did);
          ts.states.push_back(std::move(succ));
          next_frontier.push_back(did);
        } else {
          did = it->second;
        }
        ts.edges.push_back({sid, did, redex});
      }
    }
    frontier = std::move(next_frontier);
  }

  // Depth cut: the walk stopped while some discovered state still had moves.
  for (size_t sid : frontier) {
    if (!step(ts.states[sid], reg, opt.unfold_budget, &budget_hit).empty()) {
      ts.truncated = true;
      break;
    }
  }
  ts.truncated = ts.truncated || budget_hit;
  return ts;
}

inline TransitionSystem explore(const SystemPtr& term, const ExploreOptions& opt = {}) {
  MiRegistry reg;
  return explore(term, opt, reg);
}

// ---------------------------------------------------------------------------
// The concrete facts an estimate must over-approximate: for every state and
// membrane occurrence, its containment fact and the actions residing on it.

inline void containments_of(const std::vector<SysAtom>& atoms, const Slot& ctx,
                            std::set<std::pair<Slot, Item>>& out) {
  for (const auto& m : atoms) {
    out.insert({ctx, Item::membrane(m.label)});
    Slot own{ctx.p, ctx.m, m.label};
    for (const auto& a : actions_of(m.proc)) out.insert({own, Item::action(a)});
    containments_of(sys_atoms(m.content), own, out);
  }
}

inline std::set<std::pair<Slot, Item>> dynamic_containments(const TransitionSystem& ts) {
  std::set<std::pair<Slot, Item>> out;
  for (const auto& st : ts.states)
    containments_of(sys_atoms(st.term), Slot{kRoot, kRoot, kRoot}, out);
  return out;
}

// ---------------------------------------------------------------------------
// Exports.

inline std::string transitions_to_dot(const TransitionSystem& ts) {
  auto esc = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  std::string dot = "digraph brane {\n";
  for (size_t i = 0; i < ts.states.size(); ++i)
    dot += "  s" + std::to_string(i) + " [label=\"" + esc(ts.states[i].key) + "\"];\n";
  for (const auto& e : ts.edges)
    dot += "  s" + std::to_string(e.src) + " -> s" + std::to_string(e.dst) +
           " [label=\"" + esc(e.redex.label()) + "\"];\n";
  dot += "}\n";
  return dot;
}

inline std::string transitions_to_json(const TransitionSystem& ts) {
  nlohmann::ordered_json root;
  auto& states = root["states"] = nlohmann::ordered_json::array();
  for (const auto& s : ts.states) states.push_back(s.key);
  auto& edges = root["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : ts.edges)
    edges.push_back({{"src", e.src},
                     {"rule", Redex::rule_name(e.redex.rule)},
                     {"channel", e.redex.channel},
                     {"dst", e.dst}});
  root["truncated"] = ts.truncated;
  return root.dump(2) + "\n";
}

}  // namespace brane
