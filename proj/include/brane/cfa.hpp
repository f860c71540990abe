#pragma once

// The contextual control flow analysis. solve() computes a stable estimate
// by chaotic iteration over the closure rules; validate() checks that an
// estimate describes a term (syntax-driven traversal) and is closed under
// the same rules. Both sides share one rule-instance enumerator so the
// solver's output is validator-stable by construction.
//
// Inclusion conclusions are installed as persistent constraints: once a rule
// fires, later additions to the source slots keep flowing to the targets.
// Pointwise families ("the children of muP, whichever they turn out to be")
// are kept as watch templates and re-expanded as new children appear.
//
// The negative premise of the binary fusion rules (mate, phago) blocks a
// pair of participant slots when their reflexive R-ancestries intersect:
// a slot derived from another (directly or transitively) cannot interact
// with it, and two slots derived from a common dissolved configuration
// cannot interact with each other. Blocking R entries are committed in the
// same atomic rule application that first derives a membrane, before any
// inclusion constraint can populate its action set; R only ever grows, so
// the saturation is deterministic and its fixpoint validator-stable.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "brane/canonical.hpp"
#include "brane/estimate.hpp"
#include "brane/mi.hpp"

namespace brane {

enum class Mode { Sound, StrictPaper };

struct MembraneCapError : std::runtime_error {
  explicit MembraneCapError(size_t cap)
      : std::runtime_error("membrane identity cap exceeded (" + std::to_string(cap) +
                           " ids); the closure does not appear to stabilize") {}
};

struct Violation {
  std::string clause;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string summary() const {
    std::string out;
    for (const auto& v : violations) out += v.clause + ": " + v.detail + "\n";
    return out;
  }
};

namespace cfa_detail {

// Reflexive R-ancestry of a slot: the slot itself plus everything it was
// (transitively) derived from.
inline std::set<Slot> ancestry(const Estimate& est, const Slot& s) {
  std::set<Slot> anc{s};
  std::vector<Slot> work{s};
  while (!work.empty()) {
    Slot cur = work.back();
    work.pop_back();
    for (const auto& [a, b] : est.R) {
      if (b == cur && anc.insert(a).second) work.push_back(a);
    }
  }
  return anc;
}

inline bool blocked(const Estimate& est, const Slot& s1, const Slot& s2) {
  if (s1 == s2) return true;
  std::set<Slot> a1 = ancestry(est, s1);
  std::set<Slot> a2 = ancestry(est, s2);
  for (const auto& s : a1)
    if (a2.count(s)) return true;
  return false;
}

// for each membrane mu_s in I(watch): I(sa,sb,mu_s) <= I(da,db,mu_s),
// and with_r additionally ((sa,sb,mu_s),(da,db,mu_s)) in R.
struct Depth2 {
  Slot watch;
  MembraneId sa, sb, da, db;
  bool with_r = false;
  auto operator<=>(const Depth2&) const = default;
};

// for each mu_s in I(watch), for each mu_gs in I(ma,mb,mu_s):
// I(sc,mu_s,mu_gs) <= I(dc,mu_s,mu_gs).
struct Depth3 {
  Slot watch;
  MembraneId ma, mb, sc, dc;
  auto operator<=>(const Depth3&) const = default;
};

struct Instance {
  enum class Kind { Mate, Bud, Drip, Phago, Exo, Pino } kind;
  std::string channel;
  MembraneId mu_p, mu_q;  // mu_q empty for drip/pino
  Action act, coact;      // coact carries the created membrane's parameter
  Slot parent;            // (gp,p,m): the context the rule fires in

  bool has_negative_premise() const {
    return kind == Kind::Mate || kind == Kind::Phago;
  }
  Slot slot_p() const { return {parent.p, parent.m, mu_p}; }
  Slot slot_q() const { return {parent.p, parent.m, mu_q}; }

  std::string describe() const {
    static const char* names[] = {"mate", "bud", "drip", "phago", "exo", "pino"};
    std::string out = names[static_cast<int>(kind)];
    if (!channel.empty()) out += ":" + channel;
    out += "(" + mu_p + (mu_q.empty() ? "" : "," + mu_q) + ")@" + parent.str();
    return out;
  }
};

struct Facts {
  std::vector<std::pair<Slot, Item>> members;
  std::vector<std::pair<MembraneId, CausalRecord>> records;
  std::vector<std::pair<Slot, Slot>> incl;      // all items
  std::vector<std::pair<Slot, Slot>> act_incl;  // action items only
  std::vector<std::pair<Slot, Slot>> r_pairs;
  std::vector<Depth2> d2;
  std::vector<Depth3> d3;
  MembraneId minted;  // empty for exo
  MiKey mint_key;
};

inline std::string rho_of(const Action& a) {
  return a.arg ? pretty(a.arg) : std::string("0");
}

inline void add_param_actions(const Action& carrier, const Slot& at, Facts& f) {
  if (!carrier.arg) return;
  for (const auto& a : actions_of(carrier.arg))
    f.members.push_back({at, Item::action(a)});
}

inline Facts conclusions(const Instance& in, MiRegistry& reg, Mode mode) {
  Facts f;
  const Slot& ctx = in.parent;
  const MembraneId& p = ctx.p;
  const MembraneId& m = ctx.m;
  switch (in.kind) {
    case Instance::Kind::Mate: {
      f.mint_key = MiKey::mate(in.channel, in.mu_p, in.mu_q, ctx);
      MembraneId pq = reg.fresh(f.mint_key);
      f.minted = pq;
      f.members.push_back({ctx, Item::membrane(pq)});
      for (const MembraneId& part : {in.mu_p, in.mu_q}) {
        Slot from{p, m, part};
        f.incl.push_back({from, Slot{p, m, pq}});
        f.d2.push_back({from, m, part, m, pq, /*with_r=*/true});
        f.d3.push_back({from, m, part, part, pq});
        f.r_pairs.push_back({from, Slot{p, m, pq}});
      }
      f.records.push_back(
          {pq, CausalRecord::make_binary(in.act, in.mu_p, in.coact, in.mu_q, ctx)});
      break;
    }
    case Instance::Kind::Bud: {
      f.mint_key = MiKey::bud(in.channel, in.mu_p, in.mu_q, rho_of(in.coact), ctx);
      MembraneId r = reg.fresh(f.mint_key);
      f.minted = r;
      f.members.push_back({ctx, Item::membrane(r)});
      add_param_actions(in.coact, Slot{p, m, r}, f);
      f.members.push_back({Slot{p, m, r}, Item::membrane(in.mu_p)});
      Slot from{m, in.mu_q, in.mu_p};
      f.incl.push_back({from, Slot{m, r, in.mu_p}});
      f.d2.push_back({from, in.mu_q, in.mu_p, r, in.mu_p, /*with_r=*/true});
      f.r_pairs.push_back({from, Slot{m, r, in.mu_p}});
      f.records.push_back(
          {r, CausalRecord::make_binary(in.act, in.mu_p, in.coact, in.mu_q, ctx)});
      break;
    }
    case Instance::Kind::Drip: {
      f.mint_key = MiKey::drip(in.mu_p, rho_of(in.act), ctx);
      MembraneId r = reg.fresh(f.mint_key);
      f.minted = r;
      f.members.push_back({ctx, Item::membrane(r)});
      add_param_actions(in.act, Slot{p, m, r}, f);
      f.records.push_back({r, CausalRecord::make_unary(in.act, in.mu_p, ctx)});
      break;
    }
    case Instance::Kind::Phago: {
      f.mint_key = MiKey::phago(in.channel, in.mu_p, in.mu_q, rho_of(in.coact), ctx);
      MembraneId r = reg.fresh(f.mint_key);
      f.minted = r;
      f.members.push_back({Slot{p, m, in.mu_q}, Item::membrane(r)});
      add_param_actions(in.coact, Slot{m, in.mu_q, r}, f);
      f.members.push_back({Slot{m, in.mu_q, r}, Item::membrane(in.mu_p)});
      f.records.push_back(
          {r, CausalRecord::make_binary(in.act, in.mu_p, in.coact, in.mu_q, ctx)});
      Slot from{p, m, in.mu_p};
      Slot to{in.mu_q, r, in.mu_p};
      f.r_pairs.push_back({from, to});
      if (mode == Mode::Sound) {
        // relocation of the engulfed membrane's contents
        f.incl.push_back({from, to});
        f.d2.push_back({from, m, in.mu_p, r, in.mu_p, /*with_r=*/true});
        f.d3.push_back({from, m, in.mu_p, in.mu_p, r});
      }
      break;
    }
    case Instance::Kind::Exo: {
      Slot inner{m, in.mu_q, in.mu_p};
      // the residual process of the dissolving membrane merges onto mu_q
      f.act_incl.push_back({inner, Slot{p, m, in.mu_q}});
      // its content is poured one level up
      f.incl.push_back({inner, ctx});
      if (mode == Mode::Sound) {
        // relocated children keep their own contents
        f.d2.push_back({inner, in.mu_q, in.mu_p, p, m, /*with_r=*/false});
        f.d3.push_back({inner, in.mu_q, in.mu_p, in.mu_p, m});
      }
      break;
    }
    case Instance::Kind::Pino: {
      f.mint_key = MiKey::pino(in.mu_p, rho_of(in.act), ctx);
      MembraneId r = reg.fresh(f.mint_key);
      f.minted = r;
      f.members.push_back({Slot{p, m, in.mu_p}, Item::membrane(r)});
      add_param_actions(in.act, Slot{m, in.mu_p, r}, f);
      f.records.push_back({r, CausalRecord::make_unary(in.act, in.mu_p, ctx)});
      break;
    }
  }
  return f;
}

// All rule instances whose positive premises hold in the estimate,
// enumerated in a fixed order.
inline std::vector<Instance> enumerate_instances(const Estimate& est) {
  std::vector<Instance> out;
  for (const auto& [parent, items] : est.I) {
    std::vector<MembraneId> kids;
    for (const auto& it : items)
      if (it.is_membrane()) kids.push_back(it.mem);
    for (const MembraneId& mu_p : kids) {
      Slot sp{parent.p, parent.m, mu_p};
      for (const auto& ai : est.at(sp)) {
        if (ai.is_membrane()) continue;
        const Action& a = ai.act;
        switch (a.kind) {
          case ActKind::Drip:
            out.push_back({Instance::Kind::Drip, "", mu_p, "", a, {}, parent});
            break;
          case ActKind::Pino:
            out.push_back({Instance::Kind::Pino, "", mu_p, "", a, {}, parent});
            break;
          case ActKind::Mate:
          case ActKind::Phago: {
            ActKind want = a.kind == ActKind::Mate ? ActKind::CoMate : ActKind::CoPhago;
            for (const MembraneId& mu_q : kids) {
              if (mu_q == mu_p) continue;
              Slot sq{parent.p, parent.m, mu_q};
              for (const auto& bi : est.at(sq)) {
                if (bi.is_membrane()) continue;
                if (bi.act.kind != want || bi.act.channel != a.channel) continue;
                out.push_back({a.kind == ActKind::Mate ? Instance::Kind::Mate
                                                       : Instance::Kind::Phago,
                               a.channel, mu_p, mu_q, a, bi.act, parent});
              }
            }
            break;
          }
          case ActKind::CoBud:
          case ActKind::CoExo: {
            // mu_p is the co-side membrane; the action side sits inside it
            ActKind want = a.kind == ActKind::CoBud ? ActKind::Bud : ActKind::Exo;
            for (const auto& ci : est.at(sp)) {
              if (!ci.is_membrane()) continue;
              Slot inner{parent.m, mu_p, ci.mem};
              for (const auto& bi : est.at(inner)) {
                if (bi.is_membrane()) continue;
                if (bi.act.kind != want || bi.act.channel != a.channel) continue;
                out.push_back({a.kind == ActKind::CoBud ? Instance::Kind::Bud
                                                        : Instance::Kind::Exo,
                               a.channel, ci.mem, mu_p, bi.act, a, parent});
              }
            }
            break;
          }
          default:
            break;
        }
      }
    }
  }
  return out;
}

// Syntax-driven facts of the initial term, used both to seed the solver and
// as the validator's structural traversal.
template <typename Emit>
void syntax_walk(const SystemPtr& s, const Slot& slot, Emit&& emit) {
  if (!s) return;
  switch (s->kind) {
    case System::Kind::Diamond: return;
    case System::Kind::Compose:
      syntax_walk(s->left, slot, emit);
      syntax_walk(s->right, slot, emit);
      return;
    case System::Kind::Bang:
      syntax_walk(s->body, slot, emit);
      return;
    case System::Kind::Membrane: {
      emit(slot, Item::membrane(s->label));
      Slot own{slot.p, slot.m, s->label};
      for (const auto& a : actions_of(s->proc)) emit(own, Item::action(a));
      syntax_walk(s->content, own, emit);
      return;
    }
  }
}

class Engine {
 public:
  Engine(Mode mode, size_t membrane_cap) : mode_(mode), cap_(membrane_cap) {}

  Estimate run(const SystemPtr& term) {
    syntax_walk(term, Slot{kRoot, kRoot, kRoot},
                [&](const Slot& s, const Item& it) { est_.add(s, it); });
    bool changed = true;
    while (changed) {
      changed = propagate();
      for (const auto& in : enumerate_instances(est_)) {
        if (in.has_negative_premise() && ancestry_blocked(in.slot_p(), in.slot_q()))
          continue;
        Facts f = conclusions(in, reg_, mode_);
        if (reg_.size() > cap_) throw MembraneCapError(cap_);
        changed |= commit(f);
      }
    }
    est_.minted.clear();
    for (const auto& [key, id] : reg_.entries()) est_.minted.emplace(id, key);
    return est_;
  }

 private:
  Mode mode_;
  size_t cap_;
  Estimate est_;
  MiRegistry reg_;
  std::set<std::pair<Slot, Slot>> edges_;      // persistent I(src) <= I(dst)
  std::set<std::pair<Slot, Slot>> act_edges_;  // action items only
  std::set<Depth2> d2_;
  std::set<Depth3> d3_;
  // R kept transitively closed, with both adjacency directions indexed
  std::map<Slot, std::set<Slot>> r_preds_, r_succs_;

  // Same predicate as blocked(), specialized to the closed representation.
  bool ancestry_blocked(const Slot& s1, const Slot& s2) {
    if (s1 == s2) return true;
    const auto& p1 = r_preds_[s1];
    const auto& p2 = r_preds_[s2];
    if (p1.count(s2) || p2.count(s1)) return true;
    auto i = p1.begin();
    auto j = p2.begin();
    while (i != p1.end() && j != p2.end()) {
      if (*i < *j) ++i;
      else if (*j < *i) ++j;
      else return true;
    }
    return false;
  }

  // Inserts (a, b) and everything transitivity implies.
  bool add_r(const Slot& a, const Slot& b) {
    if (a == b) throw std::logic_error("R became reflexive at " + a.str());
    if (est_.R.count({a, b})) return false;
    std::vector<Slot> above{a}, below{b};
    for (const auto& s : r_preds_[a]) above.push_back(s);
    for (const auto& s : r_succs_[b]) below.push_back(s);
    for (const auto& x : above) {
      for (const auto& y : below) {
        if (x == y) throw std::logic_error("R became cyclic at " + x.str());
        if (est_.R.insert({x, y}).second) {
          r_preds_[y].insert(x);
          r_succs_[x].insert(y);
        }
      }
    }
    return true;
  }

  bool commit(const Facts& f) {
    bool changed = false;
    // R first: incompatibilities must exist before anything can flow
    for (const auto& [a, b] : f.r_pairs) changed |= add_r(a, b);
    for (const auto& [s, it] : f.members) changed |= est_.add(s, it);
    for (const auto& [mu, r] : f.records) changed |= est_.C[mu].insert(r).second;
    for (const auto& e : f.incl) changed |= edges_.insert(e).second;
    for (const auto& e : f.act_incl) changed |= act_edges_.insert(e).second;
    for (const auto& t : f.d2) changed |= d2_.insert(t).second;
    for (const auto& t : f.d3) changed |= d3_.insert(t).second;
    return changed;
  }

  bool propagate() {
    bool any = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [src, dst] : edges_) {
        for (const auto& it : est_.at(src))
          if (!est_.has(dst, it)) {
            est_.add(dst, it);
            changed = true;
          }
      }
      for (const auto& [src, dst] : act_edges_) {
        for (const auto& it : est_.at(src))
          if (!it.is_membrane() && !est_.has(dst, it)) {
            est_.add(dst, it);
            changed = true;
          }
      }
      for (const auto& t : d2_) {
        for (const auto& it : est_.at(t.watch)) {
          if (!it.is_membrane()) continue;
          Slot from{t.sa, t.sb, it.mem};
          Slot to{t.da, t.db, it.mem};
          changed |= edges_.insert({from, to}).second;
          if (t.with_r && from != to) changed |= add_r(from, to);
        }
      }
      for (const auto& t : d3_) {
        for (const auto& it : est_.at(t.watch)) {
          if (!it.is_membrane()) continue;
          Slot mid{t.ma, t.mb, it.mem};
          for (const auto& gt : est_.at(mid)) {
            if (!gt.is_membrane()) continue;
            changed |= edges_
                           .insert({Slot{t.sc, it.mem, gt.mem},
                                    Slot{t.dc, it.mem, gt.mem}})
                           .second;
          }
        }
      }
      any |= changed;
    }
    return any;
  }
};

}  // namespace cfa_detail

using cfa_detail::blocked;

struct SolveOptions {
  Mode mode = Mode::Sound;
  size_t membrane_cap = 4096;
};

inline Estimate solve(const SystemPtr& term, const SolveOptions& opt = {}) {
  cfa_detail::Engine engine(opt.mode, opt.membrane_cap);
  return engine.run(term);
}

// The syntax-driven judgement alone: does the estimate describe the term
// when placed at the given slot?
inline ValidationReport validate_description(const Estimate& est, const SystemPtr& term,
                                             const Slot& at = {kRoot, kRoot, kRoot}) {
  ValidationReport report;
  cfa_detail::syntax_walk(term, at, [&](const Slot& s, const Item& it) {
    if (!est.has(s, it))
      report.violations.push_back({it.is_membrane() ? "membrane" : "actions",
                                   it.text + " not in I" + s.str()});
  });
  return report;
}

// Checks (a) that the estimate describes the term by structural traversal
// and (b) that it is closed under every applicable rule instance. Returns
// all violations; an empty report means the estimate is valid.
inline ValidationReport validate(const Estimate& est, const SystemPtr& term,
                                 Mode mode = Mode::Sound) {
  ValidationReport report = validate_description(est, term);
  auto missing = [&](const std::string& clause, const std::string& what) {
    report.violations.push_back({clause, what});
  };

  MiRegistry names;
  for (const auto& in : cfa_detail::enumerate_instances(est)) {
    if (in.has_negative_premise() &&
        cfa_detail::blocked(est, in.slot_p(), in.slot_q()))
      continue;
    cfa_detail::Facts f = cfa_detail::conclusions(in, names, mode);
    const std::string clause = in.describe();
    for (const auto& [s, it] : f.members)
      if (!est.has(s, it)) missing(clause, it.text + " not in I" + s.str());
    for (const auto& [mu, r] : f.records)
      if (!est.has_record(mu, r)) missing(clause, r.key() + " not in C(" + mu + ")");
    auto check_edge = [&](const Slot& src, const Slot& dst, bool actions_only) {
      for (const auto& it : est.at(src)) {
        if (actions_only && it.is_membrane()) continue;
        if (!est.has(dst, it))
          missing(clause, "I" + src.str() + " not within I" + dst.str() + ": " + it.text);
      }
    };
    for (const auto& [src, dst] : f.incl) check_edge(src, dst, false);
    for (const auto& [src, dst] : f.act_incl) check_edge(src, dst, true);
    for (const auto& [a, b] : f.r_pairs)
      if (!r_reaches(est, a, b))
        missing(clause, a.str() + " -> " + b.str() + " not in R");
    for (const auto& t : f.d2) {
      for (const auto& it : est.at(t.watch)) {
        if (!it.is_membrane()) continue;
        Slot from{t.sa, t.sb, it.mem};
        Slot to{t.da, t.db, it.mem};
        check_edge(from, to, false);
        if (t.with_r && !r_reaches(est, from, to))
          missing(clause, from.str() + " -> " + to.str() + " not in R");
      }
    }
    for (const auto& t : f.d3) {
      for (const auto& it : est.at(t.watch)) {
        if (!it.is_membrane()) continue;
        for (const auto& gt : est.at(Slot{t.ma, t.mb, it.mem})) {
          if (!gt.is_membrane()) continue;
          check_edge(Slot{t.sc, it.mem, gt.mem}, Slot{t.dc, it.mem, gt.mem}, false);
        }
      }
    }
  }
  return report;
}

}  // namespace brane
