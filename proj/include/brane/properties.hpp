#pragma once

// Spatial-structure property checkers over an estimate, their dynamic
// counterparts over a bounded exploration, and causality queries over the
// C component. Static truth of a property implies its dynamic truth; the
// converse fails in general because the estimate over-approximates.

#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brane/estimate.hpp"
#include "brane/parse.hpp"
#include "brane/semantics.hpp"

namespace brane {

struct PropertyQuery {
  enum class Kind { NeverOn, NeverInside, NeverTogether };
  Kind kind{Kind::NeverOn};
  Action capability;        // NeverOn; parameter may be a wildcard
  MembraneId inner, inner2; // NeverInside / NeverTogether
  MembraneId target;        // the membrane the property is about

  std::string str() const {
    switch (kind) {
      case Kind::NeverOn: return "never-on " + pretty(capability) + " " + target;
      case Kind::NeverInside: return "never-inside " + inner + " " + target;
      case Kind::NeverTogether:
        return "never-together " + inner + " " + inner2 + " " + target;
    }
    return "?";
  }

  static PropertyQuery never_on(Action c, MembraneId mu) {
    PropertyQuery q;
    q.kind = Kind::NeverOn;
    q.capability = std::move(c);
    q.target = std::move(mu);
    return q;
  }
  static PropertyQuery never_inside(MembraneId inner, MembraneId mu) {
    PropertyQuery q;
    q.kind = Kind::NeverInside;
    q.inner = std::move(inner);
    q.target = std::move(mu);
    return q;
  }
  static PropertyQuery never_together(MembraneId a, MembraneId b, MembraneId mu) {
    PropertyQuery q;
    q.kind = Kind::NeverTogether;
    q.inner = std::move(a);
    q.inner2 = std::move(b);
    q.target = std::move(mu);
    return q;
  }
};

inline bool action_matches(const Action& query, const Action& item) {
  if (query.kind != item.kind) return false;
  if (act_has_channel(query.kind) && query.channel != item.channel) return false;
  if (act_carries_process(query.kind) && query.arg)
    return action_key(query) == action_key(item);
  return true;  // omitted parameter matches any
}

struct StaticVerdict {
  bool holds = true;
  bool vacuous = false;  // the target never occurs in the estimate
};

inline StaticVerdict check_static(const Estimate& est, const PropertyQuery& q) {
  StaticVerdict v;
  std::set<MembraneId> uni = est.universe();
  auto known = [&](const MembraneId& m) { return uni.count(m) > 0; };
  switch (q.kind) {
    case PropertyQuery::Kind::NeverOn:
      v.vacuous = !known(q.target);
      break;
    case PropertyQuery::Kind::NeverInside:
      v.vacuous = !known(q.target) || !known(q.inner);
      break;
    case PropertyQuery::Kind::NeverTogether:
      v.vacuous = !known(q.target) || !known(q.inner) || !known(q.inner2);
      break;
  }
  for (const auto& [slot, items] : est.I) {
    if (slot.m != q.target) continue;
    switch (q.kind) {
      case PropertyQuery::Kind::NeverOn:
        for (const auto& it : items)
          if (!it.is_membrane() && action_matches(q.capability, it.act)) v.holds = false;
        break;
      case PropertyQuery::Kind::NeverInside:
        if (items.count(Item::membrane(q.inner))) v.holds = false;
        break;
      case PropertyQuery::Kind::NeverTogether:
        // per context: not both present (contexts containing neither are fine)
        if (items.count(Item::membrane(q.inner)) &&
            items.count(Item::membrane(q.inner2)))
          v.holds = false;
        break;
    }
  }
  return v;
}

struct DynamicVerdict {
  bool holds = true;
  bool inconclusive = false;  // the exploration was truncated
};

namespace detail {

inline void walk_membranes(
    const std::vector<SysAtom>& atoms,
    const std::function<void(const SysAtom&, const std::vector<SysAtom>&)>& visit) {
  for (const auto& m : atoms) {
    std::vector<SysAtom> kids = sys_atoms(m.content);
    visit(m, kids);
    walk_membranes(kids, visit);
  }
}

}  // namespace detail

// transitive_inside: treat "inside" as any depth rather than direct content.
inline DynamicVerdict check_dynamic(const TransitionSystem& ts, const PropertyQuery& q,
                                    bool transitive_inside = false) {
  DynamicVerdict v;
  v.inconclusive = ts.truncated;

  std::function<bool(const SystemPtr&, const MembraneId&)> occurs_within =
      [&](const SystemPtr& content, const MembraneId& who) {
        for (const auto& m : sys_atoms(content)) {
          if (m.label == who) return true;
          if (occurs_within(m.content, who)) return true;
        }
        return false;
      };

  for (const auto& st : ts.states) {
    detail::walk_membranes(
        sys_atoms(st.term), [&](const SysAtom& m, const std::vector<SysAtom>& kids) {
          if (m.label != q.target || !v.holds) return;
          switch (q.kind) {
            case PropertyQuery::Kind::NeverOn:
              for (const auto& a : actions_of(m.proc))
                if (action_matches(q.capability, a)) v.holds = false;
              break;
            case PropertyQuery::Kind::NeverInside: {
              bool inside = false;
              if (transitive_inside) {
                inside = occurs_within(m.content, q.inner);
              } else {
                for (const auto& k : kids) inside |= k.label == q.inner;
              }
              if (inside) v.holds = false;
              break;
            }
            case PropertyQuery::Kind::NeverTogether: {
              bool a = false, b = false;
              for (const auto& k : kids) {
                a |= k.label == q.inner;
                b |= k.label == q.inner2;
              }
              if (a && b) v.holds = false;
              break;
            }
          }
        });
    if (!v.holds) break;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Causality queries.

inline const std::set<CausalRecord>& causes_of(const Estimate& est, const MembraneId& mu) {
  return est.records(mu);
}

struct CausalChain {
  MembraneId target;
  std::vector<CausalRecord> links;  // foundational firings first

  std::string str() const {
    std::string out = target + ":";
    for (const auto& l : links) out += " " + l.key();
    return out;
  }
};

struct ChainResult {
  std::vector<CausalChain> chains;
  bool cycle = false;  // would contradict the strict-order reading of C
};

namespace detail {

inline void chains_rec(const Estimate& est, const MembraneId& mu,
                       std::set<MembraneId>& on_path, std::vector<CausalRecord>& prefix,
                       ChainResult& out, size_t cap) {
  const auto& recs = est.records(mu);
  if (recs.empty()) {  // source membrane: the accumulated prefix is a chain
    out.chains.push_back({MembraneId{}, prefix});
    return;
  }
  for (const auto& r : recs) {
    if (out.chains.size() >= cap) return;
    std::vector<MembraneId> deps;
    for (const auto& d : r.mentioned())
      if (!est.records(d).empty()) deps.push_back(d);
    // each derived dependency contributes its own chains ahead of r
    std::vector<CausalRecord> with_r = prefix;
    with_r.insert(with_r.begin(), r);
    if (deps.empty()) {
      out.chains.push_back({MembraneId{}, with_r});
      continue;
    }
    for (const auto& d : deps) {
      if (on_path.count(d)) {
        out.cycle = true;
        continue;
      }
      on_path.insert(d);
      chains_rec(est, d, on_path, with_r, out, cap);
      on_path.erase(d);
    }
  }
}

}  // namespace detail

// Transitively unwinds causes_of: a chain for mu extends with the chains of
// every derived membrane mentioned by one of its records. Cycles are cut
// and reported.
inline ChainResult causal_chain(const Estimate& est, const MembraneId& mu,
                                size_t cap = 256) {
  ChainResult out;
  if (est.records(mu).empty()) {
    out.chains.push_back({mu, {}});  // source membranes have the empty chain
    return out;
  }
  std::set<MembraneId> on_path{mu};
  std::vector<CausalRecord> prefix;
  detail::chains_rec(est, mu, on_path, prefix, out, cap);
  for (auto& c : out.chains) c.target = mu;
  return out;
}

// ---------------------------------------------------------------------------
// Query files: one query per line, '#' starts a comment.

inline std::vector<PropertyQuery> parse_queries(const std::string& text) {
  std::vector<PropertyQuery> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto need = [&](std::string& slot) {
      if (!(ls >> slot))
        throw ParseError(lineno, 1, "query is missing an argument");
    };
    if (head == "never-on") {
      std::string act, mu;
      need(act);
      need(mu);
      out.push_back(PropertyQuery::never_on(parse_action(act, /*wildcard*/ true), mu));
    } else if (head == "never-inside") {
      std::string a, b;
      need(a);
      need(b);
      out.push_back(PropertyQuery::never_inside(a, b));
    } else if (head == "never-together") {
      std::string a, b, c;
      need(a);
      need(b);
      need(c);
      out.push_back(PropertyQuery::never_together(a, b, c));
    } else {
      throw ParseError(lineno, 1, "unknown query '" + head + "'");
    }
  }
  return out;
}

}  // namespace brane
