#pragma once

// The analysis result (I, C, R).
//   I maps a context slot to the membranes it may contain and the actions
//     residing on the membrane addressed by the slot.
//   C maps a derived membrane to the action firings that can create it.
//   R records pairs of slot configurations that can never coexist; it is
//     kept transitively closed and must stay irreflexive.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "brane/ast.hpp"
#include "brane/canonical.hpp"
#include "brane/mi.hpp"
#include "brane/parse.hpp"
#include "json.hpp"

namespace brane {

struct Item {
  enum class Kind { Membrane, Act };
  Kind kind{Kind::Membrane};
  MembraneId mem;  // Membrane
  Action act;      // Act; parameter canonical
  std::string text;

  static Item membrane(MembraneId m) {
    Item i;
    i.kind = Kind::Membrane;
    i.text = m;
    i.mem = std::move(m);
    return i;
  }
  static Item action(const Action& a) {
    Item i;
    i.kind = Kind::Act;
    i.act = canon_action(a);
    i.text = pretty(i.act);
    return i;
  }

  bool is_membrane() const { return kind == Kind::Membrane; }

  bool operator<(const Item& o) const {
    if (kind != o.kind) return kind < o.kind;
    return text < o.text;
  }
  bool operator==(const Item& o) const { return kind == o.kind && text == o.text; }
};

struct CausalRecord {
  bool binary = true;
  Action act;       // canonical
  MembraneId mu_p;
  Action coact;     // binary only
  MembraneId mu_q;  // binary only
  Slot ctx;

  static CausalRecord make_binary(Action a, MembraneId p, Action coa, MembraneId q, Slot c) {
    CausalRecord r;
    r.binary = true;
    r.act = canon_action(a);
    r.mu_p = std::move(p);
    r.coact = canon_action(coa);
    r.mu_q = std::move(q);
    r.ctx = std::move(c);
    return r;
  }
  static CausalRecord make_unary(Action a, MembraneId p, Slot c) {
    CausalRecord r;
    r.binary = false;
    r.act = canon_action(a);
    r.mu_p = std::move(p);
    r.ctx = std::move(c);
    return r;
  }

  std::string key() const {
    if (binary)
      return "(" + pretty(act) + "," + mu_p + "," + pretty(coact) + "," + mu_q +
             "," + ctx.gp + "," + ctx.p + "," + ctx.m + ")";
    return "(" + pretty(act) + "," + mu_p + "," + ctx.gp + "," + ctx.p + "," +
           ctx.m + ")";
  }

  // Membranes this record mentions, for causal-chain unwinding.
  std::vector<MembraneId> mentioned() const {
    std::vector<MembraneId> out{mu_p};
    if (binary) out.push_back(mu_q);
    out.push_back(ctx.gp);
    out.push_back(ctx.p);
    out.push_back(ctx.m);
    return out;
  }

  bool operator<(const CausalRecord& o) const { return key() < o.key(); }
  bool operator==(const CausalRecord& o) const { return key() == o.key(); }
};

struct Estimate {
  std::map<Slot, std::set<Item>> I;
  std::map<MembraneId, std::set<CausalRecord>> C;
  std::set<std::pair<Slot, Slot>> R;
  // Identities minted while solving; name -> key. Not serialized.
  std::map<MembraneId, MiKey> minted;

  bool has(const Slot& s, const Item& it) const {
    auto f = I.find(s);
    return f != I.end() && f->second.count(it) > 0;
  }
  const std::set<Item>& at(const Slot& s) const {
    static const std::set<Item> empty;
    auto f = I.find(s);
    return f == I.end() ? empty : f->second;
  }
  bool add(const Slot& s, const Item& it) { return I[s].insert(it).second; }

  bool has_record(const MembraneId& mu, const CausalRecord& r) const {
    auto f = C.find(mu);
    return f != C.end() && f->second.count(r) > 0;
  }
  const std::set<CausalRecord>& records(const MembraneId& mu) const {
    static const std::set<CausalRecord> empty;
    auto f = C.find(mu);
    return f == C.end() ? empty : f->second;
  }

  // Every membrane id occurring anywhere in the estimate.
  std::set<MembraneId> universe() const {
    std::set<MembraneId> out;
    auto slot_ids = [&](const Slot& s) {
      out.insert(s.gp);
      out.insert(s.p);
      out.insert(s.m);
    };
    for (const auto& [s, items] : I) {
      slot_ids(s);
      for (const auto& it : items)
        if (it.is_membrane()) out.insert(it.mem);
    }
    for (const auto& [mu, recs] : C) {
      out.insert(mu);
      for (const auto& r : recs)
        for (const auto& m : r.mentioned()) out.insert(m);
    }
    for (const auto& [a, b] : R) {
      slot_ids(a);
      slot_ids(b);
    }
    out.erase(kRoot);
    return out;
  }
};

// True iff the two slots are related by R, in either direction, directly or
// through chains (R is a strict order, so only transitivity applies).
inline bool r_reaches(const Estimate& est, const Slot& from, const Slot& to) {
  if (est.R.count({from, to})) return true;  // R is stored closed
  std::set<Slot> seen{from};
  std::vector<Slot> work{from};
  while (!work.empty()) {
    Slot cur = work.back();
    work.pop_back();
    for (auto it = est.R.lower_bound({cur, Slot{}}); it != est.R.end() && it->first == cur; ++it) {
      if (it->second == to) return true;
      if (seen.insert(it->second).second) work.push_back(it->second);
    }
  }
  return false;
}

inline bool r_blocks(const Estimate& est, const Slot& a, const Slot& b) {
  if (a == b) return false;  // irreflexive
  return r_reaches(est, a, b) || r_reaches(est, b, a);
}

// ---------------------------------------------------------------------------
// JSON (canonical ordering: slots lexicographic, items by printed form).

inline nlohmann::ordered_json slot_json(const Slot& s) {
  return nlohmann::ordered_json::array({s.gp, s.p, s.m});
}

inline Slot slot_from_json(const nlohmann::json& j) {
  return Slot{j.at(0).get<std::string>(), j.at(1).get<std::string>(),
              j.at(2).get<std::string>()};
}

inline nlohmann::ordered_json estimate_to_json(const Estimate& est) {
  nlohmann::ordered_json root;
  auto& ji = root["I"] = nlohmann::ordered_json::array();
  for (const auto& [slot, items] : est.I) {
    for (const auto& it : items) {
      nlohmann::ordered_json entry;
      entry["ctx"] = slot_json(slot);
      if (it.is_membrane())
        entry["item"] = {{"kind", "membrane"}, {"id", it.mem}};
      else
        entry["item"] = {{"kind", "action"}, {"text", it.text}};
      ji.push_back(std::move(entry));
    }
  }
  auto& jc = root["C"] = nlohmann::ordered_json::array();
  for (const auto& [mu, recs] : est.C) {
    for (const auto& r : recs) {
      nlohmann::ordered_json rec;
      if (r.binary) {
        rec["arity"] = 2;
        rec["a"] = pretty(r.act);
        rec["muP"] = r.mu_p;
        rec["coa"] = pretty(r.coact);
        rec["muQ"] = r.mu_q;
      } else {
        rec["arity"] = 1;
        rec["a"] = pretty(r.act);
        rec["muP"] = r.mu_p;
      }
      rec["ctx"] = slot_json(r.ctx);
      jc.push_back({{"membrane", mu}, {"record", std::move(rec)}});
    }
  }
  auto& jr = root["R"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : est.R)
    jr.push_back({{"left", slot_json(a)}, {"right", slot_json(b)}});
  return root;
}

inline std::string estimate_to_string(const Estimate& est) {
  return estimate_to_json(est).dump(2) + "\n";
}

inline Estimate estimate_from_json(const nlohmann::json& root) {
  Estimate est;
  for (const auto& entry : root.at("I")) {
    Slot slot = slot_from_json(entry.at("ctx"));
    const auto& item = entry.at("item");
    if (item.at("kind") == "membrane")
      est.add(slot, Item::membrane(item.at("id").get<std::string>()));
    else
      est.add(slot, Item::action(parse_action(item.at("text").get<std::string>())));
  }
  if (root.contains("C")) {
    for (const auto& entry : root.at("C")) {
      MembraneId mu = entry.at("membrane").get<std::string>();
      const auto& rec = entry.at("record");
      Slot ctx = slot_from_json(rec.at("ctx"));
      if (rec.at("arity").get<int>() == 2) {
        est.C[mu].insert(CausalRecord::make_binary(
            parse_action(rec.at("a").get<std::string>()),
            rec.at("muP").get<std::string>(),
            parse_action(rec.at("coa").get<std::string>()),
            rec.at("muQ").get<std::string>(), ctx));
      } else {
        est.C[mu].insert(CausalRecord::make_unary(
            parse_action(rec.at("a").get<std::string>()),
            rec.at("muP").get<std::string>(), ctx));
      }
    }
  }
  if (root.contains("R")) {
    for (const auto& entry : root.at("R"))
      est.R.insert({slot_from_json(entry.at("left")), slot_from_json(entry.at("right"))});
  }
  return est;
}

// Symmetric difference of two estimates, per component, in canonical order.
struct EstimateDiff {
  std::vector<std::string> i_only_a, i_only_b;
  std::vector<std::string> c_only_a, c_only_b;
  std::vector<std::string> r_only_a, r_only_b;

  bool empty() const {
    return i_only_a.empty() && i_only_b.empty() && c_only_a.empty() &&
           c_only_b.empty() && r_only_a.empty() && r_only_b.empty();
  }
};

inline EstimateDiff diff_estimates(const Estimate& a, const Estimate& b) {
  EstimateDiff d;
  auto i_line = [](const Slot& s, const Item& it) {
    return (it.is_membrane() ? "membrane " : "action ") + it.text + " in I" + s.str();
  };
  for (const auto& [slot, items] : a.I)
    for (const auto& it : items)
      if (!b.has(slot, it)) d.i_only_a.push_back(i_line(slot, it));
  for (const auto& [slot, items] : b.I)
    for (const auto& it : items)
      if (!a.has(slot, it)) d.i_only_b.push_back(i_line(slot, it));
  for (const auto& [mu, recs] : a.C)
    for (const auto& r : recs)
      if (!b.has_record(mu, r)) d.c_only_a.push_back(r.key() + " in C(" + mu + ")");
  for (const auto& [mu, recs] : b.C)
    for (const auto& r : recs)
      if (!a.has_record(mu, r)) d.c_only_b.push_back(r.key() + " in C(" + mu + ")");
  for (const auto& p : a.R)
    if (!b.R.count(p))
      d.r_only_a.push_back(p.first.str() + " -> " + p.second.str() + " in R");
  for (const auto& p : b.R)
    if (!a.R.count(p))
      d.r_only_b.push_back(p.first.str() + " -> " + p.second.str() + " in R");
  return d;
}

}  // namespace brane
