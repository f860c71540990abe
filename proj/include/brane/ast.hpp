#pragma once

// Terms of the brane calculus: systems of nested membranes, membrane
// processes, and the MBD/PEP interaction actions. All nodes are immutable
// and shared; every operation over them is pure.

#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace brane {

// Membrane identities are opaque strings. Source labels are identifiers;
// derived membranes get structural names minted by the MiRegistry. The
// distinguished ideal outermost membrane is "*", which can never label a
// membrane in a term.
using MembraneId = std::string;
inline const MembraneId kRoot = "*";

// Addressing unit of the analysis: membrane m with parent p and
// grandparent gp. Top-level membranes live under (*,*) and the top level
// itself is the slot (*,*,*).
struct Slot {
  MembraneId gp, p, m;

  auto operator<=>(const Slot&) const = default;

  std::string str() const { return "(" + gp + "," + p + "," + m + ")"; }
};

enum class ActKind { Mate, CoMate, Bud, CoBud, Drip, Phago, CoPhago, Exo, CoExo, Pino };

// The co-action forms that carry a process for the membrane they create.
inline bool act_carries_process(ActKind k) {
  return k == ActKind::CoBud || k == ActKind::Drip || k == ActKind::CoPhago ||
         k == ActKind::Pino;
}

inline bool act_has_channel(ActKind k) {
  return k != ActKind::Drip && k != ActKind::Pino;
}

inline const char* act_name(ActKind k) {
  switch (k) {
    case ActKind::Mate: return "mate";
    case ActKind::CoMate: return "comate";
    case ActKind::Bud: return "bud";
    case ActKind::CoBud: return "cobud";
    case ActKind::Drip: return "drip";
    case ActKind::Phago: return "phago";
    case ActKind::CoPhago: return "cophago";
    case ActKind::Exo: return "exo";
    case ActKind::CoExo: return "coexo";
    case ActKind::Pino: return "pino";
  }
  return "?";
}

struct Process;
using ProcessPtr = std::shared_ptr<const Process>;

struct Action {
  ActKind kind{ActKind::Mate};
  std::string channel;  // empty for drip/pino
  ProcessPtr arg;       // only on cobud/drip/cophago/pino; may be null = wildcard in queries

  Action() = default;
  Action(ActKind k, std::string ch, ProcessPtr a = nullptr)
      : kind(k), channel(std::move(ch)), arg(std::move(a)) {}
};

// Membrane processes: 0, parallel composition, replication, prefix.
struct Process {
  enum class Kind { Zero, Par, Bang, Seq };
  Kind kind{Kind::Zero};
  ProcessPtr left, right;  // Par
  ProcessPtr body;         // Bang
  Action act;              // Seq
  ProcessPtr cont;         // Seq

  static ProcessPtr zero() {
    static const ProcessPtr z = std::make_shared<Process>();
    return z;
  }
  static ProcessPtr par(ProcessPtr l, ProcessPtr r) {
    auto p = std::make_shared<Process>();
    p->kind = Kind::Par;
    p->left = std::move(l);
    p->right = std::move(r);
    return p;
  }
  static ProcessPtr bang(ProcessPtr b) {
    auto p = std::make_shared<Process>();
    p->kind = Kind::Bang;
    p->body = std::move(b);
    return p;
  }
  static ProcessPtr seq(Action a, ProcessPtr k) {
    auto p = std::make_shared<Process>();
    p->kind = Kind::Seq;
    p->act = std::move(a);
    p->cont = std::move(k);
    return p;
  }
};

struct System;
using SystemPtr = std::shared_ptr<const System>;

// Systems: the inert system, composition, replication, and membranes
// sigma<P>@mu. Every membrane carries a label, unique per input term.
struct System {
  enum class Kind { Diamond, Compose, Bang, Membrane };
  Kind kind{Kind::Diamond};
  SystemPtr left, right;  // Compose
  SystemPtr body;         // Bang
  ProcessPtr proc;        // Membrane
  SystemPtr content;      // Membrane
  MembraneId label;       // Membrane

  static SystemPtr diamond() {
    static const SystemPtr d = std::make_shared<System>();
    return d;
  }
  static SystemPtr compose(SystemPtr l, SystemPtr r) {
    auto s = std::make_shared<System>();
    s->kind = Kind::Compose;
    s->left = std::move(l);
    s->right = std::move(r);
    return s;
  }
  static SystemPtr bang(SystemPtr b) {
    auto s = std::make_shared<System>();
    s->kind = Kind::Bang;
    s->body = std::move(b);
    return s;
  }
  static SystemPtr membrane(ProcessPtr sigma, SystemPtr content, MembraneId label) {
    auto s = std::make_shared<System>();
    s->kind = Kind::Membrane;
    s->proc = std::move(sigma);
    s->content = std::move(content);
    s->label = std::move(label);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Printing. pretty() reproduces concrete syntax that reparses to the same
// AST; parentheses are inserted only where the term shape requires them.

std::string pretty(const ProcessPtr& p);
std::string pretty(const SystemPtr& s);

inline std::string pretty(const Action& a) {
  std::string out = act_name(a.kind);
  const bool ch = act_has_channel(a.kind);
  const bool pr = act_carries_process(a.kind);
  out += "(";
  if (ch) out += a.channel;
  if (pr) {
    if (ch) out += ",";
    out += a.arg ? pretty(a.arg) : std::string("_");
  }
  out += ")";
  return out;
}

inline std::string pretty(const ProcessPtr& p) {
  if (!p || p->kind == Process::Kind::Zero) return "0";
  switch (p->kind) {
    case Process::Kind::Par: {
      auto wrap = [](const ProcessPtr& q) {
        // left operand of | may itself be a flat | chain
        return pretty(q);
      };
      std::string l = p->left->kind == Process::Kind::Par
                          ? wrap(p->left)
                          : pretty(p->left);
      std::string r = p->right->kind == Process::Kind::Par
                          ? "(" + pretty(p->right) + ")"
                          : pretty(p->right);
      return l + "|" + r;
    }
    case Process::Kind::Bang: {
      std::string b = pretty(p->body);
      if (p->body->kind == Process::Kind::Par) b = "(" + b + ")";
      return "!" + b;
    }
    case Process::Kind::Seq: {
      std::string head = pretty(p->act);
      if (p->cont && p->cont->kind != Process::Kind::Zero) {
        std::string k = pretty(p->cont);
        if (p->cont->kind == Process::Kind::Par) k = "(" + k + ")";
        return head + "." + k;
      }
      return head;
    }
    default: return "0";
  }
}

inline std::string pretty(const SystemPtr& s) {
  if (!s || s->kind == System::Kind::Diamond) return "zero";
  switch (s->kind) {
    case System::Kind::Compose: {
      std::string l = pretty(s->left);
      std::string r = s->right->kind == System::Kind::Compose
                          ? "(" + pretty(s->right) + ")"
                          : pretty(s->right);
      return l + " || " + r;
    }
    case System::Kind::Bang: {
      std::string b = pretty(s->body);
      // a bare "!" before a membrane would bind to its process
      if (s->body->kind != System::Kind::Bang) b = "(" + b + ")";
      return "!" + b;
    }
    case System::Kind::Membrane: {
      std::string inner =
          s->content->kind == System::Kind::Diamond ? "" : pretty(s->content);
      return pretty(s->proc) + "<" + inner + ">@" + s->label;
    }
    default: return "zero";
  }
}

inline bool same_term(const SystemPtr& a, const SystemPtr& b) {
  return pretty(a) == pretty(b);
}
inline bool same_proc(const ProcessPtr& a, const ProcessPtr& b) {
  return pretty(a) == pretty(b);
}

// Collects the labels of every membrane occurrence, outermost first.
inline void collect_labels(const SystemPtr& s, std::vector<MembraneId>& out) {
  if (!s) return;
  switch (s->kind) {
    case System::Kind::Compose:
      collect_labels(s->left, out);
      collect_labels(s->right, out);
      break;
    case System::Kind::Bang:
      collect_labels(s->body, out);
      break;
    case System::Kind::Membrane:
      out.push_back(s->label);
      collect_labels(s->content, out);
      break;
    default: break;
  }
}

}  // namespace brane
