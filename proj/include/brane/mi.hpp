#pragma once

// Identities for membranes created by reductions. Each creating rule is
// keyed by the action, the participating membranes, the created membrane's
// process parameter, and the context the rule fires in. Names are a pure
// function of the key, so independent registries agree on every label and a
// key can never collide with a source label or "*" (generated names always
// contain parentheses, which identifiers cannot).

#include <map>
#include <stdexcept>
#include <string>

#include "brane/ast.hpp"

namespace brane {

struct MiKey {
  enum class Op { Mate, Bud, Drip, Phago, Pino };
  Op op{Op::Mate};
  std::string channel;  // empty for Drip/Pino
  MembraneId mu_p;      // membrane carrying the action
  MembraneId mu_q;      // membrane carrying the co-action; empty for Drip/Pino
  std::string rho;      // canonical print of the created membrane's process; empty for Mate
  Slot ctx;

  auto operator<=>(const MiKey&) const = default;

  std::string name() const {
    switch (op) {
      case Op::Mate:
        return "mate:" + channel + "(" + mu_p + "," + mu_q + ")@" + ctx.str();
      case Op::Bud:
        return "bud:" + channel + "(" + mu_p + "," + mu_q + ";" + rho + ")@" + ctx.str();
      case Op::Drip:
        return "drip(" + mu_p + ";" + rho + ")@" + ctx.str();
      case Op::Phago:
        return "phago:" + channel + "(" + mu_p + "," + mu_q + ";" + rho + ")@" + ctx.str();
      case Op::Pino:
        return "pino(" + mu_p + ";" + rho + ")@" + ctx.str();
    }
    return "?";
  }

  static MiKey mate(std::string ch, MembraneId p, MembraneId q, Slot ctx) {
    return {Op::Mate, std::move(ch), std::move(p), std::move(q), "", std::move(ctx)};
  }
  static MiKey bud(std::string ch, MembraneId p, MembraneId q, std::string rho, Slot ctx) {
    return {Op::Bud, std::move(ch), std::move(p), std::move(q), std::move(rho), std::move(ctx)};
  }
  static MiKey drip(MembraneId p, std::string rho, Slot ctx) {
    return {Op::Drip, "", std::move(p), "", std::move(rho), std::move(ctx)};
  }
  static MiKey phago(std::string ch, MembraneId p, MembraneId q, std::string rho, Slot ctx) {
    return {Op::Phago, std::move(ch), std::move(p), std::move(q), std::move(rho), std::move(ctx)};
  }
  static MiKey pino(MembraneId p, std::string rho, Slot ctx) {
    return {Op::Pino, "", std::move(p), "", std::move(rho), std::move(ctx)};
  }
};

class MiRegistry {
 public:
  const MembraneId& fresh(const MiKey& key) {
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    MembraneId id = key.name();
    auto [kit, inserted] = by_name_.emplace(id, key);
    if (!inserted && !(kit->second == key))
      throw std::logic_error("membrane identity collision: " + id);
    return ids_.emplace(key, std::move(id)).first->second;
  }

  size_t size() const { return ids_.size(); }

  const std::map<MiKey, MembraneId>& entries() const { return ids_; }

  bool was_registered(const MiKey& key) const { return ids_.count(key) > 0; }

  // True if some mate identity was minted for exactly this participant pair,
  // in either orientation and any context.
  bool has_mate_between(const MembraneId& a, const MembraneId& b) const {
    for (const auto& [k, id] : ids_) {
      if (k.op != MiKey::Op::Mate) continue;
      if ((k.mu_p == a && k.mu_q == b) || (k.mu_p == b && k.mu_q == a)) return true;
    }
    return false;
  }

 private:
  std::map<MiKey, MembraneId> ids_;
  std::map<MembraneId, MiKey> by_name_;
};

}  // namespace brane
