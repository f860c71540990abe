#pragma once

// Random structural-congruence rearrangements, used to exercise invariance
// of the analysis. Applies unit, commutativity, associativity and the
// replication distribution/collapse laws in both directions; erases 0<>@mu
// occurrences but never introduces membranes with labels the term does not
// already justify. Replication unfolding is excluded (it is a semantics
// step, not a normal-form law).

#include <algorithm>
#include <random>
#include <vector>

#include "brane/ast.hpp"

namespace brane {

namespace detail {

inline bool coin(std::mt19937& rng, double p = 0.5) {
  return std::uniform_real_distribution<>(0.0, 1.0)(rng) < p;
}

template <typename T>
T rebuild_chain(std::vector<T> parts, std::mt19937& rng, T unit,
                T (*join)(T, T)) {
  if (parts.empty()) return unit;
  std::shuffle(parts.begin(), parts.end(), rng);
  if (coin(rng, 0.3)) parts.push_back(unit);  // unit laws hold in both directions
  while (parts.size() > 1) {
    // join a random adjacent pair: random re-association
    size_t i = std::uniform_int_distribution<size_t>(0, parts.size() - 2)(rng);
    T merged = coin(rng) ? join(parts[i], parts[i + 1]) : join(parts[i + 1], parts[i]);
    parts[i] = std::move(merged);
    parts.erase(parts.begin() + static_cast<long>(i + 1));
  }
  return parts[0];
}

inline ProcessPtr shuffle_proc(const ProcessPtr& p, std::mt19937& rng);

inline void proc_parts(const ProcessPtr& p, std::vector<ProcessPtr>& out,
                       std::mt19937& rng) {
  if (!p || p->kind == Process::Kind::Zero) return;
  if (p->kind == Process::Kind::Par) {
    proc_parts(p->left, out, rng);
    proc_parts(p->right, out, rng);
    return;
  }
  if (p->kind == Process::Kind::Bang) {
    ProcessPtr body = shuffle_proc(p->body, rng);
    if (body->kind == Process::Kind::Zero) return;  // !0 == 0
    if (body->kind == Process::Kind::Par && coin(rng)) {
      // !(s|t) == !s | !t
      std::vector<ProcessPtr> inner;
      proc_parts(body, inner, rng);
      for (auto& q : inner) out.push_back(Process::bang(q));
      return;
    }
    if (body->kind == Process::Kind::Bang) body = body->body;  // !!s == !s
    ProcessPtr banged = Process::bang(body);
    if (coin(rng, 0.2)) banged = Process::bang(banged);  // !s == !!s
    out.push_back(banged);
    return;
  }
  // prefix: congruence descends into the continuation only
  ProcessPtr cont = shuffle_proc(p->cont, rng);
  out.push_back(Process::seq(p->act, cont));
}

inline ProcessPtr shuffle_proc(const ProcessPtr& p, std::mt19937& rng) {
  std::vector<ProcessPtr> parts;
  proc_parts(p, parts, rng);
  return rebuild_chain<ProcessPtr>(std::move(parts), rng, Process::zero(), &Process::par);
}

inline SystemPtr shuffle_sys(const SystemPtr& s, std::mt19937& rng);

inline void sys_parts(const SystemPtr& s, std::vector<SystemPtr>& out,
                      std::mt19937& rng) {
  if (!s || s->kind == System::Kind::Diamond) return;
  if (s->kind == System::Kind::Compose) {
    sys_parts(s->left, out, rng);
    sys_parts(s->right, out, rng);
    return;
  }
  if (s->kind == System::Kind::Bang) {
    SystemPtr body = shuffle_sys(s->body, rng);
    if (body->kind == System::Kind::Diamond) return;  // !zero == zero
    if (body->kind == System::Kind::Compose && coin(rng)) {
      std::vector<SystemPtr> inner;
      sys_parts(body, inner, rng);
      for (auto& q : inner) out.push_back(System::bang(q));
      return;
    }
    if (body->kind == System::Kind::Bang) body = body->body;
    SystemPtr banged = System::bang(body);
    if (coin(rng, 0.2)) banged = System::bang(banged);
    out.push_back(banged);
    return;
  }
  // membrane
  ProcessPtr sigma = shuffle_proc(s->proc, rng);
  SystemPtr content = shuffle_sys(s->content, rng);
  if (sigma->kind == Process::Kind::Zero &&
      content->kind == System::Kind::Diamond && coin(rng)) {
    return;  // 0<>@mu == zero
  }
  out.push_back(System::membrane(sigma, content, s->label));
}

inline SystemPtr shuffle_sys(const SystemPtr& s, std::mt19937& rng) {
  std::vector<SystemPtr> parts;
  sys_parts(s, parts, rng);
  return rebuild_chain<SystemPtr>(std::move(parts), rng, System::diamond(),
                                  &System::compose);
}

}  // namespace detail

inline SystemPtr rearranged(const SystemPtr& term, std::mt19937& rng) {
  return detail::shuffle_sys(term, rng);
}

inline SystemPtr rearranged(const SystemPtr& term, unsigned seed) {
  std::mt19937 rng(seed);
  return rearranged(term, rng);
}

}  // namespace brane
