#pragma once

// End-to-end verification suites run against a term and its estimate:
// every reachable state stays described, every concrete containment fact is
// inside I, congruent rearrangements stay described, and statically-true
// properties hold dynamically. The bounded exploration is the ground truth.

#include <random>
#include <string>
#include <vector>

#include "brane/cfa.hpp"
#include "brane/congruence.hpp"
#include "brane/properties.hpp"
#include "brane/semantics.hpp"

namespace brane {

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyOptions {
  int depth = 4;
  int unfold_budget = 2;
  size_t state_cap = 10000;
  Mode mode = Mode::Sound;
  int rearrangements = 100;
  unsigned seed = 1;
};

inline std::vector<SuiteResult> run_verification(const SystemPtr& term,
                                                 const Estimate& est,
                                                 const std::vector<PropertyQuery>& queries,
                                                 const VerifyOptions& opt = {}) {
  std::vector<SuiteResult> out;
  TransitionSystem ts =
      explore(term, {.depth = opt.depth, .unfold_budget = opt.unfold_budget,
                     .state_cap = opt.state_cap});

  {
    SuiteResult r{"subject-reduction", true,
                  std::to_string(ts.states.size()) + " states"};
    for (const auto& st : ts.states) {
      ValidationReport v = validate(est, st.term, opt.mode);
      if (!v.valid()) {
        r.pass = false;
        r.detail = "state " + st.key + ": " + v.violations[0].clause + " " +
                   v.violations[0].detail;
        break;
      }
    }
    out.push_back(std::move(r));
  }

  {
    auto facts = dynamic_containments(ts);
    SuiteResult r{"soundness-containment", true,
                  std::to_string(facts.size()) + " facts"};
    for (const auto& [slot, item] : facts) {
      if (!est.has(slot, item)) {
        r.pass = false;
        r.detail = item.text + " reached " + slot.str() + " but is not in I";
        break;
      }
    }
    out.push_back(std::move(r));
  }

  {
    SuiteResult r{"congruence-invariance", true,
                  std::to_string(opt.rearrangements) + " rearrangements"};
    std::mt19937 rng(opt.seed);
    for (int i = 0; i < opt.rearrangements; ++i) {
      SystemPtr moved = rearranged(term, rng);
      ValidationReport v = validate(est, moved, opt.mode);
      if (!v.valid()) {
        r.pass = false;
        r.detail = "rearrangement " + pretty(moved) + ": " + v.violations[0].detail;
        break;
      }
    }
    out.push_back(std::move(r));
  }

  {
    SuiteResult r{"property-transfer", true, ""};
    int checked = 0, skipped = 0;
    for (const auto& q : queries) {
      if (!check_static(est, q).holds) continue;
      DynamicVerdict d = check_dynamic(ts, q);
      if (d.inconclusive) {
        ++skipped;
        continue;
      }
      ++checked;
      if (!d.holds) {
        r.pass = false;
        r.detail = q.str() + " holds statically but fails dynamically";
        break;
      }
    }
    if (r.pass)
      r.detail = std::to_string(checked) + " static properties transferred" +
                 (skipped ? " (" + std::to_string(skipped) + " inconclusive)" : "");
    out.push_back(std::move(r));
  }

  return out;
}

// Default query set when none is supplied: every capability against every
// membrane of the estimate's universe.
inline std::vector<PropertyQuery> synthesized_queries(const Estimate& est) {
  std::set<std::string> acts;
  std::vector<PropertyQuery> out;
  for (const auto& [slot, items] : est.I)
    for (const auto& it : items)
      if (!it.is_membrane()) acts.insert(it.text);
  for (const auto& mu : est.universe())
    for (const auto& a : acts)
      out.push_back(PropertyQuery::never_on(parse_action(a), mu));
  return out;
}

}  // namespace brane
