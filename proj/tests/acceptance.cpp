// Acceptance suite: exercises the shipped corpus end to end and prints one
// PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "brane/cfa.hpp"
#include "brane/congruence.hpp"
#include "brane/parse.hpp"
#include "brane/properties.hpp"
#include "brane/semantics.hpp"
#include "brane/verify.hpp"
#include "json.hpp"
#include "testutil.hpp"

using namespace brane;

namespace {

const std::string kPQ = "mate:n(muP,muQ)@(*,*,*)";
const std::string kPH = "phago:p(muVirus,muMemb;mate(m))@(*,*,*)";
const std::string kPHENDO = "mate:m(" + kPH + ",muEndo)@(*,*,muMemb)";
const std::string kR2 = "bud:o(muP1," + kPQ + ";mate(r2))@(*,*,*)";

const char* kCorpus[] = {"example1.brane", "example2.brane", "viral.brane",
                         "drip-drip.brane", "mate-drip.brane", "bud-drip.brane",
                         "sync-drip.brane"};

int failures = 0;

void criterion(int number, const std::string& name, const std::function<std::string()>& body) {
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  bool ok = detail.empty();
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " " << number << " " << name;
  if (!ok) std::cout << " -- " << detail;
  std::cout << "\n";
}

std::string golden_missing(const std::string& brane, const std::string& golden,
                           Mode mode = Mode::Sound) {
  Estimate est = solve(parse(corpus_file(brane)), {.mode = mode});
  Estimate want = estimate_from_json(nlohmann::json::parse(corpus_file(golden)));
  EstimateDiff d = diff_estimates(want, est);
  std::string out;
  for (const auto& m : d.i_only_a) out += "missing " + m + "; ";
  for (const auto& m : d.c_only_a) out += "missing " + m + "; ";
  for (const auto& m : d.r_only_a) out += "missing " + m + "; ";
  return out;
}

std::string queries_for(const std::string& brane) {
  return brane.substr(0, brane.find('.')) + ".queries";
}

bool has_queries(const std::string& brane) {
  std::ifstream f(corpus_path(queries_for(brane)));
  return f.good();
}

}  // namespace

int main() {
  criterion(1, "example-1 golden reproduction", [] {
    std::string missing = golden_missing("example1.brane", "example1.expected.json");
    if (!missing.empty()) return missing;
    // the over-approximation rows must be present literally
    Estimate est = solve(parse(corpus_file("example1.brane")));
    const std::string b0 = "bud:m(muP0," + kPQ + ";mate(r1))@(*,*,*)";
    const std::string b1 = "bud:m(muP0,muP;mate(r1))@(*,*,*)";
    if (!est.has(Slot{"*", "*", kPQ}, Item::action(parse_action("mate(n)"))))
      return std::string("inherited mate prefix missing on the merged membrane");
    for (const std::string& b : {b0, b1})
      if (!est.has(Slot{"*", b, "muP0"}, Item::action(parse_action("bud(m)"))))
        return "inherited bud prefix missing under " + b;
    return std::string();
  });

  criterion(2, "example-2 golden reproduction", [] {
    std::string missing = golden_missing("example2.brane", "example2.expected.json");
    if (!missing.empty()) return missing;
    Estimate est = solve(parse(corpus_file("example2.brane")));
    size_t recs = 0;
    for (const auto& [mu, rs] : est.C) recs += rs.size();
    if (recs < 6) return std::string("fewer than six creation records");
    return std::string();
  });

  criterion(3, "viral golden reproduction and negative facts", [] {
    std::string missing = golden_missing("viral.brane", "viral.expected.json");
    if (!missing.empty()) return missing;
    Estimate est = solve(parse(corpus_file("viral.brane")));
    if (!est.has(Slot{"*", "*", "muMemb"}, Item::membrane("muNucap")))
      return std::string("released nucleocapsid not predicted");
    if (est.has(Slot{"*", "muMemb", kPH}, Item::action(parse_action("coexo(e)"))))
      return std::string("coexo wrongly predicted on the wrapping vesicle");
    if (est.has(Slot{"*", "muMemb", "muEndo"}, Item::membrane("muVirus")))
      return std::string("virus wrongly predicted inside the endosome");
    return std::string();
  });

  criterion(4, "subject reduction over the corpus", [] {
    for (const char* name : kCorpus) {
      SystemPtr term = parse(corpus_file(name));
      Estimate est = solve(term);
      TransitionSystem ts = explore(term, {.depth = 4, .unfold_budget = 2});
      for (const auto& st : ts.states) {
        ValidationReport v = validate(est, st.term);
        if (!v.valid())
          return std::string(name) + " state " + st.key + ": " + v.violations[0].detail;
      }
    }
    return std::string();
  });

  criterion(5, "soundness containment over the corpus", [] {
    for (const char* name : kCorpus) {
      SystemPtr term = parse(corpus_file(name));
      Estimate est = solve(term);
      auto facts = dynamic_containments(explore(term, {.depth = 4, .unfold_budget = 2}));
      for (const auto& [slot, item] : facts)
        if (!est.has(slot, item))
          return std::string(name) + ": " + item.text + " escaped at " + slot.str();
    }
    return std::string();
  });

  criterion(6, "congruence invariance, 100 rearrangements each", [] {
    std::mt19937 rng(42);
    for (const char* name : kCorpus) {
      SystemPtr term = parse(corpus_file(name));
      Estimate est = solve(term);
      for (int i = 0; i < 100; ++i) {
        SystemPtr moved = rearranged(term, rng);
        ValidationReport v = validate(est, moved);
        if (!v.valid())
          return std::string(name) + " rearrangement " + std::to_string(i) + ": " +
                 v.violations[0].detail;
      }
    }
    return std::string();
  });

  criterion(7, "static-to-dynamic transfer with a strictness witness", [] {
    bool witness = false;
    for (const char* name : kCorpus) {
      if (!has_queries(name)) continue;
      SystemPtr term = parse(corpus_file(name));
      Estimate est = solve(term);
      TransitionSystem ts = explore(term, {.depth = 6, .unfold_budget = 2});
      if (ts.truncated) return std::string(name) + ": exploration unexpectedly truncated";
      for (const auto& q : parse_queries(corpus_file(queries_for(name)))) {
        StaticVerdict sv = check_static(est, q);
        DynamicVerdict dv = check_dynamic(ts, q);
        if (sv.holds && !dv.holds)
          return q.str() + " holds statically but fails dynamically";
        if (!sv.holds && dv.holds) witness = true;
      }
    }
    if (!witness)
      return std::string("no dynamically-true/statically-false witness in the query set");
    // the named witness itself
    Estimate est = solve(parse(corpus_file("example1.brane")));
    PropertyQuery w = PropertyQuery::never_on(parse_action("mate(n)"), kPQ);
    TransitionSystem ts = explore(parse(corpus_file("example1.brane")), {.depth = 6});
    if (check_static(est, w).holds || !check_dynamic(ts, w).holds)
      return std::string("the merged-membrane witness does not behave as required");
    return std::string();
  });

  criterion(8, "incompatibility blocks the spent fusion", [] {
    Estimate est = solve(parse(corpus_file("example1.brane")));
    if (!est.R.count({Slot{"*", "*", "muQ"}, Slot{"*", "*", kPQ}}))
      return std::string("((*,*,muQ),(*,*,PQ)) not in R");
    if (!r_blocks(est, Slot{"*", "*", "muQ"}, Slot{"*", "*", kPQ}))
      return std::string("r_blocks misses the recorded pair");
    for (const auto& [id, key] : est.minted)
      if (key.op == MiKey::Op::Mate &&
          ((key.mu_p == kPQ && key.mu_q == "muQ") || (key.mu_p == "muQ" && key.mu_q == kPQ)))
        return std::string("a fusion between the merged membrane and muQ was minted: ") + id;
    return std::string();
  });

  criterion(9, "causality regressions", [] {
    // (a) both prefixed drips are recorded, whatever their order
    for (const char* src : {"drip(mate(s)).drip(mate(r)) <>@muP",
                            "drip(mate(r)).drip(mate(s)) <>@muP"}) {
      Estimate est = solve(parse(src));
      if (causes_of(est, "drip(muP;mate(s))@(*,*,*)").empty() ||
          causes_of(est, "drip(muP;mate(r))@(*,*,*)").empty())
        return std::string("a prefixed drip lost its record for: ") + src;
    }
    // (b) the bud record names the merged membrane, which the mate record explains
    Estimate e1 = solve(parse(corpus_file("example1.brane")));
    const auto& r2 = causes_of(e1, kR2);
    if (r2.size() != 1) return std::string("expected exactly one record for the o-bud");
    bool names_pq = false;
    for (const auto& m : r2.begin()->mentioned()) names_pq |= m == kPQ;
    if (!names_pq) return std::string("the o-bud record does not involve the merged membrane");
    bool pq_explained = false;
    for (const auto& rec : causes_of(e1, kPQ))
      pq_explained |= pretty(rec.act) == "mate(n)" && rec.mu_p == "muP" && rec.mu_q == "muQ";
    if (!pq_explained) return std::string("the merged membrane lacks its mate record");
    // (c) the fused vesicle's chain passes through the engulfment
    Estimate v = solve(parse(corpus_file("viral.brane")));
    ChainResult chains = causal_chain(v, kPHENDO);
    if (chains.chains.empty()) return std::string("no causal chain for the fused vesicle");
    for (const auto& c : chains.chains) {
      bool through_phago = false;
      for (const auto& link : c.links)
        through_phago |= pretty(link.act) == "phago(p)" && link.mu_p == "muVirus";
      if (!through_phago)
        return std::string("a chain for the fused vesicle skips the engulfment");
    }
    return std::string();
  });

  criterion(10, "byte-identical analyses across runs", [] {
    for (const char* name : kCorpus) {
      std::string a = estimate_to_string(solve(parse(corpus_file(name))));
      std::string b = estimate_to_string(solve(parse(corpus_file(name))));
      if (a != b) return std::string(name) + ": analysis output differs between runs";
    }
    return std::string();
  });

  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
