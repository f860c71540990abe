#include <set>
#include <string>

#include "brane/parse.hpp"
#include "brane/semantics.hpp"
#include "doctest.h"
#include "json.hpp"
#include "testutil.hpp"

using namespace brane;

namespace {

const std::string kPQ = "mate:n(muP,muQ)@(*,*,*)";
// bud results of example 1; the co-side differs between the two firing orders
const std::string kB0 = "bud:m(muP0," + kPQ + ";mate(r1))@(*,*,*)";
const std::string kB1 = "bud:m(muP0,muP;mate(r1))@(*,*,*)";
const std::string kR2 = "bud:o(muP1," + kPQ + ";mate(r2))@(*,*,*)";

std::set<std::string> state_keys(const TransitionSystem& ts) {
  std::set<std::string> out;
  for (const auto& s : ts.states) out.insert(s.key);
  return out;
}

std::set<std::string> labels_in_states(const TransitionSystem& ts) {
  std::set<std::string> out;
  for (const auto& s : ts.states) {
    std::vector<MembraneId> ls;
    collect_labels(s.term, ls);
    out.insert(ls.begin(), ls.end());
  }
  return out;
}

}  // namespace

TEST_CASE("the inert system has no redexes") {
  MiRegistry reg;
  CHECK(step(canonicalize(System::diamond()), reg, 2).empty());
}

TEST_CASE("a single drip yields exactly one successor") {
  MiRegistry reg;
  auto succs = step(canonicalize(parse(corpus_file("drip-drip.brane"))), reg, 2);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].first.rule == Redex::Rule::Drip);
  CHECK(succs[0].first.principal == "muP");
  CHECK(succs[0].first.ctx == Slot{"*", "*", "*"});
  // the new membrane sits beside muP and carries the drip parameter
  CHECK(succs[0].second.key ==
        "drip(mate(r))<>@muP || mate(s)<>@drip(muP;mate(s))@(*,*,*)");
}

TEST_CASE("example 1 steps by mate to the merged membrane") {
  MiRegistry reg;
  auto succs = step(canonicalize(parse(corpus_file("example1.brane"))), reg, 2);
  bool found_mate = false;
  for (const auto& [redex, succ] : succs) {
    if (redex.rule != Redex::Rule::Mate) continue;
    found_mate = true;
    CHECK(redex.channel == "n");
    CHECK(redex.principal == "muP");
    CHECK(redex.co == "muQ");
    CHECK(succ.key.find(kPQ) != std::string::npos);
    CHECK(reg.was_registered(MiKey::mate("n", "muP", "muQ", Slot{"*", "*", "*"})));
  }
  CHECK(found_mate);
}

TEST_CASE("example 1 exploration reaches both bud orders") {
  TransitionSystem ts = explore(parse(corpus_file("example1.brane")), {.depth = 3});
  CHECK(!ts.truncated);
  CHECK(ts.states.size() == 8);
  CHECK(ts.edges.size() == 8);

  // terminal states differ only in the identity the bud minted
  std::string p3 = "mate(r1)<>@" + kB0 + " || mate(r2)<>@" + kR2;
  std::string p3b = "mate(r1)<>@" + kB1 + " || mate(r2)<>@" + kR2;
  auto keys = state_keys(ts);
  CHECK(keys.count(p3));
  CHECK(keys.count(p3b));

  // the bud on o is not possible in the initial state
  for (const auto& e : ts.edges)
    if (e.src == 0) CHECK(e.redex.key().find("bud@o") == std::string::npos);
}

TEST_CASE("example 2 exploration shows exactly the three interleavings") {
  TransitionSystem ts = explore(parse(corpus_file("example2.brane")), {.depth = 3});
  CHECK(!ts.truncated);
  // hand enumeration: initial, two first-step states, three second-step
  // states, and the single fully-reduced state
  CHECK(ts.states.size() == 7);
  CHECK(ts.edges.size() == 8);

  std::set<std::string> maximal_paths;
  // depth-3 paths from the initial state
  for (const auto& e1 : ts.edges)
    if (e1.src == 0)
      for (const auto& e2 : ts.edges)
        if (e2.src == e1.dst)
          for (const auto& e3 : ts.edges)
            if (e3.src == e2.dst)
              maximal_paths.insert(e1.redex.label() + ";" + e2.redex.label() + ";" +
                                   e3.redex.label());
  CHECK(maximal_paths == std::set<std::string>{"mate@n;mate@m;mate@o",
                                               "mate@n;mate@o;mate@m",
                                               "mate@o;mate@n;mate@m"});
  // every interleaving drains the system completely
  CHECK(state_keys(ts).count("zero"));
}

TEST_CASE("depth zero explorations have one state") {
  TransitionSystem quiet = explore(parse("mate(x)<>@m1"), {.depth = 0});
  CHECK(quiet.states.size() == 1);
  CHECK(!quiet.truncated);  // no redex anywhere

  TransitionSystem busy = explore(parse(corpus_file("example1.brane")), {.depth = 0});
  CHECK(busy.states.size() == 1);
  CHECK(busy.truncated);  // a mate was available but the depth cut it off
}

TEST_CASE("explorations are deterministic including minted labels") {
  SystemPtr term = parse(corpus_file("example2.brane"));
  TransitionSystem a = explore(term, {.depth = 4});
  TransitionSystem b = explore(term, {.depth = 4});
  REQUIRE(a.states.size() == b.states.size());
  for (size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i].key == b.states[i].key);
  REQUIRE(a.edges.size() == b.edges.size());
  for (size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].src == b.edges[i].src);
    CHECK(a.edges[i].dst == b.edges[i].dst);
    CHECK(a.edges[i].redex.key() == b.edges[i].redex.key());
  }
}

TEST_CASE("identity generation is memoized and injective") {
  MiRegistry reg;
  MiKey k1 = MiKey::mate("n", "a", "b", Slot{"*", "*", "*"});
  MiKey k2 = MiKey::mate("n", "b", "a", Slot{"*", "*", "*"});
  const MembraneId& id1 = reg.fresh(k1);
  CHECK(reg.fresh(k1) == id1);
  CHECK(reg.fresh(k2) != id1);
  MiKey k3 = MiKey::bud("n", "a", "b", "0", Slot{"*", "*", "*"});
  MiKey k4 = MiKey::bud("n", "a", "b", "mate(x)", Slot{"*", "*", "*"});
  CHECK(reg.fresh(k3) != reg.fresh(k4));
  CHECK(reg.size() == 4);
  // replaying every key yields the same identity
  for (const auto& [k, id] : std::map<MiKey, MembraneId>(reg.entries()))
    CHECK(reg.fresh(k) == id);
}

TEST_CASE("canonically equal inputs produce identical successor sets") {
  SystemPtr a = parse(corpus_file("example1.brane"));
  SystemPtr b = parse(
      "comate(n)|cobud(o,mate(r2)) <>@muQ || "
      "cobud(m,mate(r1))|mate(n) < bud(o)<>@muP1 || bud(m)<>@muP0 > @muP");
  REQUIRE(canonicalize(a).key == canonicalize(b).key);
  MiRegistry ra, rb;
  auto sa = step(canonicalize(a), ra, 2);
  auto sb = step(canonicalize(b), rb, 2);
  REQUIRE(sa.size() == sb.size());
  for (size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].first.key() == sb[i].first.key());
    CHECK(sa[i].second.key == sb[i].second.key);
  }
}

TEST_CASE("a completed exploration uses finitely many identities") {
  for (const char* name : {"example1.brane", "example2.brane", "viral.brane"}) {
    SystemPtr term = parse(corpus_file(name));
    MiRegistry reg;
    TransitionSystem ts = explore(term, {.depth = 6}, reg);
    CAPTURE(std::string(name));
    CHECK(!ts.truncated);
    std::set<std::string> sources;
    {
      std::vector<MembraneId> ls;
      collect_labels(term, ls);
      sources.insert(ls.begin(), ls.end());
    }
    std::set<std::string> expected = sources;
    for (const auto& [k, id] : reg.entries()) expected.insert(id);
    std::set<std::string> seen = labels_in_states(ts);
    // every identity in a state is a source label or a registry entry;
    // minted identities may be invisible when the membrane they name ends
    // up with an empty process and no content (its occurrences are erased
    // by the normal form)
    for (const auto& l : seen) CHECK(expected.count(l));
    for (const auto& s : sources) CHECK(seen.count(s));
  }
}

TEST_CASE("replication materializes copies under the unfold budget") {
  SystemPtr term = parse("!(mate(n)|comate(n)<>@a)");
  MiRegistry reg;
  bool hit = false;
  auto succs = step(canonicalize(term), reg, 2, &hit);
  REQUIRE(succs.size() == 1);  // the two copies mate with each other
  CHECK(succs[0].first.principal == "a");
  CHECK(succs[0].first.co == "a");
  CHECK(reg.was_registered(MiKey::mate("n", "a", "a", Slot{"*", "*", "*"})));

  // with budget 1 the same redex is cut off and reported
  MiRegistry reg1;
  bool hit1 = false;
  CHECK(step(canonicalize(term), reg1, 1, &hit1).empty());
  CHECK(hit1);

  TransitionSystem ts = explore(term, {.depth = 1, .unfold_budget = 1});
  CHECK(ts.truncated);
}

TEST_CASE("the state cap aborts distinctly from truncation") {
  CHECK_THROWS_AS(explore(parse(corpus_file("example1.brane")),
                          ExploreOptions{.depth = 3, .state_cap = 3}),
                  StateCapError);
}

TEST_CASE("viral infection reaches the released nucleocapsid") {
  TransitionSystem ts = explore(parse(corpus_file("viral.brane")), {.depth = 3});
  CHECK(!ts.truncated);
  REQUIRE(ts.states.size() == 4);  // phago, mate, exo in sequence
  std::set<std::string> rules;
  for (const auto& e : ts.edges) rules.insert(e.redex.label());
  CHECK(rules == std::set<std::string>{"phago@p", "mate@m", "exo@e"});

  auto facts = dynamic_containments(ts);
  CHECK(facts.count({Slot{"*", "*", "muMemb"}, Item::membrane("muNucap")}));
  // the nucleocapsid keeps its own actions after relocation
  CHECK(facts.count({Slot{"*", "muMemb", "muNucap"},
                     Item::action(parse_action("bud(b)"))}));
}

TEST_CASE("dynamic containment facts of single states") {
  TransitionSystem one = explore(parse("mate(x)<>@m1"), {.depth = 0});
  auto facts = dynamic_containments(one);
  REQUIRE(facts.size() == 2);
  CHECK(facts.count({Slot{"*", "*", "*"}, Item::membrane("m1")}));
  CHECK(facts.count({Slot{"*", "*", "m1"}, Item::action(parse_action("mate(x)"))}));

  TransitionSystem ex1 = explore(parse(corpus_file("example1.brane")), {.depth = 0});
  auto f1 = dynamic_containments(ex1);
  CHECK(f1.count({Slot{"*", "*", "*"}, Item::membrane("muP")}));
  CHECK(f1.count({Slot{"*", "*", "*"}, Item::membrane("muQ")}));
  CHECK(f1.count({Slot{"*", "*", "muP"}, Item::action(parse_action("mate(n)"))}));
}

TEST_CASE("transition systems export to dot and json") {
  TransitionSystem ts = explore(parse(corpus_file("drip-drip.brane")), {.depth = 2});
  std::string dot = transitions_to_dot(ts);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("label=\"drip\"") != std::string::npos);
  auto parsed = nlohmann::json::parse(transitions_to_json(ts));
  CHECK(parsed.at("states").size() == ts.states.size());
  CHECK(parsed.at("edges").size() == ts.edges.size());
  CHECK(parsed.at("truncated").get<bool>() == ts.truncated);
}
