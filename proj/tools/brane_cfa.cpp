// brane-cfa: parse brane terms, run their bounded semantics, compute the
// contextual flow analysis, and check spatial/causal properties against it.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "brane/cfa.hpp"
#include "brane/parse.hpp"
#include "brane/properties.hpp"
#include "brane/semantics.hpp"
#include "brane/verify.hpp"
#include "json.hpp"

namespace {

constexpr int kExitSyntax = 1;
constexpr int kExitIo = 2;
constexpr int kExitStateCap = 3;
constexpr int kExitMembraneCap = 4;
constexpr int kExitVerify = 5;

struct RunConfig {
  std::string input;
  std::string command;
  int depth = 4;
  int unfold = 2;
  size_t state_cap = 10000;
  size_t membrane_cap = 4096;
  std::string mode = "sound";
  std::string format = "json";
  std::string queries_file;
  std::string estimate_file;
  std::string output_file;
  bool deep_inside = false;

  brane::Mode cfa_mode() const {
    return mode == "strict-paper" ? brane::Mode::StrictPaper : brane::Mode::Sound;
  }
};

bool color_enabled() {
  const char* v = std::getenv("BRANE_CFA_COLOR");
  return !(v && std::string(v) == "0");
}

std::string paint(const std::string& text, const char* code) {
  if (!color_enabled()) return text;
  return std::string("\x1b[") + code + "m" + text + "\x1b[0m";
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Outputs are written whole, never partially.
void emit(const RunConfig& cfg, const std::string& payload) {
  if (cfg.output_file.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(cfg.output_file, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + cfg.output_file);
  out << payload;
}

brane::SystemPtr parse_input(const RunConfig& cfg) {
  return brane::parse(read_input(cfg.input));
}

brane::Estimate obtain_estimate(const RunConfig& cfg, const brane::SystemPtr& term) {
  if (!cfg.estimate_file.empty())
    return brane::estimate_from_json(
        nlohmann::json::parse(read_input(cfg.estimate_file)));
  return brane::solve(term, {cfg.cfa_mode(), cfg.membrane_cap});
}

int cmd_parse(const RunConfig& cfg) {
  brane::SystemPtr term = parse_input(cfg);
  std::string out = brane::pretty(term) + "\n";
  std::vector<brane::MembraneId> labels;
  brane::collect_labels(term, labels);
  out += "membranes:";
  for (const auto& l : labels) out += " " + l;
  out += "\n";
  emit(cfg, out);
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  brane::SystemPtr term = parse_input(cfg);
  brane::TransitionSystem ts = brane::explore(
      term, {.depth = cfg.depth, .unfold_budget = cfg.unfold, .state_cap = cfg.state_cap});
  std::string payload;
  if (cfg.format == "dot") {
    payload = brane::transitions_to_dot(ts);
  } else if (cfg.format == "text") {
    std::ostringstream out;
    out << ts.states.size() << " states, " << ts.edges.size() << " transitions"
        << (ts.truncated ? " (truncated)" : "") << "\n";
    for (size_t i = 0; i < ts.states.size(); ++i)
      out << "  s" << i << " = " << ts.states[i].key << "\n";
    for (const auto& e : ts.edges)
      out << "  s" << e.src << " --" << e.redex.label() << "--> s" << e.dst << "\n";
    payload = out.str();
  } else {
    payload = brane::transitions_to_json(ts);
  }
  emit(cfg, payload);
  if (ts.truncated) std::cerr << "note: exploration truncated by its bounds\n";
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  brane::SystemPtr term = parse_input(cfg);
  brane::Estimate est = brane::solve(term, {cfg.cfa_mode(), cfg.membrane_cap});
  if (cfg.format == "text") {
    std::ostringstream out;
    size_t items = 0;
    for (const auto& [s, is] : est.I) items += is.size();
    out << "I: " << items << " entries over " << est.I.size() << " slots\n";
    size_t recs = 0;
    for (const auto& [m, rs] : est.C) recs += rs.size();
    out << "C: " << recs << " records for " << est.C.size() << " membranes\n";
    out << "R: " << est.R.size() << " pairs\n";
    emit(cfg, out.str());
  } else {
    emit(cfg, brane::estimate_to_string(est));
  }
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  brane::SystemPtr term = parse_input(cfg);
  if (cfg.queries_file.empty())
    throw CLI::ValidationError("check requires --queries FILE");
  std::vector<brane::PropertyQuery> queries =
      brane::parse_queries(read_input(cfg.queries_file));
  brane::Estimate est = obtain_estimate(cfg, term);

  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  std::optional<brane::TransitionSystem> ts;
  if (cfg.depth > 0)
    ts = brane::explore(term, {.depth = cfg.depth, .unfold_budget = cfg.unfold,
                               .state_cap = cfg.state_cap});
  for (const auto& q : queries) {
    brane::StaticVerdict sv = brane::check_static(est, q);
    nlohmann::ordered_json entry;
    entry["query"] = q.str();
    entry["static"] = sv.holds;
    if (sv.vacuous) {
      entry["vacuous"] = true;
      std::cerr << "warning: " << q.str()
                << " mentions a membrane the estimate never saw\n";
    }
    if (ts) {
      brane::DynamicVerdict dv = brane::check_dynamic(*ts, q, cfg.deep_inside);
      entry["dynamic"] = dv.holds;
      if (dv.inconclusive) entry["inconclusive"] = true;
    }
    report.push_back(std::move(entry));
  }
  emit(cfg, report.dump(2) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  brane::SystemPtr term = parse_input(cfg);
  brane::Estimate est = obtain_estimate(cfg, term);
  std::vector<brane::PropertyQuery> queries =
      cfg.queries_file.empty()
          ? brane::synthesized_queries(est)
          : brane::parse_queries(read_input(cfg.queries_file));
  auto results = brane::run_verification(
      term, est, queries,
      {.depth = cfg.depth, .unfold_budget = cfg.unfold, .state_cap = cfg.state_cap,
       .mode = cfg.cfa_mode()});
  std::ostringstream out;
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass &= r.pass;
    out << (r.pass ? paint("PASS", "32") : paint("FAIL", "31")) << " " << r.name
        << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
  }
  emit(cfg, out.str());
  return all_pass ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parser, interpreter and contextual flow analysis for brane terms"};
  app.require_subcommand(1);

  RunConfig cfg;
  const char* descriptions[][2] = {
      {"parse", "parse the input and print the labelled term"},
      {"run", "explore the bounded transition system"},
      {"analyze", "compute the flow estimate (I, C, R)"},
      {"check", "evaluate property queries against the estimate"},
      {"verify", "run the full verification suites"},
  };
  for (auto& [name, help] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("input", cfg.input, "input term file")->required();
    sub->add_option("--depth", cfg.depth, "exploration depth");
    sub->add_option("--unfold", cfg.unfold, "replication unfold budget per step");
    sub->add_option("--state-cap", cfg.state_cap, "exploration state cap");
    sub->add_option("--membrane-cap", cfg.membrane_cap, "derived-identity cap");
    sub->add_option("--mode", cfg.mode, "closure mode")
        ->check(CLI::IsMember({"sound", "strict-paper"}));
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "dot", "text"}));
    sub->add_option("--queries", cfg.queries_file, "property query file");
    sub->add_option("--estimate-file", cfg.estimate_file,
                    "use this estimate instead of solving");
    sub->add_option("--output,-o", cfg.output_file, "write the artifact here");
    sub->add_flag("--deep-inside", cfg.deep_inside,
                  "dynamic never-inside checks any nesting depth");
    sub->callback([&cfg, name = std::string(name)] { cfg.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.command == "parse") return cmd_parse(cfg);
    if (cfg.command == "run") return cmd_run(cfg);
    if (cfg.command == "analyze") return cmd_analyze(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
  } catch (const brane::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitSyntax;
  } catch (const brane::StateCapError& e) {
    std::cerr << e.what() << "\n";
    return kExitStateCap;
  } catch (const brane::MembraneCapError& e) {
    std::cerr << e.what() << "\n";
    return kExitMembraneCap;
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad estimate file: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
