#pragma once

// Recursive-descent parser for the concrete brane syntax:
//
//   sys  := "zero" | sys "||" sys | "!" sys | proc? "<" sys? ">" ("@" IDENT)?
//         | "(" sys ")"
//   proc := "0" | proc "|" proc | "!" proc | act ("." proc)? | "(" proc ")"
//   act  := mate(n) comate(n) bud(n) cobud(n,proc) drip(proc)
//           phago(n) cophago(n,proc) exo(n) coexo(n) pino(proc)
//
// "<>" abbreviates "<zero>"; a prefix with no "." means continuation 0.
// Membranes without an "@" annotation get deterministic labels m1, m2, ...
// in left-to-right source order. The label "*" is reserved.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brane/ast.hpp"

namespace brane {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

namespace detail {

enum class Tok {
  Ident, Zero, LPar, RPar, LAngle, RAngle, At, Bar, BarBar, Bang, Dot, Comma,
  Star, End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), line, col}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int start_col = col;
    auto emit = [&](Tok k, std::string t) {
      out.push_back({k, std::move(t), line, start_col});
    };
    if (c == '|' && i + 1 < src.size() && src[i + 1] == '|') {
      emit(Tok::BarBar, "||"); i += 2; col += 2; continue;
    }
    switch (c) {
      case '(': emit(Tok::LPar, "("); ++i; ++col; continue;
      case ')': emit(Tok::RPar, ")"); ++i; ++col; continue;
      case '<': emit(Tok::LAngle, "<"); ++i; ++col; continue;
      case '>': emit(Tok::RAngle, ">"); ++i; ++col; continue;
      case '@': emit(Tok::At, "@"); ++i; ++col; continue;
      case '|': emit(Tok::Bar, "|"); ++i; ++col; continue;
      case '!': emit(Tok::Bang, "!"); ++i; ++col; continue;
      case '.': emit(Tok::Dot, "."); ++i; ++col; continue;
      case ',': emit(Tok::Comma, ","); ++i; ++col; continue;
      case '*': emit(Tok::Star, "*"); ++i; ++col; continue;
      case '0': emit(Tok::Zero, "0"); ++i; ++col; continue;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      emit(Tok::Ident, std::string(src.substr(i, j - i)));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    (void)push;
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

inline std::optional<ActKind> act_kind_of(const std::string& w) {
  if (w == "mate") return ActKind::Mate;
  if (w == "comate") return ActKind::CoMate;
  if (w == "bud") return ActKind::Bud;
  if (w == "cobud") return ActKind::CoBud;
  if (w == "drip") return ActKind::Drip;
  if (w == "phago") return ActKind::Phago;
  if (w == "cophago") return ActKind::CoPhago;
  if (w == "exo") return ActKind::Exo;
  if (w == "coexo") return ActKind::CoExo;
  if (w == "pino") return ActKind::Pino;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  SystemPtr parse_system_input() {
    SystemPtr s = parse_sys();
    expect(Tok::End, "end of input");
    assign_labels(s);
    return s;
  }

  ProcessPtr parse_process_input() {
    ProcessPtr p = parse_proc();
    expect(Tok::End, "end of input");
    return p;
  }

  Action parse_action_input(bool allow_wildcard_arg) {
    Action a = parse_act(allow_wildcard_arg);
    expect(Tok::End, "end of input");
    return a;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int auto_counter_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token take() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col, msg);
  }
  void expect(Tok k, const std::string& what) {
    if (cur().kind != k) fail("expected " + what);
    ++pos_;
  }

  // true if a '(' at the current position opens a process (the matching ')'
  // is followed by tokens that can only continue a process/membrane).
  bool paren_opens_process() const {
    int depth = 0;
    size_t i = pos_;
    for (; i < toks_.size(); ++i) {
      if (toks_[i].kind == Tok::LPar) ++depth;
      else if (toks_[i].kind == Tok::RPar && --depth == 0) break;
      else if (toks_[i].kind == Tok::End) return false;
    }
    if (i + 1 >= toks_.size()) return false;
    switch (toks_[i + 1].kind) {
      case Tok::LAngle: case Tok::Bar: case Tok::Dot: return true;
      default: return false;
    }
  }

  bool starts_proc() const {
    switch (cur().kind) {
      case Tok::Zero: case Tok::Bang: return true;
      case Tok::Ident: return act_kind_of(cur().text).has_value();
      case Tok::LPar: return paren_opens_process();
      default: return false;
    }
  }

  SystemPtr parse_sys() {
    SystemPtr s = parse_sys_atom();
    while (cur().kind == Tok::BarBar) {
      ++pos_;
      s = System::compose(s, parse_sys_atom());
    }
    return s;
  }

  SystemPtr parse_sys_atom() {
    if (cur().kind == Tok::Ident && cur().text == "zero") {
      ++pos_;
      return System::diamond();
    }
    if (cur().kind == Tok::Bang) {
      // "!" may open the membrane's process or replicate a whole system;
      // the process reading wins when a membrane follows, so replicating a
      // membrane takes parentheses: !(sigma<P>@mu)
      size_t save = pos_;
      try {
        ProcessPtr sigma = parse_proc();
        if (cur().kind == Tok::LAngle) return parse_membrane_tail(std::move(sigma));
      } catch (const ParseError&) {
      }
      pos_ = save;
      ++pos_;
      return System::bang(parse_sys_atom());
    }
    if (cur().kind == Tok::LPar && !paren_opens_process()) {
      ++pos_;
      SystemPtr s = parse_sys();
      expect(Tok::RPar, "')'");
      return s;
    }
    // membrane: optional process, then <...>
    ProcessPtr sigma = Process::zero();
    if (cur().kind != Tok::LAngle) {
      if (!starts_proc()) fail("expected a system");
      sigma = parse_proc();
    }
    return parse_membrane_tail(std::move(sigma));
  }

  SystemPtr parse_membrane_tail(ProcessPtr sigma) {
    expect(Tok::LAngle, "'<'");
    SystemPtr content = System::diamond();
    if (cur().kind != Tok::RAngle) content = parse_sys();
    expect(Tok::RAngle, "'>'");
    MembraneId label;  // empty = auto-assign later
    if (cur().kind == Tok::At) {
      ++pos_;
      if (cur().kind == Tok::Star)
        fail("the membrane label '*' is reserved");
      if (cur().kind != Tok::Ident) fail("expected a membrane label");
      label = take().text;
    }
    return System::membrane(std::move(sigma), std::move(content), std::move(label));
  }

  ProcessPtr parse_proc() {
    ProcessPtr p = parse_proc_atom();
    while (cur().kind == Tok::Bar) {
      ++pos_;
      p = Process::par(p, parse_proc_atom());
    }
    return p;
  }

  ProcessPtr parse_proc_atom() {
    if (cur().kind == Tok::Zero) {
      ++pos_;
      return Process::zero();
    }
    if (cur().kind == Tok::Bang) {
      ++pos_;
      return Process::bang(parse_proc_atom());
    }
    if (cur().kind == Tok::LPar) {
      ++pos_;
      ProcessPtr p = parse_proc();
      expect(Tok::RPar, "')'");
      return p;
    }
    Action a = parse_act(false);
    ProcessPtr cont = Process::zero();
    if (cur().kind == Tok::Dot) {
      ++pos_;
      cont = parse_proc_atom();
    }
    return Process::seq(std::move(a), std::move(cont));
  }

  Action parse_act(bool allow_wildcard_arg) {
    if (cur().kind != Tok::Ident) fail("expected an action");
    auto k = act_kind_of(cur().text);
    if (!k) fail("unknown action '" + cur().text + "'");
    ++pos_;
    Action a;
    a.kind = *k;
    const bool has_ch = act_has_channel(*k);
    const bool has_pr = act_carries_process(*k);
    if (cur().kind != Tok::LPar) {
      if (allow_wildcard_arg && !has_ch) return a;  // bare drip/pino = wildcard
      fail("expected '('");
    }
    ++pos_;
    if (has_ch) {
      if (cur().kind != Tok::Ident) fail("expected a channel name");
      a.channel = take().text;
    }
    if (has_pr) {
      if (has_ch) {
        if (cur().kind == Tok::Comma) {
          ++pos_;
          a.arg = parse_proc();
        } else if (allow_wildcard_arg) {
          a.arg = nullptr;  // e.g. "cobud(o)" in a query matches any parameter
        } else {
          fail("expected ','");
        }
      } else {
        a.arg = parse_proc();
      }
    }
    expect(Tok::RPar, "')'");
    if (has_pr && !a.arg && !allow_wildcard_arg) a.arg = Process::zero();
    return a;
  }

  // Labels: validate explicit ones, auto-assign m1, m2, ... to the rest.
  void assign_labels(const SystemPtr& root) {
    std::vector<MembraneId> explicit_labels;
    collect_labels(root, explicit_labels);
    std::map<MembraneId, int> seen;
    for (const auto& l : explicit_labels) {
      if (l.empty()) continue;
      if (++seen[l] > 1)
        throw ParseError(1, 1, "duplicate membrane label '" + l + "'");
    }
    fill_labels(root, seen);
  }

  void fill_labels(const SystemPtr& s, std::map<MembraneId, int>& used) {
    if (!s) return;
    switch (s->kind) {
      case System::Kind::Compose:
        fill_labels(s->left, used);
        fill_labels(s->right, used);
        break;
      case System::Kind::Bang:
        fill_labels(s->body, used);
        break;
      case System::Kind::Membrane: {
        if (s->label.empty()) {
          MembraneId cand;
          do {
            cand = "m" + std::to_string(++auto_counter_);
          } while (used.count(cand));
          used[cand] = 1;
          const_cast<System*>(s.get())->label = cand;
        }
        fill_labels(s->content, used);
        break;
      }
      default: break;
    }
  }
};

}  // namespace detail

inline SystemPtr parse(std::string_view text) {
  return detail::Parser(text).parse_system_input();
}

inline ProcessPtr parse_process(std::string_view text) {
  return detail::Parser(text).parse_process_input();
}

// Parses an action literal. With allow_wildcard=true, a parameter-carrying
// form may omit its parameter ("cobud(o)", bare "drip") and then matches
// any parameter when used as a query.
inline Action parse_action(std::string_view text, bool allow_wildcard = false) {
  return detail::Parser(text).parse_action_input(allow_wildcard);
}

}  // namespace brane
