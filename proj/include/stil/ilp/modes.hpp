#pragma once

// Mode declarations in the usual Aleph syntax:
//
//   modeh(1, symmetric(+scene))
//   modeb(*, left(+axis,-person))
//   modeb(3, holds_in(gaze_on(+gaze,-person),-interval))
//   modeb(rel(#relation,+object,+object))          recall defaults
//
// +type input, -type output, #type constant. Nested compounds are fixed
// functors (the relation inside holds_in).

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stil/error.hpp"

namespace stil::ilp {

enum class ArgMode { in, out, constant };

struct ModeArg {
  ArgMode mode = ArgMode::in;
  std::string type;
};

/// Template term: a placeholder, a fixed constant or a nested compound.
struct ModeTerm {
  enum class Kind { placeholder, constant, compound };
  Kind kind = Kind::placeholder;
  ModeArg arg;
  std::string name;
  std::vector<ModeTerm> args;
};

struct ModeDecl {
  bool head = false;
  /// 0 means unbounded; nullopt means the configured default.
  std::optional<int> recall;
  std::string pred;
  std::vector<ModeTerm> args;
  std::string text;

  /// Placeholders in left-to-right leaf order.
  std::vector<ModeArg> placeholders() const {
    std::vector<ModeArg> out;
    auto walk = [&](auto&& self, const ModeTerm& t) -> void {
      if (t.kind == ModeTerm::Kind::placeholder) out.push_back(t.arg);
      for (const auto& a : t.args) self(self, a);
    };
    for (const auto& a : args) walk(walk, a);
    return out;
  }
  std::string key() const { return pred + "/" + std::to_string(args.size()); }
};

namespace detail {

class ModeParser {
 public:
  explicit ModeParser(std::string_view s) : s_(s) {}

  ModeDecl parse() {
    ModeDecl m;
    m.text = std::string(s_);
    const std::string kind = ident();
    if (kind != "modeh" && kind != "modeb") fail("expected modeh or modeb");
    m.head = kind == "modeh";
    expect('(');
    skip();
    if (peek() == '*') {
      ++pos_;
      m.recall = 0;
      expect(',');
    } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
      std::size_t b = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      m.recall = std::stoi(std::string(s_.substr(b, pos_ - b)));
      if (*m.recall <= 0) fail("recall must be positive or *");
      expect(',');
    }
    m.pred = ident();
    if (m.pred.empty()) fail("predicate expected");
    skip();
    if (peek() == '(') m.args = arguments();
    expect(')');
    skip();
    if (pos_ < s_.size() && s_[pos_] == '.') ++pos_;
    skip();
    if (pos_ != s_.size()) fail("trailing text");
    if (m.head) {
      bool has_input = false;
      for (const auto& a : m.placeholders()) has_input = has_input || a.mode == ArgMode::in;
      if (!has_input) throw Error("invalid-mode", "head mode needs an input argument: " + m.text);
    }
    return m;
  }

 private:
  std::vector<ModeTerm> arguments() {
    std::vector<ModeTerm> out;
    expect('(');
    do out.push_back(term());
    while (accept(','));
    expect(')');
    return out;
  }
  ModeTerm term() {
    skip();
    const char c = peek();
    if (c == '+' || c == '-' || c == '#') {
      ++pos_;
      ModeTerm t;
      t.kind = ModeTerm::Kind::placeholder;
      t.arg.mode = c == '+' ? ArgMode::in : c == '-' ? ArgMode::out : ArgMode::constant;
      t.arg.type = ident();
      if (t.arg.type.empty()) fail("type name expected");
      return t;
    }
    ModeTerm t;
    t.name = ident();
    if (t.name.empty()) fail("term expected");
    skip();
    if (peek() == '(') {
      t.kind = ModeTerm::Kind::compound;
      t.args = arguments();
    } else {
      t.kind = ModeTerm::Kind::constant;
    }
    return t;
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool accept(char c) {
    skip();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "' expected");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("parse-error", what + " at column " + std::to_string(pos_ + 1) + " in mode: " + std::string(s_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ModeDecl parse_mode(std::string_view text) { return detail::ModeParser(text).parse(); }

struct ModeSet {
  std::vector<ModeDecl> heads;
  std::vector<ModeDecl> bodies;
};

inline ModeSet parse_modes(const std::vector<std::string>& lines) {
  ModeSet ms;
  for (const auto& l : lines) {
    ModeDecl m = parse_mode(l);
    (m.head ? ms.heads : ms.bodies).push_back(std::move(m));
  }
  if (ms.heads.empty()) throw Error("no-head-mode", "mode set declares no modeh");
  return ms;
}

}  // namespace stil::ilp
