#include "cbv/syntax.hpp"

#include <cctype>

namespace cbv {

SyntaxError::SyntaxError(int line, int column, const std::string& what)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Lambda, Dot, LParen, RParen, LBrack, RBrack, Backslash, End };

struct Token {
  Tok kind;
  VarName name;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skip_space();
    Token t{Tok::End, {}, line_, col_};
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    if (c == '\\') return single(Tok::Backslash);
    if (c == '.') return single(Tok::Dot);
    if (c == '(') return single(Tok::LParen);
    if (c == ')') return single(Tok::RParen);
    if (c == '[') return single(Tok::LBrack);
    if (c == ']') return single(Tok::RBrack);
    if (s_.substr(pos_, 2) == "\xCE\xBB") {  // λ
      pos_ += 2;
      ++col_;
      t.kind = Tok::Lambda;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '_' || s_[pos_] == '\'')) {
        ++pos_;
        ++col_;
      }
      t.kind = Tok::Ident;
      t.name.base = std::string(s_.substr(start, pos_ - start));
      if (pos_ < s_.size() && s_[pos_] == '#') {
        ++pos_;
        ++col_;
        std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          ++pos_;
          ++col_;
        }
        if (ds == pos_) throw SyntaxError(line_, col_, "expected digits after '#'");
        try {
          unsigned long tag = std::stoul(std::string(s_.substr(ds, pos_ - ds)));
          if (tag > 0xFFFFFFFFul) throw std::out_of_range("tag");
          t.name.tag = static_cast<std::uint32_t>(tag);
        } catch (const std::out_of_range&) {
          throw SyntaxError(t.line, t.col, "freshness tag out of range");
        }
      }
      return t;
    }
    throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
  }

 private:
  Token single(Tok k) {
    Token t{k, {}, line_, col_};
    ++pos_;
    ++col_;
    return t;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { advance(); }

  Term parse_all() {
    Term t = term();
    if (cur_.kind != Tok::End) fail("unexpected input after term");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(cur_.line, cur_.col, msg); }

  void advance() { cur_ = lex_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) fail(std::string("expected ") + what);
    advance();
  }

  bool is_lambda() const { return cur_.kind == Tok::Backslash || cur_.kind == Tok::Lambda; }

  Term term() {
    if (is_lambda()) return lam();
    return app();
  }

  Term lam() {
    advance();
    if (cur_.kind != Tok::Ident) fail("expected a variable after lambda");
    VarName x = cur_.name;
    advance();
    expect(Tok::Dot, "'.'");
    return Term::abs(std::move(x), term());
  }

  bool starts_atom() const { return cur_.kind == Tok::Ident || cur_.kind == Tok::LParen; }

  Term app() {
    if (!starts_atom()) fail("expected a term");
    Term t = atom();
    while (true) {
      if (starts_atom()) {
        t = Term::app(t, atom());
      } else if (is_lambda()) {
        return Term::app(t, lam());
      } else {
        return t;
      }
    }
  }

  Term atom() {
    Term t;
    if (cur_.kind == Tok::Ident) {
      t = Term::var(cur_.name);
      advance();
    } else {
      expect(Tok::LParen, "'('");
      t = term();
      expect(Tok::RParen, "')'");
    }
    while (cur_.kind == Tok::LBrack) {
      advance();
      if (cur_.kind != Tok::Ident) fail("expected the substituted variable");
      VarName x = cur_.name;
      advance();
      expect(Tok::Backslash, "'\\'");
      Term u = term();
      expect(Tok::RBrack, "']'");
      t = Term::clo(t, std::move(x), u);
    }
    return t;
  }

  Lexer lex_;
  Token cur_{Tok::End, {}, 1, 1};
};

// Printing levels: a term in `Top` position may be anything; `Head` is the
// function part of an application; `Atom` is an argument or ES body.
enum class Level { Top, Head, Atom };

void print_rec(const Term& t, Level lvl, std::string& out) {
  bool paren = false;
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Clo:
      break;
    case TermKind::Abs:
      paren = lvl != Level::Top;
      break;
    case TermKind::App:
      paren = lvl == Level::Atom;
      break;
  }
  if (paren) out += '(';
  switch (t.kind()) {
    case TermKind::Var:
      out += t.name().str();
      break;
    case TermKind::Abs:
      out += '\\';
      out += t.binder().str();
      out += ". ";
      print_rec(t.body(), Level::Top, out);
      break;
    case TermKind::App:
      print_rec(t.fun(), Level::Head, out);
      out += ' ';
      print_rec(t.arg(), Level::Atom, out);
      break;
    case TermKind::Clo:
      print_rec(t.body(), Level::Atom, out);
      out += '[';
      out += t.binder().str();
      out += '\\';
      if (t.arg().is_abs()) out += ' ';
      print_rec(t.arg(), Level::Top, out);
      out += ']';
      break;
  }
  if (paren) out += ')';
}

}  // namespace

Term parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Term& t) {
  std::string out;
  print_rec(t, Level::Top, out);
  return out;
}

std::string print(const SubstCtx& L) {
  std::string out;
  for (const auto& [x, u] : L.entries) {
    out += '[';
    out += x.str();
    out += '\\';
    if (u.is_abs()) out += ' ';
    print_rec(u, Level::Top, out);
    out += ']';
  }
  return out;
}

}  // namespace cbv
