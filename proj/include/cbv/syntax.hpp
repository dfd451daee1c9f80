#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cbv/term.hpp"

namespace cbv {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Grammar:
//   term ::= '\' IDENT '.' term | app
//   app  ::= atom+                       left-associative
//   atom ::= IDENT | '(' term ')' | atom '[' IDENT '\' term ']'
// An abstraction is also accepted as the last atom of an application.
// `λ` may be used instead of `\` for abstractions. Identifiers may carry a
// freshness tag written `x#3`.
Term parse(std::string_view text);

std::string print(const Term& t);
std::string print(const SubstCtx& L);  // e.g. "[x\y][z\w]", innermost first

}  // namespace cbv
