#include <algorithm>
#include <functional>

#include "doctest.h"
#include "helpers.hpp"

using namespace cbv;
using cbv::test::T;
using cbv::test::vars;

namespace {

// Independent recursive definitions used as oracles.
VarSet fv_oracle(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return {t.name()};
    case TermKind::Abs: {
      VarSet s = fv_oracle(t.body());
      s.erase(t.binder());
      return s;
    }
    case TermKind::App: {
      VarSet s = fv_oracle(t.fun()), r = fv_oracle(t.arg());
      s.insert(r.begin(), r.end());
      return s;
    }
    case TermKind::Clo: {
      VarSet s = fv_oracle(t.body()), r = fv_oracle(t.arg());
      s.erase(t.binder());
      s.insert(r.begin(), r.end());
      return s;
    }
  }
  return {};
}

VarSet rv_oracle(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return {t.name()};
    case TermKind::Abs:
      return {};
    case TermKind::App: {
      VarSet s = rv_oracle(t.fun()), r = rv_oracle(t.arg());
      s.insert(r.begin(), r.end());
      return s;
    }
    case TermKind::Clo: {
      VarSet s = rv_oracle(t.body()), r = rv_oracle(t.arg());
      s.erase(t.binder());
      s.insert(r.begin(), r.end());
      return s;
    }
  }
  return {};
}

Term unfold_oracle(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return t;
    case TermKind::Abs:
      return Term::abs(t.binder(), unfold_oracle(t.body()));
    case TermKind::App:
      return Term::app(unfold_oracle(t.fun()), unfold_oracle(t.arg()));
    case TermKind::Clo:
      return subst(unfold_oracle(t.body()), t.binder(), unfold_oracle(t.arg()));
  }
  return t;
}

}  // namespace

TEST_CASE("free variables") {
  CHECK(free_vars(T("x")) == vars({"x"}));
  CHECK(free_vars(T("\\x.x")).empty());
  CHECK(free_vars(T("(x y)[y\\ \\a.a]")) == vars({"x"}));
  for (const auto& t : test::corpus(11, 2000, 20, 0.3, 3)) {
    CHECK(free_vars(t) == fv_oracle(t));
    CHECK(VarSet(t.fv_list().begin(), t.fv_list().end()) == fv_oracle(t));
  }
}

TEST_CASE("reachable variables") {
  CHECK(reachable_vars(T("\\x.y z")).empty());
  CHECK(reachable_vars(T("x[x\\y]")) == vars({"y"}));
  CHECK(reachable_vars(T("(\\w.x)[x\\y]")) == vars({"y"}));
  for (const auto& t : test::corpus(12, 2000, 20, 0.3, 3)) {
    const VarSet rv = reachable_vars(t), fv = free_vars(t);
    CHECK(rv == rv_oracle(t));
    CHECK(std::includes(fv.begin(), fv.end(), rv.begin(), rv.end()));
  }
}

TEST_CASE("substitution") {
  CHECK(alpha_eq(subst(T("x"), "x", T("\\y.y")), T("\\y.y")));
  const Term r = subst(T("\\y.x"), "x", T("y"));
  REQUIRE(r.is_abs());
  CHECK(r.binder() != VarName("y"));
  CHECK(r.body() == T("y"));
  CHECK(alpha_eq(r, T("\\a.y")));
  CHECK(alpha_eq(subst(T("x[z\\x]"), "x", T("\\a.a")), T("(\\a.a)[z\\ \\a.a]")));
  // fv(t{x↦u}) = (fv t ∖ {x}) ∪ fv u when x ∈ fv t.
  const Term u = T("y z");
  for (const auto& t : test::corpus(13, 2000, 15, 0.3, 3)) {
    VarSet expected = fv_oracle(t);
    if (expected.erase(VarName("x"))) expected.insert({VarName("y"), VarName("z")});
    CHECK(free_vars(subst(t, "x", u)) == expected);
  }
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(T("\\x.x"), T("\\y.y")));
  CHECK_FALSE(alpha_eq(T("x"), T("y")));
  CHECK_FALSE(alpha_eq(T("\\x.y"), T("\\y.y")));
  CHECK(alpha_eq(T("(x z)[x\\ \\a.a]"), T("(y z)[y\\ \\a.a]")));
  CHECK_FALSE(alpha_eq(T("(x z)[x\\ \\a.a]"), T("(z z)[z\\ \\a.a]")));
  for (const auto& t : test::corpus(14, 2000, 15, 0.3, 2)) {
    // Renaming an ES binder to a name absent from t gives an α-equivalent term.
    if (t.is_clo()) {
      const VarName y("fresh");
      const Term renamed = Term::clo(rename_free(t.body(), t.binder(), y), y, t.arg());
      CHECK(alpha_eq(t, renamed));
      CHECK(alpha_key(t) == alpha_key(renamed));
    }
    const Term wn = well_name(t);
    CHECK(alpha_eq(t, wn));
    CHECK(alpha_key(t) == alpha_key(wn));
  }
}

TEST_CASE("classification of vL") {
  const Classified a = classify(T("(\\x.x)[y\\z]"));
  CHECK(a.kind == Classified::IsAbs);
  CHECK(print(a.ctx) == "[y\\z]");
  const Classified b = classify(T("x[y\\z]"));
  CHECK(b.kind == Classified::IsValueWithCtx);
  CHECK(b.value == T("x"));
  CHECK(print(b.ctx) == "[y\\z]");
  CHECK(classify(T("x y")).kind == Classified::Neither);
  CHECK(val(T("x[a\\b][c\\d]")));
  CHECK(abs_ctx(T("(\\a.a)[a\\b]")));
  CHECK_FALSE(abs_ctx(T("a[a\\ \\b.b]")));
  // Splitting and plugging are inverse.
  for (const auto& t : test::corpus(15, 2000, 15, 0.5, 2)) {
    const auto [core, L] = split_ctx(t);
    CHECK_FALSE(core.is_clo());
    CHECK(L.plug(core) == t);
  }
}

TEST_CASE("full unfolding") {
  CHECK(alpha_eq(full_unfold(T("x[x\\ y y][y\\ z z]")), T("z z (z z)")));
  CHECK(full_unfold(T("\\x.x y")) == T("\\x.x y"));
  CHECK(alpha_eq(full_unfold(T("(x x)[x\\ \\a.a]")), T("(\\a.a) (\\a.a)")));
  for (const auto& t : test::corpus(16, 2000, 15, 0.4, 2)) {
    const Term u = full_unfold(t);
    CHECK(is_pure(u));
    CHECK(alpha_eq(u, unfold_oracle(t)));
    CHECK(full_unfold(u) == u);
  }
}

TEST_CASE("parsing and printing") {
  CHECK(T("\\x. x x") == Term::abs("x", Term::app(Term::var("x"), Term::var("x"))));
  CHECK(T("(x y)[y \\ \\z.z]") ==
        Term::clo(Term::app(Term::var("x"), Term::var("y")), "y", Term::abs("z", Term::var("z"))));
  CHECK(T("x y z") == Term::app(Term::app(Term::var("x"), Term::var("y")), Term::var("z")));
  CHECK(T("λx.x") == T("\\x.x"));
  CHECK(T("x#3").name() == VarName("x", 3));
  CHECK(print(T("x#3")) == "x#3");
  CHECK_THROWS_AS(T("(x"), SyntaxError);
  CHECK_THROWS_AS(T("\\.x"), SyntaxError);
  CHECK_THROWS_AS(T(""), SyntaxError);
  CHECK_THROWS_AS(T("x[y z]"), SyntaxError);
  for (const auto& t : test::corpus(17, 10000, 25, 0.3, 3)) {
    const std::string s = print(t);
    REQUIRE(parse(s) == t);
  }
}

TEST_CASE("positions") {
  const Term t = T("(x y)[y\\ \\a.a] z");
  CHECK(subterm_at(t, {0, 1}) == T("\\a.a"));
  CHECK(subterm_at(t, {0, 0, 0}) == T("x"));
  CHECK(replace_at(t, {1}, T("w")) == T("(x y)[y\\ \\a.a] w"));
  CHECK_THROWS_AS(subterm_at(t, {1, 0}), std::out_of_range);
}

TEST_CASE("well naming") {
  for (const auto& t : test::corpus(18, 1000, 20, 0.3, 2)) {
    const Term w = well_name(t, {VarName("q")});
    VarSet binders;
    std::function<bool(const Term&)> unique = [&](const Term& s) {
      switch (s.kind()) {
        case TermKind::Var:
          return true;
        case TermKind::Abs:
          return binders.insert(s.binder()).second && !occurs_free(s.binder(), w) &&
                 s.binder() != VarName("q") && unique(s.body());
        case TermKind::App:
          return unique(s.fun()) && unique(s.arg());
        case TermKind::Clo:
          return binders.insert(s.binder()).second && !occurs_free(s.binder(), w) &&
                 s.binder() != VarName("q") && unique(s.body()) && unique(s.arg());
      }
      return false;
    };
    CHECK(unique(w));
    CHECK(alpha_eq(w, t));
  }
}
