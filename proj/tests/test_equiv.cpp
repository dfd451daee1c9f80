#include <random>

#include "cbv/equiv.hpp"
#include "cbv/ucbv.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cbv;
using cbv::test::T;

namespace {

Term random_walk(const Term& t, int steps, std::mt19937_64& rng) {
  Term cur = t;
  for (int i = 0; i < steps; ++i) {
    const auto ns = equiv_neighbours(cur);
    if (ns.empty()) break;
    cur = ns[std::uniform_int_distribution<std::size_t>(0, ns.size() - 1)(rng)];
  }
  return cur;
}

}  // namespace

TEST_CASE("structural equivalence axioms") {
  CHECK(struct_equiv(T("x[x\\y]"), T("x[x\\y]")) == EquivResult::Equivalent);
  CHECK(struct_equiv(T("t[x\\u][y\\s]"), T("t[y\\s][x\\u]")) == EquivResult::Equivalent);
  CHECK(struct_equiv(T("t[x\\u][y\\s]"), T("t[x\\u[y\\s]]")) == EquivResult::Equivalent);
  CHECK(struct_equiv(T("(t u)[x\\s]"), T("t[x\\s] u")) == EquivResult::Equivalent);
  CHECK(struct_equiv(T("(t u)[x\\s]"), T("t u[x\\s]")) == EquivResult::Equivalent);
  // Side conditions.
  CHECK(struct_equiv(T("x[x\\y][y\\z]"), T("x[y\\z][x\\y]")) == EquivResult::NotEquivalent);
  CHECK(struct_equiv(T("(x x)[x\\s]"), T("x[x\\s] x")) == EquivResult::NotEquivalent);
  CHECK(struct_equiv(T("y[x\\u][y\\s]"), T("y[x\\u[y\\s]]")) == EquivResult::NotEquivalent);
  // No rewriting under abstractions.
  CHECK(struct_equiv(T("\\a.(t u)[x\\s]"), T("\\a.t[x\\s] u")) == EquivResult::NotEquivalent);
  CHECK(equiv_by_flattening(T("(t u)[x\\s]"), T("t u[x\\s]")));
  CHECK_FALSE(equiv_by_flattening(T("\\a.(t u)[x\\s]"), T("\\a.t[x\\s] u")));
  // Up to α.
  CHECK(struct_equiv(T("(x z)[x\\s]"), T("y[y\\s] z")) == EquivResult::Equivalent);
}

TEST_CASE("neighbours preserve the full unfolding and the vL shape") {
  for (const auto& t : test::corpus(51, 2000, 15, 0.6, 3)) {
    const Term ut = full_unfold(t);
    for (const auto& u : equiv_neighbours(t)) {
      CHECK(alpha_eq(full_unfold(u), ut));
      CHECK(free_vars(u) == free_vars(t));
      CHECK(val(u) == val(t));
      CHECK(abs_ctx(u) == abs_ctx(t));
    }
  }
}

TEST_CASE("flattening agrees with search") {
  std::mt19937_64 rng(52);
  std::size_t decided = 0, equal = 0;
  const auto terms = test::corpus(53, 1500, 14, 0.6, 3);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    const Term u = random_walk(t, 4, rng);
    CHECK(equiv_by_flattening(t, u));
    const EquivResult r = struct_equiv(t, u);
    CHECK(r != EquivResult::NotEquivalent);
    // Pairs with equal unfoldings that may or may not be equivalent.
    const Term& v = terms[(i * 7 + 3) % terms.size()];
    for (const Term& w : {v, random_walk(t, 1, rng)}) {
      const EquivResult s = struct_equiv(u, w);
      if (s == EquivResult::BoundExceeded) continue;
      ++decided;
      if (s == EquivResult::Equivalent) ++equal;
      CHECK((s == EquivResult::Equivalent) == equiv_by_flattening(u, w));
    }
  }
  // Terms that unfold identically but are not equivalent.
  for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"x[x\\y y]", "(x y)[x\\y]"},
           {"(x x)[x\\z]", "x[x\\z] z"},
           {"x[x\\z][y\\z]", "x[x\\z]"},
       }) {
    CHECK(alpha_eq(full_unfold(T(a)), full_unfold(T(b))));
    CHECK(struct_equiv(T(a), T(b)) == EquivResult::NotEquivalent);
    CHECK_FALSE(equiv_by_flattening(T(a), T(b)));
  }
  CHECK(decided > 1000);
  CHECK(equal > 100);
}

TEST_CASE("an exhausted bound is reported distinctly") {
  const Term t = T("(a b c)[x\\u][y\\v][z\\w]");
  const Term u = T("a[x\\u] b[y\\v] c[z\\w]");
  CHECK(struct_equiv(t, u) == EquivResult::Equivalent);
  CHECK(struct_equiv(t, u, 2) == EquivResult::BoundExceeded);
  CHECK(default_equiv_bound(T("x")) == 16);
  CHECK(default_equiv_bound(t) == 4 * 9 * 6);
}

TEST_CASE("stable reduction is a strong bisimulation for equivalence") {
  std::size_t pairs = 0;
  for (const auto& t : test::corpus(54, 3000, 15, 0.5, 2)) {
    const ReductionParams top = ReductionParams::top(t);
    if (!stable_check(t, top.aframe, top.sframe)) continue;
    const auto left = stable_steps(t, top);
    for (const auto& u : equiv_neighbours(t)) {
      REQUIRE(stable_check(u, top.aframe, top.sframe));
      const auto right = stable_steps(u, top);
      for (const auto& [from, to] : {std::pair{&left, &right}, std::pair{&right, &left}})
        for (const auto& s : *from) {
          bool matched = false;
          for (const auto& r : *to)
            if (r.kind.tag == s.kind.tag && equiv_by_flattening(s.result, r.result)) matched = true;
          CHECK(matched);
        }
      ++pairs;
    }
  }
  CHECK(pairs > 500);
}
