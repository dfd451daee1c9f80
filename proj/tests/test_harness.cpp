#include "cbv/harness.hpp"
#include "cbv/ucbv.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cbv;
using namespace cbv::harness;
using cbv::test::T;

namespace {

std::size_t es_nodes(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return 0;
    case TermKind::Abs:
      return es_nodes(t.body());
    case TermKind::App:
      return es_nodes(t.fun()) + es_nodes(t.arg());
    case TermKind::Clo:
      return 1 + es_nodes(t.body()) + es_nodes(t.arg());
  }
  return 0;
}

bool names_within(const Term& t, const VarSet& names) {
  VarSet all;
  collect_names(t, all);
  return std::includes(names.begin(), names.end(), all.begin(), all.end());
}

}  // namespace

TEST_CASE("configuration validation") {
  FuzzConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.count = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidConfig);
  cfg = {};
  cfg.max_size = 0;
  CHECK_THROWS_AS(TermGenerator{cfg}, InvalidConfig);
  cfg = {};
  cfg.es_density = 1.5;
  CHECK_THROWS_AS(validate(cfg), InvalidConfig);
  cfg = {};
  CHECK_THROWS_AS(run_suite("no-such-suite", cfg), InvalidConfig);
  CHECK(free_pool(3) == std::vector<VarName>{"x", "y", "z"});
}

TEST_CASE("generation is deterministic and respects the configuration") {
  FuzzConfig cfg;
  cfg.seed = 99;
  cfg.max_size = 20;
  TermGenerator a(cfg), b(cfg);
  for (int i = 0; i < 500; ++i) CHECK(a.next() == b.next());

  cfg.seed = 100;
  TermGenerator c(cfg);
  cfg.seed = 99;
  TermGenerator d(cfg);
  int differ = 0;
  for (int i = 0; i < 100; ++i) differ += c.next() == d.next() ? 0 : 1;
  CHECK(differ > 50);

  cfg.max_size = 1;
  TermGenerator vars_only(cfg);
  for (int i = 0; i < 200; ++i) CHECK(vars_only.next().is_var());

  cfg.max_size = 25;
  cfg.es_density = 0.0;
  TermGenerator pure(cfg);
  for (int i = 0; i < 500; ++i) CHECK(is_pure(pure.next()));

  cfg.es_density = 0.5;
  cfg.free_var_pool = 2;
  TermGenerator mixed(cfg);
  std::size_t es = 0;
  const VarSet allowed{"x", "y", "a", "b", "c"};
  for (int i = 0; i < 500; ++i) {
    const Term t = mixed.next();
    CHECK(t.size() <= 25);
    CHECK(names_within(t, allowed));
    const VarSet fv = free_vars(t);
    CHECK(std::includes(free_pool(2).begin(), free_pool(2).end(), fv.begin(), fv.end()));
    es += es_nodes(t);
    CHECK(is_pure(mixed.next_pure()));
  }
  CHECK(es > 500);
}

TEST_CASE("enumeration counts") {
  // c(1) = |names|, c(n) = |names|·c(n-1) + 3·Σ c(k)·c(n-1-k): abstractions,
  // applications and closures (which also pick a binder).
  const std::vector<VarName> names{"x", "y"};
  std::vector<std::size_t> c(8, 0);
  c[1] = 2;
  for (std::size_t n = 2; n <= 7; ++n) {
    std::size_t pairs = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) pairs += c[k] * c[n - 1 - k];
    c[n] = 2 * c[n - 1] + 3 * pairs;
  }
  CHECK(c[7] == 13808);
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto terms = enumerate_terms(n, names);
    CHECK(terms.size() == c[n]);
    std::set<std::string> distinct;
    for (const auto& t : terms) {
      CHECK(t.size() == n);
      distinct.insert(print(t));
    }
    CHECK(distinct.size() == terms.size());
  }
  CHECK(enumerate_up_to(3, names).size() == 2 + 4 + 20);
  CHECK(enumerate_terms(0, names).empty());
}

TEST_CASE("shrinking") {
  const Term t = T("(\\a.a (b[b\\ \\c.c])) (x y) z");
  for (const auto& c : shrink_candidates(t, {"x"})) CHECK(c.size() <= t.size());
  // The property fails on terms containing an ES whose argument is an abstraction.
  const auto fails = [](const Term& u) {
    std::function<bool(const Term&)> has = [&](const Term& s) -> bool {
      switch (s.kind()) {
        case TermKind::Var:
          return false;
        case TermKind::Abs:
          return has(s.body());
        case TermKind::App:
          return has(s.fun()) || has(s.arg());
        case TermKind::Clo:
          return s.arg().is_abs() || has(s.body()) || has(s.arg());
      }
      return false;
    };
    return has(u);
  };
  REQUIRE(fails(t));
  const Term s = shrink(t, fails, {"x"});
  CHECK(fails(s));
  CHECK(s.size() == 4);
  CHECK(es_nodes(s) == 1);

  for (const auto& u : test::corpus(91, 500, 20, 0.4, 2)) {
    if (!fails(u)) continue;
    const Term v = shrink(u, fails, free_pool(2), 200);
    CHECK(fails(v));
    CHECK(v.size() <= u.size());
  }
}

TEST_CASE("traces replay") {
  const Term t = T("(\\x. z x (x y)) (\\w.w)");
  const TraceRecord u = make_trace(t, normalize_ucbv(t));
  CHECK(validate_trace(u, Strategy::Ucbv).empty());
  const TraceRecord round = trace_from_json(nlohmann::json::parse(trace_to_json(u).dump()));
  CHECK(validate_trace(round, Strategy::Ucbv).empty());
  CHECK(trace_to_json(round) == trace_to_json(u));
  CHECK(trace_to_json(u).at("counts") == nlohmann::json{{"m", 2}, {"e", 1}});

  const TraceRecord l = make_trace(t, normalize_lcbv(t, 100));
  CHECK(validate_trace(l, Strategy::Lcbv).empty());
  // A UCBV trace may not take the first lcbv lsv step, which is not useful.
  CHECK_FALSE(validate_trace(l, Strategy::Ucbv).empty());

  TraceRecord wrong_counts = u;
  wrong_counts.m += 1;
  CHECK_FALSE(validate_trace(wrong_counts, Strategy::Ucbv).empty());
  TraceRecord wrong_term = u;
  wrong_term.steps[1].second = T("x");
  CHECK(validate_trace(wrong_term, Strategy::Ucbv).find("step 2") == 0);

  const ValueAssignment sigma{{VarName("x"), T("\\a.a")}};
  const Term s = T("x[y\\x] y");
  const TraceRecord st = make_trace(s, normalize_sigma(s, sigma));
  CHECK(validate_trace(st, Strategy::Sigma, sigma).empty());

  for (const auto& r : test::corpus(92, 300, 15, 0.3, 2)) {
    try {
      CHECK(validate_trace(make_trace(r, normalize_ucbv(r, 200)), Strategy::Ucbv).empty());
      CHECK(validate_trace(make_trace(r, normalize_stable(r, 200)), Strategy::Stable).empty());
    } catch (const BudgetExceeded&) {
    }
  }
}

TEST_CASE("every suite runs") {
  for (const auto& name : suite_names()) {
    FuzzConfig cfg;
    cfg.seed = 7;
    cfg.count = 30;
    cfg.max_size = 10;
    cfg.budget = 200;
    const Report r = run_suite(name, cfg);
    INFO(name);
    CHECK(r.suite == name);
    CHECK(r.ok());
    CHECK(r.checked >= 1);
    const nlohmann::json j = report_to_json(r);
    CHECK(j.at("ok") == true);
    CHECK(j.at("suite") == name);
  }
  CHECK(suite_names().size() == 9);
}
