#include <algorithm>
#include <set>

#include "cbv/harness.hpp"
#include "cbv/syntax.hpp"
#include "cbv/ucbv.hpp"

namespace cbv::harness {

void validate(const FuzzConfig& cfg) {
  if (cfg.count < 1) throw InvalidConfig("count must be at least 1");
  if (cfg.max_size < 1) throw InvalidConfig("max_size must be at least 1");
  if (!(cfg.es_density >= 0.0 && cfg.es_density <= 1.0)) throw InvalidConfig("es_density must lie in [0,1]");
  if (cfg.free_var_pool > 6) throw InvalidConfig("free_var_pool is at most 6");
}

std::vector<VarName> free_pool(Count pool) {
  static const char* kNames[] = {"x", "y", "z", "u", "v", "w"};
  std::vector<VarName> out;
  for (Count i = 0; i < pool && i < 6; ++i) out.emplace_back(kNames[i]);
  return out;
}

TermGenerator::TermGenerator(const FuzzConfig& cfg)
    : cfg_(cfg), rng_(cfg.seed), pool_(free_pool(cfg.free_var_pool)) {
  validate(cfg);
  binders_ = {VarName("a"), VarName("b"), VarName("c")};
}

Term TermGenerator::next() { return of_size(std::uniform_int_distribution<Count>(1, cfg_.max_size)(rng_), false); }

Term TermGenerator::next_pure() {
  return of_size(std::uniform_int_distribution<Count>(1, cfg_.max_size)(rng_), true);
}

Term TermGenerator::of_size(Count n, bool pure) {
  std::vector<VarName> scope;
  return gen(std::max<Count>(n, 1), scope, pure || cfg_.es_density <= 0.0);
}

VarName TermGenerator::pick_var(const std::vector<VarName>& scope) {
  std::bernoulli_distribution bound(0.7);
  if (!scope.empty() && (pool_.empty() || bound(rng_)))
    return scope[std::uniform_int_distribution<std::size_t>(0, scope.size() - 1)(rng_)];
  if (pool_.empty()) return VarName("x");
  return pool_[std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1)(rng_)];
}

VarName TermGenerator::pick_binder() {
  std::bernoulli_distribution reuse_free(0.2);
  if (!pool_.empty() && reuse_free(rng_))
    return pool_[std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1)(rng_)];
  return binders_[std::uniform_int_distribution<std::size_t>(0, binders_.size() - 1)(rng_)];
}

Term TermGenerator::gen(Count n, std::vector<VarName>& scope, bool pure) {
  if (n == 1) return Term::var(pick_var(scope));
  auto with_binder = [&](const VarName& x, Count size) {
    scope.push_back(x);
    Term body = gen(size, scope, pure);
    scope.pop_back();
    return body;
  };
  if (n == 2) {
    VarName x = pick_binder();
    return Term::abs(x, with_binder(x, 1));
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Count> split(1, n - 2);
  if (!pure && coin(rng_) < cfg_.es_density) {
    const Count k = split(rng_);
    VarName x = pick_binder();
    Term body = with_binder(x, k);
    return Term::clo(body, x, gen(n - 1 - k, scope, pure));
  }
  if (coin(rng_) < 0.4) {
    VarName x = pick_binder();
    return Term::abs(x, with_binder(x, n - 1));
  }
  const Count k = split(rng_);
  Term f = gen(k, scope, pure);
  return Term::app(f, gen(n - 1 - k, scope, pure));
}

std::vector<Term> enumerate_terms(Count n, const std::vector<VarName>& names) {
  std::vector<std::vector<Term>> by_size(n + 1);
  for (Count s = 1; s <= n; ++s) {
    auto& out = by_size[s];
    if (s == 1) {
      for (const auto& x : names) out.push_back(Term::var(x));
      continue;
    }
    for (const auto& x : names)
      for (const auto& b : by_size[s - 1]) out.push_back(Term::abs(x, b));
    for (Count k = 1; k + 1 < s; ++k)
      for (const auto& f : by_size[k])
        for (const auto& a : by_size[s - 1 - k]) out.push_back(Term::app(f, a));
    for (Count k = 1; k + 1 < s; ++k)
      for (const auto& x : names)
        for (const auto& b : by_size[k])
          for (const auto& u : by_size[s - 1 - k]) out.push_back(Term::clo(b, x, u));
  }
  return n == 0 ? std::vector<Term>{} : by_size[n];
}

std::vector<Term> enumerate_up_to(Count max_size, const std::vector<VarName>& names) {
  std::vector<Term> out;
  for (Count s = 1; s <= max_size; ++s) {
    auto level = enumerate_terms(s, names);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shrinking

namespace {

void positions(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  const int children = t.is_var() ? 0 : t.is_abs() ? 1 : 2;
  for (int i = 0; i < children; ++i) {
    cur.push_back(static_cast<std::uint8_t>(i));
    positions(t.child(i), cur, out);
    cur.pop_back();
  }
}

std::size_t es_count(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return 0;
    case TermKind::Abs:
      return es_count(t.body());
    case TermKind::App:
      return es_count(t.fun()) + es_count(t.arg());
    case TermKind::Clo:
      return 1 + es_count(t.body()) + es_count(t.arg());
  }
  return 0;
}

}  // namespace

std::vector<Term> shrink_candidates(const Term& t, const std::vector<VarName>& vars) {
  std::vector<Position> ps;
  Position cur;
  positions(t, cur, ps);
  std::vector<Term> out;
  std::set<std::string> seen{print(t)};
  auto add = [&](Term c) {
    if (seen.insert(print(c)).second) out.push_back(std::move(c));
  };
  for (const auto& p : ps) {
    const Term& sub = subterm_at(t, p);
    if (sub.is_var()) continue;
    add(replace_at(t, p, sub.child(0)));
    if (!sub.is_abs()) add(replace_at(t, p, sub.child(1)));
    for (const auto& v : vars) add(replace_at(t, p, Term::var(v)));
  }
  std::stable_sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return es_count(a) < es_count(b);
  });
  return out;
}

Term shrink(const Term& t, const std::function<bool(const Term&)>& still_fails,
            const std::vector<VarName>& vars, Count max_attempts) {
  Term current = t;
  Count attempts = 0;
  while (true) {
    bool improved = false;
    for (const auto& c : shrink_candidates(current, vars)) {
      if (attempts >= max_attempts) return current;
      ++attempts;
      if (still_fails(c)) {
        current = c;
        improved = true;
        break;
      }
    }
    if (!improved) return current;
  }
}

// ---------------------------------------------------------------------------
// Traces

TraceRecord make_trace(const Term& initial, const NormalizeResult& r) {
  TraceRecord t;
  t.initial = initial;
  for (const auto& st : r.trace) t.steps.emplace_back(st.kind.tag_name(), st.result);
  t.m = r.m;
  t.e = r.e;
  return t;
}

nlohmann::json trace_to_json(const TraceRecord& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& [kind, term] : t.steps) steps.push_back({{"kind", kind}, {"term", print(term)}});
  return {{"initial", print(t.initial)}, {"steps", steps}, {"counts", {{"m", t.m}, {"e", t.e}}}};
}

TraceRecord trace_from_json(const nlohmann::json& j) {
  TraceRecord t;
  t.initial = parse(j.at("initial").get<std::string>());
  for (const auto& s : j.at("steps")) t.steps.emplace_back(s.at("kind").get<std::string>(), parse(s.at("term").get<std::string>()));
  t.m = j.at("counts").at("m").get<Count>();
  t.e = j.at("counts").at("e").get<Count>();
  return t;
}

std::string validate_trace(const TraceRecord& t, Strategy s, const ValueAssignment& sigma) {
  Term prev = t.initial;
  const ReductionParams top = ReductionParams::top(t.initial);
  Count m = 0, e = 0;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& [kind, term] = t.steps[i];
    std::vector<LabeledStep> steps;
    switch (s) {
      case Strategy::Lcbv:
        steps = lcbv_steps(prev);
        break;
      case Strategy::Ucbv:
        steps = ucbv_steps(prev, top);
        break;
      case Strategy::Stable:
        steps = stable_steps(prev, top);
        break;
      case Strategy::Sigma:
        steps = sigma_steps(prev, sigma);
        break;
    }
    bool found = false;
    for (const auto& st : steps)
      if (st.kind.tag_name() == kind && alpha_eq(st.result, term)) {
        found = true;
        break;
      }
    if (!found) return "step " + std::to_string(i + 1) + " (" + kind + ") is not derivable from " + print(prev);
    if (kind == "db") ++m;
    if (kind == "lsv") ++e;
    prev = term;
  }
  if (m != t.m || e != t.e) return "recorded counts do not match the steps";
  return {};
}

}  // namespace cbv::harness
