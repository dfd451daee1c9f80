#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

#include "cbv/equiv.hpp"
#include "cbv/glamour.hpp"
#include "cbv/harness.hpp"
#include "cbv/syntax.hpp"
#include "cbv/system_u.hpp"
#include "cbv/ucbv.hpp"

namespace cbv::harness {

namespace {

constexpr std::uint64_t kAll = std::numeric_limits<std::uint64_t>::max();

struct Verdict {
  enum Kind { Pass, Fail, Skip };
  Kind kind = Pass;
  std::string message;
  Count steps = 0;
  std::optional<double> metric;

  static Verdict pass(Count steps = 0) { return {Pass, {}, steps, {}}; }
  static Verdict fail(std::string why) { return {Fail, std::move(why), 0, {}}; }
  static Verdict skip(std::string why = {}) { return {Skip, std::move(why), 0, {}}; }
};

struct Suite {
  std::string name;
  // Draws a random instance; may set aux to select a variant.
  std::function<Term(TermGenerator&, std::uint64_t&)> draw;
  std::function<Verdict(const Term&, std::uint64_t aux, const FuzzConfig&)> check;
  std::string metric;  // name under which the maximum of Verdict::metric is reported
};

// Every partition of fv(t) into (𝒜, 𝒮).
std::vector<std::pair<VarSet, VarSet>> partitions(const Term& t) {
  const auto& fv = t.fv_list();
  std::vector<std::pair<VarSet, VarSet>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << fv.size()); ++mask) {
    VarSet a, s;
    for (std::size_t i = 0; i < fv.size(); ++i) (mask >> i & 1 ? a : s).insert(fv[i]);
    out.emplace_back(std::move(a), std::move(s));
  }
  return out;
}

std::set<std::pair<int, std::string>> step_keys(const std::vector<LabeledStep>& steps) {
  std::set<std::pair<int, std::string>> out;
  for (const auto& st : steps) out.emplace(st.kind.tag, alpha_key(st.result));
  return out;
}

// ---------------------------------------------------------------------------

// The diamond property at t: distinct reducts close in one swapped step each.
std::string diamond_at(const Term& t, Count& pairs) {
  const ReductionParams p = ReductionParams::top(t);
  auto steps = ucbv_steps(t, p);
  std::vector<std::set<std::pair<int, std::string>>> next(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) next[i] = step_keys(ucbv_steps(steps[i].result, p));
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (std::size_t j = i + 1; j < steps.size(); ++j) {
      if (alpha_eq(steps[i].result, steps[j].result)) continue;
      ++pairs;
      bool closed = false;
      for (const auto& [kind, key] : next[i])
        if (kind == steps[j].kind.tag && next[j].count({steps[i].kind.tag, key})) {
          closed = true;
          break;
        }
      if (!closed)
        return "from " + print(t) + ", reducts " + print(steps[i].result) + " (" + steps[i].kind.tag_name() +
               ") and " + print(steps[j].result) + " (" + steps[j].kind.tag_name() +
               ") do not close in one swapped step each";
    }
  return {};
}

// Checked at t and along the first steps of its leftmost reduction sequence.
Verdict check_diamond(const Term& t, std::uint64_t, const FuzzConfig& cfg) {
  constexpr Count kPathSteps = 100;
  if (!ucbv_reducible(t, ReductionParams::top(t))) return Verdict::skip("irreducible");
  Count pairs = 0;
  Term cur = t;
  for (Count i = 0; i <= std::min(cfg.budget, kPathSteps); ++i) {
    if (auto why = diamond_at(cur, pairs); !why.empty()) return Verdict::fail(why);
    auto steps = ucbv_steps(cur, ReductionParams::top(cur));
    if (steps.empty()) break;
    cur = steps.front().result;
  }
  return Verdict::pass(pairs);
}

Verdict check_same_counts(const Term& t, std::uint64_t, const FuzzConfig& cfg) {
  ReductionGraph g;
  try {
    g = ucbv_reduction_graph(t, std::max<Count>(cfg.budget, 1));
  } catch (const BudgetExceeded&) {
    return Verdict::skip("reduction graph too large");
  }
  // Counts of all maximal paths from each node; a cycle means divergence.
  enum Color { White, Grey, Black };
  std::vector<Color> color(g.nodes.size(), White);
  std::vector<std::set<std::pair<Count, Count>>> counts(g.nodes.size());
  bool cyclic = false;
  std::function<void(std::size_t)> visit = [&](std::size_t n) {
    color[n] = Grey;
    if (g.edges[n].empty()) counts[n].insert({0, 0});
    for (const auto& e : g.edges[n]) {
      if (color[e.target] == Grey) {
        cyclic = true;
        continue;
      }
      if (color[e.target] == White) visit(e.target);
      for (auto [m, x] : counts[e.target])
        counts[n].insert(e.kind == StepKind::Db ? std::pair{m + 1, x} : std::pair{m, x + 1});
    }
    color[n] = Black;
  };
  visit(0);
  if (cyclic) return Verdict::skip("diverging reduction graph");
  if (counts[0].size() != 1) {
    std::string list;
    for (auto [m, e] : counts[0]) list += " (" + std::to_string(m) + "," + std::to_string(e) + ")";
    return Verdict::fail("maximal paths have different counts:" + list);
  }
  return Verdict::pass(g.nodes.size());
}

Verdict check_nf_characterization(const Term& t, std::uint64_t, const FuzzConfig&) {
  Count checks = 0;
  for (const auto& [a, s] : partitions(t))
    for (Flag mu : {Flag::Applied, Flag::NotApplied}) {
      const ReductionParams p{a, s, mu};
      ++checks;
      const std::string where = std::string(" (") + std::to_string(a.size()) + " abstraction variables, flag " +
                                (mu == Flag::Applied ? "@" : "not @") + ")";
      const bool nf = is_nf(t, p);
      const bool reducible = ucbv_reducible(t, p);
      const bool habs = is_hereditary_abstraction(t, a);
      if (nf && reducible) return Verdict::fail("ucbv: a normal form is reducible" + where);
      if (!nf && !reducible && !(habs && mu == Flag::Applied))
        return Verdict::fail("ucbv: an irreducible term is not a normal form" + where);
      if (habs && !abs_ctx(t) && !ucbv_reducible(t, {a, s, Flag::Applied}))
        return Verdict::fail("ucbv: an applied hereditary abstraction is irreducible" + where);
    }
  for (const auto& [v, rest] : partitions(t))
    for (Flag mu : {Flag::Applied, Flag::NotApplied}) {
      if (mu == Flag::Applied && abs_ctx(t)) continue;
      ++checks;
      if (is_vnf(t, v, mu) == lcbv_reducible(t, v))
        return Verdict::fail(std::string("lcbv: is_vnf disagrees with reducibility, flag ") +
                             (mu == Flag::Applied ? "@" : "not @"));
    }
  return Verdict::pass(checks);
}

Verdict check_measure_decrease(const Term& t, std::uint64_t aux, const FuzzConfig&) {
  const auto& sigmas = sample_assignments();
  std::vector<std::size_t> chosen;
  if (aux == kAll)
    for (std::size_t i = 0; i < sigmas.size(); ++i) chosen.push_back(i);
  else
    chosen.push_back(aux % sigmas.size());
  Count steps = 0;
  try {
    for (auto i : chosen) {
      const ValueAssignment& sigma = sigmas[i];
      const std::string tag = " (assignment " + std::to_string(i) + ")";
      const NormalizeResult run = normalize_sigma(t, sigma);
      // Every step out of every term on the normalization sequence.
      std::vector<Term> path{t};
      for (const auto& st : run.trace) path.push_back(st.result);
      for (const auto& from : path) {
        const Count before = meas_sigma(from, sigma);
        const Count plain = meas(from);
        for (const auto& st : sigma_steps(from, sigma)) {
          ++steps;
          if (meas_sigma(st.result, sigma) >= before)
            return Verdict::fail("meas_sigma does not decrease along " + st.kind.tag_name() + " from " +
                                 print(from) + " to " + print(st.result) + tag);
          const Count after = meas(st.result);
          if (st.kind.tag == StepKind::Lsv && after >= plain)
            return Verdict::fail("meas does not decrease along lsv from " + print(from) + tag);
          if (st.kind.tag == StepKind::Sub && after > plain)
            return Verdict::fail("meas increases along sub from " + print(from) + tag);
        }
      }
      auto reducts = sigma_steps(t, sigma);
      const Term& nf = run.nf;
      if (!sigma_steps(nf, sigma).empty()) return Verdict::fail("normal form is reducible" + tag);
      if (!alpha_eq(nf, partial_unfold(t, sigma)))
        return Verdict::fail("normal form " + print(nf) + " differs from the partial unfolding " +
                             print(partial_unfold(t, sigma)) + tag);
      std::vector<std::string> joins;
      for (const auto& st : reducts) joins.push_back(alpha_key(normalize_sigma(st.result, sigma).nf));
      for (std::size_t k = 1; k < joins.size(); ++k)
        if (joins[k] != joins[0]) return Verdict::fail("a one-step peak does not rejoin" + tag);
    }
  } catch (const MeasureOverflow&) {
    return Verdict::skip("measure overflow");
  }
  return Verdict::pass(steps);
}

Verdict check_unfolding_bridge(const Term& t, std::uint64_t, const FuzzConfig&) {
  const ReductionParams p = ReductionParams::top(t);
  const Term u = partial_unfold(t);
  const bool nf = is_nf(t, p);
  if (nf != is_vnf(u, {}, Flag::NotApplied))
    return Verdict::fail(std::string("is_nf is ") + (nf ? "true" : "false") + " but the unfolding " + print(u) +
                         (nf ? " is not" : " is") + " a value normal form");
  if (ucbv_reducible(t, p)) {
    bool db = false;
    for (const auto& st : lcbv_steps(u))
      if (st.kind.tag == StepKind::Db) db = true;
    if (!db) return Verdict::fail("reducible term whose unfolding " + print(u) + " has no db redex");
  }
  return Verdict::pass(1);
}

Verdict check_glamour(const Term& c, std::uint64_t, const FuzzConfig& cfg) {
  if (!is_pure(c)) return Verdict::skip("not a pure code");
  try {
    normalize_stable(c, cfg.budget);
  } catch (const BudgetExceeded&) {
    return Verdict::skip("does not normalize within budget");
  }
  SimulationReport rep;
  try {
    rep = check_simulation(c, 100 * cfg.budget);
  } catch (const BudgetExceeded&) {
    return Verdict::skip("machine budget exhausted");
  }
  if (!rep.ok) return Verdict::fail(rep.failure);
  const double ue = static_cast<double>(rep.run.count(Transition::UE));
  const double ratio = static_cast<double>(rep.run.administrative()) / (static_cast<double>(rep.size) * (ue + 1.0));
  Verdict v = Verdict::pass(rep.run.trace.size());
  v.metric = ratio;
  return v;
}

Verdict check_bisimulation(const Term& t, std::uint64_t aux, const FuzzConfig&) {
  const VarSet fv = free_vars(t);
  if (!stable_check(t, {}, fv)) return Verdict::skip("not stable");
  auto ns = equiv_neighbours(t);
  if (ns.empty()) return Verdict::skip("no equivalent neighbour");
  std::vector<Term> chosen;
  if (aux == kAll)
    chosen = ns;
  else
    chosen.push_back(ns[aux % ns.size()]);
  const ReductionParams p = ReductionParams::top(t);
  auto from_t = stable_steps(t, p);
  Count pairs = 0;
  for (const auto& u : chosen) {
    if (!stable_check(u, {}, fv)) return Verdict::fail("equivalent term " + print(u) + " is not stable");
    auto from_u = stable_steps(u, p);
    auto matched = [](const LabeledStep& s, const std::vector<LabeledStep>& others) {
      for (const auto& o : others)
        if (o.kind.tag == s.kind.tag && struct_equiv(s.result, o.result) == EquivResult::Equivalent) return true;
      return false;
    };
    for (const auto& s : from_t) {
      ++pairs;
      if (!matched(s, from_u))
        return Verdict::fail("step to " + print(s.result) + " is not matched from " + print(u));
    }
    for (const auto& s : from_u) {
      ++pairs;
      if (!matched(s, from_t))
        return Verdict::fail("step from " + print(u) + " to " + print(s.result) + " is not matched");
    }
  }
  return Verdict::pass(pairs);
}

// Lemma-level checks on every term node of a derivation.
std::string check_node_lemmas(const Derivation& d) {
  for (const auto& p : d.premises)
    if (auto why = check_node_lemmas(p); !why.empty()) return why;
  if (d.is_context()) return {};
  VarSet a, s;
  for (const auto& x : d.subject.fv_list()) {
    auto it = d.env.find(x);
    if (it != d.env.end() && it->second.is_s())
      s.insert(x);
    else
      a.insert(x);
  }
  if (is_hereditary_abstraction(d.subject, a) && d.type.is_s())
    return "hereditary abstraction " + print(d.subject) + " has type s";
  if (is_structure(d.subject, s) && !d.type.is_tight())
    return "structure " + print(d.subject) + " has non-tight type " + print(d.type);
  return {};
}

std::string check_produced(const Derivation& d, const char* what) {
  auto c = check_derivation(d);
  if (!c.ok) return std::string(what) + " does not check: " + c.reason;
  if (!is_tight(d)) return std::string(what) + " is not tight";
  if (!relevance_holds(d)) return std::string(what) + " violates relevance";
  if (auto why = check_node_lemmas(d); !why.empty()) return std::string(what) + ": " + why;
  return {};
}

Verdict check_typing(const Term& t, std::uint64_t, const FuzzConfig& cfg) {
  NormalizeResult n;
  try {
    n = normalize_ucbv(t, cfg.budget);
  } catch (const BudgetExceeded&) {
    return Verdict::skip("does not terminate within budget");
  }
  const ReductionParams top = ReductionParams::top(t);
  Derivation nf = derive_nf(n.nf, top);
  if (auto why = check_produced(nf, "normal form derivation"); !why.empty()) return Verdict::fail(why);
  if (nf.m != 0 || nf.e != 0) return Verdict::fail("normal form derivation has non-zero counters");

  InferResult r = infer_tight(t, cfg.budget);
  if (r.status != InferResult::Status::Found) return Verdict::fail("no tight derivation found: " + r.detail);
  if (r.m != n.m || r.e != n.e)
    return Verdict::fail("tight counters (" + std::to_string(r.m) + "," + std::to_string(r.e) +
                         ") differ from evaluation (" + std::to_string(n.m) + "," + std::to_string(n.e) + ")");
  if (auto why = check_produced(*r.derivation, "inferred derivation"); !why.empty()) return Verdict::fail(why);
  if (!n.trace.empty()) {
    const LabeledStep& first = n.trace.front();
    InferResult next = infer_tight(first.result, cfg.budget);
    const bool db = first.kind.tag == StepKind::Db;
    if (next.status != InferResult::Status::Found || next.m + (db ? 1 : 0) != r.m || next.e + (db ? 0 : 1) != r.e)
      return Verdict::fail("counters do not decrease in the " + first.kind.tag_name() + " coordinate after one step");
  }
  return Verdict::pass(n.trace.size());
}

Verdict check_containment(const Term& t, std::uint64_t, const FuzzConfig&) {
  Count checks = 0;
  for (const auto& [a, s] : partitions(t)) {
    for (Flag mu : {Flag::Applied, Flag::NotApplied}) {
      const ReductionParams p{a, s, mu};
      auto lc = step_keys(lcbv_steps(t, a));
      for (const auto& st : ucbv_steps(t, p)) {
        ++checks;
        if (!lc.count({st.kind.tag, alpha_key(st.result)}))
          return Verdict::fail("ucbv " + st.kind.tag_name() + " step to " + print(st.result) + " is not an lcbv step");
      }
    }
  }
  const ReductionParams top = ReductionParams::top(t);
  auto uc = step_keys(ucbv_steps(t, top));
  auto lc = step_keys(lcbv_steps(t, {}));
  for (const auto& st : stable_steps(t, top)) {
    ++checks;
    const auto key = std::pair<int, std::string>{st.kind.tag, alpha_key(st.result)};
    if (under_non_structure_argument(t, rewrite_site(st), top)) {
      if (!lc.count(key)) return Verdict::fail("stable step to " + print(st.result) + " is not an lcbv step");
    } else if (!uc.count(key)) {
      return Verdict::fail("stable step to " + print(st.result) + " is not a ucbv step");
    }
  }
  return Verdict::pass(checks);
}

// A stable term: either a random stable term or the decoding of a machine
// state reached after a random number of transitions.
Term draw_stable(TermGenerator& g) {
  std::bernoulli_distribution direct(0.3);
  if (direct(g.rng())) {
    Term t = g.next();
    if (stable_check(t, {}, free_vars(t))) return t;
  }
  Term c = g.next_pure();
  MachineState s = inject(c);
  NameSupply names = NameSupply::above(s.focus);
  const Count k = std::uniform_int_distribution<Count>(0, 60)(g.rng());
  for (Count i = 0; i < k; ++i) {
    StepOutcome o = machine_step(s, names);
    if (o.final) break;
    s = std::move(o.next);
  }
  return decode(s);
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {"diamond", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_diamond, {}},
      {"same-counts", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_same_counts, {}},
      {"nf-characterization", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_nf_characterization, {}},
      {"measure-decrease",
       [](TermGenerator& g, std::uint64_t& aux) {
         aux = g.rng()();
         return g.next();
       },
       check_measure_decrease, {}},
      {"unfolding-bridge", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_unfolding_bridge, {}},
      {"glamour-simulation", [](TermGenerator& g, std::uint64_t&) { return g.next_pure(); }, check_glamour,
       "K"},
      {"bisimulation",
       [](TermGenerator& g, std::uint64_t& aux) {
         aux = g.rng()();
         return draw_stable(g);
       },
       check_bisimulation, {}},
      {"typing-quantitative", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_typing, {}},
      {"containment", [](TermGenerator& g, std::uint64_t&) { return g.next(); }, check_containment, {}},
  };
  return all;
}

Verdict evaluate(const Suite& s, const Term& t, std::uint64_t aux, const FuzzConfig& cfg) {
  try {
    return s.check(t, aux, cfg);
  } catch (const BudgetExceeded&) {
    return Verdict::skip("budget exhausted");
  } catch (const std::exception& ex) {
    return Verdict::fail(std::string("exception: ") + ex.what());
  }
}

}  // namespace

const std::vector<ValueAssignment>& sample_assignments() {
  static const std::vector<ValueAssignment> all = [] {
    const Term id = identity(VarName("a"));
    const Term delta = Term::abs("a", Term::app(Term::var("a"), Term::var("a")));
    const Term konst = Term::abs("a", Term::abs("b", Term::var("a")));
    const Term za = Term::abs("a", Term::app(Term::var("z"), Term::var("a")));
    return std::vector<ValueAssignment>{
        {},
        {{"x", id}},
        {{"y", id}},
        {{"x", delta}, {"y", Term::var("z")}},
        {{"x", Term::var("z")}, {"y", konst}},
        {{"x", za}},
        {{"x", Term::var("u")}, {"y", Term::var("u")}},
        {{"a", id}, {"x", delta}},
    };
  }();
  return all;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : suites()) n.push_back(s.name);
    return n;
  }();
  return names;
}

nlohmann::json report_to_json(const Report& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"original", print(f.original)}, {"shrunk", print(f.shrunk)}, {"message", f.message}});
  return {{"suite", r.suite},     {"ok", r.ok()},         {"checked", r.checked}, {"skipped", r.skipped},
          {"steps", r.steps},     {"failures", failures}, {"metrics", r.metrics}};
}

Report run_suite(const std::string& name, const FuzzConfig& cfg) {
  validate(cfg);
  auto it = std::find_if(suites().begin(), suites().end(), [&](const Suite& s) { return s.name == name; });
  if (it == suites().end()) throw InvalidConfig("unknown suite '" + name + "'");
  const Suite& suite = *it;
  FuzzConfig gen_cfg = cfg;
  if (name == "measure-decrease") gen_cfg.es_density = std::max(cfg.es_density, 0.5);

  Report rep;
  rep.suite = name;
  const std::vector<VarName> vars = free_pool(std::max<Count>(cfg.free_var_pool, 1));
  constexpr std::size_t kMaxRecorded = 10;

  auto record = [&](const Term& t, std::uint64_t aux, Verdict v) {
    if (v.kind == Verdict::Skip) {
      ++rep.skipped;
      return;
    }
    ++rep.checked;
    rep.steps += v.steps;
    if (v.metric && !suite.metric.empty()) {
      auto [m, inserted] = rep.metrics.emplace(suite.metric, *v.metric);
      if (!inserted) m->second = std::max(m->second, *v.metric);
    }
    if (v.kind == Verdict::Fail) {
      if (rep.failures.size() >= kMaxRecorded) return;
      Term small = shrink(
          t, [&](const Term& c) { return evaluate(suite, c, aux, cfg).kind == Verdict::Fail; }, vars);
      rep.failures.push_back({t, small, v.message});
    }
  };

  if (cfg.exhaustive) {
    for (const auto& t : enumerate_up_to(cfg.max_size, vars)) record(t, kAll, evaluate(suite, t, kAll, cfg));
    return rep;
  }
  TermGenerator gen(gen_cfg);
  const Count max_draws = cfg.count * 200;
  for (Count draws = 0; rep.checked < cfg.count && draws < max_draws; ++draws) {
    std::uint64_t aux = 0;
    Term t = suite.draw(gen, aux);
    record(t, aux, evaluate(suite, t, aux, cfg));
  }
  return rep;
}

}  // namespace cbv::harness
