// Acceptance checks. Usage: acceptance N runs criterion N (1..10) and prints
// one PASS or FAIL line; without an argument every criterion runs.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cbv/harness.hpp"
#include "cbv/syntax.hpp"
#include "cbv/system_u.hpp"
#include "cbv/ucbv.hpp"
#include "cbv/unfolding.hpp"

using namespace cbv;
using namespace cbv::harness;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects failed expectations; the first few are reported.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ++failures_;
    if (messages_.size() < 3) messages_.push_back(what);
  }
  void report(const Report& r) {
    for (const auto& f : r.failures)
      expect(false, r.suite + ": " + f.message + " on " + print(f.shrunk));
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    std::string d = std::to_string(failures_) + " failure(s): ";
    for (std::size_t i = 0; i < messages_.size(); ++i) d += (i ? "; " : "") + messages_[i];
    return {false, d};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> messages_;
};

Term P(const std::string& s) { return parse(s); }

Outcome golden_traces() {
  Checker c;
  const Term t = P("(\\x. z x (x y)) (\\w.w)");
  const NormalizeResult l = normalize_lcbv(t, 100);
  const std::vector<std::pair<StepKind::Tag, std::string>> lcbv = {
      {StepKind::Db, "(z x (x y))[x\\ \\w.w]"},
      {StepKind::Lsv, "(z (\\w.w) (x y))[x\\ \\w.w]"},
      {StepKind::Lsv, "(z (\\w.w) ((\\w.w) y))[x\\ \\w.w]"},
      {StepKind::Db, "(z (\\w.w) w[w\\y])[x\\ \\w.w]"},
      {StepKind::Lsv, "(z (\\w.w) y[w\\y])[x\\ \\w.w]"},
  };
  c.expect(l.trace.size() == 5 && l.m == 2 && l.e == 3, "lcbv: expected 5 steps (2 db, 3 lsv)");
  for (std::size_t i = 0; i < lcbv.size() && i < l.trace.size(); ++i)
    c.expect(l.trace[i].kind.tag == lcbv[i].first && alpha_eq(l.trace[i].result, P(lcbv[i].second)),
             "lcbv step " + std::to_string(i + 1) + " gives " + print(l.trace[i].result));

  const NormalizeResult u = normalize_ucbv(t);
  c.expect(u.trace.size() == 3 && u.m == 2 && u.e == 1, "ucbv: expected 3 steps (2 db, 1 lsv)");
  c.expect(alpha_eq(u.nf, P("(z x (w[w\\y]))[x\\ \\w.w]")), "ucbv: normal form " + print(u.nf));

  const NormalizeResult v = normalize_ucbv(P("(x z)[x\\ y[y\\ \\w.w]]"));
  c.expect(v.m == 1 && v.e == 2, "second example: counts differ");
  c.expect(alpha_eq(v.nf, P("x1[x1\\z][x\\y][y\\ \\w.w]")), "second example: normal form " + print(v.nf));
  return c.outcome("lcbv 5 steps (2,3), ucbv 3 steps (2,1), second example (1,2), normal forms match");
}

Outcome unfolding_goldens() {
  Checker c;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"(\\w.x)[x\\y]", "(\\w.x)[x\\y]"},
      {"(x y)[y\\ \\w.w]", "(x (\\w.w))[y\\ \\w.w]"},
      {"x[x\\ y[z\\ \\w.w]]", "y[x\\y][z\\ \\w.w]"},
      {"x[x\\ \\w.w]", "(\\w.w)[x\\ \\w.w]"},
  };
  for (const auto& [in, out] : cases) {
    const Term u = partial_unfold(P(in));
    c.expect(alpha_eq(u, P(out)), in + " unfolds to " + print(u));
  }
  const Term n = normalize_sigma(P("x[x\\ \\w.w]")).nf;
  c.expect(alpha_eq(n, partial_unfold(P("x[x\\ \\w.w]"))), "sigma normal form " + print(n));
  return c.outcome("three displays and I[x\\I] reproduced; sigma normal form agrees");
}

Outcome measure_goldens() {
  Checker c;
  c.expect(measvar("y", P("x[x\\ y y]")) == 4, "#y(x[x\\y y]) != 4");
  const std::vector<std::string> terms = {"x[x\\ y[y\\z]]", "y[x\\y][y\\z]", "y[x\\z][y\\z]",
                                          "z[x\\z][y\\z]", "x[x\\ z[y\\z]]"};
  const std::vector<Count> occ = {4, 3, 3, 3, 4}, ms = {3, 2, 1, 0, 1};
  std::ostringstream got;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Count o = measvar("z", P(terms[i])), m = meas(P(terms[i]));
    got << (i ? " " : "") << "(" << o << "," << m << ")";
    c.expect(o == occ[i], "#z of " + terms[i] + " is " + std::to_string(o));
    c.expect(m == ms[i], "meas of " + terms[i] + " is " + std::to_string(m));
  }
  return c.outcome("#y = 4; (#z, meas) = " + got.str());
}

std::vector<std::pair<VarSet, VarSet>> partitions(const Term& t) {
  std::vector<VarName> fv(t.fv_list().begin(), t.fv_list().end());
  std::vector<std::pair<VarSet, VarSet>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << fv.size()); ++mask) {
    VarSet a, s;
    for (std::size_t i = 0; i < fv.size(); ++i) ((mask >> i) & 1 ? a : s).insert(fv[i]);
    out.emplace_back(a, s);
  }
  return out;
}

Outcome nf_characterization() {
  Checker c;
  Count terms = 0, checks = 0, exempt = 0;
  for (const auto& t : enumerate_up_to(7, {VarName("x"), VarName("y")})) {
    ++terms;
    for (const auto& [a, s] : partitions(t))
      for (Flag mu : {Flag::Applied, Flag::NotApplied}) {
        ++checks;
        const ReductionParams p{a, s, mu};
        const bool nf = is_nf(t, p), red = ucbv_reducible(t, p);
        c.expect(!(nf && red), "ucbv: reducible normal form " + print(t));
        if (mu == Flag::Applied && abs_ctx(t)) {
          // An abstraction under @ is never a normal form; whether it reduces
          // depends on the surrounding application.
          c.expect(!nf, "ucbv: applied abstraction " + print(t));
          ++exempt;
          continue;
        }
        c.expect(nf == !red, "ucbv: normal form and irreducibility disagree on " + print(t));
      }
    for (const auto& [v, rest] : partitions(t))
      for (Flag mu : {Flag::Applied, Flag::NotApplied}) {
        ++checks;
        const bool nf = is_vnf(t, v, mu), red = lcbv_reducible(t, v);
        c.expect(!(nf && red), "lcbv: reducible normal form " + print(t));
        if (mu == Flag::Applied && abs_ctx(t)) {
          c.expect(!nf, "lcbv: applied abstraction " + print(t));
          ++exempt;
          continue;
        }
        c.expect(nf == !red, "lcbv: normal form and irreducibility disagree on " + print(t));
      }
  }
  return c.outcome(std::to_string(terms) + " terms, " + std::to_string(checks) + " (term, frames, flag) checks, " +
                   std::to_string(exempt) + " of them abstractions under @");
}

Outcome diamond_and_counts() {
  Checker c;
  FuzzConfig d;
  d.seed = 1;
  d.count = 5000;
  d.max_size = 25;
  d.free_var_pool = 2;
  const Report dr = run_suite("diamond", d);
  c.report(dr);
  c.expect(dr.checked == 5000, "only " + std::to_string(dr.checked) + " reducible terms");
  FuzzConfig s;
  s.exhaustive = true;
  s.max_size = 6;
  s.budget = 10000;
  const Report sr = run_suite("same-counts", s);
  c.report(sr);
  c.expect(sr.skipped == 0, std::to_string(sr.skipped) + " graphs not explored");
  return c.outcome("diamond: " + std::to_string(dr.checked) + " reducible terms, " + std::to_string(dr.steps) +
                   " peaks; same-counts: " + std::to_string(sr.checked) + " graphs");
}

Outcome measure_decrease() {
  Checker c;
  Count steps = 0, pairs = 0;
  for (std::uint64_t seed = 1; steps < 10000 || pairs < 2000; ++seed) {
    FuzzConfig cfg;
    cfg.seed = seed;
    cfg.count = 1000;
    cfg.max_size = 20;
    cfg.es_density = 0.5;
    cfg.free_var_pool = 3;
    const Report r = run_suite("measure-decrease", cfg);
    c.report(r);
    steps += r.steps;
    pairs += r.checked;
  }
  return c.outcome(std::to_string(steps) + " sigma steps decrease the measure; " + std::to_string(pairs) +
                   " (t, sigma) pairs normalize to the unfolding and all peaks rejoin");
}

Outcome unfolding_bridge() {
  Checker c;
  FuzzConfig e;
  e.exhaustive = true;
  e.max_size = 7;
  const Report er = run_suite("unfolding-bridge", e);
  c.report(er);
  FuzzConfig r;
  r.seed = 1;
  r.count = 5000;
  r.max_size = 20;
  r.free_var_pool = 3;
  const Report rr = run_suite("unfolding-bridge", r);
  c.report(rr);
  return c.outcome(std::to_string(er.checked) + " enumerated and " + std::to_string(rr.checked) +
                   " random terms");
}

Outcome glamour_simulation() {
  Checker c;
  FuzzConfig cfg;
  cfg.seed = 1;
  cfg.count = 1000;
  cfg.max_size = 20;
  cfg.free_var_pool = 2;
  cfg.budget = 1000;
  const Report r = run_suite("glamour-simulation", cfg);
  c.report(r);
  c.expect(r.checked == 1000, "only " + std::to_string(r.checked) + " normalizing terms");
  const double k = r.metrics.count("K") ? r.metrics.at("K") : 0.0;
  constexpr double kBound = 2.0;
  c.expect(k <= kBound, "administrative overhead ratio " + std::to_string(k) + " exceeds K = 2");
  std::ostringstream s;
  s << r.checked << " runs, " << r.steps << " transitions checked; fitted K = " << k << " (bound K = 2)";
  return c.outcome(s.str());
}

Outcome bisimulation() {
  Checker c;
  FuzzConfig cfg;
  cfg.seed = 1;
  cfg.count = 2000;
  cfg.max_size = 15;
  const Report r = run_suite("bisimulation", cfg);
  c.report(r);
  c.expect(r.checked == 2000, "only " + std::to_string(r.checked) + " pairs");
  return c.outcome(std::to_string(r.checked) + " stable pairs, " + std::to_string(r.steps) +
                   " stable steps matched up to structural equivalence");
}

Outcome quantitative_typing() {
  Checker c;
  const Type s = Type::s();
  const Type m = Type::multiset({Arrow{s, s}});
  const Derivation xz = mk_app(mk_var("x", m), mk_var("z", s));
  const Derivation yy = mk_es(mk_var("y", m), "y", mk_abs("w", P("w"), {mk_var("w", s)}));
  const Derivation ex = mk_es(xz, "x", yy);
  const CheckResult cr = check_derivation(ex);
  c.expect(cr.ok, "example derivation: " + cr.reason);
  c.expect(is_tight(ex) && ex.m == 1 && ex.e == 2, "example derivation is not tight at (1,2)");
  c.expect(relevance_holds(ex), "example derivation violates relevance");

  FuzzConfig cfg;
  cfg.seed = 1;
  cfg.count = 200;
  cfg.max_size = 15;
  cfg.budget = 1000;
  const Report r = run_suite("typing-quantitative", cfg);
  c.report(r);
  c.expect(r.checked == 200, "only " + std::to_string(r.checked) + " terminating terms");
  return c.outcome("example checks tight at (1,2); " + std::to_string(r.checked) +
                   " terminating terms typed with the evaluator's counters");
}

struct Criterion {
  const char* name;
  double seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"golden traces", 1, golden_traces},
      {"partial unfolding goldens", 1, unfolding_goldens},
      {"measure goldens", 1, measure_goldens},
      {"normal forms and irreducibility", 300, nf_characterization},
      {"diamond and same counts", 120, diamond_and_counts},
      {"measure decrease and sigma confluence", 120, measure_decrease},
      {"unfolding bridge", 180, unfolding_bridge},
      {"machine simulation", 300, glamour_simulation},
      {"bisimulation", 120, bisimulation},
      {"quantitative typing", 600, quantitative_typing},
  };
  return all;
}

bool run_one(std::size_t n) {
  const Criterion& cr = criteria()[n - 1];
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = cr.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.ok && secs >= cr.seconds) o = {false, "took " + std::to_string(secs) + " s, limit " + std::to_string(cr.seconds)};
  std::ostringstream t;
  t.precision(3);
  t << secs;
  std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << n << " (" << cr.name << "): " << o.detail << " ["
            << t.str() << " s]" << std::endl;
  return o.ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::cerr << "usage: acceptance [N]\n";
    return 2;
  }
  if (argc == 2) {
    char* end = nullptr;
    const long n = std::strtol(argv[1], &end, 10);
    if (*end != '\0' || n < 1 || n > static_cast<long>(criteria().size())) {
      std::cerr << "criterion must be between 1 and " << criteria().size() << "\n";
      return 2;
    }
    return run_one(static_cast<std::size_t>(n)) ? 0 : 1;
  }
  bool ok = true;
  for (std::size_t n = 1; n <= criteria().size(); ++n) ok = run_one(n) && ok;
  return ok ? 0 : 1;
}
