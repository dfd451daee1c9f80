#include "cbv/ucbv.hpp"

#include <deque>

#include "engine.hpp"

namespace cbv {

ReductionParams ReductionParams::top(const Term& t) {
  return ReductionParams{{}, free_vars(t), Flag::NotApplied};
}

bool correct_for(const Term& t, const ReductionParams& p) {
  for (const auto& x : p.aframe)
    if (p.sframe.count(x)) return false;
  for (const auto& x : t.fv_list())
    if (!p.aframe.count(x) && !p.sframe.count(x)) return false;
  return true;
}

void require_correct(const Term& t, const ReductionParams& p) {
  if (!correct_for(t, p))
    throw CorrectnessViolation("frames must be disjoint and cover the free variables of the term");
}

bool is_hereditary_abstraction(const Term& t, const AbstractionFrame& a) {
  switch (t.kind()) {
    case TermKind::Abs:
      return true;
    case TermKind::Var:
      return a.count(t.name()) > 0;
    case TermKind::App:
      return false;
    case TermKind::Clo: {
      // Extending the frame is never worse, so h-sub2 is tried whenever its
      // argument premise holds and h-sub1 otherwise.
      AbstractionFrame inner = a;
      if (is_hereditary_abstraction(t.arg(), a))
        inner.insert(t.binder());
      else
        inner.erase(t.binder());
      return is_hereditary_abstraction(t.body(), inner);
    }
  }
  return false;
}

bool is_structure(const Term& t, const StructureFrame& s) {
  switch (t.kind()) {
    case TermKind::Var:
      return s.count(t.name()) > 0;
    case TermKind::Abs:
      return false;
    case TermKind::App:
      return is_structure(t.fun(), s);
    case TermKind::Clo: {
      StructureFrame inner = s;
      if (is_structure(t.arg(), s))
        inner.insert(t.binder());
      else
        inner.erase(t.binder());
      return is_structure(t.body(), inner);
    }
  }
  return false;
}

bool is_hereditary_variable(const Term& t, const VarName& x) {
  switch (t.kind()) {
    case TermKind::Var:
      return t.name() == x;
    case TermKind::Clo:
      if (!(t.binder() == x) && is_hereditary_variable(t.body(), x)) return true;
      return is_hereditary_variable(t.body(), t.binder()) && is_hereditary_variable(t.arg(), x);
    default:
      return false;
  }
}

std::pair<AbstractionFrame, StructureFrame> expand_frames(const AbstractionFrame& a,
                                                          const StructureFrame& s,
                                                          const SubstCtx& L) {
  AbstractionFrame a2 = a;
  StructureFrame s2 = s;
  for (auto it = L.entries.rbegin(); it != L.entries.rend(); ++it) {
    const auto& [x, u] = *it;
    const bool h = is_hereditary_abstraction(u, a2);
    const bool st = !h && is_structure(u, s2);
    a2.erase(x);
    s2.erase(x);
    if (h) a2.insert(x);
    if (st) s2.insert(x);
  }
  return {a2, s2};
}

namespace {

detail::Wanted wanted_for(const ReductionParams& p, const ValueMap& values) {
  detail::Wanted w;
  for (const auto& x : p.aframe) {
    auto it = values.find(x);
    if (it != values.end()) w.subs.emplace_back(x, it->second);
  }
  return w;
}

}  // namespace

std::vector<LabeledStep> ucbv_steps(const Term& t, const ReductionParams& p,
                                    const ValueMap& values) {
  require_correct(t, p);
  detail::EngineConfig cfg{detail::Calculus::Ucbv};
  return detail::enumerate(t, p.aframe, p.sframe, p.flag, wanted_for(p, values), cfg);
}

bool ucbv_reducible(const Term& t, const ReductionParams& p) {
  require_correct(t, p);
  ValueMap values;
  for (const auto& x : p.aframe) values.emplace(x, identity(VarName("w")));
  detail::EngineConfig cfg{detail::Calculus::Ucbv, 1};
  return !detail::enumerate(t, p.aframe, p.sframe, p.flag, wanted_for(p, values), cfg).empty();
}

namespace {

bool nf_rec(const Term& t, const VarSet& a, const VarSet& s, Flag mu) {
  switch (t.kind()) {
    case TermKind::Var:
      return !a.count(t.name()) || mu == Flag::NotApplied;
    case TermKind::Abs:
      return mu == Flag::NotApplied;
    case TermKind::App:
      return nf_rec(t.fun(), a, s, Flag::Applied) && nf_rec(t.arg(), a, s, Flag::NotApplied);
    case TermKind::Clo: {
      if (!nf_rec(t.arg(), a, s, Flag::NotApplied)) return false;
      const bool h = is_hereditary_abstraction(t.arg(), a);
      const bool st = !h && is_structure(t.arg(), s);
      if (!h && !st) return false;
      VarSet a2 = a, s2 = s;
      a2.erase(t.binder());
      s2.erase(t.binder());
      (h ? a2 : s2).insert(t.binder());
      return nf_rec(t.body(), a2, s2, mu);
    }
  }
  return false;
}

NormalizeResult run(const Term& t, detail::Calculus calc, Count budget) {
  NormalizeResult r;
  r.nf = t;
  const ReductionParams p = ReductionParams::top(t);
  detail::EngineConfig cfg{calc, 1};
  while (true) {
    auto steps = detail::enumerate(r.nf, p.aframe, p.sframe, p.flag, detail::Wanted{}, cfg);
    if (steps.empty()) return r;
    if (r.trace.size() >= budget) throw BudgetExceeded(budget);
    LabeledStep st = std::move(steps.front());
    (st.kind.tag == StepKind::Db ? r.m : r.e) += 1;
    r.nf = st.result;
    r.trace.push_back(std::move(st));
  }
}

}  // namespace

bool is_nf(const Term& t, const ReductionParams& p) {
  require_correct(t, p);
  return nf_rec(t, p.aframe, p.sframe, p.flag);
}

NormalizeResult normalize_ucbv(const Term& t, Count budget) {
  return run(t, detail::Calculus::Ucbv, budget);
}

NormalizeResult normalize_stable(const Term& t, Count budget) {
  return run(t, detail::Calculus::Stable, budget);
}

ReductionGraph ucbv_reduction_graph(const Term& t, Count budget) {
  ReductionGraph g;
  const ReductionParams p = ReductionParams::top(t);
  auto add = [&](const Term& u) -> std::size_t {
    std::string key = alpha_key(u);
    auto it = g.index.find(key);
    if (it != g.index.end()) return it->second;
    if (g.nodes.size() >= budget) throw BudgetExceeded(budget, "reduction graph node budget exhausted");
    g.nodes.push_back(u);
    g.edges.emplace_back();
    g.index.emplace(std::move(key), g.nodes.size() - 1);
    return g.nodes.size() - 1;
  };
  add(t);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    detail::EngineConfig cfg{detail::Calculus::Ucbv};
    Term cur = g.nodes[i];
    auto steps = detail::enumerate(cur, p.aframe, p.sframe, p.flag, detail::Wanted{}, cfg);
    for (const auto& st : steps) {
      std::size_t j = add(st.result);
      g.edges[i].push_back({st.kind.tag, j});
    }
  }
  return g;
}

bool stable_check(const Term& t, const AbstractionFrame& a, const StructureFrame& s) {
  switch (t.kind()) {
    case TermKind::Var:
      return true;
    case TermKind::Abs:
      return is_pure(t.body());
    case TermKind::App:
      return stable_check(t.fun(), a, s) && stable_check(t.arg(), a, s);
    case TermKind::Clo: {
      if (!stable_check(t.arg(), a, s)) return false;
      const bool h = is_hereditary_abstraction(t.arg(), a);
      const bool st = !h && is_structure(t.arg(), s);
      if (!h && !st) return false;
      VarSet a2 = a, s2 = s;
      a2.erase(t.binder());
      s2.erase(t.binder());
      (h ? a2 : s2).insert(t.binder());
      return stable_check(t.body(), a2, s2);
    }
  }
  return false;
}

bool stable_ctx_check(const SubstCtx& L, const AbstractionFrame& a, const StructureFrame& s) {
  VarSet a2 = a, s2 = s;
  for (auto it = L.entries.rbegin(); it != L.entries.rend(); ++it) {
    const auto& [x, u] = *it;
    if (!stable_check(u, a2, s2)) return false;
    const bool h = is_hereditary_abstraction(u, a2);
    const bool st = !h && is_structure(u, s2);
    if (!h && !st) return false;
    a2.erase(x);
    s2.erase(x);
    (h ? a2 : s2).insert(x);
  }
  return true;
}

std::vector<LabeledStep> stable_steps(const Term& t, const ReductionParams& p) {
  require_correct(t, p);
  detail::EngineConfig cfg{detail::Calculus::Stable};
  return detail::enumerate(t, p.aframe, p.sframe, p.flag, detail::Wanted{}, cfg);
}

bool under_non_structure_argument(const Term& t, const Position& where,
                                  const ReductionParams& p) {
  VarSet a = p.aframe, s = p.sframe;
  Term cur = t;
  for (auto idx : where) {
    if (cur.is_app()) {
      if (idx == 1 && !is_structure(cur.fun(), s)) return true;
    } else if (cur.is_clo() && idx == 0) {
      const bool h = is_hereditary_abstraction(cur.arg(), a);
      const bool st = !h && is_structure(cur.arg(), s);
      a.erase(cur.binder());
      s.erase(cur.binder());
      if (h) a.insert(cur.binder());
      if (st) s.insert(cur.binder());
    }
    cur = cur.child(idx);
  }
  return false;
}

Position rewrite_site(const LabeledStep& st) {
  Position p = st.where;
  if (st.kind.tag == StepKind::Lsv) {
    p.push_back(0);
    p.insert(p.end(), st.occurrence.begin(), st.occurrence.end());
  }
  return p;
}

}  // namespace cbv
