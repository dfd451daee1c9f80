#include "cbv/lcbv.hpp"

#include "engine.hpp"

namespace cbv {

namespace {

detail::Wanted wanted_for(const ValueFrame& frame, const ValueMap& values) {
  detail::Wanted w;
  for (const auto& x : frame) {
    auto it = values.find(x);
    if (it != values.end()) w.subs.emplace_back(x, it->second);
  }
  return w;
}

}  // namespace

std::vector<LabeledStep> lcbv_steps(const Term& t, const ValueFrame& frame,
                                    const ValueMap& values) {
  detail::EngineConfig cfg{detail::Calculus::Lcbv};
  return detail::enumerate(t, {}, {}, Flag::NotApplied, wanted_for(frame, values), cfg);
}

bool lcbv_reducible(const Term& t, const ValueFrame& frame) {
  ValueMap values;
  for (const auto& x : frame) values.emplace(x, identity(VarName("w")));
  detail::EngineConfig cfg{detail::Calculus::Lcbv, 1};
  return !detail::enumerate(t, {}, {}, Flag::NotApplied, wanted_for(frame, values), cfg).empty();
}

bool is_vnf(const Term& t, const ValueFrame& frame, Flag mu) {
  switch (t.kind()) {
    case TermKind::Var:
      return frame.count(t.name()) == 0;
    case TermKind::Abs:
      return mu == Flag::NotApplied;
    case TermKind::App:
      return is_vnf(t.fun(), frame, Flag::Applied) && is_vnf(t.arg(), frame, Flag::NotApplied);
    case TermKind::Clo: {
      if (!is_vnf(t.arg(), frame, Flag::NotApplied)) return false;
      ValueFrame inner = frame;
      if (val(t.arg()))
        inner.insert(t.binder());
      else
        inner.erase(t.binder());
      return is_vnf(t.body(), inner, mu);
    }
  }
  return false;
}

namespace {

NormalizeResult run(const Term& t, const detail::Wanted& w, Count budget) {
  NormalizeResult r;
  r.nf = t;
  detail::EngineConfig cfg{detail::Calculus::Lcbv, 1};
  while (true) {
    auto steps = detail::enumerate(r.nf, {}, {}, Flag::NotApplied, w, cfg);
    if (steps.empty()) return r;
    if (r.trace.size() >= budget) throw BudgetExceeded(budget);
    LabeledStep st = std::move(steps.front());
    (st.kind.tag == StepKind::Db ? r.m : r.e) += 1;
    r.nf = st.result;
    r.trace.push_back(std::move(st));
  }
}

}  // namespace

NormalizeResult normalize_lsv(const Term& t) {
  detail::Wanted w;
  w.db = false;
  // lsv is terminating, so no budget is needed.
  return run(t, w, std::numeric_limits<Count>::max());
}

NormalizeResult normalize_lcbv(const Term& t, Count budget) { return run(t, detail::Wanted{}, budget); }

}  // namespace cbv
