#include "cbv/unfolding.hpp"

#include <limits>

#include "engine.hpp"

namespace cbv {

bool is_valid_assignment(const ValueAssignment& sigma) {
  for (const auto& [x, v] : sigma) {
    if (!is_value(v)) return false;
    for (const auto& y : v.fv_list())
      if (sigma.count(y)) return false;
  }
  return true;
}

void require_valid_assignment(const ValueAssignment& sigma) {
  if (!is_valid_assignment(sigma))
    throw InvalidAssignment("a value assignment maps variables to values and its domain is disjoint "
                            "from the free variables of its images");
}

namespace {

Term unfold(const Term& t, const ValueAssignment& sigma) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = sigma.find(t.name());
      return it == sigma.end() ? t : it->second;
    }
    case TermKind::Abs:
      return t;
    case TermKind::App:
      return Term::app(unfold(t.fun(), sigma), unfold(t.arg(), sigma));
    case TermKind::Clo: {
      const VarName& x = t.binder();
      Term u = unfold(t.arg(), sigma);
      Classified c = classify(u);
      if (c.kind != Classified::Neither && reachable_vars(t.body()).count(x)) {
        ValueAssignment ext = sigma;
        ext[x] = c.value;
        return c.ctx.plug(Term::clo(unfold(t.body(), ext), x, c.value));
      }
      return Term::clo(unfold(t.body(), sigma), x, u);
    }
  }
  return t;
}

}  // namespace

Term partial_unfold(const Term& t, const ValueAssignment& sigma) {
  require_valid_assignment(sigma);
  VarSet avoid;
  for (const auto& [x, v] : sigma) {
    avoid.insert(x);
    for (const auto& y : v.fv_list()) avoid.insert(y);
  }
  return unfold(well_name(t, avoid), sigma);
}

std::vector<LabeledStep> sigma_steps(const Term& t, const ValueAssignment& sigma) {
  require_valid_assignment(sigma);
  detail::Wanted w;
  w.db = false;
  for (const auto& [x, v] : sigma) w.subs.emplace_back(x, v);
  detail::EngineConfig cfg{detail::Calculus::Lcbv};
  return detail::enumerate(t, {}, {}, Flag::NotApplied, w, cfg);
}

NormalizeResult normalize_sigma(const Term& t, const ValueAssignment& sigma) {
  require_valid_assignment(sigma);
  detail::Wanted w;
  w.db = false;
  for (const auto& [x, v] : sigma) w.subs.emplace_back(x, v);
  detail::EngineConfig cfg{detail::Calculus::Lcbv, 1};
  NormalizeResult r;
  r.nf = t;
  while (true) {
    auto steps = detail::enumerate(r.nf, {}, {}, Flag::NotApplied, w, cfg);
    if (steps.empty()) return r;
    if (steps.front().kind.tag == StepKind::Lsv) ++r.e;
    r.nf = steps.front().result;
    r.trace.push_back(std::move(steps.front()));
  }
}

Count measvar(const VarName& x, const Term& t) {
  if (!occurs_free(x, t)) return 0;
  switch (t.kind()) {
    case TermKind::Var:
      return 1;
    case TermKind::Abs:
      return 0;
    case TermKind::App:
      return checked_add(measvar(x, t.fun()), measvar(x, t.arg()));
    case TermKind::Clo: {
      const VarName& y = t.binder();
      const Count in_body = y == x ? 0 : measvar(x, t.body());
      const Count in_arg = measvar(x, t.arg());
      if (in_arg == 0) return in_body;
      return checked_add(in_body, checked_mul(in_arg, checked_add(1, measvar(y, t.body()))));
    }
  }
  return 0;
}

Count meas(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Abs:
      return 0;
    case TermKind::App:
      return checked_add(meas(t.fun()), meas(t.arg()));
    case TermKind::Clo: {
      const Count occ = measvar(t.binder(), t.body());
      return checked_add(checked_add(meas(t.body()), occ),
                         checked_mul(meas(t.arg()), checked_add(1, occ)));
    }
  }
  return 0;
}

Count meas_sigma(const Term& t, const ValueAssignment& sigma) {
  Count r = meas(t);
  for (const auto& [x, v] : sigma) r = checked_add(r, measvar(x, t));
  return r;
}

OccurrenceCounter OccurrenceCounter::of(const Term& t) {
  OccurrenceCounter phi;
  for (const auto& x : t.fv_list()) phi.values.emplace(x, measvar(x, t));
  return phi;
}

namespace {

Count ctx_measvar_n(const VarName& x, const SubstCtx& L, std::size_t n,
                    const OccurrenceCounter& phi) {
  if (n == 0) return phi(x);
  const auto& [y, u] = L.entries[n - 1];
  const Count rest = ctx_measvar_n(x, L, n - 1, phi);
  const Count in_arg = measvar(x, u);
  if (in_arg == 0) return rest;
  return checked_add(rest, checked_mul(in_arg, checked_add(1, ctx_measvar_n(y, L, n - 1, phi))));
}

}  // namespace

Count ctx_measvar(const VarName& x, const SubstCtx& L, const OccurrenceCounter& phi) {
  return ctx_measvar_n(x, L, L.length(), phi);
}

Count ctx_meas(const SubstCtx& L, const OccurrenceCounter& phi) {
  Count total = 0;
  for (std::size_t n = L.length(); n > 0; --n) {
    const auto& [x, u] = L.entries[n - 1];
    const Count occ = ctx_measvar_n(x, L, n - 1, phi);
    total = checked_add(total, checked_add(occ, checked_mul(meas(u), checked_add(1, occ))));
  }
  return total;
}

ValueFrame expand_value_frame(const ValueFrame& v, const SubstCtx& L) {
  ValueFrame r = v;
  for (auto it = L.entries.rbegin(); it != L.entries.rend(); ++it) {
    if (val(it->second))
      r.insert(it->first);
    else
      r.erase(it->first);
  }
  return r;
}

bool is_ctx_vnf(const SubstCtx& L, const ValueFrame& v) {
  ValueFrame frame = v;
  for (auto it = L.entries.rbegin(); it != L.entries.rend(); ++it) {
    if (!is_vnf(it->second, frame, Flag::NotApplied)) return false;
    if (val(it->second))
      frame.insert(it->first);
    else
      frame.erase(it->first);
  }
  return true;
}

bool is_compatible(const ValueAssignment& sigma, const AbstractionFrame& a,
                   const StructureFrame& s) {
  for (const auto& x : a) {
    auto it = sigma.find(x);
    if (it == sigma.end() || !it->second.is_abs()) return false;
  }
  for (const auto& [x, v] : sigma) {
    if (a.count(x)) continue;
    if (!s.count(x) || !v.is_var()) return false;
  }
  return true;
}

}  // namespace cbv
