#include "cbv/glamour.hpp"

#include <algorithm>
#include <map>

#include "cbv/equiv.hpp"
#include "cbv/syntax.hpp"
#include "cbv/ucbv.hpp"

namespace cbv {

std::string transition_name(Transition k) {
  switch (k) {
    case Transition::UM:
      return "UM";
    case Transition::UE:
      return "UE";
    case Transition::C1:
      return "C1";
    case Transition::C2:
      return "C2";
    case Transition::C3:
      return "C3";
    case Transition::C4:
      return "C4";
    case Transition::C5:
      return "C5";
  }
  return "?";
}

namespace {

std::uint32_t max_tag(const Term& t) {
  VarSet names;
  collect_names(t, names);
  std::uint32_t m = 0;
  for (const auto& x : names) m = std::max(m, x.tag);
  return m;
}

// Gives every binder of the code a fresh name.
Term rename_bound(const Term& t, NameSupply& names) {
  switch (t.kind()) {
    case TermKind::Var:
      return t;
    case TermKind::Abs: {
      VarName y = names.fresh(t.binder());
      return Term::abs(y, rename_bound(rename_free(t.body(), t.binder(), y), names));
    }
    case TermKind::App:
      return Term::app(rename_bound(t.fun(), names), rename_bound(t.arg(), names));
    case TermKind::Clo: {
      VarName y = names.fresh(t.binder());
      return Term::clo(rename_bound(rename_free(t.body(), t.binder(), y), names), y,
                       rename_bound(t.arg(), names));
    }
  }
  return t;
}

Term apply_stack(Term head, const Stack& stack) {
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) head = Term::app(head, decode(*it));
  return head;
}

const EnvEntry* lookup(const std::vector<EnvEntry>& env, const VarName& x) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->x == x) return &*it;
  return nullptr;
}

// Naming data gathered over a whole state.
struct NamingScan {
  std::map<VarName, int> binding;  // binding occurrences per variable
  VarSet lambda_bound;
  VarSet free_in_codes;

  void code(const Term& t) {
    for (const auto& x : t.fv_list()) free_in_codes.insert(x);
    binders(t);
  }
  void binders(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
        return;
      case TermKind::Abs:
        ++binding[t.binder()];
        lambda_bound.insert(t.binder());
        binders(t.body());
        return;
      case TermKind::App:
        binders(t.fun());
        binders(t.arg());
        return;
      case TermKind::Clo:
        ++binding[t.binder()];
        binders(t.body());
        binders(t.arg());
        return;
    }
  }
  void item(const StackItem& it) {
    code(it.code);
    for (const auto& s : it.stack) item(s);
  }
};

}  // namespace

NameSupply NameSupply::above(const Term& t) { return NameSupply(max_tag(t) + 1); }

MachineState inject(const Term& c) {
  if (!is_pure(c)) throw std::invalid_argument("machine codes must not contain explicit substitutions");
  MachineState s;
  s.focus = well_name(c);
  return s;
}

bool is_well_named(const MachineState& s) {
  NamingScan scan;
  for (const auto& d : s.dump) {
    scan.code(d.code);
    for (const auto& it : d.stack) scan.item(it);
  }
  scan.code(s.focus);
  for (const auto& it : s.stack) scan.item(it);
  for (const auto& e : s.env) {
    ++scan.binding[e.x];
    scan.item(e.item);
  }
  for (const auto& [x, n] : scan.binding)
    if (n > 1) return false;
  for (const auto& x : scan.lambda_bound)
    if (scan.free_in_codes.count(x)) return false;
  for (std::size_t i = 0; i < s.env.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (occurs_free(s.env[i].x, decode(s.env[j].item))) return false;
  return true;
}

void require_well_named(const MachineState& s) {
  if (!is_well_named(s)) throw IllNamed("machine state is not well-named");
}

StepOutcome machine_step(const MachineState& s, NameSupply& names) {
  StepOutcome out;
  const Term& f = s.focus;
  const bool dump = !s.dump.empty();
  const bool stack = !s.stack.empty();
  const EnvEntry* bound = f.is_var() ? lookup(s.env, f.name()) : nullptr;
  const bool a_item = bound && bound->item.label == StackItem::Label::A;
  const bool s_item = bound && bound->item.label == StackItem::Label::S;

  std::vector<Transition> enabled;
  if (f.is_app()) enabled.push_back(Transition::C1);
  if (f.is_abs() && stack) enabled.push_back(Transition::UM);
  if (f.is_abs() && !stack && dump) enabled.push_back(Transition::C2);
  if (f.is_var() && !bound && dump) enabled.push_back(Transition::C3);
  if (f.is_var() && s_item && dump) enabled.push_back(Transition::C4);
  if (f.is_var() && a_item && !stack && dump) enabled.push_back(Transition::C5);
  if (f.is_var() && a_item && stack) enabled.push_back(Transition::UE);
  if (enabled.size() > 1)
    throw CorrectnessViolation("more than one machine transition applies");
  if (enabled.empty()) return out;

  out.final = false;
  out.kind = enabled.front();
  MachineState n = s;
  auto pop_dump = [&n](StackItem pushed) {
    DumpEntry d = std::move(n.dump.back());
    n.dump.pop_back();
    d.stack.push_back(std::move(pushed));
    n.focus = d.code;
    n.stack = std::move(d.stack);
  };
  switch (out.kind) {
    case Transition::C1:
      n.dump.push_back({f.fun(), std::move(n.stack)});
      n.focus = f.arg();
      n.stack.clear();
      break;
    case Transition::UM:
      n.env.push_back({f.binder(), std::move(n.stack.back())});
      n.stack.pop_back();
      n.focus = f.body();
      break;
    case Transition::C2:
      pop_dump(StackItem::abstraction(f));
      break;
    case Transition::C3:
    case Transition::C4: {
      Stack args = std::move(n.stack);
      pop_dump(StackItem::structure(f, std::move(args)));
      break;
    }
    case Transition::C5:
      pop_dump(StackItem::abstraction(f));
      break;
    case Transition::UE:
      n.focus = rename_bound(bound->item.code, names);
      break;
  }
  out.next = std::move(n);
  return out;
}

Term decode(const StackItem& item) {
  if (item.label == StackItem::Label::A) return item.code;
  return apply_stack(item.code, item.stack);
}

Term decode(const MachineState& s) {
  Term t = apply_stack(s.focus, s.stack);
  for (auto it = s.dump.rbegin(); it != s.dump.rend(); ++it)
    t = apply_stack(Term::app(it->code, t), it->stack);
  for (auto it = s.env.rbegin(); it != s.env.rend(); ++it) t = Term::clo(t, it->x, decode(it->item));
  return t;
}

SubstCtx decode_env(const std::vector<EnvEntry>& env, std::size_t begin, std::size_t end) {
  SubstCtx L;
  for (std::size_t i = end; i > begin; --i) L.entries.emplace_back(env[i - 1].x, decode(env[i - 1].item));
  return L;
}

Count RunResult::administrative() const {
  return count(Transition::C1) + count(Transition::C2) + count(Transition::C3) +
         count(Transition::C4) + count(Transition::C5);
}

RunResult run_machine(const Term& c, Count budget, bool check_naming) {
  RunResult r;
  MachineState s = inject(c);
  NameSupply names = NameSupply::above(s.focus);
  if (check_naming) require_well_named(s);
  while (true) {
    StepOutcome o = machine_step(s, names);
    if (o.final) break;
    if (r.trace.size() >= budget) throw BudgetExceeded(budget, "machine transition budget exhausted");
    ++r.counts[static_cast<std::size_t>(o.kind)];
    r.trace.push_back(o.kind);
    s = std::move(o.next);
    if (check_naming) require_well_named(s);
  }
  r.final = std::move(s);
  return r;
}

namespace {

bool rigid_under(const StackItem& item, const SubstCtx& env_ctx, const VarSet& initial_fv) {
  auto [a, s] = expand_frames({}, initial_fv, env_ctx);
  const Term t = decode(item);
  if (item.label == StackItem::Label::A) return is_hereditary_abstraction(t, a);
  return is_structure(t, s);
}

bool all_rigid(const Stack& stack, const SubstCtx& env_ctx, const VarSet& fv0) {
  for (const auto& it : stack)
    if (!rigid_under(it, env_ctx, fv0)) return false;
  return true;
}

}  // namespace

bool check_rigid_item(const StackItem& item, const std::vector<EnvEntry>& env,
                      const VarSet& initial_fv) {
  return rigid_under(item, decode_env(env, 0, env.size()), initial_fv);
}

SimulationReport check_simulation(const Term& c, Count budget) {
  SimulationReport rep;
  MachineState s = inject(c);
  rep.size = s.focus.size();
  const VarSet fv0 = free_vars(s.focus);
  const ReductionParams top{{}, fv0, Flag::NotApplied};
  NameSupply names = NameSupply::above(s.focus);

  auto fail = [&rep](const std::string& why) {
    rep.ok = false;
    rep.failure = why;
    return rep;
  };
  auto invariants = [&](const MachineState& st) -> std::string {
    if (!is_well_named(st)) return "state is not well-named";
    const Term d = decode(st);
    if (!stable_check(d, {}, fv0)) return "decoding is not stable: " + print(d);
    const SubstCtx full = decode_env(st.env, 0, st.env.size());
    if (!all_rigid(st.stack, full, fv0)) return "stack item is not rigid";
    for (const auto& de : st.dump)
      if (!all_rigid(de.stack, full, fv0)) return "dump stack item is not rigid";
    for (std::size_t i = 0; i < st.env.size(); ++i)
      if (!rigid_under(st.env[i].item, decode_env(st.env, 0, i), fv0))
        return "environment item is not rigid";
    return {};
  };

  if (auto why = invariants(s); !why.empty()) return fail(why);
  Term d = decode(s);
  while (true) {
    StepOutcome o = machine_step(s, names);
    if (o.final) {
      if (!stable_steps(d, top).empty()) return fail("final state decodes to a stable-reducible term: " + print(d));
      break;
    }
    if (rep.run.trace.size() >= budget) throw BudgetExceeded(budget, "machine transition budget exhausted");
    ++rep.run.counts[static_cast<std::size_t>(o.kind)];
    rep.run.trace.push_back(o.kind);
    if (auto why = invariants(o.next); !why.empty()) return fail(transition_name(o.kind) + ": " + why);
    Term d2 = decode(o.next);
    if (o.kind == Transition::UM || o.kind == Transition::UE) {
      const StepKind::Tag want = o.kind == Transition::UM ? StepKind::Db : StepKind::Lsv;
      bool matched = false;
      for (const auto& st : stable_steps(d, top)) {
        if (st.kind.tag == want && equiv_by_flattening(st.result, d2)) {
          matched = true;
          break;
        }
      }
      if (!matched)
        return fail(transition_name(o.kind) + " has no matching stable step from " + print(d) +
                    " to " + print(d2));
    } else if (!alpha_eq(d, d2)) {
      return fail(transition_name(o.kind) + " changed the decoding from " + print(d) + " to " + print(d2));
    }
    s = std::move(o.next);
    d = std::move(d2);
  }
  rep.run.final = std::move(s);
  NormalizeResult n = normalize_stable(c, budget);
  rep.stable_m = n.m;
  rep.stable_e = n.e;
  if (rep.run.count(Transition::UM) != n.m || rep.run.count(Transition::UE) != n.e)
    return fail("transition counts (UM " + std::to_string(rep.run.count(Transition::UM)) + ", UE " +
                std::to_string(rep.run.count(Transition::UE)) + ") differ from stable counts (" +
                std::to_string(n.m) + ", " + std::to_string(n.e) + ")");
  return rep;
}

}  // namespace cbv
