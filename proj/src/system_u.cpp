#include "cbv/system_u.hpp"

#include <algorithm>
#include <cctype>

#include "cbv/syntax.hpp"

namespace cbv {

// ---------------------------------------------------------------------------
// Types

Type Type::s() {
  Type t;
  t.s_ = true;
  return t;
}

Type Type::multiset(std::vector<Arrow> arrows) {
  std::sort(arrows.begin(), arrows.end(),
            [](const Arrow& a, const Arrow& b) { return compare(a, b) < 0; });
  Type t;
  t.arrows_ = std::move(arrows);
  return t;
}

bool Type::is_tight() const { return s_ || arrows_.empty(); }

int compare(const Type& a, const Type& b) {
  if (a.s_ != b.s_) return a.s_ ? -1 : 1;
  if (a.s_) return 0;
  const std::size_t n = std::min(a.arrows_.size(), b.arrows_.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.arrows_[i], b.arrows_[i]); c != 0) return c;
  if (a.arrows_.size() == b.arrows_.size()) return 0;
  return a.arrows_.size() < b.arrows_.size() ? -1 : 1;
}

int compare(const OptType& a, const OptType& b) {
  if (a.has_value() != b.has_value()) return a.has_value() ? 1 : -1;
  return a ? compare(*a, *b) : 0;
}

int compare(const Arrow& a, const Arrow& b) {
  if (int c = compare(a.dom, b.dom); c != 0) return c;
  return compare(a.cod, b.cod);
}

SumUndefined::SumUndefined(const Type& a, const Type& b)
    : std::domain_error("sum of " + print(a) + " and " + print(b) + " is undefined") {}

Type type_sum(const Type& a, const Type& b) {
  if (a.is_s() && b.is_s()) return a;
  if (a.is_s() || b.is_s()) throw SumUndefined(a, b);
  std::vector<Arrow> all = a.arrows();
  all.insert(all.end(), b.arrows().begin(), b.arrows().end());
  return Type::multiset(std::move(all));
}

OptType opt_sum(const OptType& a, const OptType& b) {
  if (!a) return b;
  if (!b) return a;
  return type_sum(*a, *b);
}

Count num_arrows(const OptType& t) {
  if (!t || t->is_s()) return 0;
  return t->arrows().size();
}

bool lhd(const OptType& a, const Type& b) {
  if (!a) return b.is_tight();
  return *a == b;
}

bool is_tight(const OptType& t) { return !t || t->is_tight(); }

std::string print(const Type& t) {
  if (t.is_s()) return "s";
  std::string out = "[";
  bool first = true;
  for (const auto& a : t.arrows()) {
    if (!first) out += ", ";
    first = false;
    out += print(a.dom) + " -> " + print(a.cod);
  }
  return out + "]";
}

std::string print(const OptType& t) { return t ? print(*t) : "bot"; }

namespace {

class TypeParser {
 public:
  explicit TypeParser(const std::string& text) : text_(text) {}

  OptType whole() {
    OptType t = opt();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool keyword(const std::string& k) {
    skip();
    if (text_.compare(pos_, k.size(), k) != 0) return false;
    pos_ += k.size();
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(1, static_cast<int>(pos_) + 1, what);
  }
  OptType opt() {
    if (keyword("bot")) return std::nullopt;
    return type();
  }
  Type type() {
    if (keyword("s")) return Type::s();
    if (!keyword("[")) fail("expected a type");
    std::vector<Arrow> arrows;
    if (keyword("]")) return Type::multiset(std::move(arrows));
    while (true) {
      Arrow a;
      a.dom = opt();
      if (!keyword("->")) fail("expected '->'");
      a.cod = type();
      arrows.push_back(std::move(a));
      if (keyword("]")) break;
      if (!keyword(",")) fail("expected ',' or ']'");
    }
    return Type::multiset(std::move(arrows));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

OptType parse_opt_type(const std::string& text) { return TypeParser(text).whole(); }

Type parse_type(const std::string& text) {
  OptType t = parse_opt_type(text);
  if (!t) throw SyntaxError(1, 1, "bot is not a type");
  return *t;
}

// ---------------------------------------------------------------------------
// Environments

OptType lookup(const TypingEnv& env, const VarName& x) {
  auto it = env.find(x);
  if (it == env.end()) return std::nullopt;
  return it->second;
}

TypingEnv env_sum(const TypingEnv& a, const TypingEnv& b) {
  TypingEnv r = a;
  for (const auto& [x, t] : b) {
    auto it = r.find(x);
    if (it == r.end())
      r.emplace(x, t);
    else
      it->second = type_sum(it->second, t);
  }
  return r;
}

TypingEnv env_without(TypingEnv env, const VarName& x) {
  env.erase(x);
  return env;
}

TypingEnv env_with(TypingEnv env, const VarName& x, const OptType& t) {
  if (t)
    env[x] = *t;
  else
    env.erase(x);
  return env;
}

bool is_tight(const TypingEnv& env) {
  for (const auto& [x, t] : env)
    if (!t.is_tight()) return false;
  return true;
}

bool is_appropriate(const TypingEnv& env, const AbstractionFrame& a) {
  for (const auto& x : a) {
    auto it = env.find(x);
    if (it != env.end() && it->second.is_s()) return false;
  }
  return true;
}

TypingEnv tight_env(const Term& t, const AbstractionFrame& a, const StructureFrame& s) {
  require_correct(t, {a, s, Flag::NotApplied});
  TypingEnv env;
  for (const auto& x : reachable_vars(t)) env.emplace(x, a.count(x) ? Type::empty() : Type::s());
  return env;
}

// ---------------------------------------------------------------------------
// Derivations

std::string rule_name(Derivation::Rule r) {
  switch (r) {
    case Derivation::Rule::Var:
      return "var";
    case Derivation::Rule::Abs:
      return "abs";
    case Derivation::Rule::AppP:
      return "appP";
    case Derivation::Rule::AppC:
      return "appC";
    case Derivation::Rule::Es:
      return "es";
    case Derivation::Rule::EmptySubsCtx:
      return "emptySubsCtx";
    case Derivation::Rule::AddSubsCtx:
      return "addSubsCtx";
  }
  return "?";
}

namespace {

using Rule = Derivation::Rule;

// The conclusion a node must have given its rule, subject and premises.
struct Conclusion {
  TypingEnv env;
  Type type;
  TypingEnv delta;
  Count m = 0;
  Count e = 0;
};

[[noreturn]] void invalid(const std::string& why) { throw InvalidDerivation(why); }

void need_premises(const Derivation& d, std::size_t n) {
  if (d.premises.size() != n)
    invalid(rule_name(d.rule) + " needs " + std::to_string(n) + " premises, found " +
            std::to_string(d.premises.size()));
}

void need_term(const Derivation& p, const Term& subject, const char* which) {
  if (p.is_context()) invalid(std::string(which) + " premise must be a term judgement");
  if (!(p.subject == subject))
    invalid(std::string(which) + " premise types " + print(p.subject) + " instead of " + print(subject));
}

void need_subject(const Derivation& d, TermKind k) {
  if (d.is_context()) return;
  if (d.subject.empty() || d.subject.kind() != k) invalid(rule_name(d.rule) + " does not match the subject");
}

Conclusion conclude(const Derivation& d) {
  Conclusion c;
  try {
    switch (d.rule) {
      case Rule::Var:
        need_subject(d, TermKind::Var);
        need_premises(d, 0);
        c.env.emplace(d.subject.name(), d.type);
        c.type = d.type;
        c.e = num_arrows(d.type);
        return c;

      case Rule::Abs: {
        need_subject(d, TermKind::Abs);
        const VarName& x = d.subject.binder();
        std::vector<Arrow> arrows;
        for (const auto& p : d.premises) {
          need_term(p, d.subject.body(), "abs");
          c.env = env_sum(c.env, env_without(p.env, x));
          arrows.push_back({lookup(p.env, x), p.type});
          c.m = checked_add(c.m, p.m);
          c.e = checked_add(c.e, p.e);
        }
        c.type = Type::multiset(std::move(arrows));
        return c;
      }

      case Rule::AppP:
      case Rule::AppC: {
        need_subject(d, TermKind::App);
        need_premises(d, 2);
        const Derivation& f = d.premises[0];
        const Derivation& a = d.premises[1];
        need_term(f, d.subject.fun(), "left");
        need_term(a, d.subject.arg(), "right");
        c.env = env_sum(f.env, a.env);
        c.m = checked_add(f.m, a.m);
        c.e = checked_add(f.e, a.e);
        if (d.rule == Rule::AppP) {
          if (!f.type.is_s()) invalid("appP needs the left premise to have type s");
          if (!a.type.is_tight()) invalid("appP needs the right premise to have a tight type");
          c.type = Type::s();
        } else {
          if (!f.type.is_multiset() || f.type.arrows().size() != 1)
            invalid("appC needs a single arrow on the left, found " + print(f.type));
          const Arrow& arr = f.type.arrows().front();
          if (!lhd(arr.dom, a.type))
            invalid("appC weakening fails: " + print(arr.dom) + " is not below " + print(a.type));
          c.type = arr.cod;
          c.m = checked_add(c.m, 1);
        }
        return c;
      }

      case Rule::Es: {
        need_subject(d, TermKind::Clo);
        need_premises(d, 2);
        const Derivation& b = d.premises[0];
        const Derivation& a = d.premises[1];
        need_term(b, d.subject.body(), "body");
        need_term(a, d.subject.arg(), "argument");
        const OptType o = lookup(b.env, d.subject.binder());
        if (!lhd(o, a.type))
          invalid("es weakening fails: " + print(o) + " is not below " + print(a.type));
        c.env = env_sum(env_without(b.env, d.subject.binder()), a.env);
        c.type = b.type;
        c.m = checked_add(b.m, a.m);
        c.e = checked_add(b.e, a.e);
        return c;
      }

      case Rule::EmptySubsCtx:
        need_premises(d, 0);
        if (!d.ctx.empty()) invalid("emptySubsCtx types a non-empty context");
        return c;

      case Rule::AddSubsCtx: {
        need_premises(d, 2);
        if (d.ctx.empty()) invalid("addSubsCtx types the empty context");
        const auto& [x, u] = d.ctx.entries.back();
        const Derivation& inner = d.premises[0];
        const Derivation& a = d.premises[1];
        if (!inner.is_context()) invalid("addSubsCtx needs a context premise first");
        SubstCtx rest = d.ctx;
        rest.entries.pop_back();
        if (!(inner.ctx == rest)) invalid("context premise types " + print(inner.ctx) + " instead of " + print(rest));
        need_term(a, u, "argument");
        if (inner.delta.count(x)) invalid("binder " + x.str() + " already in the hole environment");
        const OptType o1 = lookup(inner.env, x);
        const OptType o2 = lookup(d.delta, x);
        const OptType o = opt_sum(o1, o2);
        if (!lhd(o, a.type))
          invalid("addSubsCtx weakening fails: " + print(o) + " is not below " + print(a.type));
        c.env = env_sum(env_without(inner.env, x), a.env);
        c.delta = env_with(inner.delta, x, o2);
        c.m = checked_add(inner.m, a.m);
        c.e = checked_add(inner.e, a.e);
        return c;
      }
    }
  } catch (const SumUndefined& ex) {
    invalid(ex.what());
  } catch (const MeasureOverflow& ex) {
    invalid(ex.what());
  }
  invalid("unknown rule");
}

bool env_equal(const TypingEnv& a, const TypingEnv& b) {
  if (a.size() != b.size()) return false;
  auto i = a.begin();
  for (auto j = b.begin(); j != b.end(); ++i, ++j)
    if (!(i->first == j->first) || i->second != j->second) return false;
  return true;
}

std::string print_env(const TypingEnv& env) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : env) {
    if (!first) out += ", ";
    first = false;
    out += x.str() + ":" + print(t);
  }
  return out + "}";
}

std::string node_error(const Derivation& d) {
  Conclusion c;
  try {
    c = conclude(d);
  } catch (const InvalidDerivation& ex) {
    return ex.what();
  }
  if (!env_equal(c.env, d.env)) return "environment should be " + print_env(c.env) + ", found " + print_env(d.env);
  if (d.is_context()) {
    if (!env_equal(c.delta, d.delta)) return "hole environment should be " + print_env(c.delta);
  } else if (c.type != d.type) {
    return "type should be " + print(c.type) + ", found " + print(d.type);
  }
  if (c.m != d.m || c.e != d.e)
    return "counter mismatch: expected (" + std::to_string(c.m) + "," + std::to_string(c.e) + "), found (" +
           std::to_string(d.m) + "," + std::to_string(d.e) + ")";
  return {};
}

Derivation finish(Derivation d) {
  Conclusion c = conclude(d);
  d.env = std::move(c.env);
  if (!d.is_context()) d.type = std::move(c.type);
  d.delta = std::move(c.delta);
  d.m = c.m;
  d.e = c.e;
  return d;
}

bool check_rec(const Derivation& d, std::vector<std::size_t>& path, CheckResult& out) {
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    path.push_back(i);
    if (!check_rec(d.premises[i], path, out)) return false;
    path.pop_back();
  }
  std::string why = node_error(d);
  if (why.empty()) return true;
  out.ok = false;
  out.path = path;
  out.reason = rule_name(d.rule) + ": " + why;
  return false;
}

}  // namespace

Derivation mk_var(const VarName& x, const Type& t) {
  Derivation d;
  d.rule = Rule::Var;
  d.subject = Term::var(x);
  d.type = t;
  return finish(std::move(d));
}

Derivation mk_abs(const VarName& x, const Term& body, std::vector<Derivation> premises) {
  Derivation d;
  d.rule = Rule::Abs;
  d.subject = Term::abs(x, body);
  d.premises = std::move(premises);
  return finish(std::move(d));
}

Derivation mk_app(Derivation fun, Derivation arg) {
  Derivation d;
  d.rule = fun.type.is_s() ? Rule::AppP : Rule::AppC;
  d.subject = Term::app(fun.subject, arg.subject);
  d.premises.push_back(std::move(fun));
  d.premises.push_back(std::move(arg));
  return finish(std::move(d));
}

Derivation mk_es(Derivation body, const VarName& x, Derivation arg) {
  Derivation d;
  d.rule = Rule::Es;
  d.subject = Term::clo(body.subject, x, arg.subject);
  d.premises.push_back(std::move(body));
  d.premises.push_back(std::move(arg));
  return finish(std::move(d));
}

Derivation mk_empty_ctx() {
  Derivation d;
  d.rule = Rule::EmptySubsCtx;
  return d;
}

Derivation mk_add_ctx(Derivation inner, const VarName& x, Derivation arg, const OptType& hole_use) {
  Derivation d;
  d.rule = Rule::AddSubsCtx;
  d.ctx = inner.ctx;
  d.ctx.entries.emplace_back(x, arg.subject);
  d.delta = env_with({}, x, hole_use);
  d.premises.push_back(std::move(inner));
  d.premises.push_back(std::move(arg));
  return finish(std::move(d));
}

CheckResult check_derivation(const Derivation& d) {
  CheckResult r;
  std::vector<std::size_t> path;
  check_rec(d, path, r);
  return r;
}

bool is_tight(const Derivation& d) { return !d.is_context() && is_tight(d.env) && d.type.is_tight(); }

bool relevance_holds(const Derivation& d) {
  for (const auto& p : d.premises)
    if (!relevance_holds(p)) return false;
  if (d.is_context()) return true;
  for (const auto& x : reachable_vars(d.subject))
    if (!d.env.count(x)) return false;
  for (const auto& [x, t] : d.env)
    if (!occurs_free(x, d.subject)) return false;
  return true;
}

std::size_t derivation_size(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premises) n += derivation_size(p);
  return n;
}

// ---------------------------------------------------------------------------
// Constructions

namespace {

Derivation nf_rec(const Term& t, const AbstractionFrame& a, const StructureFrame& s, Flag mu) {
  switch (t.kind()) {
    case TermKind::Var:
      return mk_var(t.name(), a.count(t.name()) ? Type::empty() : Type::s());
    case TermKind::Abs:
      return mk_abs(t.binder(), t.body(), {});
    case TermKind::App:
      return mk_app(nf_rec(t.fun(), a, s, Flag::Applied), nf_rec(t.arg(), a, s, Flag::NotApplied));
    case TermKind::Clo: {
      const VarName& x = t.binder();
      AbstractionFrame a2 = a;
      StructureFrame s2 = s;
      a2.erase(x);
      s2.erase(x);
      if (is_hereditary_abstraction(t.arg(), a))
        a2.insert(x);
      else
        s2.insert(x);
      return mk_es(nf_rec(t.body(), a2, s2, mu), x, nf_rec(t.arg(), a, s, Flag::NotApplied));
    }
  }
  invalid("unknown term kind");
}

}  // namespace

Derivation derive_nf(const Term& t, const ReductionParams& p) {
  if (!is_nf(t, p)) throw NotNormalForm(print(t) + " is not a normal form for the given parameters");
  return nf_rec(t, p.aframe, p.sframe, p.flag);
}

namespace {

Derivation transport_rec(const Derivation& d, const Term& target, const std::map<VarName, VarName>& rho) {
  if (d.is_context()) invalid("only term derivations can be transported");
  if (d.subject.kind() != target.kind()) invalid("transport target is not α-equivalent");
  Derivation r;
  r.rule = d.rule;
  r.subject = target;
  r.type = d.type;
  r.m = d.m;
  r.e = d.e;
  for (const auto& [x, t] : d.env) {
    auto it = rho.find(x);
    r.env.emplace(it == rho.end() ? x : it->second, t);
  }
  switch (target.kind()) {
    case TermKind::Var:
      break;
    case TermKind::Abs: {
      auto inner = rho;
      inner[d.subject.binder()] = target.binder();
      for (const auto& p : d.premises) r.premises.push_back(transport_rec(p, target.body(), inner));
      break;
    }
    case TermKind::App:
      r.premises.push_back(transport_rec(d.premises.at(0), target.fun(), rho));
      r.premises.push_back(transport_rec(d.premises.at(1), target.arg(), rho));
      break;
    case TermKind::Clo: {
      auto inner = rho;
      inner[d.subject.binder()] = target.binder();
      r.premises.push_back(transport_rec(d.premises.at(0), target.body(), inner));
      r.premises.push_back(transport_rec(d.premises.at(1), target.arg(), rho));
      break;
    }
  }
  return r;
}

}  // namespace

Derivation alpha_transport(const Derivation& d, const Term& target) {
  if (!alpha_eq(d.subject, target)) invalid("transport target is not α-equivalent");
  return transport_rec(d, target, {});
}

Derivation merge_values(const Derivation& a, const Derivation& b0) {
  if (a.is_context() || b0.is_context() || !is_value(a.subject)) invalid("merging needs value derivations");
  if (!a.type.is_multiset() || !b0.type.is_multiset()) invalid("merging needs multiset types");
  Derivation b = alpha_transport(b0, a.subject);
  if (a.subject.is_var()) return mk_var(a.subject.name(), type_sum(a.type, b.type));
  std::vector<Derivation> premises = a.premises;
  premises.insert(premises.end(), b.premises.begin(), b.premises.end());
  return mk_abs(a.subject.binder(), a.subject.body(), std::move(premises));
}

std::pair<Derivation, Derivation> decompose(const Derivation& d, std::size_t n) {
  if (n == 0) return {mk_empty_ctx(), d};
  if (d.rule != Rule::Es) invalid("decomposition needs an es node for every substitution");
  auto [ctx, body] = decompose(d.premises[0], n - 1);
  const VarName& x = d.subject.binder();
  OptType hole_use = lookup(body.env, x);
  Derivation outer = mk_add_ctx(std::move(ctx), x, d.premises[1], hole_use);
  return {std::move(outer), std::move(body)};
}

Derivation compose(const Derivation& ctx, const Derivation& body) {
  if (ctx.rule == Rule::EmptySubsCtx) return body;
  if (ctx.rule != Rule::AddSubsCtx) invalid("composition needs a context derivation");
  const VarName& x = ctx.ctx.entries.back().first;
  if (compare(lookup(body.env, x), lookup(ctx.delta, x)) != 0)
    invalid("body environment disagrees with the hole environment on " + x.str());
  return mk_es(compose(ctx.premises[0], body), x, ctx.premises[1]);
}

// ---------------------------------------------------------------------------
// Inference by subject expansion

namespace {

const Derivation& at_path(const Derivation& d, const Position& p) {
  const Derivation* cur = &d;
  for (auto i : p) {
    if (cur->rule == Rule::Abs || i >= cur->premises.size()) invalid("position leaves the weak part of the derivation");
    cur = &cur->premises[i];
  }
  return *cur;
}

Derivation rebuild(const Derivation& node, std::vector<Derivation> premises) {
  switch (node.rule) {
    case Rule::AppP:
    case Rule::AppC:
      return mk_app(std::move(premises[0]), std::move(premises[1]));
    case Rule::Es:
      return mk_es(std::move(premises[0]), node.subject.binder(), std::move(premises[1]));
    default:
      invalid("cannot rebuild " + rule_name(node.rule) + " along a weak position");
  }
}

Derivation replace_path(const Derivation& d, const Position& p, std::size_t depth, Derivation repl) {
  if (depth == p.size()) return repl;
  std::vector<Derivation> premises = d.premises;
  premises.at(p[depth]) = replace_path(d.premises.at(p[depth]), p, depth + 1, std::move(repl));
  return rebuild(d, std::move(premises));
}

struct Peeled {
  std::vector<std::pair<VarName, Derivation>> layers;  // outermost first
  const Derivation* core = nullptr;
};

Peeled peel(const Derivation& d, std::size_t n) {
  Peeled r;
  const Derivation* cur = &d;
  for (std::size_t k = 0; k < n; ++k) {
    if (cur->rule != Rule::Es) invalid("expected an es node for the substitution context");
    r.layers.emplace_back(cur->subject.binder(), cur->premises[1]);
    cur = &cur->premises[0];
  }
  r.core = cur;
  return r;
}

Derivation wrap(Derivation d, const Peeled& p) {
  for (auto it = p.layers.rbegin(); it != p.layers.rend(); ++it) d = mk_es(std::move(d), it->first, it->second);
  return d;
}

// Given a derivation of the reduct, a derivation of the redex at `where`.
Derivation expand_step(const Term& before, const LabeledStep& step, const Derivation& after) {
  const Term& redex = subterm_at(before, step.where);
  const Derivation& contractum = at_path(after, step.where);
  Derivation expanded;
  if (step.kind.tag == StepKind::Db) {
    // (λx.s)L u  ←  s[x\u]L
    Peeled p = peel(contractum, classify(redex.fun()).ctx.length());
    const Derivation& es = *p.core;
    if (es.rule != Rule::Es) invalid("db contractum is not typed by es");
    Derivation lam = mk_abs(es.subject.binder(), es.subject.body(), {es.premises[0]});
    expanded = mk_app(wrap(std::move(lam), p), es.premises[1]);
    if (expanded.m != contractum.m + 1 || expanded.e != contractum.e)
      invalid("db expansion does not add exactly one multiplicative step");
  } else if (step.kind.tag == StepKind::Lsv) {
    // s[x\vL]  ←  s'[x'\v]L  where the occurrence of x' at `occurrence` became v
    Peeled p = peel(contractum, classify(redex.arg()).ctx.length());
    const Derivation& es = *p.core;
    if (es.rule != Rule::Es) invalid("lsv contractum is not typed by es");
    const VarName& x = es.subject.binder();
    const Derivation& occ = at_path(es.premises[0], step.occurrence);
    if (num_arrows(occ.type) != 1 || !occ.type.is_multiset())
      invalid("substituted occurrence is not typed by a single arrow: " + print(occ.type));
    Derivation body = replace_path(es.premises[0], step.occurrence, 0, mk_var(x, occ.type));
    Derivation value = merge_values(es.premises[1], occ);
    expanded = mk_es(std::move(body), x, wrap(std::move(value), p));
    if (expanded.m != contractum.m || expanded.e != contractum.e + 1)
      invalid("lsv expansion does not add exactly one exponential step");
  } else {
    invalid("only db and lsv steps can be expanded");
  }
  return replace_path(after, step.where, 0, std::move(expanded));
}

}  // namespace

InferResult infer_tight(const Term& t, Count budget, std::size_t node_cap) {
  InferResult r;
  const ReductionParams top = ReductionParams::top(t);
  NormalizeResult n;
  try {
    n = normalize_ucbv(t, budget);
  } catch (const BudgetExceeded& ex) {
    r.status = InferResult::Status::NotFound;
    r.detail = std::string("evaluation did not reach a normal form: ") + ex.what();
    return r;
  }

  std::vector<const Term*> terms{&t};
  for (const auto& st : n.trace) terms.push_back(&st.result);

  Derivation d = derive_nf(n.nf, top);
  for (std::size_t i = n.trace.size(); i-- > 0;) {
    d = alpha_transport(expand_step(*terms[i], n.trace[i], d), *terms[i]);
    if (derivation_size(d) > node_cap) {
      r.status = InferResult::Status::BudgetExceeded;
      r.detail = "derivation exceeds " + std::to_string(node_cap) + " nodes";
      return r;
    }
  }

  CheckResult chk = check_derivation(d);
  if (!chk.ok) throw std::logic_error("expanded derivation does not check: " + chk.reason);
  if (!is_tight(d)) throw std::logic_error("expanded derivation is not tight");
  if (d.m != n.m || d.e != n.e) throw std::logic_error("expanded derivation has the wrong counters");
  r.status = InferResult::Status::Found;
  r.m = d.m;
  r.e = d.e;
  r.derivation = std::move(d);
  return r;
}

}  // namespace cbv
