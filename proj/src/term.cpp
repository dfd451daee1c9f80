#include "cbv/term.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace cbv {

std::string VarName::str() const {
  return tag == 0 ? base : base + "#" + std::to_string(tag);
}

namespace {

std::vector<VarName> merge_fv(const std::vector<VarName>& a, const std::vector<VarName>& b) {
  std::vector<VarName> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<VarName> remove_fv(const std::vector<VarName>& a, const VarName& x) {
  std::vector<VarName> out;
  out.reserve(a.size());
  for (const auto& y : a)
    if (!(y == x)) out.push_back(y);
  return out;
}

}  // namespace

Term Term::var(VarName x) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Var;
  n->fv = {x};
  n->name = std::move(x);
  n->size = 1;
  return Term(std::move(n));
}

Term Term::abs(VarName x, Term body) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Abs;
  n->fv = remove_fv(body.fv_list(), x);
  n->size = 1 + body.size();
  n->name = std::move(x);
  n->left = std::move(body);
  return Term(std::move(n));
}

Term Term::app(Term fun, Term arg) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::App;
  n->fv = merge_fv(fun.fv_list(), arg.fv_list());
  n->size = 1 + fun.size() + arg.size();
  n->left = std::move(fun);
  n->right = std::move(arg);
  return Term(std::move(n));
}

Term Term::clo(Term body, VarName x, Term arg) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Clo;
  n->fv = merge_fv(remove_fv(body.fv_list(), x), arg.fv_list());
  n->size = 1 + body.size() + arg.size();
  n->name = std::move(x);
  n->left = std::move(body);
  n->right = std::move(arg);
  return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case TermKind::Var:
      return a.name() == b.name();
    case TermKind::Abs:
      return a.binder() == b.binder() && a.body() == b.body();
    case TermKind::App:
      return a.fun() == b.fun() && a.arg() == b.arg();
    case TermKind::Clo:
      return a.binder() == b.binder() && a.body() == b.body() && a.arg() == b.arg();
  }
  return false;
}

VarSet SubstCtx::binders() const {
  VarSet out;
  for (const auto& [x, u] : entries) out.insert(x);
  return out;
}

Term SubstCtx::plug(Term t) const {
  for (const auto& [x, u] : entries) t = Term::clo(std::move(t), x, u);
  return t;
}

StepKind StepKind::sub(VarName x, Term v) {
  if (!is_value(v)) throw std::invalid_argument("sub step value must be a variable or abstraction");
  if (occurs_free(x, v)) throw std::invalid_argument("sub step variable occurs free in its value");
  return {Sub, std::move(x), std::move(v)};
}

VarSet StepKind::free_vars() const {
  if (tag != Sub) return {};
  VarSet out = cbv::free_vars(v);
  out.insert(x);
  return out;
}

std::string StepKind::tag_name() const {
  switch (tag) {
    case Db:
      return "db";
    case Lsv:
      return "lsv";
    case Sub:
      return "sub";
  }
  return "?";
}

VarSet free_vars(const Term& t) {
  const auto& l = t.fv_list();
  return VarSet(l.begin(), l.end());
}

bool occurs_free(const VarName& x, const Term& t) {
  const auto& l = t.fv_list();
  return std::binary_search(l.begin(), l.end(), x);
}

VarSet reachable_vars(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return {t.name()};
    case TermKind::Abs:
      return {};
    case TermKind::App: {
      VarSet out = reachable_vars(t.fun());
      VarSet r = reachable_vars(t.arg());
      out.insert(r.begin(), r.end());
      return out;
    }
    case TermKind::Clo: {
      VarSet out = reachable_vars(t.body());
      out.erase(t.binder());
      VarSet r = reachable_vars(t.arg());
      out.insert(r.begin(), r.end());
      return out;
    }
  }
  return {};
}

void collect_names(const Term& t, VarSet& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out.insert(t.name());
      return;
    case TermKind::Abs:
      out.insert(t.binder());
      collect_names(t.body(), out);
      return;
    case TermKind::App:
      collect_names(t.fun(), out);
      collect_names(t.arg(), out);
      return;
    case TermKind::Clo:
      out.insert(t.binder());
      collect_names(t.body(), out);
      collect_names(t.arg(), out);
      return;
  }
}

VarName fresh_name(const VarName& like, const VarSet& avoid) {
  std::uint32_t top = like.tag;
  for (auto it = avoid.lower_bound(VarName(like.base, 0));
       it != avoid.end() && it->base == like.base; ++it)
    top = std::max(top, it->tag);
  return VarName(like.base, top + 1);
}

namespace {

// Renames binder y of a scope whose body is b when y would capture a free
// variable of u; returns the (possibly renamed) binder and body.
std::pair<VarName, Term> avoid_capture(const VarName& y, const Term& b, const VarName& x,
                                       const Term& u) {
  if (!occurs_free(y, u) || !occurs_free(x, b)) return {y, b};
  VarSet avoid = free_vars(u);
  collect_names(b, avoid);
  avoid.insert(x);
  VarName y2 = fresh_name(y, avoid);
  return {y2, subst(b, y, Term::var(y2))};
}

}  // namespace

Term subst(const Term& t, const VarName& x, const Term& u) {
  if (!occurs_free(x, t)) return t;
  switch (t.kind()) {
    case TermKind::Var:
      return u;
    case TermKind::Abs: {
      auto [y, b] = avoid_capture(t.binder(), t.body(), x, u);
      return Term::abs(y, subst(b, x, u));
    }
    case TermKind::App:
      return Term::app(subst(t.fun(), x, u), subst(t.arg(), x, u));
    case TermKind::Clo: {
      Term a = subst(t.arg(), x, u);
      if (t.binder() == x) return Term::clo(t.body(), x, a);
      auto [y, b] = avoid_capture(t.binder(), t.body(), x, u);
      return Term::clo(subst(b, x, u), y, a);
    }
  }
  return t;
}

Term rename_free(const Term& t, const VarName& x, const VarName& y) {
  return subst(t, x, Term::var(y));
}

namespace {

int bound_index(const std::vector<VarName>& scope, const VarName& x) {
  for (std::size_t i = scope.size(); i-- > 0;)
    if (scope[i] == x) return static_cast<int>(scope.size() - 1 - i);
  return -1;
}

bool alpha_rec(const Term& a, const Term& b, std::vector<VarName>& sa, std::vector<VarName>& sb) {
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case TermKind::Var: {
      int ia = bound_index(sa, a.name());
      int ib = bound_index(sb, b.name());
      if (ia != ib) return false;
      return ia >= 0 || a.name() == b.name();
    }
    case TermKind::Abs: {
      sa.push_back(a.binder());
      sb.push_back(b.binder());
      bool ok = alpha_rec(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return ok;
    }
    case TermKind::App:
      return alpha_rec(a.fun(), b.fun(), sa, sb) && alpha_rec(a.arg(), b.arg(), sa, sb);
    case TermKind::Clo: {
      if (!alpha_rec(a.arg(), b.arg(), sa, sb)) return false;
      sa.push_back(a.binder());
      sb.push_back(b.binder());
      bool ok = alpha_rec(a.body(), b.body(), sa, sb);
      sa.pop_back();
      sb.pop_back();
      return ok;
    }
  }
  return false;
}

void key_rec(const Term& t, std::vector<VarName>& scope, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      int i = bound_index(scope, t.name());
      if (i >= 0) {
        out += '#';
        out += std::to_string(i);
      } else {
        out += '$';
        out += t.name().str();
      }
      out += ' ';
      return;
    }
    case TermKind::Abs:
      out += "L ";
      scope.push_back(t.binder());
      key_rec(t.body(), scope, out);
      scope.pop_back();
      return;
    case TermKind::App:
      out += "A ";
      key_rec(t.fun(), scope, out);
      key_rec(t.arg(), scope, out);
      return;
    case TermKind::Clo:
      out += "C ";
      key_rec(t.arg(), scope, out);
      scope.push_back(t.binder());
      key_rec(t.body(), scope, out);
      scope.pop_back();
      return;
  }
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  std::vector<VarName> sa, sb;
  return alpha_rec(a, b, sa, sb);
}

std::string alpha_key(const Term& t) {
  std::string out;
  out.reserve(t.size() * 4);
  std::vector<VarName> scope;
  key_rec(t, scope, out);
  return out;
}

bool is_pure(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return true;
    case TermKind::Abs:
      return is_pure(t.body());
    case TermKind::App:
      return is_pure(t.fun()) && is_pure(t.arg());
    case TermKind::Clo:
      return false;
  }
  return false;
}

bool is_value(const Term& t) { return t.is_var() || t.is_abs(); }

std::pair<Term, SubstCtx> split_ctx(const Term& t) {
  SubstCtx L;
  Term cur = t;
  while (cur.is_clo()) {
    L.entries.emplace_back(cur.binder(), cur.arg());
    cur = cur.body();
  }
  std::reverse(L.entries.begin(), L.entries.end());
  return {cur, std::move(L)};
}

Classified classify(const Term& t) {
  auto [core, L] = split_ctx(t);
  Classified c;
  if (core.is_abs())
    c.kind = Classified::IsAbs;
  else if (core.is_var())
    c.kind = Classified::IsValueWithCtx;
  else
    return c;
  c.value = core;
  c.ctx = std::move(L);
  return c;
}

bool val(const Term& t) { return classify(t).kind != Classified::Neither; }
bool abs_ctx(const Term& t) { return classify(t).kind == Classified::IsAbs; }

Term full_unfold(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return t;
    case TermKind::Abs:
      return Term::abs(t.binder(), full_unfold(t.body()));
    case TermKind::App:
      return Term::app(full_unfold(t.fun()), full_unfold(t.arg()));
    case TermKind::Clo:
      return subst(full_unfold(t.body()), t.binder(), full_unfold(t.arg()));
  }
  return t;
}

namespace {

struct WellNamer {
  VarSet used;   // binders chosen so far plus free names to avoid
  VarSet taken;  // every name that a fresh name must avoid

  VarName pick(const VarName& y) {
    VarName out = y;
    if (used.count(y)) out = fresh_name(y, taken);
    used.insert(out);
    taken.insert(out);
    return out;
  }

  Term run(const Term& t, std::map<VarName, VarName>& scope) {
    switch (t.kind()) {
      case TermKind::Var: {
        auto it = scope.find(t.name());
        return it == scope.end() || it->second == t.name() ? t : Term::var(it->second);
      }
      case TermKind::Abs: {
        VarName y = pick(t.binder());
        Term b = with_binding(t.binder(), y, t.body(), scope);
        return Term::abs(y, b);
      }
      case TermKind::App: {
        Term f = run(t.fun(), scope);
        Term a = run(t.arg(), scope);
        return Term::app(f, a);
      }
      case TermKind::Clo: {
        VarName y = pick(t.binder());
        Term b = with_binding(t.binder(), y, t.body(), scope);
        Term a = run(t.arg(), scope);
        return Term::clo(b, y, a);
      }
    }
    return t;
  }

  Term with_binding(const VarName& x, const VarName& y, const Term& body,
                    std::map<VarName, VarName>& scope) {
    auto it = scope.find(x);
    std::optional<VarName> saved;
    if (it != scope.end()) saved = it->second;
    scope[x] = y;
    Term b = run(body, scope);
    if (saved)
      scope[x] = *saved;
    else
      scope.erase(x);
    return b;
  }
};

}  // namespace

Term well_name(const Term& t, const VarSet& avoid) {
  WellNamer w;
  w.used = free_vars(t);
  w.used.insert(avoid.begin(), avoid.end());
  w.taken = w.used;
  collect_names(t, w.taken);
  std::map<VarName, VarName> scope;
  return w.run(t, scope);
}

const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (auto i : p) {
    if (cur->is_var() || (cur->is_abs() && i != 0) || i > 1)
      throw std::out_of_range("position does not exist in term");
    cur = &cur->child(i);
  }
  return *cur;
}

namespace {

Term replace_rec(const Term& t, const Position& p, std::size_t k, const Term& r) {
  if (k == p.size()) return r;
  const Term& c = subterm_at(t, Position{p[k]});
  Term nc = replace_rec(c, p, k + 1, r);
  switch (t.kind()) {
    case TermKind::Abs:
      return Term::abs(t.binder(), nc);
    case TermKind::App:
      return p[k] == 0 ? Term::app(nc, t.arg()) : Term::app(t.fun(), nc);
    case TermKind::Clo:
      return p[k] == 0 ? Term::clo(nc, t.binder(), t.arg()) : Term::clo(t.body(), t.binder(), nc);
    case TermKind::Var:
      break;
  }
  throw std::out_of_range("position does not exist in term");
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  return replace_rec(t, p, 0, replacement);
}

Term identity(const VarName& x) { return Term::abs(x, Term::var(x)); }

}  // namespace cbv
