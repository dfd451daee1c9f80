#include "cbv/equiv.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>

namespace cbv {

namespace {

void root_rewrites(const Term& t, std::vector<Term>& out) {
  if (t.is_clo()) {
    const Term& inner = t.body();
    const VarName& y = t.binder();
    const Term& s = t.arg();
    if (inner.is_clo()) {
      const Term& t0 = inner.body();
      const VarName& x = inner.binder();
      const Term& u = inner.arg();
      if (!(x == y) && !occurs_free(x, s) && !occurs_free(y, u))
        out.push_back(Term::clo(Term::clo(t0, y, s), x, u));
      if (!occurs_free(y, t0)) out.push_back(Term::clo(t0, x, Term::clo(u, y, s)));
    }
    if (s.is_clo()) {
      // t0[x\u[z\r]] → t0[x\u][z\r]
      const VarName& z = s.binder();
      if (!occurs_free(z, inner)) out.push_back(Term::clo(Term::clo(inner, y, s.body()), z, s.arg()));
    }
    if (inner.is_app()) {
      const Term& a = inner.fun();
      const Term& b = inner.arg();
      if (!occurs_free(y, b)) out.push_back(Term::app(Term::clo(a, y, s), b));
      if (!occurs_free(y, a)) out.push_back(Term::app(a, Term::clo(b, y, s)));
    }
  } else if (t.is_app()) {
    const Term& f = t.fun();
    const Term& a = t.arg();
    if (f.is_clo() && !occurs_free(f.binder(), a))
      out.push_back(Term::clo(Term::app(f.body(), a), f.binder(), f.arg()));
    if (a.is_clo() && !occurs_free(a.binder(), f))
      out.push_back(Term::clo(Term::app(f, a.body()), a.binder(), a.arg()));
  }
}

void neighbours_rec(const Term& t, std::vector<Term>& out) {
  root_rewrites(t, out);
  if (t.is_app()) {
    std::vector<Term> sub;
    neighbours_rec(t.fun(), sub);
    for (auto& r : sub) out.push_back(Term::app(r, t.arg()));
    sub.clear();
    neighbours_rec(t.arg(), sub);
    for (auto& r : sub) out.push_back(Term::app(t.fun(), r));
  } else if (t.is_clo()) {
    std::vector<Term> sub;
    neighbours_rec(t.body(), sub);
    for (auto& r : sub) out.push_back(Term::clo(r, t.binder(), t.arg()));
    sub.clear();
    neighbours_rec(t.arg(), sub);
    for (auto& r : sub) out.push_back(Term::clo(t.body(), t.binder(), r));
  }
}

Count count_es(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
      return 0;
    case TermKind::Abs:
      return count_es(t.body());
    case TermKind::App:
      return count_es(t.fun()) + count_es(t.arg());
    case TermKind::Clo:
      return 1 + count_es(t.body()) + count_es(t.arg());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Flattening

struct Flat {
  Term core;
  std::vector<std::pair<VarName, Term>> env;
};

Flat flatten(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Abs:
      return {t, {}};
    case TermKind::App: {
      Flat f = flatten(t.fun());
      Flat a = flatten(t.arg());
      f.core = Term::app(f.core, a.core);
      f.env.insert(f.env.end(), a.env.begin(), a.env.end());
      return f;
    }
    case TermKind::Clo: {
      Flat b = flatten(t.body());
      Flat u = flatten(t.arg());
      b.env.emplace_back(t.binder(), u.core);
      b.env.insert(b.env.end(), u.env.begin(), u.env.end());
      return b;
    }
  }
  return {t, {}};
}

class FlatMatcher {
 public:
  FlatMatcher(const Flat& l, const Flat& r) : l_(l), r_(r) {
    for (std::size_t i = 0; i < l.env.size(); ++i) lidx_.emplace(l.env[i].first, i);
    for (std::size_t i = 0; i < r.env.size(); ++i) ridx_.emplace(r.env[i].first, i);
  }

  bool solve() {
    if (l_.env.size() != r_.env.size()) return false;
    State st;
    st.pi.assign(l_.env.size(), npos);
    st.used.assign(r_.env.size(), false);
    Scope scope;
    if (!match(l_.core, r_.core, scope, st)) return false;
    return search(st);
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  using Scope = std::vector<std::pair<VarName, VarName>>;

  struct State {
    std::vector<std::size_t> pi;
    std::vector<bool> used;
    std::vector<std::size_t> work;
  };

  bool assign(std::size_t i, std::size_t j, State& st) {
    if (st.pi[i] != npos) return st.pi[i] == j;
    if (st.used[j]) return false;
    st.pi[i] = j;
    st.used[j] = true;
    st.work.push_back(i);
    return true;
  }

  bool match_var(const VarName& a, const VarName& b, const Scope& scope, State& st) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      const bool la = it->first == a;
      const bool lb = it->second == b;
      if (la || lb) return la && lb;
    }
    auto li = lidx_.find(a);
    auto ri = ridx_.find(b);
    if (li == lidx_.end() || ri == ridx_.end()) return li == lidx_.end() && ri == ridx_.end() && a == b;
    return assign(li->second, ri->second, st);
  }

  bool match(const Term& a, const Term& b, Scope& scope, State& st) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TermKind::Var:
        return match_var(a.name(), b.name(), scope, st);
      case TermKind::Abs: {
        scope.emplace_back(a.binder(), b.binder());
        bool ok = match(a.body(), b.body(), scope, st);
        scope.pop_back();
        return ok;
      }
      case TermKind::App:
        return match(a.fun(), b.fun(), scope, st) && match(a.arg(), b.arg(), scope, st);
      case TermKind::Clo: {
        if (!match(a.arg(), b.arg(), scope, st)) return false;
        scope.emplace_back(a.binder(), b.binder());
        bool ok = match(a.body(), b.body(), scope, st);
        scope.pop_back();
        return ok;
      }
    }
    return false;
  }

  bool drain(State& st) {
    while (!st.work.empty()) {
      std::size_t i = st.work.back();
      st.work.pop_back();
      Scope scope;
      if (!match(l_.env[i].second, r_.env[st.pi[i]].second, scope, st)) return false;
    }
    return true;
  }

  bool search(State& st) {
    if (!drain(st)) return false;
    std::size_t i = 0;
    while (i < st.pi.size() && st.pi[i] != npos) ++i;
    if (i == st.pi.size()) return true;
    for (std::size_t j = 0; j < st.used.size(); ++j) {
      if (st.used[j]) continue;
      State next = st;
      if (assign(i, j, next) && search(next)) return true;
    }
    return false;
  }

  const Flat& l_;
  const Flat& r_;
  std::unordered_map<VarName, std::size_t> lidx_;
  std::unordered_map<VarName, std::size_t> ridx_;
};

}  // namespace

std::vector<Term> equiv_neighbours(const Term& t) {
  std::vector<Term> out;
  neighbours_rec(t, out);
  return out;
}

Count default_equiv_bound(const Term& t) {
  const Count cap = 100000;
  const Count n = count_es(t);
  Count v = 4 * n * n;
  for (Count k = 2; k <= n && v <= cap; ++k) v *= k;
  return std::min(cap, std::max<Count>(16, v));
}

EquivResult struct_equiv(const Term& t, const Term& u, Count bound) {
  if (bound == 0) bound = std::max(default_equiv_bound(t), default_equiv_bound(u));
  const std::string kt = alpha_key(t);
  const std::string ku = alpha_key(u);
  if (kt == ku) return EquivResult::Equivalent;

  // The axioms' side conditions are stated for terms whose binders are
  // renamed apart; the axioms preserve that property along the search.
  VarSet avoid = free_vars(t);
  for (const auto& x : u.fv_list()) avoid.insert(x);

  // side 0 explores from t, side 1 from u
  std::unordered_map<std::string, int> seen{{kt, 0}, {ku, 1}};
  std::deque<Term> frontier[2] = {{well_name(t, avoid)}, {well_name(u, avoid)}};
  Count visited = 2;
  while (!frontier[0].empty() && !frontier[1].empty()) {
    const int side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
    std::deque<Term> next;
    for (const Term& cur : frontier[side]) {
      for (const Term& n : equiv_neighbours(cur)) {
        std::string k = alpha_key(n);
        auto it = seen.find(k);
        if (it != seen.end()) {
          if (it->second != side) return EquivResult::Equivalent;
          continue;
        }
        if (visited >= bound) return EquivResult::BoundExceeded;
        ++visited;
        seen.emplace(std::move(k), side);
        next.push_back(n);
      }
    }
    frontier[side] = std::move(next);
  }
  return EquivResult::NotEquivalent;
}

bool equiv_by_flattening(const Term& t, const Term& u) {
  VarSet avoid = free_vars(t);
  for (const auto& x : u.fv_list()) avoid.insert(x);
  const Flat l = flatten(well_name(t, avoid));
  const Flat r = flatten(well_name(u, avoid));
  return FlatMatcher(l, r).solve();
}

}  // namespace cbv
