#include "engine.hpp"

#include "cbv/ucbv.hpp"

namespace cbv::detail {

namespace {

Term rename_levels(const Term& t, std::size_t levels, const VarSet& clash, VarSet& avoid) {
  if (levels == 0) return t;
  VarName z = t.binder();
  Term body = t.body();
  if (clash.count(z)) {
    VarName z2 = fresh_name(z, avoid);
    avoid.insert(z2);
    body = rename_free(body, z, z2);
    z = z2;
  }
  return Term::clo(rename_levels(body, levels - 1, clash, avoid), z, t.arg());
}

std::pair<Term, SubstCtx> split_levels(Term t, std::size_t levels) {
  SubstCtx L;
  for (std::size_t i = 0; i < levels; ++i) {
    L.entries.emplace_back(t.binder(), t.arg());
    t = t.body();
  }
  std::reverse(L.entries.begin(), L.entries.end());
  return {t, std::move(L)};
}

void extend_frames(VarSet& a, VarSet& s, const VarName& y, bool to_a, bool to_s) {
  a.erase(y);
  s.erase(y);
  if (to_a) a.insert(y);
  if (to_s) s.insert(y);
}

class Engine {
 public:
  explicit Engine(const EngineConfig& cfg) : cfg_(cfg) {}

  std::vector<LabeledStep> walk(const Term& t, const VarSet& a, const VarSet& s, Flag mu,
                                const Wanted& w) {
    std::vector<LabeledStep> out;
    switch (t.kind()) {
      case TermKind::Var:
        for (const auto& [x, v] : w.subs) {
          if (x == t.name() && sub_allowed(x, a, mu)) {
            out.push_back({StepKind::sub(x, v), v, {}, {}});
            if (full(out)) return out;
          }
        }
        return out;
      case TermKind::Abs:
        return out;
      case TermKind::App:
        walk_app(t, a, s, w, out);
        return out;
      case TermKind::Clo:
        walk_clo(t, a, s, mu, w, out);
        return out;
    }
    return out;
  }

 private:
  bool ucbv_like() const { return cfg_.calculus != Calculus::Lcbv; }
  bool full(const std::vector<LabeledStep>& out) const { return out.size() >= cfg_.limit; }

  bool sub_allowed(const VarName& x, const VarSet& a, Flag mu) const {
    if (!ucbv_like()) return true;
    return mu == Flag::Applied && a.count(x) > 0;
  }

  template <typename Rebuild>
  void append_child(std::vector<LabeledStep>& out, std::vector<LabeledStep> steps, std::uint8_t idx,
                    Rebuild rebuild) {
    for (auto& st : steps) {
      if (full(out)) return;
      st.where.insert(st.where.begin(), idx);
      st.result = rebuild(st.result);
      out.push_back(std::move(st));
    }
  }

  void walk_app(const Term& t, const VarSet& a, const VarSet& s, const Wanted& w,
                std::vector<LabeledStep>& out) {
    const Term& f = t.fun();
    const Term& u = t.arg();
    const bool stable = cfg_.calculus == Calculus::Stable;
    const bool arg_rigid = stable && is_rigid(u, a, s);

    if (w.db) {
      Classified c = classify(f);
      if (c.kind == Classified::IsAbs && (!stable || arg_rigid)) {
        VarSet clash;
        for (const auto& [z, q] : c.ctx.entries)
          if (occurs_free(z, u)) clash.insert(z);
        Term lam = c.value;
        SubstCtx L = c.ctx;
        if (!clash.empty()) {
          VarSet avoid;
          collect_names(f, avoid);
          collect_names(u, avoid);
          std::tie(lam, L) = rename_ctx_binders(lam, L, clash, avoid);
        }
        out.push_back({StepKind::db(), L.plug(Term::clo(lam.body(), lam.binder(), u)), {}, {}});
        if (full(out)) return;
      }
    }

    if (!stable || arg_rigid) {
      append_child(out, walk(f, a, s, Flag::Applied, w), 0,
                   [&](const Term& r) { return Term::app(r, u); });
      if (full(out)) return;
    }

    const bool right_ok = cfg_.calculus != Calculus::Ucbv || is_structure(f, s);
    if (right_ok)
      append_child(out, walk(u, a, s, Flag::NotApplied, w), 1,
                   [&](const Term& r) { return Term::app(f, r); });
  }

  void walk_clo(const Term& t, const VarSet& a, const VarSet& s, Flag mu, const Wanted& w,
                std::vector<LabeledStep>& out) {
    const VarName& y = t.binder();
    const Term& b = t.body();
    const Term& u = t.arg();
    const bool habs = ucbv_like() && is_hereditary_abstraction(u, a);
    const bool strct = ucbv_like() && !habs && is_structure(u, s);

    if (w.lsv) {
      Classified c = classify(u);
      if (c.kind != Classified::Neither && (!ucbv_like() || habs)) {
        lsv_steps(t, c, a, s, mu, out);
        if (full(out)) return;
      }
    }

    // Congruence into the body. Sub targets for y are shadowed; a target whose
    // value mentions y forces y to be renamed first.
    if (!ucbv_like() || habs || strct) {
      Wanted wb;
      wb.db = w.db;
      wb.lsv = w.lsv;
      bool rename = false;
      for (const auto& [x, v] : w.subs) {
        if (x == y) continue;
        if (occurs_free(y, v)) rename = true;
        wb.subs.emplace_back(x, v);
      }
      if (wb.db || wb.lsv || !wb.subs.empty()) {
        VarName y2 = y;
        Term b2 = b;
        if (rename) {
          VarSet avoid;
          collect_names(t, avoid);
          for (const auto& [x, v] : wb.subs) {
            avoid.insert(x);
            collect_names(v, avoid);
          }
          y2 = fresh_name(y, avoid);
          b2 = rename_free(b, y, y2);
        }
        VarSet a2 = a, s2 = s;
        if (ucbv_like()) extend_frames(a2, s2, y2, habs, strct);
        append_child(out, walk(b2, a2, s2, mu, wb), 0,
                     [&](const Term& r) { return Term::clo(r, y2, u); });
        if (full(out)) return;
      }
    }

    append_child(out, walk(u, a, s, Flag::NotApplied, w), 1,
                 [&](const Term& r) { return Term::clo(b, y, r); });
  }

  void lsv_steps(const Term& t, const Classified& c, const VarSet& a, const VarSet& s, Flag mu,
                 std::vector<LabeledStep>& out) {
    const VarName& y = t.binder();
    const Term& b = t.body();

    VarSet avoid;
    collect_names(t, avoid);
    VarSet clash;
    for (const auto& [z, q] : c.ctx.entries)
      if (!(z == y) && occurs_free(z, b)) clash.insert(z);
    Term v = c.value;
    SubstCtx L = c.ctx;
    if (!clash.empty()) std::tie(v, L) = rename_ctx_binders(v, L, clash, avoid);
    collect_names(v, avoid);

    VarName y2 = y;
    Term b2 = b;
    if (occurs_free(y, v)) {
      y2 = fresh_name(y, avoid);
      avoid.insert(y2);
      b2 = rename_free(b, y, y2);
    }

    VarSet a2 = a, s2 = s;
    extend_frames(a2, s2, y2, true, false);
    Wanted ws;
    ws.db = false;
    ws.lsv = false;
    ws.subs.emplace_back(y2, v);
    EngineConfig inner = cfg_;
    inner.limit = cfg_.limit == std::numeric_limits<std::size_t>::max()
                      ? cfg_.limit
                      : cfg_.limit - out.size();
    for (auto& st : Engine(inner).walk(b2, a2, s2, mu, ws)) {
      out.push_back({StepKind::lsv(), L.plug(Term::clo(st.result, y2, v)), {}, st.where});
      if (full(out)) return;
    }
  }

  EngineConfig cfg_;
};

}  // namespace

std::pair<Term, SubstCtx> rename_ctx_binders(Term core, SubstCtx L, const VarSet& clash,
                                             VarSet avoid) {
  collect_names(core, avoid);
  for (const auto& [z, q] : L.entries) {
    avoid.insert(z);
    collect_names(q, avoid);
  }
  const std::size_t n = L.length();
  Term renamed = rename_levels(L.plug(core), n, clash, avoid);
  return split_levels(renamed, n);
}

std::vector<LabeledStep> enumerate(const Term& t, const VarSet& a, const VarSet& s, Flag mu,
                                   const Wanted& wanted, const EngineConfig& cfg) {
  return Engine(cfg).walk(t, a, s, mu, wanted);
}

}  // namespace cbv::detail
