#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cbv {

// A variable name is an identifier together with a freshness tag. Tag 0 is
// the plain identifier; fresh names reuse the base with a larger tag.
struct VarName {
  std::string base;
  std::uint32_t tag = 0;

  VarName() = default;
  VarName(std::string b, std::uint32_t t = 0) : base(std::move(b)), tag(t) {}
  VarName(const char* b) : base(b) {}

  std::string str() const;

  friend bool operator==(const VarName&, const VarName&) = default;
  friend std::strong_ordering operator<=>(const VarName&, const VarName&) = default;
};

using VarSet = std::set<VarName>;

enum class TermKind : std::uint8_t { Var, Abs, App, Clo };

// Immutable term handle. Copies share structure.
//
// Field usage per kind:
//   Var(x)          name()
//   Abs(x, b)       binder(), body()
//   App(f, a)       fun(), arg()
//   Clo(b, x, u)    body(), binder(), arg()      printed b[x\u]
class Term {
 public:
  // Empty handle. Only a placeholder (unused child slots, default members);
  // every other member function requires a non-empty term.
  Term() = default;
  bool empty() const { return node_ == nullptr; }

  static Term var(VarName x);
  static Term abs(VarName x, Term body);
  static Term app(Term fun, Term arg);
  static Term clo(Term body, VarName x, Term arg);

  TermKind kind() const;
  bool is_var() const { return kind() == TermKind::Var; }
  bool is_abs() const { return kind() == TermKind::Abs; }
  bool is_app() const { return kind() == TermKind::App; }
  bool is_clo() const { return kind() == TermKind::Clo; }

  const VarName& name() const;
  const VarName& binder() const;
  const Term& body() const;
  const Term& fun() const;
  const Term& arg() const;

  // Child 0 is body/fun, child 1 is arg. Abs has only child 0.
  const Term& child(int i) const;

  std::size_t size() const;
  // Free variables, sorted and duplicate-free; computed at construction.
  const std::vector<VarName>& fv_list() const;
  bool same_node(const Term& o) const { return node_ == o.node_; }

  // Syntactic (name-sensitive) equality.
  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  TermKind kind;
  VarName name;
  Term left;
  Term right;
  std::size_t size;
  std::vector<VarName> fv;
};

inline TermKind Term::kind() const { return node_->kind; }
inline const VarName& Term::name() const { return node_->name; }
inline const VarName& Term::binder() const { return node_->name; }
inline const Term& Term::body() const { return node_->left; }
inline const Term& Term::fun() const { return node_->left; }
inline const Term& Term::arg() const { return node_->right; }
inline const Term& Term::child(int i) const { return i == 0 ? node_->left : node_->right; }
inline std::size_t Term::size() const { return node_->size; }
inline const std::vector<VarName>& Term::fv_list() const { return node_->fv; }

// L = ⋄[x1\u1]…[xn\un]; entries[0] is the innermost substitution.
struct SubstCtx {
  std::vector<std::pair<VarName, Term>> entries;

  bool empty() const { return entries.empty(); }
  std::size_t length() const { return entries.size(); }
  VarSet binders() const;
  Term plug(Term t) const;
  friend bool operator==(const SubstCtx&, const SubstCtx&) = default;
};

enum class Flag : std::uint8_t { Applied, NotApplied };

struct StepKind {
  enum Tag : std::uint8_t { Db, Lsv, Sub };
  Tag tag = Db;
  VarName x;  // Sub only
  Term v;     // Sub only

  static StepKind db() { return {Db, {}, {}}; }
  static StepKind lsv() { return {Lsv, {}, {}}; }
  static StepKind sub(VarName x, Term v);

  VarSet free_vars() const;
  std::string tag_name() const;
};

// A position in a term: child indices from the root (0 = body/fun, 1 = arg).
using Position = std::vector<std::uint8_t>;

struct LabeledStep {
  StepKind kind;
  Term result;
  Position where;       // position of the contracted redex
  Position occurrence;  // Lsv: position of the replaced variable inside the ES body
};

// ---------------------------------------------------------------------------
// Basic operations

VarSet free_vars(const Term& t);
bool occurs_free(const VarName& x, const Term& t);
VarSet reachable_vars(const Term& t);

// Every name appearing anywhere in t, free or binding.
void collect_names(const Term& t, VarSet& out);

// (base, 1 + largest tag of that base in avoid).
VarName fresh_name(const VarName& like, const VarSet& avoid);

// Capture-avoiding meta-level substitution t{x ↦ u}.
Term subst(const Term& t, const VarName& x, const Term& u);

// Replace free occurrences of x by the variable y. Caller guarantees y is
// not captured (y fresh for t).
Term rename_free(const Term& t, const VarName& x, const VarName& y);

bool alpha_eq(const Term& a, const Term& b);

// A string that is identical for α-equivalent terms; usable as a hash key.
std::string alpha_key(const Term& t);

bool is_pure(const Term& t);
bool is_value(const Term& t);  // Var or Abs

struct Classified {
  enum Kind : std::uint8_t { IsAbs, IsValueWithCtx, Neither };
  Kind kind = Neither;
  Term value;    // the v of vL (meaningful unless Neither)
  SubstCtx ctx;  // the L of vL
};

// Peels the Clo spine of t maximally and reports whether what remains is a
// value. IsAbs when it is an abstraction, IsValueWithCtx when a variable.
Classified classify(const Term& t);
bool val(const Term& t);      // t = vL
bool abs_ctx(const Term& t);  // t = (λx.t')L

// Splits t into its maximal Clo spine: t = core·L.
std::pair<Term, SubstCtx> split_ctx(const Term& t);

Term full_unfold(const Term& t);

// Renames binders so that no binder repeats and none clashes with a free
// variable of t or with a name in avoid. Binders already unique keep their
// name.
Term well_name(const Term& t, const VarSet& avoid = {});

// Subterm access by position. Throws std::out_of_range on a bad position.
const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);

// Common closed values.
Term identity(const VarName& x = VarName("w"));

}  // namespace cbv

template <>
struct std::hash<cbv::VarName> {
  std::size_t operator()(const cbv::VarName& v) const noexcept {
    return std::hash<std::string>{}(v.base) * 31u + v.tag;
  }
};
