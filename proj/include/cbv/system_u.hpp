#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/term.hpp"
#include "cbv/ucbv.hpp"

namespace cbv {

// ---------------------------------------------------------------------------
// Types

struct Arrow;

// Either the constant 𝕤 or a finite multiset of arrow types. Multisets are
// kept sorted, so equal types compare equal structurally.
class Type {
 public:
  Type() = default;  // the empty multiset []
  static Type s();
  static Type multiset(std::vector<Arrow> arrows);
  static Type empty() { return Type(); }

  bool is_s() const { return s_; }
  bool is_multiset() const { return !s_; }
  bool is_tight() const;  // 𝕤 or []
  const std::vector<Arrow>& arrows() const { return arrows_; }

  friend int compare(const Type& a, const Type& b);
  friend bool operator==(const Type& a, const Type& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Type& a, const Type& b) { return compare(a, b) != 0; }

 private:
  bool s_ = false;
  std::vector<Arrow> arrows_;
};

// nullopt is ⊥.
using OptType = std::optional<Type>;

struct Arrow {
  OptType dom;
  Type cod;
};

int compare(const OptType& a, const OptType& b);
int compare(const Arrow& a, const Arrow& b);

class SumUndefined : public std::domain_error {
 public:
  SumUndefined(const Type& a, const Type& b);
};

// 𝕤 + 𝕤 = 𝕤, multisets add by union, anything else is undefined.
Type type_sum(const Type& a, const Type& b);
OptType opt_sum(const OptType& a, const OptType& b);

// Number of top-level arrows: 0 for 𝕤 and ⊥.
Count num_arrows(const OptType& t);

// ⊥ ⊲ 𝕥 for tight 𝕥, and M ⊲ M.
bool lhd(const OptType& a, const Type& b);

bool is_tight(const OptType& t);

std::string print(const Type& t);
std::string print(const OptType& t);  // "bot" for ⊥
// Accepts the output of print; throws SyntaxError.
OptType parse_opt_type(const std::string& text);
Type parse_type(const std::string& text);

// ---------------------------------------------------------------------------
// Environments

// Absent variables are ⊥.
using TypingEnv = std::map<VarName, Type>;

OptType lookup(const TypingEnv& env, const VarName& x);
TypingEnv env_sum(const TypingEnv& a, const TypingEnv& b);
TypingEnv env_without(TypingEnv env, const VarName& x);
TypingEnv env_with(TypingEnv env, const VarName& x, const OptType& t);
bool is_tight(const TypingEnv& env);
bool is_appropriate(const TypingEnv& env, const AbstractionFrame& a);

// [] on 𝒜 ∩ rv(t), 𝕤 on 𝒮 ∩ rv(t), ⊥ elsewhere. Throws CorrectnessViolation.
TypingEnv tight_env(const Term& t, const AbstractionFrame& a, const StructureFrame& s);

// ---------------------------------------------------------------------------
// Derivations

struct Derivation {
  enum class Rule { Var, Abs, AppP, AppC, Es, EmptySubsCtx, AddSubsCtx };

  Rule rule = Rule::Var;
  TypingEnv env;
  Count m = 0;
  Count e = 0;
  std::vector<Derivation> premises;

  // Term judgements Γ ⊢ subject : type.
  Term subject;
  Type type;

  // Context judgements Γ ⊢ ctx ⊳ delta.
  SubstCtx ctx;
  TypingEnv delta;

  bool is_context() const { return rule == Rule::EmptySubsCtx || rule == Rule::AddSubsCtx; }
};

std::string rule_name(Derivation::Rule r);

class InvalidDerivation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Smart constructors. Each computes the conclusion from its premises and
// throws InvalidDerivation when a side condition fails. mk_app chooses appP
// when the function has type 𝕤 and appC otherwise.
Derivation mk_var(const VarName& x, const Type& t);
Derivation mk_abs(const VarName& x, const Term& body, std::vector<Derivation> premises);
Derivation mk_app(Derivation fun, Derivation arg);
Derivation mk_es(Derivation body, const VarName& x, Derivation arg);
Derivation mk_empty_ctx();
Derivation mk_add_ctx(Derivation inner, const VarName& x, Derivation arg, const OptType& hole_use);

struct CheckResult {
  bool ok = true;
  std::vector<std::size_t> path;  // premise indices from the root to the failing node
  std::string reason;
};

CheckResult check_derivation(const Derivation& d);

// A term judgement with tight environment and tight type.
bool is_tight(const Derivation& d);

// rv(t) ⊆ dom Γ ⊆ fv(t) at every term node.
bool relevance_holds(const Derivation& d);

std::size_t derivation_size(const Derivation& d);

// ---------------------------------------------------------------------------
// Constructions

class NotNormalForm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A tight derivation with counters (0,0) over tight_env(t, 𝒜, 𝒮) for
// t ∈ NF(𝒜,𝒮,μ). The type is [] for hereditary abstractions and 𝕤 for
// structures. Throws NotNormalForm.
Derivation derive_nf(const Term& t, const ReductionParams& p);

// Sum of two derivations of α-equivalent values with multiset types. The
// result has the subject of `a`.
Derivation merge_values(const Derivation& a, const Derivation& b);

// Splits a derivation of t·L (|L| = n) into a context derivation for L and a
// derivation for t, and the converse. The binders of L must be distinct, since
// the hole environment records one type per binder; otherwise
// InvalidDerivation is thrown.
std::pair<Derivation, Derivation> decompose(const Derivation& d, std::size_t n);
Derivation compose(const Derivation& ctx, const Derivation& body);

// The same derivation with its subject replaced by the α-equivalent term
// `target`; environments follow the renaming of bound variables.
Derivation alpha_transport(const Derivation& d, const Term& target);

struct InferResult {
  enum class Status { Found, NotFound, BudgetExceeded };
  Status status = Status::NotFound;
  std::optional<Derivation> derivation;
  Count m = 0;
  Count e = 0;
  std::string detail;
};

// Evaluates t with top-level UCBV (at most `budget` steps), types the normal
// form with derive_nf and expands the derivation backwards along the trace.
// A diverging evaluation yields NotFound; a derivation exceeding `node_cap`
// nodes yields BudgetExceeded.
InferResult infer_tight(const Term& t, Count budget = 10000, std::size_t node_cap = 1000000);

}  // namespace cbv
