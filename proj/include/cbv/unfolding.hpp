#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/lcbv.hpp"
#include "cbv/term.hpp"
#include "cbv/ucbv.hpp"

namespace cbv {

// Finite map from variables to values with dom σ ∩ fv(im σ) = ∅.
using ValueAssignment = std::map<VarName, Term>;

class InvalidAssignment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_valid_assignment(const ValueAssignment& sigma);
void require_valid_assignment(const ValueAssignment& sigma);

// ⟦t⟧σ. Binders of t are renamed apart from dom σ and fv(im σ) first.
Term partial_unfold(const Term& t, const ValueAssignment& sigma = {});

// One-step →σ reducts: lsv steps and sub(x, σ(x)) for x ∈ dom σ.
std::vector<LabeledStep> sigma_steps(const Term& t, const ValueAssignment& sigma);

// Leftmost →σ reduction to normal form. →σ terminates, so there is no budget.
NormalizeResult normalize_sigma(const Term& t, const ValueAssignment& sigma = {});

// ---------------------------------------------------------------------------
// Measures. All arithmetic is checked and throws MeasureOverflow.

Count measvar(const VarName& x, const Term& t);
Count meas(const Term& t);
Count meas_sigma(const Term& t, const ValueAssignment& sigma);

// φ : Var → ℕ with finite support; absent variables map to 0.
struct OccurrenceCounter {
  std::map<VarName, Count> values;

  Count operator()(const VarName& x) const {
    auto it = values.find(x);
    return it == values.end() ? 0 : it->second;
  }

  // φ_t(x) = #x(t)
  static OccurrenceCounter of(const Term& t);
};

Count ctx_measvar(const VarName& x, const SubstCtx& L, const OccurrenceCounter& phi);
Count ctx_meas(const SubstCtx& L, const OccurrenceCounter& phi);

// ---------------------------------------------------------------------------
// Value frames under substitution contexts and compatibility

// Walks L from its outermost substitution inwards; a binder is added to the
// frame when its argument satisfies val and removed otherwise.
ValueFrame expand_value_frame(const ValueFrame& v, const SubstCtx& L);

bool is_ctx_vnf(const SubstCtx& L, const ValueFrame& v);

// 𝒜 ⊆ dom σ ⊆ 𝒜 ∪ 𝒮, abs(σ(x)) for x ∈ 𝒜, σ(x) a variable for x ∈ 𝒮 ∩ dom σ.
bool is_compatible(const ValueAssignment& sigma, const AbstractionFrame& a,
                   const StructureFrame& s);

}  // namespace cbv
