#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/lcbv.hpp"
#include "cbv/term.hpp"

namespace cbv {

using AbstractionFrame = VarSet;
using StructureFrame = VarSet;

struct ReductionParams {
  AbstractionFrame aframe;
  StructureFrame sframe;
  Flag flag = Flag::NotApplied;

  // (∅, fv(t), ¬@): the parameters of top-level reduction.
  static ReductionParams top(const Term& t);
};

// A ∩ S = ∅ and fv(t) ⊆ A ∪ S.
bool correct_for(const Term& t, const ReductionParams& p);
void require_correct(const Term& t, const ReductionParams& p);

bool is_hereditary_abstraction(const Term& t, const AbstractionFrame& a);
bool is_structure(const Term& t, const StructureFrame& s);
bool is_hereditary_variable(const Term& t, const VarName& x);
inline bool is_rigid(const Term& t, const AbstractionFrame& a, const StructureFrame& s) {
  return is_hereditary_abstraction(t, a) || is_structure(t, s);
}

// Walks L from its outermost substitution inwards. A binder joins A when its
// argument is a hereditary abstraction for the frames accumulated so far,
// joins S when it is a structure, and otherwise leaves both (it shadows any
// outer variable of the same name).
std::pair<AbstractionFrame, StructureFrame> expand_frames(const AbstractionFrame& a,
                                                          const StructureFrame& s,
                                                          const SubstCtx& L);

// One-step UCBV reducts under p: db and lsv steps, plus sub(x, values[x]) for
// x ∈ A applied (when values has an entry). Throws CorrectnessViolation.
std::vector<LabeledStep> ucbv_steps(const Term& t, const ReductionParams& p,
                                    const ValueMap& values = {});

// Reducible under p, counting sub(x, I) steps for every x ∈ A.
bool ucbv_reducible(const Term& t, const ReductionParams& p);

bool is_nf(const Term& t, const ReductionParams& p);

// Top-level reduction with A = ∅, S = fv(t), μ = ¬@; leftmost-outermost.
// Throws BudgetExceeded after `budget` steps without reaching a normal form.
NormalizeResult normalize_ucbv(const Term& t, Count budget = 10000);

struct ReductionGraph {
  struct Edge {
    StepKind::Tag kind;
    std::size_t target;
  };
  std::vector<Term> nodes;                // nodes[0] is the start term
  std::vector<std::vector<Edge>> edges;   // outgoing edges per node
  std::unordered_map<std::string, std::size_t> index;  // alpha_key → node
};

// BFS closure of top-level UCBV reduction, nodes identified up to α.
// Throws BudgetExceeded when more than `budget` nodes are discovered.
ReductionGraph ucbv_reduction_graph(const Term& t, Count budget);

// ---------------------------------------------------------------------------
// Stable terms and stable reduction

bool stable_check(const Term& t, const AbstractionFrame& a, const StructureFrame& s);
bool stable_ctx_check(const SubstCtx& L, const AbstractionFrame& a, const StructureFrame& s);

// Stable reduction evaluates arguments first: db fires only on a rigid
// argument, the head of an application is reduced only once the argument is
// rigid, and the argument may always be reduced.
std::vector<LabeledStep> stable_steps(const Term& t, const ReductionParams& p);

// Whether the step at `where` in t was taken inside the argument of an
// application whose head is not a structure, the one case in which a stable
// step is not a UCBV step.
bool under_non_structure_argument(const Term& t, const Position& where,
                                  const ReductionParams& p);

// Where a step rewrites: the redex for db and sub steps, the replaced
// variable occurrence for lsv steps.
Position rewrite_site(const LabeledStep& st);

NormalizeResult normalize_stable(const Term& t, Count budget = 10000);

}  // namespace cbv
