#pragma once

// Shared redex enumeration for the three reduction relations.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "cbv/term.hpp"

namespace cbv::detail {

enum class Calculus { Lcbv, Ucbv, Stable };

struct Wanted {
  bool db = true;
  bool lsv = true;
  std::vector<std::pair<VarName, Term>> subs;  // sub(x, v) targets
};

struct EngineConfig {
  Calculus calculus = Calculus::Lcbv;
  std::size_t limit = std::numeric_limits<std::size_t>::max();
};

// Steps of t under frames (a, s) and flag mu, restricted to `wanted`.
// The frames are ignored by the linear calculus.
std::vector<LabeledStep> enumerate(const Term& t, const VarSet& a, const VarSet& s, Flag mu,
                                   const Wanted& wanted, const EngineConfig& cfg);

// Renames the binders of L that belong to `clash`, together with their
// occurrences in `core` and in the inner arguments of L.
std::pair<Term, SubstCtx> rename_ctx_binders(Term core, SubstCtx L, const VarSet& clash,
                                             VarSet avoid);

}  // namespace cbv::detail
