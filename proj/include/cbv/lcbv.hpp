#pragma once

#include <map>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/term.hpp"

namespace cbv {

using ValueFrame = VarSet;
using ValueMap = std::map<VarName, Term>;

// All one-step LCBV reducts of t. Always includes db and lsv steps; a
// sub(x, values[x]) step is produced for every x in frame that has an entry
// in values. Steps come leftmost-outermost first.
std::vector<LabeledStep> lcbv_steps(const Term& t, const ValueFrame& frame = {},
                                    const ValueMap& values = {});

// Reducible under Rules(frame): sub candidates for the frame variables are
// instantiated with the identity, which is enough because whether a sub
// step exists does not depend on the value.
bool lcbv_reducible(const Term& t, const ValueFrame& frame);

bool is_vnf(const Term& t, const ValueFrame& frame, Flag mu);

struct NormalizeResult {
  Term nf;
  std::vector<LabeledStep> trace;
  Count m = 0;  // db steps
  Count e = 0;  // lsv steps
};

// Leftmost-outermost lsv steps until none applies.
NormalizeResult normalize_lsv(const Term& t);

// Leftmost-outermost top-level (db ∪ lsv) reduction.
NormalizeResult normalize_lcbv(const Term& t, Count budget);

}  // namespace cbv
