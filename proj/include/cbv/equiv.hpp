#pragma once

#include <vector>

#include "cbv/common.hpp"
#include "cbv/term.hpp"

namespace cbv {

// Structural equivalence: the closure of es-comm, es-assoc, es-l-dist and
// es-r-dist under applications and both sides of explicit substitutions
// (never under abstractions).

enum class EquivResult { Equivalent, NotEquivalent, BoundExceeded };

// Every term obtained from t by one axiom, in either direction, at one weak
// position.
std::vector<Term> equiv_neighbours(const Term& t);

// min(100000, max(16, 4·n²·n!)) where n is the number of ES nodes of t.
Count default_equiv_bound(const Term& t);

// Bidirectional breadth-first search over equiv_neighbours, nodes identified
// up to α. Both terms are well-named before the search starts. `bound` caps the number of visited nodes; 0 selects the default
// bound of the larger term.
EquivResult struct_equiv(const Term& t, const Term& u, Count bound = 0);

// Decides equivalence without search: both terms are well-named, every ES in
// a weak position is floated to the top, and the resulting flat forms are
// compared up to a bijection between ES binders.
bool equiv_by_flattening(const Term& t, const Term& u);

}  // namespace cbv
