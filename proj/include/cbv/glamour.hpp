#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/term.hpp"

namespace cbv {

// Machine state components. Every vector keeps its most recent element at
// the back: the top of a stack, the newest dump entry, and the innermost
// environment entry.

struct StackItem {
  enum class Label { A, S };
  Label label = Label::A;
  Term code;                     // a pure code
  std::vector<StackItem> stack;  // label S only: the arguments of the head variable

  static StackItem abstraction(Term code) { return {Label::A, std::move(code), {}}; }
  static StackItem structure(Term head, std::vector<StackItem> stack) {
    return {Label::S, std::move(head), std::move(stack)};
  }
};

using Stack = std::vector<StackItem>;

struct DumpEntry {
  Term code;
  Stack stack;
};

struct EnvEntry {
  VarName x;
  StackItem item;
};

struct MachineState {
  std::vector<DumpEntry> dump;
  Term focus;
  Stack stack;
  std::vector<EnvEntry> env;
};

enum class Transition { UM, UE, C1, C2, C3, C4, C5 };
inline constexpr std::size_t kTransitionKinds = 7;
std::string transition_name(Transition k);

class IllNamed : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Deterministic supply of fresh names for the renaming done by UE. Tags
// start above every tag present in the initial code.
class NameSupply {
 public:
  explicit NameSupply(std::uint32_t next = 1) : next_(next) {}
  static NameSupply above(const Term& t);
  VarName fresh(const VarName& like) { return VarName(like.base, next_++); }

 private:
  std::uint32_t next_;
};

// (ε | c | ε | ε); c is well-named first. Throws std::invalid_argument when c
// is not pure.
MachineState inject(const Term& c);

bool is_well_named(const MachineState& s);
void require_well_named(const MachineState& s);

struct StepOutcome {
  bool final = true;
  Transition kind = Transition::C1;
  MachineState next;
};

// Applies the unique applicable transition. Throws CorrectnessViolation if
// more than one guard holds.
StepOutcome machine_step(const MachineState& s, NameSupply& names);

Term decode(const StackItem& item);
Term decode(const MachineState& s);
// The environment as a substitution context (innermost first).
SubstCtx decode_env(const std::vector<EnvEntry>& env, std::size_t begin, std::size_t end);

struct RunResult {
  MachineState final;
  std::array<Count, kTransitionKinds> counts{};
  std::vector<Transition> trace;

  Count count(Transition k) const { return counts[static_cast<std::size_t>(k)]; }
  Count administrative() const;
};

// Runs from inject(c). Throws BudgetExceeded after `budget` transitions.
// With check_naming, well-naming is verified after every transition.
RunResult run_machine(const Term& c, Count budget, bool check_naming = false);

// E-rigidity of a stack item: decode(item) is a hereditary abstraction
// (label A) or a structure (label S) for the frames obtained by expanding
// (∅, initial_fv) through the decoding of `env`.
bool check_rigid_item(const StackItem& item, const std::vector<EnvEntry>& env,
                      const VarSet& initial_fv);

// ---------------------------------------------------------------------------
// Simulation checking

struct SimulationReport {
  bool ok = true;
  std::string failure;  // first violated obligation
  RunResult run;
  Count stable_m = 0;  // counts of normalize_stable on the initial code
  Count stable_e = 0;
  Count size = 0;      // |c|
};

// Runs the machine on c and checks after every transition: well-naming,
// stability of the decoding, rigidity of every stack and environment item,
// and the simulation obligations (UM: a stable db step followed by ≡, UE: a
// stable lsv step followed by ≡, C1..C5: the decoding is unchanged up to α,
// final: the decoding is stable-irreducible). Finally #UM and #UE are
// compared with the stable normalization counts.
SimulationReport check_simulation(const Term& c, Count budget);

}  // namespace cbv
