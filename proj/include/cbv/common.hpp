#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbv {

using Count = std::uint64_t;

// A step or node budget ran out before the computation finished.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(Count budget, const std::string& what = "step budget exhausted")
      : std::runtime_error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}
  Count budget() const { return budget_; }

 private:
  Count budget_;
};

// The frames handed to a reduction or normal-form entry point do not satisfy
// A ∩ S = ∅ and fv(t) ⊆ A ∪ S. This is a caller bug.
class CorrectnessViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Checked arithmetic for the measures; they grow multiplicatively.
class MeasureOverflow : public std::overflow_error {
 public:
  MeasureOverflow() : std::overflow_error("measure exceeds 64-bit range") {}
};

inline Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) throw MeasureOverflow();
  return r;
}

inline Count checked_mul(Count a, Count b) {
  Count r;
  if (__builtin_mul_overflow(a, b, &r)) throw MeasureOverflow();
  return r;
}

}  // namespace cbv
