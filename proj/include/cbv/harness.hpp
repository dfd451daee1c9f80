#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cbv/common.hpp"
#include "cbv/lcbv.hpp"
#include "cbv/term.hpp"
#include "cbv/unfolding.hpp"
#include "json.hpp"

namespace cbv::harness {

// ---------------------------------------------------------------------------
// Term generation

struct FuzzConfig {
  std::uint64_t seed = 1;
  Count count = 100;
  Count max_size = 12;
  double es_density = 0.3;  // probability that an inner node is an ES
  Count free_var_pool = 2;  // free variables are drawn from the first names of x, y, z, u, v, w
  Count budget = 1000;      // evaluation budget per instance
  bool exhaustive = false;  // enumerate every term up to max_size instead of sampling
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const FuzzConfig& cfg);

// The names used for free variables: the first `pool` of x, y, z, u, v, w.
std::vector<VarName> free_pool(Count pool);

// Deterministic stream of random terms. Sizes are uniform in [1, max_size];
// binders are drawn from a small set that overlaps the free pool, so
// shadowing and capture situations are common.
class TermGenerator {
 public:
  explicit TermGenerator(const FuzzConfig& cfg);
  Term next();
  Term next_pure();
  Term of_size(Count n, bool pure);
  std::mt19937_64& rng() { return rng_; }

 private:
  Term gen(Count n, std::vector<VarName>& scope, bool pure);
  VarName pick_var(const std::vector<VarName>& scope);
  VarName pick_binder();

  FuzzConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<VarName> pool_;
  std::vector<VarName> binders_;
};

// Every term of size exactly n whose variables, free or bound, come from
// `names`. Terms are listed in a fixed order.
std::vector<Term> enumerate_terms(Count n, const std::vector<VarName>& names);
// All sizes 1..max_size, concatenated.
std::vector<Term> enumerate_up_to(Count max_size, const std::vector<VarName>& names);

// ---------------------------------------------------------------------------
// Shrinking

// Candidates one edit smaller than t: each subterm replaced by one of its
// children or by a free variable, and each ES dropped. Smallest first.
std::vector<Term> shrink_candidates(const Term& t, const std::vector<VarName>& vars);

// Greedy shrinking: repeatedly moves to the first candidate on which
// `still_fails` holds, at most `max_attempts` property evaluations.
Term shrink(const Term& t, const std::function<bool(const Term&)>& still_fails,
            const std::vector<VarName>& vars, Count max_attempts = 1000);

// ---------------------------------------------------------------------------
// Traces

struct TraceRecord {
  Term initial;
  std::vector<std::pair<std::string, Term>> steps;  // kind tag, resulting term
  Count m = 0;
  Count e = 0;
};

TraceRecord make_trace(const Term& initial, const NormalizeResult& r);
nlohmann::json trace_to_json(const TraceRecord& t);
TraceRecord trace_from_json(const nlohmann::json& j);

enum class Strategy { Lcbv, Ucbv, Stable, Sigma };

// Each step is re-derived: some one-step reduct of the previous term with
// the recorded kind is α-equal to the recorded term. Counts must match.
// Returns an empty string when valid, otherwise the first problem.
std::string validate_trace(const TraceRecord& t, Strategy s, const ValueAssignment& sigma = {});

// ---------------------------------------------------------------------------
// Suites

struct Failure {
  Term original;
  Term shrunk;
  std::string message;
};

struct Report {
  std::string suite;
  Count checked = 0;  // instances on which the property was evaluated
  Count skipped = 0;  // instances filtered out (budget, not applicable)
  Count steps = 0;    // individual steps or pairs examined, where meaningful
  std::vector<Failure> failures;
  std::map<std::string, double> metrics;

  bool ok() const { return failures.empty(); }
};

nlohmann::json report_to_json(const Report& r);

const std::vector<std::string>& suite_names();

// Throws InvalidConfig for an unknown suite or a bad configuration.
Report run_suite(const std::string& name, const FuzzConfig& cfg);

// The value assignments used by the suites that need one.
const std::vector<ValueAssignment>& sample_assignments();

}  // namespace cbv::harness
