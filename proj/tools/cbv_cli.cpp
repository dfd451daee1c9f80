#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cbv/derivation_json.hpp"
#include "cbv/glamour.hpp"
#include "cbv/harness.hpp"
#include "cbv/syntax.hpp"
#include "cbv/system_u.hpp"
#include "cbv/ucbv.hpp"
#include "cbv/unfolding.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace cbv;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Term read_term(const std::string& expr, const std::string& file) {
  if (!expr.empty() && !file.empty()) throw UsageError("give either -e EXPR or FILE, not both");
  if (expr.empty() && file.empty()) throw UsageError("missing term: give -e EXPR or FILE");
  return parse(expr.empty() ? read_file(file) : expr);
}

ValueAssignment read_sigma(const std::string& file) {
  ValueAssignment sigma;
  if (file.empty()) return sigma;
  json j = json::parse(read_file(file));
  if (!j.is_object()) throw UsageError("an assignment file holds a JSON object mapping variables to values");
  for (const auto& [k, v] : j.items()) {
    Term x = parse(k);
    if (!x.is_var()) throw UsageError("'" + k + "' is not a variable");
    if (!v.is_string()) throw UsageError("assignment values are term strings");
    sigma[x.name()] = parse(v.get<std::string>());
  }
  require_valid_assignment(sigma);
  return sigma;
}

VarSet read_frame(const std::string& list) {
  VarSet out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Term x = parse(item);
    if (!x.is_var()) throw UsageError("'" + item + "' is not a variable");
    out.insert(x.name());
  }
  return out;
}

json counts(Count m, Count e) { return {{"m", m}, {"e", e}}; }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string strategy = "ucbv";
  std::string sigma_file;
  bool trace = false;
  Count budget = 10000;
  std::string expr;
  std::string file;
};

int run_eval(const EvalArgs& a) {
  const Term t = read_term(a.expr, a.file);
  if (a.strategy == "glamour") {
    RunResult r = run_machine(t, a.budget);
    if (a.trace) {
      MachineState s = inject(t);
      NameSupply names = NameSupply::above(s.focus);
      json steps = json::array();
      while (true) {
        StepOutcome o = machine_step(s, names);
        if (o.final) break;
        s = std::move(o.next);
        steps.push_back({{"kind", transition_name(o.kind)}, {"term", print(decode(s))}});
      }
      emit({{"initial", print(t)},
            {"steps", steps},
            {"counts", counts(r.count(Transition::UM), r.count(Transition::UE))}});
      return kOk;
    }
    json per_kind = json::object();
    for (std::size_t k = 0; k < kTransitionKinds; ++k)
      per_kind[transition_name(static_cast<Transition>(k))] = r.counts[k];
    emit({{"final", print(decode(r.final))},
          {"transitions", per_kind},
          {"counts", counts(r.count(Transition::UM), r.count(Transition::UE))}});
    return kOk;
  }

  NormalizeResult r;
  if (a.strategy == "lcbv")
    r = normalize_lcbv(t, a.budget);
  else if (a.strategy == "ucbv")
    r = normalize_ucbv(t, a.budget);
  else if (a.strategy == "stable")
    r = normalize_stable(t, a.budget);
  else if (a.strategy == "sigma")
    r = normalize_sigma(t, read_sigma(a.sigma_file));
  else
    throw UsageError("unknown strategy " + a.strategy);
  if (a.trace)
    emit(harness::trace_to_json(harness::make_trace(t, r)));
  else
    emit({{"nf", print(r.nf)}, {"counts", counts(r.m, r.e)}});
  return kOk;
}

struct NfArgs {
  std::string calculus = "ucbv";
  std::string aframe;
  std::string sframe;
  std::string flag = "noapp";
  std::string expr;
};

int run_nf(const NfArgs& a) {
  const Term t = parse(a.expr);
  if (a.flag != "app" && a.flag != "noapp") throw UsageError("--flag is app or noapp");
  const Flag mu = a.flag == "app" ? Flag::Applied : Flag::NotApplied;
  bool nf = false;
  if (a.calculus == "ucbv") {
    const ReductionParams p{read_frame(a.aframe), read_frame(a.sframe), mu};
    if (!correct_for(t, p)) throw UsageError("frames must be disjoint and cover the free variables");
    nf = is_nf(t, p);
  } else if (a.calculus == "lcbv") {
    nf = is_vnf(t, read_frame(a.aframe), mu);
  } else {
    throw UsageError("unknown calculus " + a.calculus);
  }
  emit({{"term", print(t)}, {"normal_form", nf}});
  return kOk;
}

int run_unfold(const std::string& expr, const std::string& sigma_file) {
  const Term t = parse(expr);
  emit({{"term", print(t)}, {"unfolding", print(partial_unfold(t, read_sigma(sigma_file)))}});
  return kOk;
}

int run_measure(const std::string& expr, const std::string& sigma_file) {
  const Term t = parse(expr);
  const ValueAssignment sigma = read_sigma(sigma_file);
  json occ = json::object();
  for (const auto& x : t.fv_list()) occ[x.str()] = measvar(x, t);
  emit({{"term", print(t)}, {"meas", meas(t)}, {"meas_sigma", meas_sigma(t, sigma)}, {"occurrences", occ}});
  return kOk;
}

int run_typecheck(const std::string& file) {
  Derivation d = derivation_from_json(json::parse(read_file(file)));
  CheckResult c = check_derivation(d);
  if (!c.ok) {
    emit({{"ok", false}, {"path", c.path}, {"reason", c.reason}});
    return kFailure;
  }
  json out = {{"ok", true}, {"m", d.m}, {"e", d.e}, {"tight", is_tight(d)}};
  if (!d.is_context()) out["type"] = print(d.type);
  emit(out);
  return kOk;
}

int run_infer(const std::string& expr, Count budget) {
  const Term t = parse(expr);
  InferResult r = infer_tight(t, budget);
  switch (r.status) {
    case InferResult::Status::Found:
      emit({{"status", "found"}, {"counts", counts(r.m, r.e)}, {"derivation", derivation_to_json(*r.derivation)}});
      return kOk;
    case InferResult::Status::NotFound:
      emit({{"status", "not-found"}, {"detail", r.detail}});
      return kFailure;
    case InferResult::Status::BudgetExceeded:
      emit({{"status", "budget-exceeded"}, {"detail", r.detail}});
      return kBudget;
  }
  return kFailure;
}

int run_fuzz(const std::string& suite, const harness::FuzzConfig& cfg) {
  harness::Report r = harness::run_suite(suite, cfg);
  emit(harness::report_to_json(r));
  return r.ok() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open call-by-value evaluation toolkit"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Normalize a term and report step counts");
  eval_cmd->add_option("--strategy", eval.strategy, "lcbv, ucbv, stable, glamour or sigma")
      ->check(CLI::IsMember({"lcbv", "ucbv", "stable", "glamour", "sigma"}));
  eval_cmd->add_option("--sigma", eval.sigma_file, "JSON value assignment (sigma strategy)");
  eval_cmd->add_flag("--trace", eval.trace, "Emit every step");
  eval_cmd->add_option("--budget", eval.budget, "Step budget");
  eval_cmd->add_option("-e,--expr", eval.expr, "Term");
  eval_cmd->add_option("file", eval.file, "File holding the term");

  NfArgs nf;
  auto* nf_cmd = app.add_subcommand("nf", "Decide normal-form membership");
  nf_cmd->add_option("--calculus", nf.calculus)->check(CLI::IsMember({"lcbv", "ucbv"}));
  nf_cmd->add_option("--aframe", nf.aframe, "Abstraction frame (value frame for lcbv), comma separated");
  nf_cmd->add_option("--sframe", nf.sframe, "Structure frame, comma separated");
  nf_cmd->add_option("--flag", nf.flag, "app or noapp")->check(CLI::IsMember({"app", "noapp"}));
  nf_cmd->add_option("-e,--expr", nf.expr, "Term")->required();

  std::string unfold_expr, unfold_sigma;
  auto* unfold_cmd = app.add_subcommand("unfold", "Partial unfolding");
  unfold_cmd->add_option("-e,--expr", unfold_expr, "Term")->required();
  unfold_cmd->add_option("--sigma", unfold_sigma, "JSON value assignment");

  std::string measure_expr, measure_sigma;
  auto* measure_cmd = app.add_subcommand("measure", "Substitution measures");
  measure_cmd->add_option("-e,--expr", measure_expr, "Term")->required();
  measure_cmd->add_option("--sigma", measure_sigma, "JSON value assignment");

  std::string derivation_file;
  auto* typecheck_cmd = app.add_subcommand("typecheck", "Check a typing derivation");
  typecheck_cmd->add_option("derivation", derivation_file, "Derivation JSON file")->required();

  std::string infer_expr;
  Count infer_budget = 10000;
  auto* infer_cmd = app.add_subcommand("infer", "Infer a tight derivation");
  infer_cmd->add_option("-e,--expr", infer_expr, "Term")->required();
  infer_cmd->add_option("--budget", infer_budget, "Evaluation budget");

  std::string suite;
  harness::FuzzConfig fuzz;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run a property suite");
  fuzz_cmd->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(harness::suite_names()));
  fuzz_cmd->add_option("--seed", fuzz.seed, "Random seed");
  fuzz_cmd->add_option("--count", fuzz.count, "Number of checked instances");
  fuzz_cmd->add_option("--max-size", fuzz.max_size, "Maximum term size");
  fuzz_cmd->add_option("--es-density", fuzz.es_density, "Probability of an ES node");
  fuzz_cmd->add_option("--pool", fuzz.free_var_pool, "Number of free variable names");
  fuzz_cmd->add_option("--budget", fuzz.budget, "Evaluation budget per instance");
  fuzz_cmd->add_flag("--exhaustive", fuzz.exhaustive, "Enumerate all terms up to the maximum size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*eval_cmd) return run_eval(eval);
    if (*nf_cmd) return run_nf(nf);
    if (*unfold_cmd) return run_unfold(unfold_expr, unfold_sigma);
    if (*measure_cmd) return run_measure(measure_expr, measure_sigma);
    if (*typecheck_cmd) return run_typecheck(derivation_file);
    if (*infer_cmd) return run_infer(infer_expr, infer_budget);
    if (*fuzz_cmd) return run_fuzz(suite, fuzz);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error at " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const InvalidAssignment& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const harness::InvalidConfig& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
