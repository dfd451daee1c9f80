#include <cstdint>
#include "cbv/derivation_json.hpp"

#include <stdexcept>

#include "cbv/syntax.hpp"

namespace cbv {

namespace {

using Rule = Derivation::Rule;
using nlohmann::json;

const std::pair<Rule, const char*> kRules[] = {
    {Rule::Var, "var"},         {Rule::Abs, "abs"}, {Rule::AppP, "appP"},
    {Rule::AppC, "appC"},       {Rule::Es, "es"},   {Rule::EmptySubsCtx, "emptySubsCtx"},
    {Rule::AddSubsCtx, "addSubsCtx"},
};

Rule rule_from(const std::string& name) {
  for (const auto& [r, n] : kRules)
    if (name == n) return r;
  throw std::invalid_argument("unknown rule '" + name + "'");
}

VarName name_from(const std::string& text) {
  Term t = parse(text);
  if (!t.is_var()) throw std::invalid_argument("'" + text + "' is not a variable name");
  return t.name();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return j.at(key);
}

Count count_from(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw std::invalid_argument(std::string("field '") + key + "' must be a natural number");
  return v.get<Count>();
}

}  // namespace

json env_to_json(const TypingEnv& env) {
  json j = json::object();
  for (const auto& [x, t] : env) j[x.str()] = print(t);
  return j;
}

TypingEnv env_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("an environment must be an object");
  TypingEnv env;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw std::invalid_argument("environment entries must be type strings");
    OptType t = parse_opt_type(v.get<std::string>());
    if (t) env.emplace(name_from(k), *t);
  }
  return env;
}

json derivation_to_json(const Derivation& d) {
  json j;
  j["rule"] = rule_name(d.rule);
  j["env"] = env_to_json(d.env);
  j["m"] = d.m;
  j["e"] = d.e;
  if (d.is_context()) {
    json ctx = json::array();
    for (const auto& [x, u] : d.ctx.entries) ctx.push_back({{"x", x.str()}, {"arg", print(u)}});
    j["ctx"] = std::move(ctx);
    j["delta"] = env_to_json(d.delta);
  } else {
    j["subject"] = print(d.subject);
    j["type"] = print(d.type);
  }
  // The ⊲ witness, informational: the checker recomputes it from the premises.
  if ((d.rule == Rule::AppC || d.rule == Rule::Es || d.rule == Rule::AddSubsCtx) && d.premises.size() == 2) {
    OptType left;
    if (d.rule == Rule::AppC && d.premises[0].type.arrows().size() == 1)
      left = d.premises[0].type.arrows().front().dom;
    else if (d.rule == Rule::Es)
      left = lookup(d.premises[0].env, d.subject.binder());
    else if (d.rule == Rule::AddSubsCtx && !d.ctx.empty()) {
      const VarName& x = d.ctx.entries.back().first;
      left = opt_sum(lookup(d.premises[0].env, x), lookup(d.delta, x));
    }
    j["witness"] = {{"weaker", print(left)}, {"type", print(d.premises[1].type)}};
  }
  json premises = json::array();
  for (const auto& p : d.premises) premises.push_back(derivation_to_json(p));
  j["premises"] = std::move(premises);
  return j;
}

Derivation derivation_from_json(const json& j) {
  Derivation d;
  const json& rule = field(j, "rule");
  if (!rule.is_string()) throw std::invalid_argument("field 'rule' must be a string");
  d.rule = rule_from(rule.get<std::string>());
  d.env = env_from_json(field(j, "env"));
  d.m = count_from(j, "m");
  d.e = count_from(j, "e");
  if (d.is_context()) {
    const json& ctx = field(j, "ctx");
    if (!ctx.is_array()) throw std::invalid_argument("field 'ctx' must be an array");
    for (const auto& entry : ctx)
      d.ctx.entries.emplace_back(name_from(field(entry, "x").get<std::string>()),
                                 parse(field(entry, "arg").get<std::string>()));
    d.delta = env_from_json(field(j, "delta"));
  } else {
    d.subject = parse(field(j, "subject").get<std::string>());
    d.type = parse_type(field(j, "type").get<std::string>());
  }
  if (j.contains("premises")) {
    const json& ps = j.at("premises");
    if (!ps.is_array()) throw std::invalid_argument("field 'premises' must be an array");
    for (const auto& p : ps) d.premises.push_back(derivation_from_json(p));
  }
  return d;
}

}  // namespace cbv
