#pragma once

#include <string>
#include <vector>

#include "cbv/harness.hpp"
#include "cbv/syntax.hpp"
#include "cbv/term.hpp"

namespace cbv::test {

inline Term T(const std::string& s) { return parse(s); }

inline VarSet vars(std::initializer_list<const char*> xs) {
  VarSet out;
  for (const char* x : xs) out.insert(VarName(x));
  return out;
}

// A reproducible random corpus.
inline std::vector<Term> corpus(std::uint64_t seed, Count count, Count max_size, double density,
                                Count pool = 2) {
  harness::FuzzConfig cfg;
  cfg.seed = seed;
  cfg.count = count;
  cfg.max_size = max_size;
  cfg.es_density = density;
  cfg.free_var_pool = pool;
  harness::TermGenerator gen(cfg);
  std::vector<Term> out;
  for (Count i = 0; i < count; ++i) out.push_back(gen.next());
  return out;
}

// Every subset of a small set.
inline std::vector<VarSet> subsets(const VarSet& s) {
  std::vector<VarName> xs(s.begin(), s.end());
  std::vector<VarSet> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << xs.size()); ++mask) {
    VarSet v;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (mask & (std::size_t{1} << i)) v.insert(xs[i]);
    out.push_back(v);
  }
  return out;
}

}  // namespace cbv::test
