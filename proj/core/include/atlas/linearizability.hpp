#pragma once

#include <string>

#include "atlas/trace.hpp"

namespace atlas {

enum class LinVerdict { Ok, Violation, BudgetExhausted };

const char* to_string(LinVerdict v);

struct LinResult {
  LinVerdict verdict{LinVerdict::Ok};
  std::uint64_t explored{0};  // search nodes visited across all keys
  std::string detail;         // witness of the stuck key, or budget note

  bool ok() const { return verdict == LinVerdict::Ok; }
  Json to_json() const;
};

// Empirical linearizability of the run's invoke/response history over the
// key-value object: some sequential order must match every response and
// respect real-time precedence (trace order). Operations on distinct keys
// commute, so the search runs per key. Completed operations are mandatory;
// pending writes may or may not take effect; pending reads constrain
// nothing and are dropped. Exponential in the worst case, hence the node
// budget, reported distinctly from a refutation.
LinResult check_linearizability(const Trace& tr,
                                std::uint64_t node_budget = 2'000'000);

}  // namespace atlas
