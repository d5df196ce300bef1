#pragma once

#include <map>
#include <string>
#include <vector>

#include "atlas/trace.hpp"

namespace atlas {

struct CheckIssue {
  std::string check;
  std::string detail;
  std::vector<std::size_t> events;  // indices into Trace::events citing the witness
};

struct CheckReport {
  std::map<std::string, std::uint64_t> checked;  // instances examined per check
  std::vector<CheckIssue> issues;

  bool ok() const { return issues.empty(); }
  void merge(CheckReport other);
  Json to_json() const;
};

// All commit records for one dot carry equal (cmd, deps).
CheckReport check_agreement(const Trace& tr);

// Distinct committed dots with conflicting commands name each other in at
// least one direction. Noops are skipped; so are optimized reads when the
// run had them on, since those never enter anyone's dependencies.
CheckReport check_conflict_coverage(const Trace& tr);

// The replicated-object contract over executions: validity (only submitted
// commands run), integrity (at most once per process), ordering (conflict
// order unioned with real-time order is acyclic), and the batch invariants
// (dependencies never live in later batches; a dot's batch is the same set
// of dots everywhere it runs).
CheckReport check_smr_spec(const Trace& tr);

// Every fast commit's dependency set is recomputable from any floor(n/2)
// non-coordinator quorum members' acks, so any recovery quorum agrees with
// the decision. Optimized reads are exempt by design.
CheckReport check_fast_path_recoverability(const Trace& tr);

// Wire-level discipline: committed dependency sets match what the collect
// acks imply for the chosen path, one proposal value per (dot, ballot),
// matching replies imply the fast path (always at f=1), deliveries pair off
// with earlier sends, and crashed processes stay silent.
CheckReport check_protocol_rules(const Trace& tr);

// Every structural check above in one report.
CheckReport check_trace(const Trace& tr);

}  // namespace atlas
