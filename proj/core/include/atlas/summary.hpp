#pragma once

#include <map>

#include "atlas/trace.hpp"

namespace atlas {

// Aggregate view of one run. Dots are classified by their first commit event;
// read-optimized commits and Noop fillers stay out of the path ratio, which
// is fast commits over all other committed commands.
struct RunSummary {
  std::uint64_t submitted{0};
  std::uint64_t responses{0};
  std::uint64_t committed_dots{0};
  std::uint64_t executed_dots{0};  // dots executed at one process or more
  std::uint64_t fast{0};
  std::uint64_t slow{0};
  std::uint64_t recovered{0};
  std::uint64_t nfr_commits{0};
  std::uint64_t noop_dots{0};
  std::uint64_t recovery_attempts{0};
  std::uint64_t crashes{0};
  double fast_path_ratio{0.0};
  // Same denominator, counting commits every quorum member reported with
  // identical dependencies: the stricter fast-path predicate of protocols
  // that need matching replies.
  double matching_ratio{0.0};
  std::uint64_t commit_latency_min{0};
  std::uint64_t commit_latency_max{0};
  double commit_latency_mean{0.0};
  double response_latency_mean{0.0};
  TimePoint end_time{0};
  // Commit latencies divided by the base one-way delay; only filled for
  // jitter-free uniform-latency runs, where they count message delays.
  std::map<std::uint64_t, std::uint64_t> delay_units;

  static RunSummary from_trace(const Trace& tr);
  Json to_json() const;
};

}  // namespace atlas
