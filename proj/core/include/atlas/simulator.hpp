#pragma once

#include "atlas/config.hpp"
#include "atlas/trace.hpp"

namespace atlas {

struct RunResult {
  Trace trace;
  bool horizon_reached{false};
  // Every client on a surviving process got all its responses and every
  // commit there was executed. Expected true whenever crashes <= f and the
  // horizon is generous.
  bool complete{false};
};

// Deterministic discrete-event run: identical configs produce byte-identical
// traces.
RunResult run_simulation(const SimConfig& cfg);

}  // namespace atlas
