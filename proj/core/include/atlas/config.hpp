#pragma once

#include <string>
#include <vector>

#include "atlas/messages.hpp"
#include "atlas/process.hpp"
#include "atlas/types.hpp"

namespace atlas {

// One-way delay model. Presets synthesize a matrix; an explicit matrix wins
// when preset is empty. Every delivery adds seeded uniform jitter in
// [0, jitter].
struct LatencySpec {
  std::string preset{"uniform"};  // uniform | two-region | planet5 | ""
  std::uint64_t base{50};         // uniform preset's off-diagonal delay
  std::uint64_t jitter{0};
  std::vector<std::vector<std::uint64_t>> matrix;
  friend bool operator==(const LatencySpec&, const LatencySpec&) = default;
};

struct CrashSpec {
  ProcId proc{0};
  TimePoint at{0};
  friend bool operator==(const CrashSpec&, const CrashSpec&) = default;
};

// Closed-loop clients: each keeps one command outstanding and submits the
// next at the response instant. A command hits the contended key "0" with
// probability conflict_rate, otherwise a key nobody else touches.
struct WorkloadSpec {
  std::uint32_t clients_per_process{1};
  std::uint32_t commands_per_client{10};
  double conflict_rate{0.0};
  double read_ratio{0.0};
  std::uint32_t payload_bytes{8};
  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct SimConfig {
  ProcId n{3};
  ProcId f{1};
  std::uint64_t seed{1};
  LatencySpec latency;
  std::vector<CrashSpec> crashes;
  WorkloadSpec workload;
  TimePoint recovery_timeout{500};
  TimePoint horizon{1'000'000};
  ProtocolFlags flags;
  bool allow_excess_crashes{false};  // > f crashes: safety only, no liveness

  // Field-level problems, empty when the config is usable.
  std::vector<std::string> validate() const;

  // Preset resolved to a full n x n matrix; pre: validate() passed.
  std::vector<std::vector<std::uint64_t>> resolved_matrix() const;

  Json to_json() const;  // every effective default included
  static SimConfig from_json(const Json& j);

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace atlas
