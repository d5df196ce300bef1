#include "atlas/config.hpp"

#include <set>

namespace atlas {

std::vector<std::string> SimConfig::validate() const {
  std::vector<std::string> errs;
  auto err = [&](std::string m) { errs.push_back(std::move(m)); };

  if (n < 2) err("n must be at least 2");
  if (f < 1) err("f must be at least 1");
  if (n >= 2 && f >= 1 && f > (n - 1) / 2)
    err("f must satisfy f <= (n-1)/2, got n=" + std::to_string(n) +
        " f=" + std::to_string(f));

  const auto& l = latency;
  if (l.preset.empty()) {
    if (l.matrix.size() != n) {
      err("latency.matrix must be n x n");
    } else {
      for (ProcId i = 0; i < n; i++) {
        if (l.matrix[i].size() != n) {
          err("latency.matrix must be n x n");
          break;
        }
        for (ProcId j = 0; j < n; j++) {
          if (i == j && l.matrix[i][j] != 0)
            err("latency.matrix diagonal must be 0");
          if (i != j && l.matrix[i][j] == 0)
            err("latency.matrix off-diagonal delays must be positive");
        }
      }
    }
  } else if (l.preset == "uniform") {
    if (l.base == 0) err("latency.base must be positive");
  } else if (l.preset == "planet5") {
    if (n != 5) err("latency preset planet5 requires n=5");
  } else if (l.preset != "two-region") {
    err("unknown latency preset: " + l.preset);
  }

  std::set<ProcId> crashed;
  for (const CrashSpec& c : crashes) {
    if (c.proc < 1 || c.proc > n)
      err("crash proc out of range: " + std::to_string(c.proc));
    if (!crashed.insert(c.proc).second)
      err("duplicate crash for proc " + std::to_string(c.proc));
  }
  if (crashes.size() > f && !allow_excess_crashes)
    err("more than f crashes configured; set allow_excess_crashes to run a "
        "safety-only scenario");

  if (workload.conflict_rate < 0 || workload.conflict_rate > 1)
    err("workload.conflict_rate must be in [0, 1]");
  if (workload.read_ratio < 0 || workload.read_ratio > 1)
    err("workload.read_ratio must be in [0, 1]");
  if (recovery_timeout == 0) err("recovery_timeout must be positive");
  if (horizon == 0) err("horizon must be positive");
  return errs;
}

std::vector<std::vector<std::uint64_t>> SimConfig::resolved_matrix() const {
  std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n, 0));
  if (latency.preset.empty()) return latency.matrix;
  if (latency.preset == "uniform") {
    for (ProcId i = 0; i < n; i++)
      for (ProcId j = 0; j < n; j++)
        if (i != j) m[i][j] = latency.base;
    return m;
  }
  if (latency.preset == "two-region") {
    // first half of the ids in one site, rest in the other
    ProcId split = (n + 1) / 2;
    for (ProcId i = 0; i < n; i++)
      for (ProcId j = 0; j < n; j++) {
        if (i == j) continue;
        bool same = (i < split) == (j < split);
        m[i][j] = same ? 5 : 80;
      }
    return m;
  }
  // planet5: five synthetic sites, asymmetric distances not modeled
  const std::uint64_t d[5][5] = {{0, 80, 140, 200, 250},
                                 {80, 0, 70, 150, 190},
                                 {140, 70, 0, 90, 120},
                                 {200, 150, 90, 0, 60},
                                 {250, 190, 120, 60, 0}};
  for (ProcId i = 0; i < 5; i++)
    for (ProcId j = 0; j < 5; j++) m[i][j] = d[i][j];
  return m;
}

Json SimConfig::to_json() const {
  Json j;
  j["n"] = n;
  j["f"] = f;
  j["seed"] = seed;
  Json lat;
  lat["preset"] = latency.preset;
  lat["base"] = latency.base;
  lat["jitter"] = latency.jitter;
  if (latency.preset.empty()) lat["matrix"] = latency.matrix;
  j["latency"] = lat;
  Json cr = Json::array();
  for (const CrashSpec& c : crashes) cr.push_back({{"proc", c.proc}, {"at", c.at}});
  j["crashes"] = cr;
  j["workload"] = {{"clients_per_process", workload.clients_per_process},
                   {"commands_per_client", workload.commands_per_client},
                   {"conflict_rate", workload.conflict_rate},
                   {"read_ratio", workload.read_ratio},
                   {"payload_bytes", workload.payload_bytes}};
  j["recovery_timeout"] = recovery_timeout;
  j["horizon"] = horizon;
  j["flags"] = {{"slow_path_pruning", flags.slow_path_pruning},
                {"nfr_reads", flags.nfr_reads},
                {"conflict_mode", flags.conflict_mode == ConflictMode::Coarse
                                      ? "coarse"
                                      : "read-aware"}};
  j["allow_excess_crashes"] = allow_excess_crashes;
  return j;
}

SimConfig SimConfig::from_json(const Json& j) {
  SimConfig c;
  c.n = j.value("n", c.n);
  c.f = j.value("f", c.f);
  c.seed = j.value("seed", c.seed);
  if (j.contains("latency")) {
    const Json& l = j.at("latency");
    if (l.contains("matrix")) {
      c.latency.preset = "";
      c.latency.matrix =
          l.at("matrix").get<std::vector<std::vector<std::uint64_t>>>();
    }
    if (l.contains("preset")) c.latency.preset = l.at("preset").get<std::string>();
    c.latency.base = l.value("base", c.latency.base);
    c.latency.jitter = l.value("jitter", c.latency.jitter);
  }
  if (j.contains("crashes"))
    for (const Json& e : j.at("crashes"))
      c.crashes.push_back({e.at("proc").get<ProcId>(), e.at("at").get<TimePoint>()});
  if (j.contains("workload")) {
    const Json& w = j.at("workload");
    c.workload.clients_per_process =
        w.value("clients_per_process", c.workload.clients_per_process);
    c.workload.commands_per_client =
        w.value("commands_per_client", c.workload.commands_per_client);
    c.workload.conflict_rate = w.value("conflict_rate", c.workload.conflict_rate);
    c.workload.read_ratio = w.value("read_ratio", c.workload.read_ratio);
    c.workload.payload_bytes = w.value("payload_bytes", c.workload.payload_bytes);
  }
  c.recovery_timeout = j.value("recovery_timeout", c.recovery_timeout);
  c.horizon = j.value("horizon", c.horizon);
  if (j.contains("flags")) {
    const Json& fl = j.at("flags");
    c.flags.slow_path_pruning =
        fl.value("slow_path_pruning", c.flags.slow_path_pruning);
    c.flags.nfr_reads = fl.value("nfr_reads", c.flags.nfr_reads);
    std::string mode = fl.value("conflict_mode", std::string("coarse"));
    if (mode == "coarse")
      c.flags.conflict_mode = ConflictMode::Coarse;
    else if (mode == "read-aware")
      c.flags.conflict_mode = ConflictMode::ReadAware;
    else
      throw std::invalid_argument("bad conflict_mode: " + mode);
  }
  c.allow_excess_crashes = j.value("allow_excess_crashes", c.allow_excess_crashes);
  return c;
}

}  // namespace atlas
