#include "atlas/summary.hpp"

#include <algorithm>

namespace atlas {

RunSummary RunSummary::from_trace(const Trace& tr) {
  RunSummary s;
  std::map<Dot, const TraceEvent*> first_commit;
  std::map<Command, TimePoint> invoked_at;
  std::map<Dot, TimePoint> committed_at;
  std::map<Command, Dot> dot_of;
  DotSet executed;
  std::vector<std::uint64_t> commit_lat, resp_lat;
  std::uint64_t matching = 0;

  for (const TraceEvent& e : tr.events) {
    s.end_time = std::max(s.end_time, e.t);
    switch (e.type) {
      case EventType::Invoke:
        s.submitted++;
        invoked_at[*e.cmd] = e.t;
        break;
      case EventType::Response:
        s.responses++;
        if (auto it = invoked_at.find(*e.cmd); it != invoked_at.end())
          resp_lat.push_back(e.t - it->second);
        break;
      case EventType::Commit:
        if (first_commit.try_emplace(*e.dot, &e).second) {
          committed_at[*e.dot] = e.t;
          if (!e.cmd->is_noop()) dot_of[*e.cmd] = *e.dot;
        }
        break;
      case EventType::Execute:
        executed.insert(*e.dot);
        break;
      case EventType::Recovery:
        s.recovery_attempts++;
        break;
      case EventType::Crash:
        s.crashes++;
        break;
      default:
        break;
    }
  }

  s.committed_dots = first_commit.size();
  s.executed_dots = executed.size();
  for (const auto& [dot, ev] : first_commit) {
    if (ev->nfr) {
      s.nfr_commits++;
      continue;
    }
    if (ev->cmd->is_noop()) {
      s.noop_dots++;
      continue;
    }
    switch (*ev->path) {
      case CommitPath::Fast: s.fast++; break;
      case CommitPath::Slow: s.slow++; break;
      case CommitPath::Recovered: s.recovered++; break;
    }
    if (ev->matching.has_value() && *ev->matching) matching++;
  }
  std::uint64_t denom = s.fast + s.slow + s.recovered;
  s.fast_path_ratio = denom ? double(s.fast) / double(denom) : 0.0;
  s.matching_ratio = denom ? double(matching) / double(denom) : 0.0;

  for (const auto& [cmd, t0] : invoked_at) {
    auto it = dot_of.find(cmd);
    if (it == dot_of.end()) continue;
    commit_lat.push_back(committed_at.at(it->second) - t0);
  }
  if (!commit_lat.empty()) {
    s.commit_latency_min = *std::min_element(commit_lat.begin(), commit_lat.end());
    s.commit_latency_max = *std::max_element(commit_lat.begin(), commit_lat.end());
    double sum = 0;
    for (auto v : commit_lat) sum += double(v);
    s.commit_latency_mean = sum / double(commit_lat.size());
  }
  if (!resp_lat.empty()) {
    double sum = 0;
    for (auto v : resp_lat) sum += double(v);
    s.response_latency_mean = sum / double(resp_lat.size());
  }

  const LatencySpec& lat = tr.config.latency;
  if (lat.preset == "uniform" && lat.jitter == 0 && lat.base > 0)
    for (auto v : commit_lat) s.delay_units[v / lat.base]++;
  return s;
}

Json RunSummary::to_json() const {
  Json j;
  j["submitted"] = submitted;
  j["responses"] = responses;
  j["committed_dots"] = committed_dots;
  j["executed_dots"] = executed_dots;
  j["fast"] = fast;
  j["slow"] = slow;
  j["recovered"] = recovered;
  j["nfr_commits"] = nfr_commits;
  j["noop_dots"] = noop_dots;
  j["recovery_attempts"] = recovery_attempts;
  j["crashes"] = crashes;
  j["fast_path_ratio"] = fast_path_ratio;
  j["matching_ratio"] = matching_ratio;
  j["commit_latency_min"] = commit_latency_min;
  j["commit_latency_mean"] = commit_latency_mean;
  j["commit_latency_max"] = commit_latency_max;
  j["response_latency_mean"] = response_latency_mean;
  j["end_time"] = end_time;
  if (!delay_units.empty()) {
    Json h = Json::object();
    for (const auto& [units, count] : delay_units)
      h[std::to_string(units)] = count;
    j["delay_units"] = h;
  }
  return j;
}

}  // namespace atlas
