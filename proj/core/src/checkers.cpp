#include "atlas/checkers.hpp"

#include <algorithm>
#include <functional>

namespace atlas {
namespace {

std::string describe(const Command& c) {
  if (c.is_noop()) return "noop";
  std::string s = c.op == Op::Get ? "get " : "put ";
  s += c.key;
  s += " by " + std::to_string(c.caller) + "." + std::to_string(c.uid);
  return s;
}

std::string describe(const Dot& d) { return to_string(d); }

struct CommitRecord {
  std::size_t event{0};
  Command cmd;
  DotSet deps;
};

struct ExecRecord {
  std::size_t event{0};
  Dot dot;
  std::size_t batch{0};
};

// One linear scan's worth of lookup tables; every checker reads from here.
struct Index {
  const Trace* tr{nullptr};
  std::map<Dot, std::vector<CommitRecord>> commits;  // trace order per dot
  std::map<Dot, const TraceEvent*> first_commit;
  std::map<Command, std::size_t> invoked;            // command -> invoke event
  std::map<ProcId, std::vector<ExecRecord>> execs;   // trace order per process
  std::map<ProcId, std::size_t> crashed_at;          // process -> crash event
  std::map<std::pair<Dot, Ballot>, std::vector<CommitRecord>> proposals;
  std::vector<const TraceEvent*> evidenced;  // commits carrying collect acks

  const CommitRecord* agreed(Dot d) const {
    auto it = commits.find(d);
    return it == commits.end() ? nullptr : &it->second.front();
  }
};

Index build_index(const Trace& tr) {
  Index ix;
  ix.tr = &tr;
  for (std::size_t i = 0; i < tr.events.size(); i++) {
    const TraceEvent& e = tr.events[i];
    switch (e.type) {
      case EventType::Invoke:
        ix.invoked.try_emplace(*e.cmd, i);
        break;
      case EventType::Commit:
        ix.commits[*e.dot].push_back({i, *e.cmd, e.deps});
        ix.first_commit.try_emplace(*e.dot, &e);
        if (!e.ack_deps.empty()) ix.evidenced.push_back(&e);
        break;
      case EventType::Execute:
        ix.execs[e.proc].push_back({i, *e.dot, e.batch});
        break;
      case EventType::Crash:
        ix.crashed_at.try_emplace(e.proc, i);
        break;
      case EventType::Send:
      case EventType::Deliver:
        if (const auto* mc = std::get_if<MCommit>(&*e.msg))
          ix.commits[mc->dot].push_back({i, mc->cmd, mc->deps});
        else if (const auto* cons = std::get_if<MConsensus>(&*e.msg))
          ix.proposals[{cons->dot, cons->ballot}].push_back(
              {i, cons->cmd, cons->deps});
        break;
      default:
        break;
    }
  }
  return ix;
}

void require(CheckReport& rep, const std::string& check, bool ok,
             std::string detail, std::vector<std::size_t> events = {}) {
  rep.checked[check]++;
  if (!ok) rep.issues.push_back({check, std::move(detail), std::move(events)});
}

CheckReport agreement(const Index& ix) {
  CheckReport rep;
  for (const auto& [dot, records] : ix.commits) {
    const CommitRecord& base = records.front();
    bool ok = true;
    std::size_t bad = 0;
    for (const CommitRecord& r : records)
      if (r.cmd != base.cmd || r.deps != base.deps) {
        ok = false;
        bad = r.event;
        break;
      }
    require(rep, "agreement", ok,
            "dot " + describe(dot) + " committed with two different payloads",
            ok ? std::vector<std::size_t>{} : std::vector{base.event, bad});
  }
  return rep;
}

CheckReport conflict_coverage(const Index& ix) {
  CheckReport rep;
  const ProtocolFlags& flags = ix.tr->config.flags;
  std::vector<std::pair<Dot, const CommitRecord*>> dots;
  for (const auto& [dot, records] : ix.commits) {
    const CommitRecord& r = records.front();
    if (r.cmd.is_noop()) continue;
    if (flags.nfr_reads && r.cmd.is_read()) continue;
    dots.emplace_back(dot, &r);
  }
  for (std::size_t a = 0; a < dots.size(); a++)
    for (std::size_t b = a + 1; b < dots.size(); b++) {
      const auto& [d1, r1] = dots[a];
      const auto& [d2, r2] = dots[b];
      if (!conflict(r1->cmd, r2->cmd, flags.conflict_mode)) continue;
      bool ok = r1->deps.count(d2) > 0 || r2->deps.count(d1) > 0;
      require(rep, "conflict_coverage", ok,
              "conflicting " + describe(d1) + " (" + describe(r1->cmd) +
                  ") and " + describe(d2) + " (" + describe(r2->cmd) +
                  ") miss each other's dependencies",
              {r1->event, r2->event});
    }
  return rep;
}

CheckReport smr_spec(const Index& ix) {
  CheckReport rep;
  const ProtocolFlags& flags = ix.tr->config.flags;

  for (const auto& [p, execs] : ix.execs) {
    std::map<Dot, const ExecRecord*> seen;
    for (const ExecRecord& er : execs) {
      auto [it, fresh] = seen.try_emplace(er.dot, &er);
      require(rep, "integrity", fresh,
              "dot " + describe(er.dot) + " executed twice at process " +
                  std::to_string(p),
              fresh ? std::vector<std::size_t>{}
                    : std::vector{it->second->event, er.event});
      const CommitRecord* cr = ix.agreed(er.dot);
      bool known = cr != nullptr;
      bool submitted =
          known && (cr->cmd.is_noop() || ix.invoked.count(cr->cmd) > 0);
      require(rep, "validity", known && submitted,
              "execution of " + describe(er.dot) +
                  " has no invoked command behind it",
              {er.event});
    }
  }

  // Inv: a dependency runs in the same batch or an earlier one, never later.
  for (const auto& [p, execs] : ix.execs) {
    std::map<Dot, const ExecRecord*> by_dot;
    for (const ExecRecord& er : execs) by_dot.try_emplace(er.dot, &er);
    for (const ExecRecord& er : execs) {
      const CommitRecord* cr = ix.agreed(er.dot);
      if (!cr) continue;
      for (const Dot& dep : cr->deps) {
        auto it = by_dot.find(dep);
        bool ok = it != by_dot.end() && it->second->batch <= er.batch;
        require(rep, "batch_deps", ok,
                "dependency " + describe(dep) + " of " + describe(er.dot) +
                    " did not run by batch " + std::to_string(er.batch) +
                    " at process " + std::to_string(p),
                {er.event});
      }
    }
  }

  // Inv: the batch containing a dot is the same dot set everywhere.
  std::map<Dot, std::pair<ProcId, DotSet>> batch_of;
  for (const auto& [p, execs] : ix.execs) {
    std::map<std::size_t, DotSet> batches;
    for (const ExecRecord& er : execs) batches[er.batch].insert(er.dot);
    for (const auto& [bi, dots] : batches)
      for (const Dot& d : dots) {
        auto [it, fresh] = batch_of.try_emplace(d, p, dots);
        require(rep, "batch_membership", fresh || it->second.second == dots,
                "dot " + describe(d) + " runs in different batches at process " +
                    std::to_string(it->second.first) + " and process " +
                    std::to_string(p));
      }
  }

  // Ordering: per-process conflict order plus cross-command real-time order
  // must not cycle. Nodes are executed commands; noops never surface to the
  // application and optimized reads are outside the guarantee.
  std::map<Command, std::size_t> node_of;
  std::vector<Command> cmds;
  std::vector<std::size_t> first_exec;
  auto consider = [&](const Command& c) {
    if (c.is_noop()) return false;
    if (flags.nfr_reads && c.is_read()) return false;
    return true;
  };
  for (const auto& [p, execs] : ix.execs)
    for (const ExecRecord& er : execs) {
      const CommitRecord* cr = ix.agreed(er.dot);
      if (!cr || !consider(cr->cmd)) continue;
      auto [it, fresh] = node_of.try_emplace(cr->cmd, cmds.size());
      if (fresh) {
        cmds.push_back(cr->cmd);
        first_exec.push_back(er.event);
      } else {
        first_exec[it->second] = std::min(first_exec[it->second], er.event);
      }
    }
  std::vector<std::set<std::size_t>> adj(cmds.size());
  for (const auto& [p, execs] : ix.execs) {
    std::vector<std::size_t> order;
    for (const ExecRecord& er : execs) {
      const CommitRecord* cr = ix.agreed(er.dot);
      if (cr && consider(cr->cmd)) order.push_back(node_of.at(cr->cmd));
    }
    for (std::size_t a = 0; a < order.size(); a++)
      for (std::size_t b = a + 1; b < order.size(); b++)
        if (conflict(cmds[order[a]], cmds[order[b]], flags.conflict_mode))
          adj[order[a]].insert(order[b]);
  }
  for (std::size_t u = 0; u < cmds.size(); u++)
    for (std::size_t v = 0; v < cmds.size(); v++)
      if (u != v) {
        auto it = ix.invoked.find(cmds[v]);
        if (it != ix.invoked.end() && first_exec[u] < it->second)
          adj[u].insert(v);
      }
  // iterative coloring walk; a back edge names the cycle
  std::vector<int> color(cmds.size(), 0);
  std::vector<std::size_t> stack, path;
  bool cyclic = false;
  std::string cycle_text;
  for (std::size_t s = 0; s < cmds.size() && !cyclic; s++) {
    if (color[s]) continue;
    std::vector<std::pair<std::size_t, std::set<std::size_t>::const_iterator>>
        frames;
    color[s] = 1;
    path.assign({s});
    frames.emplace_back(s, adj[s].begin());
    while (!frames.empty() && !cyclic) {
      auto& [u, it] = frames.back();
      if (it == adj[u].end()) {
        color[u] = 2;
        frames.pop_back();
        path.pop_back();
        continue;
      }
      std::size_t v = *it++;
      if (color[v] == 1) {
        cyclic = true;
        auto at = std::find(path.begin(), path.end(), v);
        cycle_text = "cycle:";
        for (auto w = at; w != path.end(); ++w)
          cycle_text += " [" + describe(cmds[*w]) + "]";
        break;
      }
      if (color[v] == 0) {
        color[v] = 1;
        path.push_back(v);
        frames.emplace_back(v, adj[v].begin());
      }
    }
  }
  require(rep, "ordering", !cyclic, cycle_text);
  return rep;
}

void subsets_of(const std::vector<ProcId>& pool, std::size_t k,
                const std::function<void(const std::vector<ProcId>&)>& fn) {
  std::vector<ProcId> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      fn(cur);
      return;
    }
    for (std::size_t i = start; i < pool.size(); i++) {
      cur.push_back(pool[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

CheckReport recoverability(const Index& ix) {
  CheckReport rep;
  const ProcId n = ix.tr->config.n;
  for (const TraceEvent* ev : ix.evidenced) {
    const TraceEvent& e = *ev;
    if (e.path != CommitPath::Fast || e.nfr) continue;
    const Dot dot = *e.dot;
    std::vector<ProcId> others;
    for (const auto& [j, _] : e.ack_deps)
      if (j != dot.proc) others.push_back(j);
    bool ok = true;
    std::string detail;
    subsets_of(others, n / 2, [&](const std::vector<ProcId>& s) {
      DotSet u;
      for (ProcId j : s) {
        const DotSet& dj = e.ack_deps.at(j);
        u.insert(dj.begin(), dj.end());
      }
      if (ok && u != e.deps) {
        ok = false;
        detail = "fast commit of " + describe(dot) +
                 " not recoverable from members {";
        for (ProcId j : s) detail += std::to_string(j) + " ";
        detail += "}";
      }
    });
    require(rep, "recoverability", ok, detail);
  }
  return rep;
}

CheckReport protocol_rules(const Index& ix) {
  CheckReport rep;
  const Trace& tr = *ix.tr;
  const ProcId f = tr.config.f;
  const bool pruning = tr.config.flags.slow_path_pruning;

  for (const TraceEvent* ev : ix.evidenced) {
    const TraceEvent& e = *ev;
    const Dot dot = *e.dot;
    DotSet uni, frequent;
    for (const auto& [j, dj] : e.ack_deps) uni.insert(dj.begin(), dj.end());
    for (const Dot& d : uni) {
      ProcId count = 0;
      for (const auto& [j, dj] : e.ack_deps) count += dj.count(d) ? 1 : 0;
      if (count >= f) frequent.insert(d);
    }
    require(rep, "proposal",
            std::includes(uni.begin(), uni.end(), frequent.begin(),
                          frequent.end()),
            "frequent dependencies of " + describe(dot) +
                " escape the full union");
    if (e.path == CommitPath::Fast) {
      require(rep, "proposal", e.deps == uni,
              "fast commit of " + describe(dot) +
                  " differs from the ack union");
    } else if (e.path == CommitPath::Slow) {
      const DotSet& want = (pruning && !e.nfr) ? frequent : uni;
      require(rep, "proposal", e.deps == want,
              "slow commit of " + describe(dot) +
                  " is not the expected proposal");
    }
    if (!e.nfr) {
      if (e.matching.has_value() && *e.matching)
        require(rep, "matching_fast", e.path == CommitPath::Fast,
                "identical quorum replies for " + describe(dot) +
                    " still left the fast path");
      if (f == 1)
        require(rep, "f1_always_fast", e.path == CommitPath::Fast,
                "f=1 commit of " + describe(dot) + " missed the fast path");
    }
  }

  for (const auto& [key, props] : ix.proposals) {
    const CommitRecord& base = props.front();
    bool ok = true;
    std::size_t bad = 0;
    for (const CommitRecord& r : props)
      if (r.cmd != base.cmd || r.deps != base.deps) {
        ok = false;
        bad = r.event;
        break;
      }
    require(rep, "ballot_uniqueness", ok,
            "two proposals for " + describe(key.first) + " at ballot " +
                std::to_string(key.second),
            ok ? std::vector<std::size_t>{} : std::vector{base.event, bad});
  }

  // every delivery pairs with an earlier send of the same payload
  std::map<std::string, std::vector<std::pair<TimePoint, bool>>> wire;
  for (std::size_t i = 0; i < tr.events.size(); i++) {
    const TraceEvent& e = tr.events[i];
    if (e.type != EventType::Send && e.type != EventType::Deliver) continue;
    ProcId from = e.type == EventType::Send ? e.proc : e.peer;
    ProcId to = e.type == EventType::Send ? e.peer : e.proc;
    std::string key = std::to_string(from) + ">" + std::to_string(to) + ":" +
                      to_json(*e.msg).dump();
    wire[key].emplace_back(e.t, e.type == EventType::Deliver);
  }
  for (const auto& [key, entries] : wire) {
    std::int64_t outstanding = 0;
    bool ok = true;
    for (const auto& [t, is_deliver] : entries) {
      outstanding += is_deliver ? -1 : 1;
      if (outstanding < 0) ok = false;
    }
    require(rep, "delivery", ok,
            "delivery without a matching earlier send on " + key);
  }

  for (std::size_t i = 0; i < tr.events.size(); i++) {
    const TraceEvent& e = tr.events[i];
    auto it = ix.crashed_at.find(e.proc);
    bool after_crash = it != ix.crashed_at.end() && i > it->second;
    require(rep, "crash_silence", !after_crash || e.type == EventType::Crash,
            "activity by crashed process " + std::to_string(e.proc),
            after_crash ? std::vector{it->second, i} : std::vector<std::size_t>{});
  }
  return rep;
}

}  // namespace

void CheckReport::merge(CheckReport other) {
  for (auto& [k, v] : other.checked) checked[k] += v;
  for (auto& issue : other.issues) issues.push_back(std::move(issue));
}

Json CheckReport::to_json() const {
  Json j;
  j["ok"] = ok();
  Json counts = Json::object();
  for (const auto& [k, v] : checked) counts[k] = v;
  j["checked"] = counts;
  Json arr = Json::array();
  for (const CheckIssue& is : issues) {
    Json e;
    e["check"] = is.check;
    e["detail"] = is.detail;
    e["events"] = is.events;
    arr.push_back(e);
  }
  j["issues"] = arr;
  return j;
}

CheckReport check_agreement(const Trace& tr) { return agreement(build_index(tr)); }

CheckReport check_conflict_coverage(const Trace& tr) {
  return conflict_coverage(build_index(tr));
}

CheckReport check_smr_spec(const Trace& tr) { return smr_spec(build_index(tr)); }

CheckReport check_fast_path_recoverability(const Trace& tr) {
  return recoverability(build_index(tr));
}

CheckReport check_protocol_rules(const Trace& tr) {
  return protocol_rules(build_index(tr));
}

CheckReport check_trace(const Trace& tr) {
  Index ix = build_index(tr);
  CheckReport rep = agreement(ix);
  rep.merge(conflict_coverage(ix));
  rep.merge(smr_spec(ix));
  rep.merge(recoverability(ix));
  rep.merge(protocol_rules(ix));
  return rep;
}

}  // namespace atlas
