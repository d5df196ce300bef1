#include "atlas/simulator.hpp"

#include <queue>
#include <set>
#include <tuple>
#include <variant>

#include "atlas/executor.hpp"
#include "atlas/process.hpp"
#include "atlas/rng.hpp"
#include "atlas/smr.hpp"

namespace atlas {
namespace {

struct DeliveryEv {
  ProcId from{0};
  ProcId to{0};
  Message msg;
};
struct InvokeEv {
  ProcId proc{0};
  std::uint32_t client{0};
};
struct RecoveryCheckEv {
  ProcId proc{0};
  Dot dot;
  TimePoint interval{0};  // re-check spacing if this attempt does not stick
};
struct CrashEv {
  ProcId proc{0};
};

using Payload = std::variant<DeliveryEv, InvokeEv, RecoveryCheckEv, CrashEv>;

// Ties at one instant resolve by schedule order, which makes the run a
// function of the config alone.
struct Ev {
  TimePoint t{0};
  std::uint64_t seq{0};
  Payload payload;
};
struct Later {
  bool operator()(const Ev& a, const Ev& b) const {
    return std::tie(a.t, a.seq) > std::tie(b.t, b.seq);
  }
};

struct ClientState {
  std::uint32_t sent{0};
  bool waiting{false};
  Command inflight;
  KvReplica::Handle handle;
};

class Sim {
 public:
  explicit Sim(const SimConfig& cfg)
      : cfg_(cfg), lat_(cfg.resolved_matrix()), rng_(cfg.seed) {
    const ProcId n = cfg_.n;
    QuorumSystem quorums(n, cfg_.f, lat_);
    alive_.assign(n + 1, true);
    execs_.resize(n + 1);
    uids_.assign(n + 1, 0);
    clients_.resize(n + 1);
    procs_.reserve(n);
    replicas_.reserve(n);
    for (ProcId p = 1; p <= n; p++) {
      procs_.emplace_back(p, n, cfg_.f, quorums, cfg_.flags);
      replicas_.emplace_back(p, [this, p](const Command& c) {
        submit_out_ = proc(p).submit(c);
      });
      clients_[p].resize(cfg_.workload.clients_per_process);
    }
    for (const CrashSpec& c : cfg_.crashes)
      schedule(c.at, CrashEv{c.proc});
    for (ProcId p = 1; p <= n; p++)
      for (std::uint32_t k = 0; k < cfg_.workload.clients_per_process; k++)
        if (cfg_.workload.commands_per_client > 0)
          schedule(0, InvokeEv{p, k});
  }

  RunResult run() {
    RunResult res;
    while (!queue_.empty()) {
      Ev ev = queue_.top();
      queue_.pop();
      if (ev.t > cfg_.horizon) {
        res.horizon_reached = true;
        break;
      }
      now_ = ev.t;
      std::visit([&](const auto& p) { handle(p); }, ev.payload);
    }
    res.complete = !res.horizon_reached && workload_done();
    res.trace.config = cfg_;
    res.trace.events = std::move(events_);
    return res;
  }

 private:
  ProcessState& proc(ProcId p) { return procs_[p - 1]; }
  KvReplica& replica(ProcId p) { return replicas_[p - 1]; }

  void schedule(TimePoint t, Payload p) {
    queue_.push(Ev{t, next_seq_++, std::move(p)});
  }

  std::uint64_t jittered(std::uint64_t spread) {
    return spread ? rng_.below(spread + 1) : 0;
  }

  void handle(const CrashEv& ev) {
    if (!alive_[ev.proc]) return;
    alive_[ev.proc] = false;
    TraceEvent e;
    e.t = now_;
    e.type = EventType::Crash;
    e.proc = ev.proc;
    events_.push_back(std::move(e));
  }

  void handle(const DeliveryEv& ev) {
    if (!alive_[ev.to]) return;
    TraceEvent e;
    e.t = now_;
    e.type = EventType::Deliver;
    e.proc = ev.to;
    e.peer = ev.from;
    e.msg = ev.msg;
    events_.push_back(std::move(e));
    dispatch(ev.to, proc(ev.to).deliver(ev.from, ev.msg));
  }

  void handle(const InvokeEv& ev) {
    if (!alive_[ev.proc]) return;
    ClientState& cs = clients_[ev.proc][ev.client];
    if (cs.sent >= cfg_.workload.commands_per_client) return;
    cs.sent++;
    cs.inflight = make_command(ev.proc, ev.client);
    cs.waiting = true;
    TraceEvent e;
    e.t = now_;
    e.type = EventType::Invoke;
    e.proc = ev.proc;
    e.cmd = cs.inflight;
    events_.push_back(std::move(e));
    cs.handle = replica(ev.proc).invoke(cs.inflight);
    dispatch(ev.proc, std::move(submit_out_));
  }

  void handle(const RecoveryCheckEv& ev) {
    if (!alive_[ev.proc]) return;
    Phase ph = proc(ev.proc).phase(ev.dot);
    if (ph == Phase::Committed || ph == Phase::Executed) {
      watched_.erase({ev.proc, ev.dot});
      return;
    }
    dispatch(ev.proc, proc(ev.proc).start_recovery(ev.dot));
    TimePoint next = std::min(ev.interval * 2, cfg_.recovery_timeout << 10);
    schedule(now_ + ev.interval + jittered(cfg_.recovery_timeout / 4),
             RecoveryCheckEv{ev.proc, ev.dot, next});
  }

  void dispatch(ProcId p, HandlerOutput&& out) {
    for (const CollectDecision& cd : out.collect_decisions)
      collect_info_[cd.dot] = cd;
    for (const CommitDecision& cd : out.commit_decisions) {
      TraceEvent e;
      e.t = now_;
      e.type = EventType::Commit;
      e.proc = p;
      e.dot = cd.dot;
      e.cmd = cd.cmd;
      e.deps = cd.deps;
      e.ballot = cd.ballot;
      if (cd.ballot == 0 || cd.ballot <= cfg_.n) {
        e.path = cd.ballot == 0 ? CommitPath::Fast : CommitPath::Slow;
        auto it = collect_info_.find(cd.dot);
        if (it != collect_info_.end()) {
          e.nfr = it->second.nfr_read;
          e.ack_deps = it->second.ack_deps;
          e.dep_union = it->second.dep_union;
          e.matching = it->second.matching;
        }
      } else {
        e.path = CommitPath::Recovered;
      }
      events_.push_back(std::move(e));
    }
    for (const RecoveryNote& rn : out.recoveries) {
      TraceEvent e;
      e.t = now_;
      e.type = EventType::Recovery;
      e.proc = p;
      e.dot = rn.dot;
      e.ballot = rn.ballot;
      events_.push_back(std::move(e));
    }
    for (const Envelope& env : out.outbound) {
      if (env.to) {
        send(p, *env.to, env.msg);
      } else {
        for (ProcId q = 1; q <= cfg_.n; q++)
          if (q != p) send(p, q, env.msg);
      }
    }
    for (const LocalCommit& lc : out.committed)
      execs_[p].add_committed(lc.dot, lc.cmd, lc.deps);
    drain_executor(p);
    for (const LocalCommit& lc : out.committed)
      for (const Dot& d : lc.deps) watch(p, d);
    for (const Dot& d : out.first_seen) watch(p, d);
    check_responses(p);
  }

  void send(ProcId from, ProcId to, const Message& m) {
    TraceEvent e;
    e.t = now_;
    e.type = EventType::Send;
    e.proc = from;
    e.peer = to;
    e.msg = m;
    events_.push_back(std::move(e));
    TimePoint at = now_ + lat_[from - 1][to - 1] + jittered(cfg_.latency.jitter);
    schedule(at, DeliveryEv{from, to, m});
  }

  void drain_executor(ProcId p) {
    for (const auto& batch : execs_[p].try_execute()) {
      for (const LogEntry& le : batch) {
        proc(p).mark_executed(le.dot);
        TraceEvent e;
        e.t = now_;
        e.type = EventType::Execute;
        e.proc = p;
        e.dot = le.dot;
        e.batch = le.batch;
        events_.push_back(std::move(e));
        if (!le.cmd.is_noop()) replica(p).on_deliver(le.cmd);
      }
    }
  }

  // Any dot this process knows about, or depends on for execution, gets a
  // staggered takeover timer in case its coordinator went quiet.
  void watch(ProcId p, Dot d) {
    if (!alive_[p]) return;
    Phase ph = proc(p).phase(d);
    if (ph == Phase::Committed || ph == Phase::Executed) return;
    if (!watched_.insert({p, d}).second) return;
    std::uint32_t rank = 0;
    for (ProcId q = 1; q < p; q++)
      if (alive_[q]) rank++;
    TimePoint delay = cfg_.recovery_timeout * (1 + rank) +
                      jittered(cfg_.recovery_timeout / 4);
    schedule(now_ + delay, RecoveryCheckEv{p, d, cfg_.recovery_timeout});
  }

  void check_responses(ProcId p) {
    for (std::uint32_t k = 0; k < clients_[p].size(); k++) {
      ClientState& cs = clients_[p][k];
      if (!cs.waiting || !cs.handle.resolved()) continue;
      cs.waiting = false;
      TraceEvent e;
      e.t = now_;
      e.type = EventType::Response;
      e.proc = p;
      e.cmd = cs.inflight;
      e.resp = cs.handle.response();
      events_.push_back(std::move(e));
      if (cs.sent < cfg_.workload.commands_per_client)
        schedule(now_, InvokeEv{p, k});
    }
  }

  Command make_command(ProcId p, std::uint32_t client) {
    const WorkloadSpec& w = cfg_.workload;
    bool hot = rng_.unit() < w.conflict_rate;
    bool read = rng_.unit() < w.read_ratio;
    Key key = hot ? Key("0")
                  : Key("k" + std::to_string(p) + "-" + std::to_string(client));
    std::uint64_t uid = ++uids_[p];
    if (read) return Command::get(std::move(key), p, uid);
    // unique payloads so a read pins down exactly which write it observed
    Value v = "v" + std::to_string(p) + "." + std::to_string(uid);
    if (v.size() < w.payload_bytes) v.resize(w.payload_bytes, 'x');
    return Command::put(std::move(key), std::move(v), p, uid);
  }

  bool workload_done() const {
    for (ProcId p = 1; p <= cfg_.n; p++) {
      if (!alive_[p]) continue;
      if (execs_[p].pending() > 0) return false;
      for (const ClientState& cs : clients_[p])
        if (cs.waiting || cs.sent < cfg_.workload.commands_per_client)
          return false;
    }
    return true;
  }

  SimConfig cfg_;
  std::vector<std::vector<std::uint64_t>> lat_;
  Rng rng_;
  TimePoint now_{0};
  std::uint64_t next_seq_{0};
  std::priority_queue<Ev, std::vector<Ev>, Later> queue_;

  std::vector<ProcessState> procs_;
  std::vector<KvReplica> replicas_;
  std::vector<ExecGraph> execs_;   // 1-based
  std::vector<bool> alive_;        // 1-based
  std::vector<std::uint64_t> uids_;
  std::vector<std::vector<ClientState>> clients_;
  std::set<std::pair<ProcId, Dot>> watched_;
  std::map<Dot, CollectDecision> collect_info_;
  std::vector<TraceEvent> events_;
  HandlerOutput submit_out_;
};

}  // namespace

RunResult run_simulation(const SimConfig& cfg) {
  auto problems = cfg.validate();
  if (!problems.empty())
    throw std::invalid_argument("bad config: " + problems.front());
  return Sim(cfg).run();
}

}  // namespace atlas
