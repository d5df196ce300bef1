#include "atlas/process.hpp"

#include <algorithm>

namespace atlas {

QuorumSystem::QuorumSystem(ProcId n, ProcId f,
                           const std::vector<std::vector<std::uint64_t>>& latency) {
  fast_.resize(n);
  slow_.resize(n);
  read_.resize(n);
  const std::size_t fast_extra = n / 2 + f - 1;
  const std::size_t slow_extra = f;
  const std::size_t read_extra = n / 2;
  for (ProcId i = 1; i <= n; i++) {
    std::vector<std::pair<std::uint64_t, ProcId>> others;
    for (ProcId j = 1; j <= n; j++)
      if (j != i) others.emplace_back(latency[i - 1][j - 1], j);
    std::sort(others.begin(), others.end());
    auto take = [&](std::size_t extra) {
      ProcSet s{i};
      for (std::size_t k = 0; k < extra && k < others.size(); k++)
        s.insert(others[k].second);
      return s;
    };
    fast_[i - 1] = take(fast_extra);
    slow_[i - 1] = take(slow_extra);
    read_[i - 1] = take(read_extra);
  }
}

QuorumSystem QuorumSystem::uniform(ProcId n, ProcId f) {
  std::vector<std::vector<std::uint64_t>> lat(n, std::vector<std::uint64_t>(n, 1));
  for (ProcId i = 0; i < n; i++) lat[i][i] = 0;
  return QuorumSystem(n, f, lat);
}

ProcessState::ProcessState(ProcId id, ProcId n, ProcId f, QuorumSystem quorums,
                           ProtocolFlags flags)
    : id_(id), n_(n), f_(f), quorums_(std::move(quorums)), flags_(flags) {}

Phase ProcessState::phase(Dot d) const {
  auto it = info_.find(d);
  return it == info_.end() ? Phase::Start : it->second.phase;
}

const CommandInfo* ProcessState::info(Dot d) const {
  auto it = info_.find(d);
  return it == info_.end() ? nullptr : &it->second;
}

DotSet ProcessState::conflicts(const Command& c) const {
  DotSet out;
  for (const auto& [d, ci] : info_) {
    if (ci.phase == Phase::Start) continue;
    if (flags_.nfr_reads && ci.cmd.is_read()) continue;
    if (conflict(c, ci.cmd, flags_.conflict_mode)) out.insert(d);
  }
  return out;
}

CommandInfo& ProcessState::ensure(Dot d, HandlerOutput& out) {
  auto [it, created] = info_.try_emplace(d);
  if (created) out.first_seen.push_back(d);
  return it->second;
}

CommandInfo* ProcessState::find(Dot d) {
  auto it = info_.find(d);
  return it == info_.end() ? nullptr : &it->second;
}

void ProcessState::set_phase(CommandInfo& ci, Phase to) {
  if (!phase_ok(ci.phase, to))
    throw std::logic_error(std::string("illegal phase move: ") +
                           to_string(ci.phase) + " -> " + to_string(to));
  ci.phase = to;
}

void ProcessState::enqueue(ProcId from, Message m) {
  self_queue_.emplace_back(from, std::move(m));
}

void ProcessState::send(HandlerOutput& out, ProcId to, Message m) {
  if (to == id_)
    enqueue(id_, std::move(m));
  else
    out.outbound.push_back({to, std::move(m)});
}

void ProcessState::send_quorum(HandlerOutput& out, const ProcSet& q,
                               const Message& m) {
  for (ProcId j : q) send(out, j, m);
}

void ProcessState::broadcast(HandlerOutput& out, const Message& m) {
  enqueue(id_, m);
  out.outbound.push_back({std::nullopt, m});
}

void ProcessState::run(HandlerOutput& out) {
  while (!self_queue_.empty()) {
    auto [from, m] = std::move(self_queue_.front());
    self_queue_.erase(self_queue_.begin());
    std::visit(
        [&](const auto& msg) {
          using T = std::decay_t<decltype(msg)>;
          if constexpr (std::is_same_v<T, MCollect>) on_mcollect(from, msg, out);
          else if constexpr (std::is_same_v<T, MCollectAck>) on_mcollectack(from, msg, out);
          else if constexpr (std::is_same_v<T, MConsensus>) on_mconsensus(from, msg, out);
          else if constexpr (std::is_same_v<T, MConsensusAck>) on_mconsensusack(from, msg, out);
          else if constexpr (std::is_same_v<T, MCommit>) on_mcommit(from, msg, out);
          else if constexpr (std::is_same_v<T, MRecover>) on_mrecover(from, msg, out);
          else if constexpr (std::is_same_v<T, MRecoverAck>) on_mrecoverack(from, msg, out);
        },
        m);
  }
}

HandlerOutput ProcessState::submit(const Command& c) {
  if (c.is_noop()) throw std::invalid_argument("cannot submit a noop");
  HandlerOutput out;
  Dot dot{id_, next_seq_++};
  DotSet past = conflicts(c);
  bool majority_read = flags_.nfr_reads && c.is_read();
  const ProcSet& q = majority_read ? quorums_.read(id_) : quorums_.fast(id_);
  send_quorum(out, q, MCollect{dot, c, past, q});
  run(out);
  return out;
}

HandlerOutput ProcessState::deliver(ProcId from, const Message& m) {
  HandlerOutput out;
  enqueue(from, m);
  run(out);
  return out;
}

HandlerOutput ProcessState::start_recovery(Dot dot) {
  HandlerOutput out;
  CommandInfo& ci = ensure(dot, out);
  if (ci.phase == Phase::Committed || ci.phase == Phase::Executed) return out;
  Ballot b = next_ballot(id_, ci.bal, n_);
  out.recoveries.push_back({dot, b});
  broadcast(out, MRecover{dot, ci.cmd, b});
  run(out);
  return out;
}

void ProcessState::mark_executed(Dot dot) {
  CommandInfo* ci = find(dot);
  if (!ci || ci->phase != Phase::Committed)
    throw std::logic_error("mark_executed on a dot that is not committed");
  set_phase(*ci, Phase::Executed);
}

void ProcessState::on_mcollect(ProcId from, const MCollect& m, HandlerOutput& out) {
  CommandInfo& ci = ensure(m.dot, out);
  if (ci.phase != Phase::Start || ci.bal != 0) {
    // too late: a commit, a recovery, or an accepted consensus proposal got
    // here first. The ballot check matters: accepting a consensus proposal
    // leaves the phase at Start, and letting the collect overwrite cmd and
    // deps there would corrupt what a later recovery reads back as this
    // ballot's accepted value.
    parked_[m.dot].emplace_back(from, m);
    return;
  }
  DotSet deps = conflicts(m.cmd);  // the dot itself is still in Start, excluded
  deps.insert(m.past.begin(), m.past.end());
  ci.cmd = m.cmd;
  ci.deps = std::move(deps);
  ci.quorum = m.quorum;
  set_phase(ci, Phase::Collect);
  send(out, from, MCollectAck{m.dot, ci.deps});
}

void ProcessState::on_mcollectack(ProcId from, const MCollectAck& m,
                                  HandlerOutput& out) {
  CollectAgg& agg = collect_acks_[m.dot];
  if (agg.fired) return;
  agg.acks.try_emplace(from, m.deps);
  try_fire_collect(m.dot, out);
}

void ProcessState::try_fire_collect(Dot dot, HandlerOutput& out) {
  CommandInfo* ci = find(dot);
  if (!ci || ci->phase != Phase::Collect || ci->quorum.empty()) return;
  CollectAgg& agg = collect_acks_[dot];
  const ProcSet& q = ci->quorum;
  for (ProcId j : q)
    if (!agg.acks.count(j)) return;
  agg.fired = true;

  DotSet dep_union;
  std::map<ProcId, DotSet> ack_deps;
  bool matching = true;
  for (ProcId j : q) {
    const DotSet& dj = agg.acks.at(j);
    ack_deps[j] = dj;
    dep_union.insert(dj.begin(), dj.end());
    if (dj != agg.acks.at(*q.begin())) matching = false;
  }

  if (flags_.nfr_reads && ci->cmd.is_read()) {
    // plain-majority read: commit straight away with the union, no condition
    out.collect_decisions.push_back(
        {dot, true, true, dep_union, dep_union, std::move(ack_deps), matching});
    do_commit(dot, ci->cmd, dep_union, 0, out);
    return;
  }

  // fast iff every dependency in the union was reported by at least f members
  DotSet frequent;
  bool fast = true;
  for (const Dot& d : dep_union) {
    ProcId count = 0;
    for (ProcId j : q) count += agg.acks.at(j).count(d) ? 1 : 0;
    if (count >= f_)
      frequent.insert(d);
    else
      fast = false;
  }

  if (fast) {
    out.collect_decisions.push_back(
        {dot, true, false, dep_union, dep_union, std::move(ack_deps), matching});
    do_commit(dot, ci->cmd, dep_union, 0, out);
    return;
  }

  DotSet proposal = flags_.slow_path_pruning ? frequent : dep_union;
  out.collect_decisions.push_back(
      {dot, false, false, dep_union, proposal, std::move(ack_deps), matching});
  // consensus at the initial ballot; ownership lets the coordinator skip
  // Paxos phase 1
  send_quorum(out, quorums_.slow(id_),
              MConsensus{dot, ci->cmd, std::move(proposal), Ballot(id_)});
}

void ProcessState::on_mconsensus(ProcId from, const MConsensus& m,
                                 HandlerOutput& out) {
  CommandInfo& ci = ensure(m.dot, out);
  if (m.ballot < ci.bal) return;  // stale proposer, drop
  if (ci.phase != Phase::Committed && ci.phase != Phase::Executed) {
    // same-ballot retransmits land here too and re-accept idempotently
    ci.cmd = m.cmd;
    ci.deps = m.deps;
    ci.bal = m.ballot;
    ci.abal = m.ballot;
    retry_parked(m.dot, out);
  }
  send(out, from, MConsensusAck{m.dot, m.ballot});
}

void ProcessState::on_mconsensusack(ProcId from, const MConsensusAck& m,
                                    HandlerOutput& out) {
  ConsensusAgg& agg = consensus_acks_[{m.dot, m.ballot}];
  if (agg.fired) return;
  agg.acks.insert(from);
  try_fire_consensus(m.dot, m.ballot, out);
}

void ProcessState::try_fire_consensus(Dot dot, Ballot b, HandlerOutput& out) {
  CommandInfo* ci = find(dot);
  if (!ci || ci->bal != b) return;
  ConsensusAgg& agg = consensus_acks_[{dot, b}];
  if (agg.acks.size() < std::size_t(f_) + 1) return;
  agg.fired = true;
  do_commit(dot, ci->cmd, ci->deps, b, out);
}

void ProcessState::on_mcommit(ProcId, const MCommit& m, HandlerOutput& out) {
  CommandInfo& ci = ensure(m.dot, out);
  if (ci.phase == Phase::Committed || ci.phase == Phase::Executed) return;
  ci.cmd = m.cmd;
  ci.deps = m.deps;
  set_phase(ci, Phase::Committed);
  out.committed.push_back({m.dot, m.cmd, m.deps});
  retry_parked(m.dot, out);
}

void ProcessState::on_mrecover(ProcId from, const MRecover& m, HandlerOutput& out) {
  CommandInfo& ci = ensure(m.dot, out);
  if (ci.phase == Phase::Committed || ci.phase == Phase::Executed) {
    send(out, from, MCommit{m.dot, ci.cmd, ci.deps});
    return;
  }
  if (ci.bal >= m.ballot) return;  // stale recoverer retries higher later
  if (ci.bal == 0 && ci.phase == Phase::Start) {
    // first contact with this dot: adopt the recoverer's command and pin the
    // dependencies visible here
    ci.deps = conflicts(m.cmd);
    ci.cmd = m.cmd;
  }
  ci.bal = m.ballot;
  set_phase(ci, Phase::Recovering);
  send(out, from,
       MRecoverAck{m.dot, ci.cmd, ci.deps, ci.quorum, ci.abal, m.ballot});
}

void ProcessState::on_mrecoverack(ProcId from, const MRecoverAck& m,
                                  HandlerOutput& out) {
  RecoverAgg& agg = recover_acks_[{m.dot, m.ballot}];
  if (agg.fired) return;
  agg.acks.try_emplace(from, m);
  try_fire_recover(m.dot, m.ballot, out);
}

void ProcessState::try_fire_recover(Dot dot, Ballot b, HandlerOutput& out) {
  CommandInfo* ci = find(dot);
  if (!ci || ci->bal != b) return;
  RecoverAgg& agg = recover_acks_[{dot, b}];
  if (agg.acks.size() < std::size_t(n_) - f_) return;
  agg.fired = true;

  // someone accepted a consensus proposal: the highest ballot wins
  ProcId max_k = 0;
  Ballot max_ab = 0;
  for (const auto& [j, ack] : agg.acks)
    if (ack.accepted > max_ab) {
      max_ab = ack.accepted;
      max_k = j;
    }
  if (max_ab > 0) {
    const MRecoverAck& ack = agg.acks.at(max_k);
    broadcast(out, MConsensus{dot, ack.cmd, ack.deps, b});
    return;
  }

  // someone saw the original collect: rebuild the fast-path proposal from
  // the replies of initial-quorum members
  for (const auto& [k, ack] : agg.acks) {
    if (ack.initial_quorum.empty()) continue;
    bool coord_replied = agg.acks.count(dot.proc) > 0;
    DotSet u;
    for (const auto& [j, aj] : agg.acks)
      if (coord_replied || ack.initial_quorum.count(j))
        u.insert(aj.deps.begin(), aj.deps.end());
    broadcast(out, MConsensus{dot, ack.cmd, std::move(u), b});
    return;
  }

  // nobody saw it: erase the dot
  broadcast(out, MConsensus{dot, Command::noop(), {}, b});
}

void ProcessState::do_commit(Dot dot, const Command& cmd, const DotSet& deps,
                             Ballot b, HandlerOutput& out) {
  out.commit_decisions.push_back({dot, cmd, deps, b});
  broadcast(out, MCommit{dot, cmd, deps});
}

void ProcessState::retry_parked(Dot dot, HandlerOutput& out) {
  auto it = parked_.find(dot);
  if (it == parked_.end() || it->second.empty()) return;
  auto waiting = std::move(it->second);
  parked_.erase(it);
  // guards are re-checked by the handlers; still-blocked messages re-park
  for (auto& [from, m] : waiting) enqueue(from, std::move(m));
}

}  // namespace atlas
