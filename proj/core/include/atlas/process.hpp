#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "atlas/messages.hpp"
#include "atlas/types.hpp"

namespace atlas {

// Quorums a coordinator talks to, derived once from the latency matrix:
// fast(i)  = i plus the n/2 + f - 1 others nearest to i,
// slow(i)  = i plus the f nearest,
// read(i)  = i plus the n/2 nearest (plain majority, for optimized reads).
// Ties go to the smaller process id.
class QuorumSystem {
 public:
  QuorumSystem() = default;
  QuorumSystem(ProcId n, ProcId f,
               const std::vector<std::vector<std::uint64_t>>& latency);
  static QuorumSystem uniform(ProcId n, ProcId f);

  const ProcSet& fast(ProcId i) const { return fast_.at(i - 1); }
  const ProcSet& slow(ProcId i) const { return slow_.at(i - 1); }
  const ProcSet& read(ProcId i) const { return read_.at(i - 1); }

 private:
  std::vector<ProcSet> fast_, slow_, read_;
};

struct ProtocolFlags {
  bool slow_path_pruning{false};
  bool nfr_reads{false};
  ConflictMode conflict_mode{ConflictMode::Coarse};
};

// Per-dot bookkeeping. Defaults describe a dot this process knows nothing
// about: Noop command, Start phase, no ballot.
struct CommandInfo {
  Command cmd{};
  Phase phase{Phase::Start};
  DotSet deps;
  ProcSet quorum;  // fast quorum, set once by the MCollect and never changed
  Ballot bal{0};
  Ballot abal{0};  // last accepted consensus ballot, <= bal
};

// nullopt destination = every other process (self copies are applied
// synchronously inside the handler call, before outputs are released).
struct Envelope {
  std::optional<ProcId> to;
  Message msg;
};

struct LocalCommit {
  Dot dot;
  Command cmd;
  DotSet deps;
};

// The collect quorum completed at the coordinator and a path was chosen.
struct CollectDecision {
  Dot dot;
  bool fast{};
  bool nfr_read{};   // committed straight off a plain-majority read quorum
  DotSet dep_union;  // union over the quorum's replies
  DotSet proposal;   // what was committed (fast) or proposed to consensus
  std::map<ProcId, DotSet> ack_deps;
  bool matching{};   // every quorum member reported identical deps
};

// This process originated an MCommit broadcast. Ballot 0 = fast path,
// 1..n = the coordinator's slow path, above n = recovery consensus.
struct CommitDecision {
  Dot dot;
  Command cmd;
  DotSet deps;
  Ballot ballot{0};
};

struct RecoveryNote {
  Dot dot;
  Ballot ballot{0};
};

struct HandlerOutput {
  std::vector<Envelope> outbound;
  std::vector<LocalCommit> committed;  // newly committed at this process
  std::vector<CollectDecision> collect_decisions;
  std::vector<CommitDecision> commit_decisions;
  std::vector<RecoveryNote> recoveries;
  std::vector<Dot> first_seen;  // dots whose bookkeeping entry was just made
};

// One replica's view of the protocol. Handlers are deterministic: the same
// call sequence produces the same outputs, byte for byte. Messages whose
// guard is not yet satisfied are parked and retried after every state change
// for their dot; stale-ballot MConsensus/MRecover are dropped outright.
class ProcessState {
 public:
  ProcessState(ProcId id, ProcId n, ProcId f, QuorumSystem quorums,
               ProtocolFlags flags = {});

  // Starts the commit protocol for a client command. Throws on Noop.
  HandlerOutput submit(const Command& c);

  HandlerOutput deliver(ProcId from, const Message& m);

  // Takes over coordination of a stuck dot with a fresh ballot; no-op output
  // if the dot is already committed or executed here.
  HandlerOutput start_recovery(Dot dot);

  // The executor ran this dot; pre: locally committed.
  void mark_executed(Dot dot);

  ProcId id() const { return id_; }
  ProcId n() const { return n_; }
  ProcId f() const { return f_; }
  const ProtocolFlags& flags() const { return flags_; }

  Phase phase(Dot d) const;  // Start for unknown dots
  const CommandInfo* info(Dot d) const;

  // Dots past Start whose command conflicts with c; with optimized reads on,
  // reads never appear in anyone's dependencies.
  DotSet conflicts(const Command& c) const;

 private:
  struct CollectAgg {
    std::map<ProcId, DotSet> acks;
    bool fired{false};
  };
  struct ConsensusAgg {
    ProcSet acks;
    bool fired{false};
  };
  struct RecoverAgg {
    std::map<ProcId, MRecoverAck> acks;
    bool fired{false};
  };

  CommandInfo& ensure(Dot d, HandlerOutput& out);
  CommandInfo* find(Dot d);
  void set_phase(CommandInfo& ci, Phase to);

  void run(HandlerOutput& out);
  void enqueue(ProcId from, Message m);
  void send(HandlerOutput& out, ProcId to, Message m);
  void send_quorum(HandlerOutput& out, const ProcSet& q, const Message& m);
  void broadcast(HandlerOutput& out, const Message& m);

  void on_mcollect(ProcId from, const MCollect& m, HandlerOutput& out);
  void on_mcollectack(ProcId from, const MCollectAck& m, HandlerOutput& out);
  void try_fire_collect(Dot dot, HandlerOutput& out);
  void on_mconsensus(ProcId from, const MConsensus& m, HandlerOutput& out);
  void on_mconsensusack(ProcId from, const MConsensusAck& m, HandlerOutput& out);
  void try_fire_consensus(Dot dot, Ballot b, HandlerOutput& out);
  void on_mcommit(ProcId from, const MCommit& m, HandlerOutput& out);
  void on_mrecover(ProcId from, const MRecover& m, HandlerOutput& out);
  void on_mrecoverack(ProcId from, const MRecoverAck& m, HandlerOutput& out);
  void try_fire_recover(Dot dot, Ballot b, HandlerOutput& out);
  void do_commit(Dot dot, const Command& cmd, const DotSet& deps, Ballot b,
                 HandlerOutput& out);
  void retry_parked(Dot dot, HandlerOutput& out);

  ProcId id_{1};
  ProcId n_{1};
  ProcId f_{1};
  QuorumSystem quorums_;
  ProtocolFlags flags_;
  SeqNo next_seq_{1};

  std::map<Dot, CommandInfo> info_;
  std::map<Dot, CollectAgg> collect_acks_;
  std::map<std::pair<Dot, Ballot>, ConsensusAgg> consensus_acks_;
  std::map<std::pair<Dot, Ballot>, RecoverAgg> recover_acks_;
  std::map<Dot, std::vector<std::pair<ProcId, Message>>> parked_;
  std::vector<std::pair<ProcId, Message>> self_queue_;
};

}  // namespace atlas
