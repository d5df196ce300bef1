#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>

namespace atlas {

using ProcId = std::uint32_t;   // 1..n
using SeqNo = std::uint64_t;    // per-coordinator sequence, starts at 1
using Ballot = std::uint64_t;   // 0 = none yet
using TimePoint = std::uint64_t;  // virtual milliseconds

// Command instance identifier: coordinator id plus its local sequence number.
struct Dot {
  ProcId proc{0};
  SeqNo seq{0};

  friend bool operator==(const Dot&, const Dot&) = default;
  // Total order used to break ties inside an execution batch and to keep
  // container iteration deterministic: lower seq first, then lower proc.
  friend bool operator<(const Dot& a, const Dot& b) {
    return std::tie(a.seq, a.proc) < std::tie(b.seq, b.proc);
  }
};

using DotSet = std::set<Dot>;
using ProcSet = std::set<ProcId>;

std::string to_string(const Dot& d);                 // "p3-17"
std::optional<Dot> parse_dot(std::string_view text);

using Key = std::string;
using Value = std::string;

enum class Op : std::uint8_t { Get, Put };

// A client command over the key-value store. Noop is the filler recovery may
// decide for a lost command: it conflicts with everything and is never
// handed to the application.
struct Command {
  enum class Kind : std::uint8_t { Noop, App };

  Kind kind{Kind::Noop};
  Op op{Op::Get};
  Key key;
  Value value;          // Put payload
  ProcId caller{0};
  std::uint64_t uid{0};  // (caller, uid) makes invocations unique

  static Command noop() { return Command{}; }
  static Command get(Key k, ProcId caller, std::uint64_t uid) {
    return Command{Kind::App, Op::Get, std::move(k), {}, caller, uid};
  }
  static Command put(Key k, Value v, ProcId caller, std::uint64_t uid) {
    return Command{Kind::App, Op::Put, std::move(k), std::move(v), caller, uid};
  }

  bool is_noop() const { return kind == Kind::Noop; }
  // Read* membership: exactly the single-key reads.
  bool is_read() const { return kind == Kind::App && op == Op::Get; }

  friend bool operator==(const Command&, const Command&) = default;
  friend bool operator<(const Command& a, const Command& b) {
    return std::tie(a.kind, a.op, a.key, a.value, a.caller, a.uid) <
           std::tie(b.kind, b.op, b.key, b.value, b.caller, b.uid);
  }
};

enum class ConflictMode : std::uint8_t { Coarse, ReadAware };

// Coarse: commands conflict iff they touch the same key. ReadAware: same key
// and at least one of them writes. Noop conflicts with everything.
bool conflict(const Command& a, const Command& b, ConflictMode mode);

// Owner lane of a ballot: ballots 1..n belong to the initial coordinators,
// i + k*n (k >= 1) to recoveries led by process i.
ProcId ballot_owner(Ballot b, ProcId n);

// A ballot owned by i above both `cur` and the reserved initial range:
// i + n * (cur/n + 1). Not always the smallest such ballot (owner n
// jumps an extra lane slot when cur is a multiple of n), but callers
// only need "higher and mine".
Ballot next_ballot(ProcId i, Ballot cur, ProcId n);

enum class Phase : std::uint8_t { Start, Collect, Recovering, Committed, Executed };

const char* to_string(Phase p);

// Legal phase moves; Recovering may re-enter itself at a higher ballot.
bool phase_ok(Phase from, Phase to);

}  // namespace atlas
