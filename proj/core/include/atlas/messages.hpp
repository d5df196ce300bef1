#pragma once

#include <variant>

#include "json.hpp"

#include "atlas/types.hpp"

namespace atlas {

// Insertion-ordered so serialized field order is stable.
using Json = nlohmann::ordered_json;

struct MCollect {
  Dot dot;
  Command cmd;
  DotSet past;     // coordinator's conflicts at submission
  ProcSet quorum;  // fast quorum picked by the coordinator
  friend bool operator==(const MCollect&, const MCollect&) = default;
};

struct MCollectAck {
  Dot dot;
  DotSet deps;
  friend bool operator==(const MCollectAck&, const MCollectAck&) = default;
};

struct MConsensus {
  Dot dot;
  Command cmd;
  DotSet deps;
  Ballot ballot{0};
  friend bool operator==(const MConsensus&, const MConsensus&) = default;
};

struct MConsensusAck {
  Dot dot;
  Ballot ballot{0};
  friend bool operator==(const MConsensusAck&, const MConsensusAck&) = default;
};

struct MCommit {
  Dot dot;
  Command cmd;
  DotSet deps;
  friend bool operator==(const MCommit&, const MCommit&) = default;
};

struct MRecover {
  Dot dot;
  Command cmd;  // recoverer's current knowledge, Noop if it never saw one
  Ballot ballot{0};
  friend bool operator==(const MRecover&, const MRecover&) = default;
};

struct MRecoverAck {
  Dot dot;
  Command cmd;
  DotSet deps;
  ProcSet initial_quorum;  // empty unless this process saw the MCollect
  Ballot accepted{0};      // last consensus ballot accepted, 0 for none
  Ballot ballot{0};
  friend bool operator==(const MRecoverAck&, const MRecoverAck&) = default;
};

using Message = std::variant<MCollect, MCollectAck, MConsensus, MConsensusAck,
                             MCommit, MRecover, MRecoverAck>;

const char* kind_name(const Message& m);

Json to_json(const Dot& d);
Json to_json(const DotSet& s);
Json to_json(const ProcSet& s);
Json to_json(const Command& c);
Json to_json(const Message& m);

Dot dot_from_json(const Json& j);
DotSet dotset_from_json(const Json& j);
ProcSet procset_from_json(const Json& j);
Command command_from_json(const Json& j);
Message message_from_json(const Json& j);

}  // namespace atlas
