#include "atlas/messages.hpp"

#include <stdexcept>

namespace atlas {

const char* kind_name(const Message& m) {
  switch (m.index()) {
    case 0: return "mcollect";
    case 1: return "mcollectack";
    case 2: return "mconsensus";
    case 3: return "mconsensusack";
    case 4: return "mcommit";
    case 5: return "mrecover";
    case 6: return "mrecoverack";
  }
  return "?";
}

Json to_json(const Dot& d) { return to_string(d); }

Json to_json(const DotSet& s) {
  Json a = Json::array();
  for (const Dot& d : s) a.push_back(to_string(d));
  return a;
}

Json to_json(const ProcSet& s) {
  Json a = Json::array();
  for (ProcId p : s) a.push_back(p);
  return a;
}

Json to_json(const Command& c) {
  Json j;
  if (c.is_noop()) {
    j["kind"] = "noop";
    return j;
  }
  j["kind"] = "app";
  j["op"] = c.op == Op::Get ? "get" : "put";
  j["key"] = c.key;
  if (c.op == Op::Put) j["value"] = c.value;
  j["caller"] = c.caller;
  j["uid"] = c.uid;
  return j;
}

Json to_json(const Message& m) {
  Json j;
  j["kind"] = kind_name(m);
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        j["dot"] = to_json(msg.dot);
        if constexpr (std::is_same_v<T, MCollect>) {
          j["cmd"] = to_json(msg.cmd);
          j["past"] = to_json(msg.past);
          j["quorum"] = to_json(msg.quorum);
        } else if constexpr (std::is_same_v<T, MCollectAck>) {
          j["deps"] = to_json(msg.deps);
        } else if constexpr (std::is_same_v<T, MConsensus>) {
          j["cmd"] = to_json(msg.cmd);
          j["deps"] = to_json(msg.deps);
          j["ballot"] = msg.ballot;
        } else if constexpr (std::is_same_v<T, MConsensusAck>) {
          j["ballot"] = msg.ballot;
        } else if constexpr (std::is_same_v<T, MCommit>) {
          j["cmd"] = to_json(msg.cmd);
          j["deps"] = to_json(msg.deps);
        } else if constexpr (std::is_same_v<T, MRecover>) {
          j["cmd"] = to_json(msg.cmd);
          j["ballot"] = msg.ballot;
        } else if constexpr (std::is_same_v<T, MRecoverAck>) {
          j["cmd"] = to_json(msg.cmd);
          j["deps"] = to_json(msg.deps);
          j["initial_quorum"] = to_json(msg.initial_quorum);
          j["accepted"] = msg.accepted;
          j["ballot"] = msg.ballot;
        }
      },
      m);
  return j;
}

Dot dot_from_json(const Json& j) {
  auto d = parse_dot(j.get<std::string>());
  if (!d) throw std::invalid_argument("bad dot: " + j.dump());
  return *d;
}

DotSet dotset_from_json(const Json& j) {
  DotSet s;
  for (const Json& e : j) s.insert(dot_from_json(e));
  return s;
}

ProcSet procset_from_json(const Json& j) {
  ProcSet s;
  for (const Json& e : j) s.insert(e.get<ProcId>());
  return s;
}

Command command_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "noop") return Command::noop();
  if (kind != "app") throw std::invalid_argument("bad command kind: " + kind);
  std::string op = j.at("op").get<std::string>();
  ProcId caller = j.at("caller").get<ProcId>();
  std::uint64_t uid = j.at("uid").get<std::uint64_t>();
  if (op == "get") return Command::get(j.at("key").get<std::string>(), caller, uid);
  if (op != "put") throw std::invalid_argument("bad command op: " + op);
  return Command::put(j.at("key").get<std::string>(),
                      j.at("value").get<std::string>(), caller, uid);
}

Message message_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  Dot dot = dot_from_json(j.at("dot"));
  if (kind == "mcollect")
    return MCollect{dot, command_from_json(j.at("cmd")),
                    dotset_from_json(j.at("past")),
                    procset_from_json(j.at("quorum"))};
  if (kind == "mcollectack")
    return MCollectAck{dot, dotset_from_json(j.at("deps"))};
  if (kind == "mconsensus")
    return MConsensus{dot, command_from_json(j.at("cmd")),
                      dotset_from_json(j.at("deps")),
                      j.at("ballot").get<Ballot>()};
  if (kind == "mconsensusack")
    return MConsensusAck{dot, j.at("ballot").get<Ballot>()};
  if (kind == "mcommit")
    return MCommit{dot, command_from_json(j.at("cmd")),
                   dotset_from_json(j.at("deps"))};
  if (kind == "mrecover")
    return MRecover{dot, command_from_json(j.at("cmd")),
                    j.at("ballot").get<Ballot>()};
  if (kind == "mrecoverack")
    return MRecoverAck{dot,
                       command_from_json(j.at("cmd")),
                       dotset_from_json(j.at("deps")),
                       procset_from_json(j.at("initial_quorum")),
                       j.at("accepted").get<Ballot>(),
                       j.at("ballot").get<Ballot>()};
  throw std::invalid_argument("bad message kind: " + kind);
}

}  // namespace atlas
