#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atlas/config.hpp"
#include "atlas/kvstore.hpp"
#include "atlas/messages.hpp"

namespace atlas {

enum class EventType : std::uint8_t {
  Send,
  Deliver,
  Crash,
  Invoke,
  Response,
  Commit,
  Execute,
  Recovery,
};

enum class CommitPath : std::uint8_t { Fast, Slow, Recovered };

const char* to_string(EventType);
const char* to_string(CommitPath);

// One JSONL line. Which fields are meaningful depends on the type:
//   send/deliver: proc (sender/receiver), peer (the other side), msg
//   crash:        proc
//   invoke:       proc, cmd
//   response:     proc, cmd, resp
//   commit:       proc (decider), dot, cmd, deps, path, nfr, ballot, and for
//                 fast/slow paths the collect evidence (ack_deps, dep_union,
//                 matching)
//   execute:      proc, dot, batch
//   recovery:     proc, dot, ballot
struct TraceEvent {
  TimePoint t{0};
  EventType type{EventType::Send};
  ProcId proc{0};
  ProcId peer{0};
  std::optional<Message> msg;
  std::optional<Command> cmd;
  std::optional<Response> resp;
  std::optional<Dot> dot;
  DotSet deps;
  std::optional<CommitPath> path;
  bool nfr{false};
  Ballot ballot{0};
  std::map<ProcId, DotSet> ack_deps;
  DotSet dep_union;
  std::optional<bool> matching;
  std::size_t batch{0};

  Json to_json() const;
  static TraceEvent from_json(const Json& j);
};

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

// A full run: config echo plus every observable event, in order. Serialized
// as one meta line followed by one line per event; field order is stable so
// identical runs serialize to identical bytes.
struct Trace {
  SimConfig config;
  std::vector<TraceEvent> events;

  std::string to_jsonl() const;
  static Trace from_jsonl(std::istream& in);
  static Trace from_jsonl_string(const std::string& s);
};

Json to_json(const Response& r);
Response response_from_json(const Json& j);

}  // namespace atlas
