#include "atlas/trace.hpp"

#include <istream>
#include <sstream>

namespace atlas {

const char* to_string(EventType t) {
  switch (t) {
    case EventType::Send: return "send";
    case EventType::Deliver: return "deliver";
    case EventType::Crash: return "crash";
    case EventType::Invoke: return "invoke";
    case EventType::Response: return "response";
    case EventType::Commit: return "commit";
    case EventType::Execute: return "execute";
    case EventType::Recovery: return "recovery";
  }
  return "?";
}

const char* to_string(CommitPath p) {
  switch (p) {
    case CommitPath::Fast: return "fast";
    case CommitPath::Slow: return "slow";
    case CommitPath::Recovered: return "recovered";
  }
  return "?";
}

namespace {

EventType event_type_from(const std::string& s) {
  if (s == "send") return EventType::Send;
  if (s == "deliver") return EventType::Deliver;
  if (s == "crash") return EventType::Crash;
  if (s == "invoke") return EventType::Invoke;
  if (s == "response") return EventType::Response;
  if (s == "commit") return EventType::Commit;
  if (s == "execute") return EventType::Execute;
  if (s == "recovery") return EventType::Recovery;
  throw std::invalid_argument("unknown event type: " + s);
}

CommitPath path_from(const std::string& s) {
  if (s == "fast") return CommitPath::Fast;
  if (s == "slow") return CommitPath::Slow;
  if (s == "recovered") return CommitPath::Recovered;
  throw std::invalid_argument("unknown commit path: " + s);
}

}  // namespace

Json to_json(const Response& r) {
  Json j;
  j["is_get"] = r.is_get;
  if (r.value) j["value"] = *r.value;
  return j;
}

Response response_from_json(const Json& j) {
  Response r;
  r.is_get = j.at("is_get").get<bool>();
  if (j.contains("value")) r.value = j.at("value").get<Value>();
  return r;
}

Json TraceEvent::to_json() const {
  Json j;
  j["t"] = t;
  j["type"] = to_string(type);
  j["proc"] = proc;
  switch (type) {
    case EventType::Send:
    case EventType::Deliver:
      j["peer"] = peer;
      j["msg"] = atlas::to_json(*msg);
      break;
    case EventType::Crash:
      break;
    case EventType::Invoke:
      j["cmd"] = atlas::to_json(*cmd);
      break;
    case EventType::Response:
      j["cmd"] = atlas::to_json(*cmd);
      j["resp"] = atlas::to_json(*resp);
      break;
    case EventType::Commit:
      j["dot"] = atlas::to_json(*dot);
      j["cmd"] = atlas::to_json(*cmd);
      j["deps"] = atlas::to_json(deps);
      j["path"] = to_string(*path);
      j["nfr"] = nfr;
      j["ballot"] = ballot;
      if (!ack_deps.empty()) {
        Json a = Json::object();
        for (const auto& [p, ds] : ack_deps) a[std::to_string(p)] = atlas::to_json(ds);
        j["ack_deps"] = a;
        j["dep_union"] = atlas::to_json(dep_union);
        j["matching"] = *matching;
      }
      break;
    case EventType::Execute:
      j["dot"] = atlas::to_json(*dot);
      j["batch"] = batch;
      break;
    case EventType::Recovery:
      j["dot"] = atlas::to_json(*dot);
      j["ballot"] = ballot;
      break;
  }
  return j;
}

TraceEvent TraceEvent::from_json(const Json& j) {
  TraceEvent e;
  e.t = j.at("t").get<TimePoint>();
  e.type = event_type_from(j.at("type").get<std::string>());
  e.proc = j.at("proc").get<ProcId>();
  switch (e.type) {
    case EventType::Send:
    case EventType::Deliver:
      e.peer = j.at("peer").get<ProcId>();
      e.msg = message_from_json(j.at("msg"));
      break;
    case EventType::Crash:
      break;
    case EventType::Invoke:
      e.cmd = command_from_json(j.at("cmd"));
      break;
    case EventType::Response:
      e.cmd = command_from_json(j.at("cmd"));
      e.resp = response_from_json(j.at("resp"));
      break;
    case EventType::Commit:
      e.dot = dot_from_json(j.at("dot"));
      e.cmd = command_from_json(j.at("cmd"));
      e.deps = dotset_from_json(j.at("deps"));
      e.path = path_from(j.at("path").get<std::string>());
      e.nfr = j.at("nfr").get<bool>();
      e.ballot = j.at("ballot").get<Ballot>();
      if (j.contains("ack_deps")) {
        for (const auto& [k, v] : j.at("ack_deps").items())
          e.ack_deps[static_cast<ProcId>(std::stoul(k))] = dotset_from_json(v);
        e.dep_union = dotset_from_json(j.at("dep_union"));
        e.matching = j.at("matching").get<bool>();
      }
      break;
    case EventType::Execute:
      e.dot = dot_from_json(j.at("dot"));
      e.batch = j.at("batch").get<std::size_t>();
      break;
    case EventType::Recovery:
      e.dot = dot_from_json(j.at("dot"));
      e.ballot = j.at("ballot").get<Ballot>();
      break;
  }
  return e;
}

std::string Trace::to_jsonl() const {
  std::string out;
  Json meta;
  meta["type"] = "meta";
  meta["format"] = 1;
  meta["config"] = config.to_json();
  out += meta.dump();
  out += '\n';
  for (const TraceEvent& e : events) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

Trace Trace::from_jsonl(std::istream& in) {
  Trace tr;
  std::string line;
  std::size_t lineno = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
    try {
      if (!have_meta) {
        if (!j.is_object() || j.value("type", "") != "meta")
          throw std::invalid_argument("expected meta line first");
        if (j.value("format", 0) != 1)
          throw std::invalid_argument("unsupported trace format");
        tr.config = SimConfig::from_json(j.at("config"));
        have_meta = true;
      } else {
        tr.events.push_back(TraceEvent::from_json(j));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_meta) throw ParseError(lineno, "empty trace, no meta line");
  return tr;
}

Trace Trace::from_jsonl_string(const std::string& s) {
  std::istringstream in(s);
  return from_jsonl(in);
}

}  // namespace atlas
