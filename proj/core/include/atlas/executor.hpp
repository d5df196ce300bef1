#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "atlas/types.hpp"

namespace atlas {

struct LogEntry {
  std::size_t batch{};
  Dot dot;
  Command cmd;
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

// Turns the partial order of committed dots into an execution log. A batch
// is the smallest committed set closed under dependencies modulo already
// executed dots: a strongly connected closure all of whose external
// dependencies have run. Within a batch, dots run in Dot order, so every
// process that commits the same graph delivers the same sequence.
class ExecGraph {
 public:
  // Registers a commit. Throws if the dot was already added: the protocol
  // commits each dot exactly once per process.
  void add_committed(Dot dot, Command cmd, DotSet deps);

  // Emits every batch that became runnable, dependency-closed sets first.
  std::vector<std::vector<LogEntry>> try_execute();

  bool executed(Dot d) const { return executed_.count(d) > 0; }
  std::size_t batch_count() const { return next_batch_; }
  const std::vector<LogEntry>& log() const { return log_; }
  std::size_t pending() const { return committed_.size(); }

  // Committed-but-unrunnable dependencies: dots some pending commit waits on.
  DotSet missing_deps() const;

 private:
  struct Node {
    Command cmd;
    DotSet deps;
  };

  std::map<Dot, Node> committed_;  // committed, not yet executed
  DotSet executed_;
  std::vector<LogEntry> log_;
  std::size_t next_batch_{0};
};

}  // namespace atlas
