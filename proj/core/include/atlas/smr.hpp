#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "atlas/kvstore.hpp"
#include "atlas/types.hpp"

namespace atlas {

// Replicated key-value store built over the protocol's delivery order: a
// command is invoked exactly once, runs at every process in delivery order,
// and its invoker learns the response computed from its own replica state
// at the delivery instant.
class KvReplica {
 public:
  using SubmitFn = std::function<void(const Command&)>;

  // The hook forwards an invoked command to the commit protocol.
  KvReplica(ProcId id, SubmitFn submit)
      : id_(id), submit_(std::move(submit)) {}

  class Handle {
   public:
    bool resolved() const { return slot_ && slot_->has_value(); }
    const Response& response() const { return slot_->value(); }

   private:
    friend class KvReplica;
    std::shared_ptr<std::optional<Response>> slot_;
  };

  // Registers the command as pending and submits it. Throws if the caller
  // tag is wrong, the command is a Noop, or it is already in flight:
  // invocations are unique.
  Handle invoke(const Command& c);

  // Delivery order from the executor; resolves the pending entry when the
  // command was invoked here.
  void on_deliver(const Command& c);

  const KvState& state() const { return kv_; }
  const std::vector<Command>& log() const { return log_; }
  std::size_t pending_count() const { return pending_.size(); }

 private:
  ProcId id_;
  SubmitFn submit_;
  KvState kv_;
  std::vector<Command> log_;
  std::map<Command, std::shared_ptr<std::optional<Response>>> pending_;
};

}  // namespace atlas
