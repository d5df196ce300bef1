#include "atlas/smr.hpp"

#include <stdexcept>

namespace atlas {

KvReplica::Handle KvReplica::invoke(const Command& c) {
  if (c.is_noop()) throw std::invalid_argument("cannot invoke a noop");
  if (c.caller != id_)
    throw std::invalid_argument("invoke with a foreign caller tag");
  auto [it, fresh] =
      pending_.try_emplace(c, std::make_shared<std::optional<Response>>());
  if (!fresh) throw std::invalid_argument("command already in flight");
  Handle h;
  h.slot_ = it->second;
  if (submit_) submit_(c);
  return h;
}

void KvReplica::on_deliver(const Command& c) {
  log_.push_back(c);
  Response r = apply(kv_, c);
  if (c.caller != id_) return;
  auto it = pending_.find(c);
  if (it == pending_.end()) return;
  *it->second = r;
  pending_.erase(it);
}

}  // namespace atlas
