#include "atlas/kvstore.hpp"

#include <stdexcept>

namespace atlas {

Response apply(KvState& s, const Command& c) {
  if (c.is_noop()) throw std::invalid_argument("noop reached the application");
  if (c.op == Op::Get) {
    auto it = s.store.find(c.key);
    return Response::get_result(it == s.store.end()
                                    ? std::nullopt
                                    : std::optional<Value>(it->second));
  }
  s.store[c.key] = c.value;
  return Response::put_ack();
}

}  // namespace atlas
