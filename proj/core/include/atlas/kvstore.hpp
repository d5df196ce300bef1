#pragma once

#include <map>
#include <optional>

#include "atlas/types.hpp"

namespace atlas {

struct Response {
  bool is_get{false};
  std::optional<Value> value;  // Get result; nullopt when the key is absent

  static Response put_ack() { return {false, std::nullopt}; }
  static Response get_result(std::optional<Value> v) {
    return {true, std::move(v)};
  }
  friend bool operator==(const Response&, const Response&) = default;
};

struct KvState {
  std::map<Key, Value> store;
  friend bool operator==(const KvState&, const KvState&) = default;
};

// Applies one command in place and returns its response. Pre: not a Noop
// (the executor never hands Noops to the application).
Response apply(KvState& s, const Command& c);

}  // namespace atlas
