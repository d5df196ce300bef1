#include "atlas/linearizability.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <vector>

namespace atlas {
namespace {

constexpr std::size_t kPending = std::numeric_limits<std::size_t>::max();

struct LinOp {
  Command cmd;
  std::size_t invoke{0};         // trace event index
  std::size_t response{kPending};
  std::optional<Response> resp;

  bool complete() const { return response != kPending; }
};

std::string op_brief(const LinOp& o) {
  std::string s = o.cmd.op == Op::Get ? "get" : "put";
  s += "(" + o.cmd.key;
  if (o.cmd.op == Op::Put) s += "=" + o.cmd.value;
  s += ") by " + std::to_string(o.cmd.caller) + "." + std::to_string(o.cmd.uid);
  if (!o.complete()) s += " [pending]";
  return s;
}

// Depth-first witness search over one key's operations. State is the key's
// value; a node is (set of linearized ops, value); failed nodes memoize.
class KeySearch {
 public:
  KeySearch(std::vector<LinOp> ops, std::uint64_t& budget)
      : ops_(std::move(ops)), budget_(budget), done_(ops_.size(), false) {}

  bool run() {
    mandatory_ = 0;
    for (const LinOp& o : ops_)
      if (o.complete()) mandatory_++;
    return dfs(0);
  }

  bool exhausted() const { return exhausted_; }

  std::string witness() const {
    std::string s;
    int shown = 0;
    for (std::size_t i = 0; i < ops_.size(); i++) {
      if (done_[i] || !ops_[i].complete()) continue;
      if (shown++ == 5) {
        s += ", ...";
        break;
      }
      if (!s.empty()) s += ", ";
      s += op_brief(ops_[i]);
    }
    return s;
  }

 private:
  bool dfs(std::size_t linearized_mandatory) {
    if (linearized_mandatory == mandatory_) return true;
    if (budget_ == 0) {
      exhausted_ = true;
      return false;
    }
    budget_--;
    if (!visited_.insert(encode()).second) return false;

    // an op may go next only if nothing still outstanding finished before
    // it was invoked
    std::size_t min_resp = kPending;
    for (std::size_t i = 0; i < ops_.size(); i++)
      if (!done_[i] && ops_[i].complete())
        min_resp = std::min(min_resp, ops_[i].response);

    for (std::size_t i = 0; i < ops_.size(); i++) {
      if (done_[i] || ops_[i].invoke >= min_resp) continue;
      const LinOp& o = ops_[i];
      std::optional<Value> saved = value_;
      if (o.cmd.op == Op::Put) {
        value_ = o.cmd.value;
      } else if (o.complete() && o.resp->value != value_) {
        continue;  // this read cannot have happened here
      }
      done_[i] = true;
      if (dfs(linearized_mandatory + (o.complete() ? 1 : 0))) return true;
      done_[i] = false;
      value_ = saved;
      if (exhausted_) return false;
    }
    return false;
  }

  std::string encode() const {
    std::string s((done_.size() + 7) / 8, '\0');
    for (std::size_t i = 0; i < done_.size(); i++)
      if (done_[i]) s[i / 8] |= char(1 << (i % 8));
    if (value_) {
      s += '=';
      s += *value_;
    }
    return s;
  }

  std::vector<LinOp> ops_;
  std::uint64_t& budget_;
  std::vector<char> done_;
  std::size_t mandatory_{0};
  std::optional<Value> value_;
  std::set<std::string> visited_;
  bool exhausted_{false};
};

}  // namespace

const char* to_string(LinVerdict v) {
  switch (v) {
    case LinVerdict::Ok: return "linearizable";
    case LinVerdict::Violation: return "not-linearizable";
    case LinVerdict::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

Json LinResult::to_json() const {
  Json j;
  j["verdict"] = to_string(verdict);
  j["explored"] = explored;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

LinResult check_linearizability(const Trace& tr, std::uint64_t node_budget) {
  std::map<Command, LinOp> by_cmd;
  for (std::size_t i = 0; i < tr.events.size(); i++) {
    const TraceEvent& e = tr.events[i];
    if (e.type == EventType::Invoke) {
      by_cmd.try_emplace(*e.cmd, LinOp{*e.cmd, i, kPending, std::nullopt});
    } else if (e.type == EventType::Response) {
      auto it = by_cmd.find(*e.cmd);
      if (it != by_cmd.end()) {
        it->second.response = i;
        it->second.resp = e.resp;
      }
    }
  }

  std::map<Key, std::vector<LinOp>> keys;
  for (auto& [cmd, op] : by_cmd) {
    if (!op.complete() && cmd.op == Op::Get) continue;  // constrains nothing
    keys[cmd.key].push_back(op);
  }

  LinResult res;
  std::uint64_t budget = node_budget;
  for (auto& [key, ops] : keys) {
    std::sort(ops.begin(), ops.end(), [](const LinOp& a, const LinOp& b) {
      return a.invoke < b.invoke;
    });
    KeySearch search(std::move(ops), budget);
    bool ok = search.run();
    res.explored = node_budget - budget;
    if (ok) continue;
    if (search.exhausted()) {
      res.verdict = LinVerdict::BudgetExhausted;
      res.detail = "search budget ran out on key " + key;
    } else {
      res.verdict = LinVerdict::Violation;
      res.detail = "key " + key + ": no witness orders " + search.witness();
    }
    return res;
  }
  res.explored = node_budget - budget;
  return res;
}

}  // namespace atlas
