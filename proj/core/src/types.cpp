#include "atlas/types.hpp"

#include <charconv>

namespace atlas {

std::string to_string(const Dot& d) {
  return "p" + std::to_string(d.proc) + "-" + std::to_string(d.seq);
}

namespace {

// Parses a decimal run starting at `pos`; fails on empty or overflow.
template <typename T>
bool parse_uint(std::string_view s, std::size_t& pos, T& out) {
  const char* first = s.data() + pos;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr == first) return false;
  pos += std::size_t(ptr - first);
  return true;
}

}  // namespace

std::optional<Dot> parse_dot(std::string_view text) {
  if (text.empty() || text[0] != 'p') return std::nullopt;
  std::size_t pos = 1;
  Dot d;
  if (!parse_uint(text, pos, d.proc)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  pos++;
  if (!parse_uint(text, pos, d.seq)) return std::nullopt;
  if (pos != text.size()) return std::nullopt;
  if (d.proc == 0 || d.seq == 0) return std::nullopt;
  return d;
}

bool conflict(const Command& a, const Command& b, ConflictMode mode) {
  if (a.is_noop() || b.is_noop()) return true;
  if (a.key != b.key) return false;
  if (mode == ConflictMode::ReadAware && a.op == Op::Get && b.op == Op::Get)
    return false;
  return true;
}

ProcId ballot_owner(Ballot b, ProcId n) {
  return ProcId((b - 1) % n) + 1;
}

Ballot next_ballot(ProcId i, Ballot cur, ProcId n) {
  return Ballot(i) + Ballot(n) * (cur / n + 1);
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Start: return "start";
    case Phase::Collect: return "collect";
    case Phase::Recovering: return "recovering";
    case Phase::Committed: return "committed";
    case Phase::Executed: return "executed";
  }
  return "?";
}

bool phase_ok(Phase from, Phase to) {
  switch (from) {
    case Phase::Start:
      return to == Phase::Collect || to == Phase::Recovering ||
             to == Phase::Committed;
    case Phase::Collect:
      return to == Phase::Recovering || to == Phase::Committed;
    case Phase::Recovering:
      return to == Phase::Recovering || to == Phase::Committed;
    case Phase::Committed:
      return to == Phase::Executed;
    case Phase::Executed:
      return false;
  }
  return false;
}

}  // namespace atlas
