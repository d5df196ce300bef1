#include "atlas/executor.hpp"

#include <algorithm>
#include <stdexcept>

namespace atlas {

void ExecGraph::add_committed(Dot dot, Command cmd, DotSet deps) {
  if (executed_.count(dot) || committed_.count(dot))
    throw std::logic_error("duplicate commit for " + to_string(dot));
  committed_.emplace(dot, Node{std::move(cmd), std::move(deps)});
}

DotSet ExecGraph::missing_deps() const {
  DotSet missing;
  for (const auto& [d, node] : committed_)
    for (const Dot& dep : node.deps)
      if (!executed_.count(dep) && !committed_.count(dep)) missing.insert(dep);
  return missing;
}

namespace {

// Iterative Tarjan; components come out in reverse topological order of the
// condensation (every edge points from a later component to an earlier one),
// i.e. dependencies first when edges go dot -> dep.
struct Tarjan {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, comp;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& a)
      : adj(a),
        index(a.size(), -1),
        low(a.size(), 0),
        comp(a.size(), -1),
        on_stack(a.size(), false) {}

  void run(int root) {
    struct Frame {
      int v;
      std::size_t next_edge;
    };
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_edge < adj[f.v].size()) {
        int w = adj[f.v][f.next_edge++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> scc;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = int(sccs.size());
            scc.push_back(w);
          } while (w != f.v);
          sccs.push_back(std::move(scc));
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
};

}  // namespace

std::vector<std::vector<LogEntry>> ExecGraph::try_execute() {
  std::vector<std::vector<LogEntry>> emitted;
  if (committed_.empty()) return emitted;

  std::vector<Dot> dots;
  dots.reserve(committed_.size());
  for (const auto& [d, _] : committed_) dots.push_back(d);
  std::map<Dot, int> idx;
  for (std::size_t i = 0; i < dots.size(); i++) idx[dots[i]] = int(i);

  // edge dot -> dep for every dependency that still has to run before it;
  // a dependency nobody committed yet blocks the node outright
  std::vector<std::vector<int>> adj(dots.size());
  std::vector<bool> blocked(dots.size(), false);
  for (std::size_t i = 0; i < dots.size(); i++) {
    for (const Dot& dep : committed_.at(dots[i]).deps) {
      if (executed_.count(dep)) continue;
      auto it = idx.find(dep);
      if (it == idx.end())
        blocked[i] = true;
      else
        adj[i].push_back(it->second);
    }
  }

  Tarjan tarjan(adj);
  for (std::size_t i = 0; i < dots.size(); i++)
    if (tarjan.index[int(i)] == -1) tarjan.run(int(i));

  // components appear dependencies-first, so a single pass settles
  // everything runnable; a blocked component poisons its dependents
  std::vector<bool> scc_blocked(tarjan.sccs.size(), false);
  for (std::size_t c = 0; c < tarjan.sccs.size(); c++) {
    bool ok = true;
    for (int v : tarjan.sccs[c]) {
      if (blocked[v]) ok = false;
      for (int w : adj[v]) {
        std::size_t cw = std::size_t(tarjan.comp[w]);
        if (cw != c && scc_blocked[cw]) ok = false;
      }
    }
    if (!ok) {
      scc_blocked[c] = true;
      continue;
    }
    std::vector<Dot> batch;
    for (int v : tarjan.sccs[c]) batch.push_back(dots[std::size_t(v)]);
    std::sort(batch.begin(), batch.end());
    std::vector<LogEntry> entries;
    for (const Dot& d : batch) {
      entries.push_back({next_batch_, d, committed_.at(d).cmd});
      executed_.insert(d);
    }
    for (const Dot& d : batch) committed_.erase(d);
    log_.insert(log_.end(), entries.begin(), entries.end());
    emitted.push_back(std::move(entries));
    next_batch_++;
  }
  return emitted;
}

}  // namespace atlas
