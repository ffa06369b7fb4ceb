#include "stream_sched.hpp"

#include <algorithm>
#include <functional>

namespace irew {

std::vector<char> StreamGraph::productive() const {
  size_t n = nodes.size();
  std::vector<char> prod(n, 0);
  // Fixed point of: productive if own steps, or some child productive.
  bool changed = true;
  for (size_t i = 0; i < n; ++i) prod[i] = !nodes[i].own.empty();
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (prod[i]) continue;
      for (auto [c, shift] : nodes[i].children) {
        if (prod[c]) {
          prod[i] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  return prod;
}

std::vector<std::uint64_t> StreamGraph::totals() const {
  size_t n = nodes.size();
  auto prod = productive();

  // A node sits on or reaches a cycle of productive descent iff its stream
  // is infinite: detect cycles in the subgraph of productive nodes, then
  // propagate "reaches an infinite stream" backwards.
  std::vector<char> on_cycle(n, 0);
  {
    // Colors over the productive subgraph.
    std::vector<int> color(n, 0);  // 0 white, 1 grey, 2 black
    std::vector<std::pair<int, size_t>> stack;
    for (size_t s = 0; s < n; ++s) {
      if (!prod[s] || color[s] != 0) continue;
      stack.emplace_back(static_cast<int>(s), 0);
      color[s] = 1;
      while (!stack.empty()) {
        auto& [v, i] = stack.back();
        const auto& kids = nodes[v].children;
        if (i == kids.size()) {
          color[v] = 2;
          stack.pop_back();
          continue;
        }
        int w = kids[i++].first;
        if (!prod[w]) continue;
        if (color[w] == 1) {
          on_cycle[w] = 1;
        } else if (color[w] == 0) {
          color[w] = 1;
          stack.emplace_back(w, 0);
        }
      }
    }
  }
  std::vector<char> infinite(n, 0);
  for (size_t i = 0; i < n; ++i) infinite[i] = on_cycle[i];
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (infinite[i]) continue;
      for (auto [c, shift] : nodes[i].children)
        if (infinite[c]) {
          infinite[i] = 1;
          changed = true;
          break;
        }
    }
  }

  std::vector<std::uint64_t> total(n, 0);
  std::vector<char> done(n, 0);
  std::function<std::uint64_t(int)> dp = [&](int v) -> std::uint64_t {
    if (infinite[v]) return kInf;
    if (!prod[v]) return 0;
    if (done[v]) return total[v];
    done[v] = 1;  // the productive finite subgraph is acyclic
    std::uint64_t t = nodes[v].own.size();
    for (auto [c, shift] : nodes[v].children) {
      std::uint64_t ct = dp(c);
      t = (ct == kInf) ? kInf : t + ct;
    }
    total[v] = t;
    return t;
  };
  for (size_t i = 0; i < n; ++i) dp(static_cast<int>(i));
  for (size_t i = 0; i < n; ++i)
    if (infinite[i]) total[i] = kInf;
  return total;
}

namespace {

struct Instance {
  int node;
  Position prefix;
  size_t own_idx = 0;
  bool kids_created = false;
  std::vector<std::unique_ptr<Instance>> kids;
  size_t pos = 0;  // concat progress or round-robin pointer
  bool exhausted = false;
};

enum class PullResult { yielded, exhausted, blocked };

struct Scheduler {
  const StreamGraph& g;
  std::vector<std::uint64_t> total;
  std::uint64_t fuel = 0;

  explicit Scheduler(const StreamGraph& graph) : g(graph), total(graph.totals()) {}

  void make_kids(Instance& inst) {
    if (inst.kids_created) return;
    inst.kids_created = true;
    for (auto [c, shift] : g.nodes[inst.node].children) {
      auto kid = std::make_unique<Instance>();
      kid->node = c;
      kid->prefix = inst.prefix;
      if (shift > 0) kid->prefix.push_back(shift);
      if (total[c] == StreamGraph::kInf ? false : total[c] == 0)
        kid->exhausted = true;
      inst.kids.push_back(std::move(kid));
    }
  }

  PullResult pull(Instance& inst, Step& out) {
    if (inst.exhausted) return PullResult::exhausted;
    if (fuel == 0) return PullResult::blocked;
    --fuel;
    const StreamNode& sn = g.nodes[inst.node];
    if (inst.own_idx < sn.own.size()) {
      out = sn.own[inst.own_idx++];
      Position abs = inst.prefix;
      abs.insert(abs.end(), out.pos.begin(), out.pos.end());
      out.pos = std::move(abs);
      return PullResult::yielded;
    }
    make_kids(inst);
    if (!sn.dovetail) {
      while (inst.pos < inst.kids.size()) {
        PullResult r = pull(*inst.kids[inst.pos], out);
        if (r == PullResult::yielded) return r;
        if (r == PullResult::blocked) return r;
        ++inst.pos;
      }
      inst.exhausted = true;
      return PullResult::exhausted;
    }
    // Dovetail: scan from the rotation pointer; blocked children are skipped
    // for this pull.
    bool saw_blocked = false;
    size_t nkids = inst.kids.size();
    for (size_t tried = 0; tried < nkids; ++tried) {
      size_t i = (inst.pos + tried) % nkids;
      PullResult r = pull(*inst.kids[i], out);
      if (r == PullResult::yielded) {
        inst.pos = (i + 1) % nkids;
        return r;
      }
      if (r == PullResult::blocked) saw_blocked = true;
    }
    if (saw_blocked) return PullResult::blocked;
    inst.exhausted = true;
    return PullResult::exhausted;
  }
};

}  // namespace

struct StreamPuller::Impl {
  Scheduler sched;
  Instance top;
  std::uint64_t emitted = 0;
  bool done = false;

  Impl(const StreamGraph& g, int root) : sched(g) {
    top.node = root;
    if (g.nodes.empty() || sched.total[root] == 0) done = true;
  }
};

StreamPuller::StreamPuller(const StreamGraph& g, int root)
    : impl_(std::make_unique<Impl>(g, root)) {}
StreamPuller::~StreamPuller() = default;
StreamPuller::StreamPuller(StreamPuller&&) noexcept = default;

std::optional<Step> StreamPuller::next() {
  if (impl_->done) return std::nullopt;
  Step s;
  impl_->sched.fuel =
      static_cast<std::uint64_t>(impl_->sched.g.nodes.size() + 4) *
          (impl_->emitted + 2) + 64;
  PullResult r = impl_->sched.pull(impl_->top, s);
  if (r != PullResult::yielded) {
    impl_->done = true;
    return std::nullopt;
  }
  ++impl_->emitted;
  return s;
}

std::vector<Step> pull_stream(const StreamGraph& g, int root, std::uint64_t k) {
  std::vector<Step> out;
  if (g.nodes.empty()) return out;
  StreamPuller puller(g, root);
  while (out.size() < k) {
    auto s = puller.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace irew
