#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "irew/trs.hpp"

namespace irew {

// A node-graph view of the step streams read out of certificates. Each node
// first yields its own steps, then combines the streams of its children:
// concatenation in order (split premises) or round-robin dovetailing (lift
// children, with positions shifted into the argument).
struct StreamNode {
  std::vector<Step> own;  // positions relative to this node
  bool dovetail = false;
  // (child stream id, shift): shift > 0 prepends that argument index.
  std::vector<std::pair<int, int>> children;
};

class StreamGraph {
 public:
  std::vector<StreamNode> nodes;

  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

  // Total number of steps of each node's stream, kInf when infinite.
  // A stream is infinite exactly when a cycle is reachable from which a
  // step-bearing node is reachable.
  std::vector<std::uint64_t> totals() const;

  // Whether a node with own steps is reachable (including the node itself).
  std::vector<char> productive() const;
};

// Incremental reader of a node's stream. Descents that spin through cycles
// without producing a step are cut off by fuel; streams hidden behind such
// livelocked descents are dropped, which keeps the order deterministic and
// the reader total on arbitrary graphs.
class StreamPuller {
 public:
  StreamPuller(const StreamGraph& g, int root);
  ~StreamPuller();
  StreamPuller(StreamPuller&&) noexcept;

  std::optional<Step> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// First k steps of a node's stream.
std::vector<Step> pull_stream(const StreamGraph& g, int root, std::uint64_t k);

}  // namespace irew
