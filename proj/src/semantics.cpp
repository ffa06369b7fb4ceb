#include "irew/semantics.hpp"

#include <functional>
#include <map>

#include "irew/errors.hpp"
#include "stream_sched.hpp"

namespace irew {

namespace {

Substitution subst_from_ids(const ProofCert& cert,
                            const std::map<std::string, int>& ids) {
  Substitution s;
  for (const auto& [x, tid] : ids) s.emplace(x, cert.term(tid));
  return s;
}

Step root_step_of(const ProofCert& cert, const ProofNode& n) {
  Step s;
  s.pos = {};
  s.rule = n.rule;
  if (n.subst) s.subst = subst_from_ids(cert, *n.subst);
  return s;
}

// One stream node per certificate node, same ids.
StreamGraph stream_of_cert(const ProofCert& cert) {
  StreamGraph g;
  g.nodes.resize(cert.nodes.size());
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const ProofNode& n = cert.nodes[i];
    StreamNode& s = g.nodes[i];
    switch (n.kind) {
      case ProofNode::Kind::root:
        s.own.push_back(root_step_of(cert, n));
        break;
      case ProofNode::Kind::split:
        for (int p : n.premises) s.children.emplace_back(p, 0);
        break;
      case ProofNode::Kind::lift:
        s.dovetail = true;
        for (size_t k = 0; k < n.children.size(); ++k)
          s.children.emplace_back(n.children[k], static_cast<int>(k) + 1);
        break;
      case ProofNode::Kind::id:
        break;
    }
  }
  return g;
}

void require_validated(const ProofCert& cert) {
  if (!cert.validated())
    throw error(errc::not_validated, "run check_valid first");
}

}  // namespace

SeqFiniteness seq_is_finite(const ProofCert& cert, int node) {
  require_validated(cert);
  // Acyclicity of the reachable subgraph, then an exact count.
  enum { White, Grey, Black };
  std::vector<char> color(cert.nodes.size(), White);
  std::vector<std::pair<int, size_t>> stack{{node, 0}};
  color[node] = Grey;
  bool acyclic = true;
  auto succ = [&](int v) -> const std::vector<int>& {
    static const std::vector<int> none;
    const ProofNode& n = cert.nodes[v];
    if (n.kind == ProofNode::Kind::split) return n.premises;
    if (n.kind == ProofNode::Kind::lift) return n.children;
    return none;
  };
  while (!stack.empty() && acyclic) {
    auto& [v, i] = stack.back();
    const auto& kids = succ(v);
    if (i == kids.size()) {
      color[v] = Black;
      stack.pop_back();
      continue;
    }
    int w = kids[i++];
    if (color[w] == Grey) {
      acyclic = false;
    } else if (color[w] == White) {
      color[w] = Grey;
      stack.emplace_back(w, 0);
    }
  }
  if (!acyclic) return {false, 0};

  std::map<int, std::uint64_t> memo;
  std::function<std::uint64_t(int)> count = [&](int v) -> std::uint64_t {
    auto it = memo.find(v);
    if (it != memo.end()) return it->second;
    const ProofNode& n = cert.nodes[v];
    std::uint64_t c = 0;
    if (n.kind == ProofNode::Kind::root) c = 1;
    for (int w : succ(v)) c += count(w);
    memo[v] = c;
    return c;
  };
  return {true, count(node)};
}

FiniteReduction canonical_prefix(const ProofCert& cert, std::uint64_t k) {
  require_validated(cert);
  if (cert.kind == RelationKind::ieq)
    throw error(errc::wrong_kind, "canonical_prefix expects ired or ibi");
  StreamGraph g = stream_of_cert(cert);
  FiniteReduction red;
  red.source = cert.term(cert.nodes[cert.root].source);
  red.steps = pull_stream(g, cert.root, k);
  return red;
}

std::vector<std::pair<Position, int>> steps_at_depth(const ProofCert& cert,
                                                     int n) {
  require_validated(cert);
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "steps_at_depth expects ired");

  // Depth-pruned product graph: (node, depth), lift edges one level deeper,
  // descents beyond depth n dropped. Valid certificates make this acyclic,
  // so the stream is finite and the canonical order among the surviving
  // steps is preserved.
  StreamGraph base = stream_of_cert(cert);
  StreamGraph g;
  std::map<std::pair<int, int>, int> ids;
  std::function<int(int, int)> build = [&](int node, int depth) -> int {
    auto key = std::make_pair(node, depth);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    ids.emplace(key, id);
    g.nodes.emplace_back();
    StreamNode copy = base.nodes[node];
    std::vector<std::pair<int, int>> kids;
    for (auto [c, shift] : copy.children) {
      int d = depth + (shift > 0 ? 1 : 0);
      if (d > n) continue;  // all steps below are deeper than n
      kids.emplace_back(build(c, d), shift);
    }
    copy.children = std::move(kids);
    g.nodes[id] = std::move(copy);
    return id;
  };
  int root = build(cert.root, 0);

  auto steps = pull_stream(g, root, StreamGraph::kInf);
  std::vector<std::pair<Position, int>> out;
  out.reserve(steps.size());
  for (auto& s : steps) out.emplace_back(std::move(s.pos), s.rule);
  return out;
}

PrefixAgreement prefix_agreement(const ProofCert& cert, const Trs& trs, int n) {
  require_validated(cert);
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "prefix_agreement expects ired");

  // Order type <= omega, syntactically: no split may have a premise with an
  // infinite stream followed by a premise containing a root step.
  StreamGraph g = stream_of_cert(cert);
  auto totals = g.totals();
  auto productive = g.productive();
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const ProofNode& node = cert.nodes[i];
    if (node.kind != ProofNode::Kind::split) continue;
    bool seen_infinite = false;
    for (int p : node.premises) {
      if (seen_infinite && productive[p])
        throw error(errc::not_omega,
                    "root step after an infinite premise in node " +
                        std::to_string(i));
      if (totals[p] == StreamGraph::kInf) seen_infinite = true;
    }
  }

  std::uint64_t wanted = steps_at_depth(cert, n).size();
  FiniteReduction red;
  red.source = cert.term(cert.nodes[cert.root].source);
  if (wanted > 0) {
    const std::uint64_t limit = 1000000;
    StreamPuller puller(g, cert.root);
    std::uint64_t seen = 0;
    while (seen < wanted) {
      if (red.steps.size() >= limit)
        throw error(errc::resource_exceeded,
                    "prefix bound exceeded while collecting shallow steps");
      auto s = puller.next();
      if (!s)
        throw error(errc::resource_exceeded,
                    "stream ended before all shallow steps appeared");
      if (static_cast<int>(s->pos.size()) <= n) ++seen;
      red.steps.push_back(std::move(*s));
    }
  }
  Term result = replay(red, trs);
  bool agree = truncation_equal(result, cert.term(cert.nodes[cert.root].target), n);
  return {std::move(red), agree};
}

}  // namespace irew
