#include "irew/term.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "irew/errors.hpp"

namespace irew {

namespace {

// Node ids reachable from root, in DFS preorder (children left to right).
std::vector<int> reachable_nodes(const std::vector<TermNode>& nodes, int root) {
  std::vector<int> order;
  std::vector<char> seen(nodes.size(), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    order.push_back(n);
    const auto& kids = nodes[n].kids;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      if (!seen[*it]) stack.push_back(*it);
  }
  return order;
}

std::vector<int> reachable(const TermGraph& g, int root) {
  return reachable_nodes(g.nodes, root);
}

}  // namespace

int Term::size() const { return static_cast<int>(reachable(*graph_, root_).size()); }

bool Term::finite() const {
  // Cycle detection restricted to the reachable part.
  enum { White, Grey, Black };
  std::vector<char> color(graph_->nodes.size(), White);
  // Iterative DFS with explicit phase.
  std::vector<std::pair<int, size_t>> stack{{root_, 0}};
  color[root_] = Grey;
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    const auto& kids = graph_->nodes[n].kids;
    if (i == kids.size()) {
      color[n] = Black;
      stack.pop_back();
      continue;
    }
    int k = kids[i++];
    if (color[k] == Grey) return false;
    if (color[k] == White) {
      color[k] = Grey;
      stack.emplace_back(k, 0);
    }
  }
  return true;
}

std::string position_to_string(const Position& p) {
  if (p.empty()) return "e";
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << '.';
    os << p[i];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// TermBuilder

int TermBuilder::fun(int sym, std::vector<int> kids) {
  if (sym < 0 || sym >= static_cast<int>(sig_->symbols().size()))
    throw error(errc::unknown_symbol, "symbol index out of range");
  if (static_cast<int>(kids.size()) != sig_->arity(sym))
    throw error(errc::arity_mismatch, sig_->symbol_name(sym));
  TermNode n;
  n.sym = sym;
  n.kids = std::move(kids);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int TermBuilder::fun(const std::string& name, std::vector<int> kids) {
  int sym = sig_->symbol_index(name);
  if (sym < 0) throw error(errc::unknown_symbol, name);
  return fun(sym, std::move(kids));
}

int TermBuilder::var(const std::string& name) {
  int v = sig_->variable_index(name);
  if (v < 0) throw error(errc::unknown_symbol, "undeclared variable " + name);
  TermNode n;
  n.var = v;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int TermBuilder::placeholder() {
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void TermBuilder::fill_fun(int id, int sym, std::vector<int> kids) {
  if (sym < 0 || sym >= static_cast<int>(sig_->symbols().size()))
    throw error(errc::unknown_symbol, "symbol index out of range");
  if (static_cast<int>(kids.size()) != sig_->arity(sym))
    throw error(errc::arity_mismatch, sig_->symbol_name(sym));
  nodes_[id].sym = sym;
  nodes_[id].kids = std::move(kids);
}

void TermBuilder::fill_fun(int id, const std::string& name,
                           std::vector<int> kids) {
  int sym = sig_->symbol_index(name);
  if (sym < 0) throw error(errc::unknown_symbol, name);
  fill_fun(id, sym, std::move(kids));
}

void TermBuilder::fill_var(int id, int var) {
  nodes_[id].var = var;
  nodes_[id].sym = -1;
  nodes_[id].kids.clear();
}

void TermBuilder::fill_alias(int id, int other) {
  nodes_[id] = nodes_[other];
}

int TermBuilder::graft(const Term& t) {
  const TermGraph* g = t.graph().get();
  auto key = std::make_pair(g, t.root());
  auto hit = graft_memo_.find(key);
  if (hit != graft_memo_.end()) return hit->second;
  pinned_.push_back(t.graph());
  // Copy the reachable part, preserving sharing.
  std::map<int, int> copy;
  auto order = reachable(*g, t.root());
  for (int n : order) copy[n] = placeholder();
  for (int n : order) {
    const TermNode& src = g->nodes[n];
    TermNode& dst = nodes_[copy[n]];
    dst.sym = src.sym;
    dst.var = src.var;
    dst.kids.clear();
    for (int k : src.kids) dst.kids.push_back(copy.at(k));
    graft_memo_[std::make_pair(g, n)] = copy[n];
  }
  return copy.at(t.root());
}

Term TermBuilder::build(int root) const {
  // Prune unreachable nodes.
  auto order = reachable_nodes(nodes_, root);
  std::map<int, int> remap;
  auto g = std::make_shared<TermGraph>();
  for (int n : order) {
    remap[n] = static_cast<int>(g->nodes.size());
    g->nodes.push_back(nodes_[n]);
  }
  for (auto& n : g->nodes) {
    if (n.sym < 0 && n.var < 0)
      throw error(errc::syntax, "unfilled placeholder in term graph");
    for (auto& k : n.kids) k = remap.at(k);
  }
  return Term(sig_, g, remap.at(root));
}

TermGraphPtr TermBuilder::snapshot() const {
  for (const auto& n : nodes_)
    if (n.sym < 0 && n.var < 0)
      throw error(errc::syntax, "unfilled placeholder in term graph");
  auto g = std::make_shared<TermGraph>();
  g->nodes = nodes_;
  return g;
}

Term make_fun(const SignaturePtr& sig, const std::string& name,
              const std::vector<Term>& args) {
  TermBuilder b(sig);
  std::vector<int> kids;
  kids.reserve(args.size());
  for (const auto& a : args) kids.push_back(b.graft(a));
  return b.build(b.fun(name, std::move(kids)));
}

Term make_var(const SignaturePtr& sig, const std::string& name) {
  TermBuilder b(sig);
  return b.build(b.var(name));
}

// ---------------------------------------------------------------------------
// Positions

std::optional<int> resolve_position(const Term& t, const Position& p) {
  int n = t.root();
  for (int i : p) {
    const TermNode& node = t.node(n);
    if (node.is_var()) return std::nullopt;
    if (i < 1 || i > static_cast<int>(node.kids.size())) return std::nullopt;
    n = node.kids[i - 1];
  }
  return n;
}

Term subterm_at(const Term& t, const Position& p) {
  auto n = resolve_position(t, p);
  if (!n)
    throw error(errc::invalid_position, position_to_string(p));
  return Term(t.sig(), t.graph(), *n);
}

// ---------------------------------------------------------------------------
// Truncation equality

namespace {

struct PairDepthHash {
  size_t operator()(const std::tuple<int, int, int>& k) const {
    auto [a, b, c] = k;
    return std::hash<long long>()((static_cast<long long>(a) << 40) ^
                                  (static_cast<long long>(b) << 16) ^ c);
  }
};

bool trunc_eq_rec(
    const TermGraph& gs, int s, const TermGraph& gt, int t, int n,
    std::unordered_map<std::tuple<int, int, int>, bool, PairDepthHash>& memo) {
  auto key = std::make_tuple(s, t, n);
  auto hit = memo.find(key);
  if (hit != memo.end()) return hit->second;
  const TermNode& ns = gs.nodes[s];
  const TermNode& nt = gt.nodes[t];
  bool eq;
  if (ns.is_var() || nt.is_var()) {
    eq = ns.is_var() && nt.is_var() && ns.var == nt.var;
  } else if (ns.sym != nt.sym) {
    eq = false;
  } else if (n == 0) {
    eq = true;
  } else {
    eq = true;
    for (size_t i = 0; i < ns.kids.size() && eq; ++i)
      eq = trunc_eq_rec(gs, ns.kids[i], gt, nt.kids[i], n - 1, memo);
  }
  memo[key] = eq;
  return eq;
}

}  // namespace

bool truncation_equal(const Term& s, const Term& t, int n) {
  std::unordered_map<std::tuple<int, int, int>, bool, PairDepthHash> memo;
  return trunc_eq_rec(*s.graph(), s.root(), *t.graph(), t.root(), n, memo);
}

// ---------------------------------------------------------------------------
// Bisimilarity by partition refinement on the disjoint union

namespace {

// Stable partition refinement; returns block ids for the nodes of g1 and g2
// reachable from the given roots. Unreachable nodes get block -1.
struct Partition {
  std::vector<int> block1, block2;
};

Partition refine(const TermGraph& g1, int r1, const TermGraph& g2, int r2) {
  auto o1 = reachable(g1, r1);
  auto o2 = reachable(g2, r2);
  int n1 = static_cast<int>(g1.nodes.size());
  Partition p;
  p.block1.assign(g1.nodes.size(), -1);
  p.block2.assign(g2.nodes.size(), -1);

  // union index: nodes of g1 then nodes of g2
  std::vector<int> uni;
  for (int n : o1) uni.push_back(n);
  for (int n : o2) uni.push_back(n + n1);
  auto node_of = [&](int u) -> const TermNode& {
    return u < n1 ? g1.nodes[u] : g2.nodes[u - n1];
  };

  std::unordered_map<int, int>
      assign;  // union id -> block
  // Initial blocks by label.
  {
    std::map<std::pair<int, int>, int> label_block;
    for (int u : uni) {
      const TermNode& n = node_of(u);
      auto key = std::make_pair(n.sym, n.var);
      auto it = label_block.find(key);
      if (it == label_block.end())
        it = label_block.emplace(key, static_cast<int>(label_block.size())).first;
      assign[u] = it->second;
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::vector<int>, int> sig_block;
    std::unordered_map<int, int> next;
    for (int u : uni) {
      const TermNode& n = node_of(u);
      std::vector<int> sig{assign[u]};
      for (int k : n.kids) sig.push_back(assign[u < n1 ? k : k + n1]);
      auto it = sig_block.find(sig);
      if (it == sig_block.end())
        it = sig_block.emplace(sig, static_cast<int>(sig_block.size())).first;
      next[u] = it->second;
    }
    for (int u : uni)
      if (next[u] != assign[u]) changed = true;
    assign = std::move(next);
  }

  for (int n : o1) p.block1[n] = assign[n];
  for (int n : o2) p.block2[n] = assign[n + n1];
  return p;
}

}  // namespace

bool bisimilar(const Term& s, const Term& t) {
  Partition p = refine(*s.graph(), s.root(), *t.graph(), t.root());
  return p.block1[s.root()] == p.block2[t.root()];
}

MetricDistance metric_distance(const Term& s, const Term& t, int cap) {
  if (bisimilar(s, t)) return {true, 0};
  for (int n = 0; n <= cap; ++n)
    if (!truncation_equal(s, t, n)) return {false, n};
  return {false, cap};
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term& t, const Substitution& sigma) {
  std::map<std::string, Term> relevant;
  for (const auto& [name, val] : sigma) {
    if (t.sig()->variable_index(name) < 0)
      throw error(errc::unknown_symbol, "undeclared variable " + name);
    relevant.emplace(name, val);
  }
  TermBuilder b(t.sig());
  std::map<std::string, int> var_target;
  for (const auto& [name, val] : relevant) var_target[name] = b.graft(val);

  auto order = reachable(*t.graph(), t.root());
  std::map<int, int> copy;
  std::vector<int> pending;  // nodes needing a fresh copy
  for (int n : order) {
    const TermNode& src = t.node(n);
    if (src.is_var()) {
      const std::string& name = t.sig()->variable_name(src.var);
      auto it = var_target.find(name);
      if (it != var_target.end()) {
        copy[n] = it->second;
        continue;
      }
    }
    copy[n] = b.placeholder();
    pending.push_back(n);
  }
  for (int n : pending) {
    const TermNode& src = t.node(n);
    if (src.is_var()) {
      b.fill_var(copy[n], src.var);
    } else {
      std::vector<int> kids;
      for (int k : src.kids) kids.push_back(copy.at(k));
      b.fill_fun(copy[n], src.sym, std::move(kids));
    }
  }
  return b.build(copy.at(t.root()));
}

std::vector<std::string> term_vars(const Term& t) {
  std::vector<std::string> out;
  std::set<int> seen_vars;
  for (int n : reachable(*t.graph(), t.root())) {
    const TermNode& node = t.node(n);
    if (node.is_var() && seen_vars.insert(node.var).second)
      out.push_back(t.sig()->variable_name(node.var));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimization and canonical keys

namespace {

// Quotient graph of the reachable part by bisimilarity, with blocks numbered
// in DFS-first-visit order from the root block. The result is the unique
// minimal representation, so serializing it yields a canonical key.
TermGraph quotient(const Term& t, int& root_out) {
  Partition p = refine(*t.graph(), t.root(), *t.graph(), t.root());
  const auto& blocks = p.block1;
  // representative node per block
  std::map<int, int> rep;
  for (int n : reachable(*t.graph(), t.root()))
    if (!rep.count(blocks[n])) rep[blocks[n]] = n;

  std::map<int, int> number;  // block -> canonical index (DFS preorder)
  std::vector<int> order;     // blocks in canonical order
  std::vector<std::pair<int, size_t>> dfs{{blocks[t.root()], 0}};
  number[blocks[t.root()]] = 0;
  order.push_back(blocks[t.root()]);
  while (!dfs.empty()) {
    auto& [blk, i] = dfs.back();
    const TermNode& r = t.node(rep[blk]);
    if (i == r.kids.size()) {
      dfs.pop_back();
      continue;
    }
    int kb = blocks[r.kids[i++]];
    if (!number.count(kb)) {
      number[kb] = static_cast<int>(order.size());
      order.push_back(kb);
      dfs.emplace_back(kb, 0);
    }
  }

  TermGraph g;
  for (int blk : order) {
    const TermNode& r = t.node(rep[blk]);
    TermNode n;
    n.sym = r.sym;
    n.var = r.var;
    for (int k : r.kids) n.kids.push_back(number.at(blocks[k]));
    g.nodes.push_back(std::move(n));
  }
  root_out = 0;
  return g;
}

}  // namespace

Term minimize(const Term& t) {
  int root;
  auto g = std::make_shared<TermGraph>(quotient(t, root));
  return Term(t.sig(), g, root);
}

std::string canonical_key(const Term& t) {
  int root;
  TermGraph g = quotient(t, root);
  std::ostringstream os;
  for (const auto& n : g.nodes) {
    if (n.is_var())
      os << 'v' << t.sig()->variable_name(n.var);
    else
      os << 'f' << t.sig()->symbol_name(n.sym);
    for (int k : n.kids) os << ' ' << k;
    os << ';';
  }
  return os.str();
}

}  // namespace irew
