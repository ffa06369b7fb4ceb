#include "irew/proof.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "irew/errors.hpp"

namespace irew {

const char* kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::ired: return "ired";
    case RelationKind::ibi: return "ibi";
    case RelationKind::ieq: return "ieq";
  }
  return "?";
}

std::optional<RelationKind> kind_from_name(const std::string& s) {
  if (s == "ired") return RelationKind::ired;
  if (s == "ibi") return RelationKind::ibi;
  if (s == "ieq") return RelationKind::ieq;
  return std::nullopt;
}

ProofCert::ProofCert(const ProofCert& o)
    : kind(o.kind), sig(o.sig), terms(o.terms), nodes(o.nodes), root(o.root) {
  validated_.store(o.validated());
}

ProofCert& ProofCert::operator=(const ProofCert& o) {
  kind = o.kind;
  sig = o.sig;
  terms = o.terms;
  nodes = o.nodes;
  root = o.root;
  validated_.store(o.validated());
  return *this;
}

namespace {

const std::vector<int>& successors(const ProofNode& n) {
  static const std::vector<int> none;
  switch (n.kind) {
    case ProofNode::Kind::split: return n.premises;
    case ProofNode::Kind::lift: return n.children;
    default: return none;
  }
}

std::vector<int> reachable_from_root(const ProofCert& cert) {
  std::vector<int> order;
  std::vector<char> seen(cert.nodes.size(), 0);
  std::vector<int> stack{cert.root};
  if (cert.root < 0 || cert.root >= static_cast<int>(cert.nodes.size()))
    return order;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    order.push_back(n);
    for (int s : successors(cert.nodes[n]))
      if (s >= 0 && s < static_cast<int>(cert.nodes.size()) && !seen[s])
        stack.push_back(s);
  }
  return order;
}

// Tarjan SCC over the node graph. Returns component id per node (reachable
// nodes only; others get -1) plus a flag whether the component is cyclic
// (nontrivial or self-looping).
struct SccResult {
  std::vector<int> comp;
  std::vector<char> cyclic;  // per component
  int count = 0;
};

SccResult scc(const ProofCert& cert) {
  int n = static_cast<int>(cert.nodes.size());
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0;

  // Iterative Tarjan.
  struct Frame {
    int node;
    size_t child = 0;
  };
  std::vector<Frame> call;
  auto reach = reachable_from_root(cert);
  for (int start : reach) {
    if (index[start] != -1) continue;
    call.push_back({start});
    index[start] = low[start] = next_index++;
    stack.push_back(start);
    on_stack[start] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = successors(cert.nodes[f.node]);
      if (f.child < succ.size()) {
        int w = succ[f.child++];
        if (w < 0 || w >= n) continue;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
      } else {
        if (low[f.node] == index[f.node]) {
          int c = res.count++;
          res.cyclic.push_back(0);
          int size = 0;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.comp[w] = c;
            ++size;
            if (w == f.node) break;
          }
          if (size > 1) res.cyclic[c] = 1;
        }
        int done = f.node;
        call.pop_back();
        if (!call.empty())
          low[call.back().node] = std::min(low[call.back().node], low[done]);
      }
    }
  }
  // Self-loops make a singleton component cyclic.
  for (int v : reach)
    for (int s : successors(cert.nodes[v]))
      if (s == v) res.cyclic[res.comp[v]] = 1;
  return res;
}

struct Checker {
  const ProofCert& cert;
  const Trs& trs;
  std::vector<Violation> violations;
  std::unordered_map<long long, bool> bisim_memo;

  Checker(const ProofCert& c, const Trs& t) : cert(c), trs(t) {}

  void add(int node, const std::string& clause, const std::string& msg) {
    violations.push_back({node, clause, msg});
  }

  bool term_ok(int id) const {
    return id >= 0 && id < static_cast<int>(cert.terms->nodes.size());
  }
  bool node_ok(int id) const {
    return id >= 0 && id < static_cast<int>(cert.nodes.size());
  }

  bool terms_bisim(int a, int b) {
    long long key = (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
    auto it = bisim_memo.find(key);
    if (it != bisim_memo.end()) return it->second;
    bool r = bisimilar(cert.term(a), cert.term(b));
    bisim_memo[key] = r;
    return r;
  }

  // Shape of the term table entries against the signature.
  void check_terms() {
    for (size_t i = 0; i < cert.terms->nodes.size(); ++i) {
      const TermNode& t = cert.terms->nodes[i];
      if (t.is_var()) {
        if (t.var < 0 || t.var >= static_cast<int>(cert.sig->variables().size()))
          add(cert.root, "wellformed", "term " + std::to_string(i) + " names an undeclared variable");
      } else {
        if (t.sym < 0 || t.sym >= static_cast<int>(cert.sig->symbols().size()) ||
            static_cast<int>(t.kids.size()) != cert.sig->arity(t.sym))
          add(cert.root, "wellformed", "term " + std::to_string(i) + " has a bad symbol or arity");
        for (int k : t.kids)
          if (!term_ok(k))
            add(cert.root, "wellformed", "term " + std::to_string(i) + " has a dangling child");
      }
    }
  }

  void check_node_refs(int id) {
    const ProofNode& n = cert.nodes[id];
    if (!term_ok(n.source) || !term_ok(n.target)) {
      add(id, "wellformed", "dangling term reference");
      return;
    }
    switch (n.kind) {
      case ProofNode::Kind::split:
        for (int p : n.premises)
          if (!node_ok(p)) add(id, "wellformed", "dangling premise");
        break;
      case ProofNode::Kind::lift:
        for (int c : n.children)
          if (!node_ok(c)) add(id, "wellformed", "dangling child");
        break;
      case ProofNode::Kind::root:
        if (n.rule < 0 || n.rule >= static_cast<int>(trs.rules.size()))
          add(id, "root-step", "rule index out of range");
        if (n.subst)
          for (const auto& [x, tid] : *n.subst) {
            if (cert.sig->variable_index(x) < 0)
              add(id, "wellformed", "substitution names undeclared variable " + x);
            if (!term_ok(tid))
              add(id, "wellformed", "substitution has dangling term");
          }
        break;
      case ProofNode::Kind::id:
        break;
    }
  }

  void check_root_node(int id) {
    const ProofNode& n = cert.nodes[id];
    if (n.rule < 0 || n.rule >= static_cast<int>(trs.rules.size())) return;
    if (n.reversed && cert.kind != RelationKind::ieq) {
      add(id, "kind", "reversed root step outside ieq");
      return;
    }
    const Rule& rule = trs.rules[n.rule];
    int lhs_side = n.reversed ? n.target : n.source;
    int rhs_side = n.reversed ? n.source : n.target;
    Substitution sigma;
    if (n.subst) {
      for (const auto& [x, tid] : *n.subst) {
        if (cert.sig->variable_index(x) < 0 || !term_ok(tid)) return;
        sigma.emplace(x, cert.term(tid));
      }
    } else {
      auto inferred = match_pattern(cert.term(lhs_side), rule.lhs);
      if (!inferred) {
        add(id, "root-step", "left-hand side does not match");
        return;
      }
      sigma = *inferred;
    }
    if (!bisimilar(substitute(rule.lhs, sigma), cert.term(lhs_side)))
      add(id, "root-step", "left-hand side instance differs");
    else if (!bisimilar(substitute(rule.rhs, sigma), cert.term(rhs_side)))
      add(id, "root-step", "right-hand side instance differs");
  }

  void check_lift_node(int id) {
    const ProofNode& n = cert.nodes[id];
    if (n.marked && cert.kind != RelationKind::ired) {
      add(id, "kind", "marked lift outside ired");
      return;
    }
    const TermNode& s = cert.terms->nodes[n.source];
    const TermNode& t = cert.terms->nodes[n.target];
    if (s.is_var() || t.is_var() || s.sym != t.sym) {
      add(id, "lift", "source and target do not share a head symbol");
      return;
    }
    if (n.children.size() != s.kids.size()) {
      add(id, "lift", "child count differs from arity");
      return;
    }
    for (size_t i = 0; i < n.children.size(); ++i) {
      const ProofNode& c = cert.nodes[n.children[i]];
      if (!term_ok(c.source) || !term_ok(c.target)) continue;
      if (!terms_bisim(c.source, s.kids[i]) || !terms_bisim(c.target, t.kids[i])) {
        add(id, "lift", "child " + std::to_string(i + 1) + " does not connect the arguments");
        return;
      }
    }
  }

  void check_id_node(int id) {
    const ProofNode& n = cert.nodes[id];
    if (!terms_bisim(n.source, n.target))
      add(id, "id", "source and target are not bisimilar");
  }

  void check_split_node(int id) {
    const ProofNode& n = cert.nodes[id];
    if (n.premises.empty()) {
      if (!terms_bisim(n.source, n.target))
        add(id, "split-chain", "empty split with non-bisimilar endpoints");
      return;
    }
    for (int p : n.premises) {
      if (cert.nodes[p].kind == ProofNode::Kind::split) {
        add(id, "split-chain", "split premise is itself a split");
        return;
      }
    }
    int prev_target = n.source;
    for (size_t i = 0; i < n.premises.size(); ++i) {
      const ProofNode& p = cert.nodes[n.premises[i]];
      if (!terms_bisim(prev_target, p.source)) {
        add(id, "split-chain", "premise " + std::to_string(i + 1) + " does not chain");
        return;
      }
      prev_target = p.target;
    }
    if (!terms_bisim(prev_target, n.target))
      add(id, "split-chain", "last premise misses the target");

    if (cert.kind == RelationKind::ired) {
      for (size_t i = 0; i + 1 < n.premises.size(); ++i) {
        const ProofNode& p = cert.nodes[n.premises[i]];
        if (p.kind == ProofNode::Kind::lift && !p.marked)
          add(id, "split-marks", "non-final lift premise is unmarked");
      }
      const ProofNode& last = cert.nodes[n.premises.back()];
      if (last.kind == ProofNode::Kind::lift && last.marked)
        add(id, "split-marks", "final lift premise is marked");
    }
  }

  ValidationResult run() {
    cert.set_validated(false);
    if (!node_ok(cert.root)) {
      return {Violation{0, "wellformed", "root node missing"}};
    }
    check_terms();
    auto reach = reachable_from_root(cert);
    std::vector<char> reached(cert.nodes.size(), 0);
    for (int r : reach) reached[r] = 1;
    for (size_t i = 0; i < cert.nodes.size(); ++i)
      if (!reached[i])
        add(static_cast<int>(i), "unreachable", "node not reachable from root");
    for (int id : reach) check_node_refs(id);
    if (!violations.empty()) return finish();

    for (int id : reach) {
      switch (cert.nodes[id].kind) {
        case ProofNode::Kind::root: check_root_node(id); break;
        case ProofNode::Kind::lift: check_lift_node(id); break;
        case ProofNode::Kind::id: check_id_node(id); break;
        case ProofNode::Kind::split: check_split_node(id); break;
      }
    }

    if (cert.kind == RelationKind::ired) {
      // Marked lifts may only stand in non-final split premise slots. Final
      // slots are covered per split above; root and lift-child references
      // are rejected here.
      for (int id : reach) {
        const ProofNode& n = cert.nodes[id];
        if (n.kind != ProofNode::Kind::lift) continue;
        for (int c : n.children) {
          const ProofNode& ch = cert.nodes[c];
          if (ch.kind == ProofNode::Kind::lift && ch.marked)
            add(c, "split-marks", "marked lift as a lift child");
        }
      }
      {
        const ProofNode& rn = cert.nodes[cert.root];
        if (rn.kind == ProofNode::Kind::lift && rn.marked)
          add(cert.root, "split-marks", "marked lift at the certificate root");
      }
      // The nesting restriction on regular graphs: no marked lift on a cycle.
      auto comps = scc(cert);
      for (int id : reach) {
        const ProofNode& n = cert.nodes[id];
        if (n.kind == ProofNode::Kind::lift && n.marked &&
            comps.cyclic[comps.comp[id]])
          add(id, "mark-cycle", "marked Lift on cycle");
      }
    }
    return finish();
  }

  ValidationResult finish() {
    if (violations.empty()) {
      cert.set_validated(true);
      return {};
    }
    auto best = std::min_element(
        violations.begin(), violations.end(), [](const Violation& a, const Violation& b) {
          return a.node != b.node ? a.node < b.node : a.clause < b.clause;
        });
    return {*best};
  }
};

}  // namespace

ValidationResult check_valid(const ProofCert& cert, const Trs& trs) {
  Checker c(cert, trs);
  return c.run();
}

bool is_canonical(const ProofCert& cert) {
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "is_canonical expects an ired certificate");
  if (!cert.validated())
    throw error(errc::not_validated, "run check_valid first");

  auto reach = reachable_from_root(cert);
  for (int id : reach) {
    const ProofNode& n = cert.nodes[id];
    if (n.kind == ProofNode::Kind::id) {
      const TermNode& s = cert.terms->nodes[n.source];
      const TermNode& t = cert.terms->nodes[n.target];
      if (!s.is_var() || !t.is_var() || s.var != t.var) return false;
    }
    if (n.kind != ProofNode::Kind::split) continue;
    const auto& ps = n.premises;
    size_t len = ps.size();
    if (len == 0) return false;
    // Complete the list by reading a lone root as (identity lift ; root),
    // then match (marked lift ; root)* followed by one final element.
    size_t i = 0;
    while (i + 1 < len) {
      const ProofNode& p = cert.nodes[ps[i]];
      if (p.kind == ProofNode::Kind::lift && p.marked) {
        if (cert.nodes[ps[i + 1]].kind != ProofNode::Kind::root) return false;
        i += 2;
      } else if (p.kind == ProofNode::Kind::root) {
        i += 1;
      } else {
        return false;
      }
    }
    if (i != len - 1) return false;
    const ProofNode& last = cert.nodes[ps[len - 1]];
    if (last.kind == ProofNode::Kind::lift) {
      if (last.marked) return false;
    } else if (last.kind == ProofNode::Kind::id) {
      // variable id, verified above
    } else {
      return false;
    }
  }
  return true;
}

ProofCert forget_marks(const ProofCert& cert) {
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "forget_marks expects an ired certificate");
  ProofCert out(cert);
  out.kind = RelationKind::ibi;
  for (auto& n : out.nodes) n.marked = false;
  out.set_validated(cert.validated());
  return out;
}

ProofCert embed_ieq(const ProofCert& cert) {
  if (cert.kind != RelationKind::ibi)
    throw error(errc::wrong_kind, "embed_ieq expects an ibi certificate");
  ProofCert out(cert);
  out.kind = RelationKind::ieq;
  out.set_validated(cert.validated());
  return out;
}

// ---------------------------------------------------------------------------
// Canonical serialization (bisimulation-complete equality of certificates)

namespace {

std::string node_label(const ProofCert& cert,
                       const std::vector<std::string>& term_keys, int id) {
  const ProofNode& n = cert.nodes[id];
  std::ostringstream os;
  switch (n.kind) {
    case ProofNode::Kind::split: os << 's'; break;
    case ProofNode::Kind::lift: os << (n.marked ? 'm' : 'l'); break;
    case ProofNode::Kind::id: os << 'i'; break;
    case ProofNode::Kind::root: os << (n.reversed ? 'R' : 'r') << n.rule; break;
  }
  os << '[' << term_keys[n.source] << '|' << term_keys[n.target] << ']';
  return os.str();
}

}  // namespace

std::string cert_canonical_key(const ProofCert& cert) {
  auto reach = reachable_from_root(cert);
  std::vector<std::string> term_keys(cert.terms->nodes.size());
  std::set<int> used_terms;
  for (int id : reach) {
    used_terms.insert(cert.nodes[id].source);
    used_terms.insert(cert.nodes[id].target);
  }
  for (int t : used_terms) term_keys[t] = canonical_key(cert.term(t));

  // Partition refinement over nodes with (label, successor blocks).
  std::map<std::string, int> label_block;
  std::unordered_map<int, int> assign;
  for (int id : reach) {
    std::string lab = node_label(cert, term_keys, id);
    auto it = label_block.find(lab);
    if (it == label_block.end())
      it = label_block.emplace(lab, static_cast<int>(label_block.size())).first;
    assign[id] = it->second;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::vector<int>, int> sig_block;
    std::unordered_map<int, int> next;
    for (int id : reach) {
      std::vector<int> sig{assign[id]};
      for (int s : successors(cert.nodes[id])) sig.push_back(assign[s]);
      auto it = sig_block.find(sig);
      if (it == sig_block.end())
        it = sig_block.emplace(sig, static_cast<int>(sig_block.size())).first;
      next[id] = it->second;
    }
    for (int id : reach)
      if (next[id] != assign[id]) changed = true;
    assign = std::move(next);
  }

  // Canonical numbering by DFS preorder over the quotient.
  std::map<int, int> rep;
  for (int id : reach)
    if (!rep.count(assign[id])) rep[assign[id]] = id;
  std::map<int, int> number;
  std::vector<int> order;
  std::vector<std::pair<int, size_t>> dfs{{assign[cert.root], 0}};
  number[assign[cert.root]] = 0;
  order.push_back(assign[cert.root]);
  while (!dfs.empty()) {
    auto& [blk, i] = dfs.back();
    const auto& succ = successors(cert.nodes[rep[blk]]);
    if (i == succ.size()) {
      dfs.pop_back();
      continue;
    }
    int nb = assign[succ[i++]];
    if (!number.count(nb)) {
      number[nb] = static_cast<int>(order.size());
      order.push_back(nb);
      dfs.emplace_back(nb, 0);
    }
  }

  std::ostringstream os;
  os << kind_name(cert.kind) << '!';
  for (int blk : order) {
    int id = rep[blk];
    os << node_label(cert, term_keys, id);
    for (int s : successors(cert.nodes[id])) os << ' ' << number.at(assign[s]);
    os << ';';
  }
  return os.str();
}

bool cert_equal(const ProofCert& a, const ProofCert& b) {
  if (a.kind != b.kind) return false;
  return cert_canonical_key(a) == cert_canonical_key(b);
}

int mark_nesting_depth(const ProofCert& cert) {
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "mark_nesting_depth expects ired");
  if (!cert.validated())
    throw error(errc::not_validated, "run check_valid first");
  auto comps = scc(cert);
  auto reach = reachable_from_root(cert);
  // Longest path in the condensation DAG, counting marked lifts.
  std::vector<int> weight(comps.count, 0);
  std::vector<std::set<int>> succ(comps.count);
  for (int id : reach) {
    const ProofNode& n = cert.nodes[id];
    if (n.kind == ProofNode::Kind::lift && n.marked) weight[comps.comp[id]]++;
    for (int s : successors(n))
      if (comps.comp[s] != comps.comp[id]) succ[comps.comp[id]].insert(comps.comp[s]);
  }
  std::vector<int> depth(comps.count, -1);
  std::function<int(int)> dp = [&](int c) -> int {
    if (depth[c] >= 0) return depth[c];
    int best = 0;
    for (int s : succ[c]) best = std::max(best, dp(s));
    depth[c] = weight[c] + best;
    return depth[c];
  };
  return dp(comps.comp[cert.root]);
}

// ---------------------------------------------------------------------------
// CertBuilder

CertBuilder::CertBuilder(RelationKind kind, SignaturePtr sig)
    : kind_(kind), sig_(sig), terms_(sig) {}

int CertBuilder::intern(const Term& t) {
  std::string key = canonical_key(t);
  auto it = term_memo_.find(key);
  if (it != term_memo_.end()) return it->second;
  int id = terms_.graft(t);
  term_memo_.emplace(std::move(key), id);
  return id;
}

int CertBuilder::add_split(int source, int target, std::vector<int> premises) {
  ProofNode n;
  n.kind = ProofNode::Kind::split;
  n.source = source;
  n.target = target;
  n.premises = std::move(premises);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int CertBuilder::add_lift(int source, int target, bool marked,
                          std::vector<int> children) {
  ProofNode n;
  n.kind = ProofNode::Kind::lift;
  n.source = source;
  n.target = target;
  n.marked = marked;
  n.children = std::move(children);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int CertBuilder::add_id(int source, int target) {
  ProofNode n;
  n.kind = ProofNode::Kind::id;
  n.source = source;
  n.target = target;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int CertBuilder::add_root(int source, int target, int rule,
                          std::optional<std::map<std::string, int>> subst,
                          bool reversed) {
  ProofNode n;
  n.kind = ProofNode::Kind::root;
  n.source = source;
  n.target = target;
  n.rule = rule;
  n.subst = std::move(subst);
  n.reversed = reversed;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int CertBuilder::placeholder() {
  ProofNode n;
  n.kind = ProofNode::Kind::split;
  n.source = -1;  // marks the node as unfilled
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void CertBuilder::fill_split(int id, int source, int target,
                             std::vector<int> premises) {
  nodes_[id].kind = ProofNode::Kind::split;
  nodes_[id].source = source;
  nodes_[id].target = target;
  nodes_[id].premises = std::move(premises);
}

void CertBuilder::fill_lift(int id, int source, int target, bool marked,
                            std::vector<int> children) {
  nodes_[id].kind = ProofNode::Kind::lift;
  nodes_[id].source = source;
  nodes_[id].target = target;
  nodes_[id].marked = marked;
  nodes_[id].children = std::move(children);
}

Term CertBuilder::term(int id) const {
  return Term(sig_, terms_.snapshot(), id);
}

ProofCert CertBuilder::build(int root) const {
  // Keep only nodes reachable from the root; abandoned placeholders from
  // backtracking producers are dropped.
  std::vector<int> order;
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (n < 0 || n >= static_cast<int>(nodes_.size()) || seen[n]) continue;
    seen[n] = 1;
    order.push_back(n);
    const ProofNode& pn = nodes_[n];
    if (pn.source < 0)
      throw error(errc::format, "unfilled certificate node reachable from root");
    for (int s : pn.premises) stack.push_back(s);
    for (int s : pn.children) stack.push_back(s);
  }
  std::map<int, int> remap;
  for (int n : order) remap.emplace(n, static_cast<int>(remap.size()));

  ProofCert cert;
  cert.kind = kind_;
  cert.sig = sig_;
  cert.terms = terms_.snapshot();
  cert.nodes.reserve(order.size());
  for (int n : order) {
    ProofNode copy = nodes_[n];
    for (auto& p : copy.premises) p = remap.at(p);
    for (auto& c : copy.children) c = remap.at(c);
    cert.nodes.push_back(std::move(copy));
  }
  cert.root = remap.at(root);
  return cert;
}

}  // namespace irew
