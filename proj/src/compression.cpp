#include "irew/compression.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "irew/errors.hpp"
#include "json.hpp"
#include "json_util.hpp"
#include "stream_sched.hpp"

namespace irew {

OredCert::OredCert(const OredCert& o)
    : sig(o.sig), terms(o.terms), nodes(o.nodes), root(o.root) {
  validated_.store(o.validated());
}

OredCert& OredCert::operator=(const OredCert& o) {
  sig = o.sig;
  terms = o.terms;
  nodes = o.nodes;
  root = o.root;
  validated_.store(o.validated());
  return *this;
}

std::size_t ored_size(const OredCert& cert) {
  std::vector<char> seen(cert.nodes.size(), 0);
  std::vector<int> stack{cert.root};
  std::size_t count = 0;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (n < 0 || n >= static_cast<int>(cert.nodes.size()) || seen[n]) continue;
    seen[n] = 1;
    ++count;
    for (int c : cert.nodes[n].children) stack.push_back(c);
  }
  return count;
}

// ---------------------------------------------------------------------------
// Validation

OredValidation validate_ored(const OredCert& cert, const Trs& trs) {
  cert.set_validated(false);
  auto term_ok = [&](int id) {
    return id >= 0 && id < static_cast<int>(cert.terms->nodes.size());
  };
  std::optional<OredViolation> worst;
  auto add = [&](int node, const std::string& msg) {
    if (!worst || node < worst->node) worst = OredViolation{node, msg};
  };
  if (cert.root < 0 || cert.root >= static_cast<int>(cert.nodes.size()))
    return {OredViolation{0, "root node missing"}};

  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const OredNode& n = cert.nodes[i];
    int id = static_cast<int>(i);
    if (!term_ok(n.source) || !term_ok(n.target)) {
      add(id, "dangling term reference");
      continue;
    }
    for (int c : n.children)
      if (c < 0 || c >= static_cast<int>(cert.nodes.size())) {
        add(id, "dangling child");
        continue;
      }
    Term mid;
    try {
      mid = replay({cert.term(n.source), n.prefix}, trs);
    } catch (const error& e) {
      add(id, std::string("prefix does not replay: ") + e.what());
      continue;
    }
    if (!n.has_lift) {
      if (!bisimilar(mid, cert.term(n.target)))
        add(id, "prefix does not end at the target");
      continue;
    }
    const TermNode& m = mid.root_node();
    const TermNode& t = cert.terms->nodes[n.target];
    if (m.is_var() || t.is_var() || m.sym != n.head || t.sym != n.head) {
      add(id, "lift head differs from the terms");
      continue;
    }
    if (static_cast<int>(n.children.size()) != cert.sig->arity(n.head)) {
      add(id, "lift child count differs from arity");
      continue;
    }
    for (size_t k = 0; k < n.children.size(); ++k) {
      const OredNode& c = cert.nodes[n.children[k]];
      if (!term_ok(c.source) || !term_ok(c.target)) continue;
      if (!bisimilar(cert.term(c.source), Term(mid.sig(), mid.graph(), m.kids[k])) ||
          !bisimilar(cert.term(c.target), cert.term(t.kids[k]))) {
        add(id, "child " + std::to_string(k + 1) + " does not connect the arguments");
        break;
      }
    }
  }
  if (worst) return {worst};
  cert.set_validated(true);
  return {};
}

// ---------------------------------------------------------------------------
// Construction workspace

namespace {

struct BNode {
  Term source, target;
  Term mid;  // replay end of the prefix
  std::vector<Step> prefix;
  bool has_lift = false;
  int head = -1;
  std::vector<int> children;
  bool filled = false;
};

std::string steps_fingerprint(const std::vector<Step>& steps) {
  std::ostringstream os;
  for (const auto& s : steps)
    os << position_to_string(s.pos) << ',' << s.rule << ';';
  return os.str();
}

struct OredBuilder {
  const Trs& trs;
  SignaturePtr sig;
  std::size_t cap;
  std::vector<BNode> nodes;
  std::map<std::string, int> cons;        // content fingerprint -> node
  std::map<std::string, int> refl_memo;   // term key -> node
  std::map<int, int> strip_memo;

  OredBuilder(const Trs& t, SignaturePtr s, std::size_t c)
      : trs(t), sig(std::move(s)), cap(c) {}

  int alloc() {
    if (nodes.size() >= cap)
      throw error(errc::resource_exceeded,
                  "compression graph exceeded " + std::to_string(cap) + " nodes");
    nodes.emplace_back();
    return static_cast<int>(nodes.size()) - 1;
  }

  std::string fingerprint(const BNode& n) const {
    std::ostringstream os;
    os << canonical_key(n.source) << '|' << canonical_key(n.target) << '|'
       << steps_fingerprint(n.prefix) << '|';
    if (n.has_lift) {
      os << n.head;
      for (int c : n.children) os << ' ' << c;
    }
    return os.str();
  }

  int cons_node(BNode n) {
    n.filled = true;
    std::string key = fingerprint(n);
    auto it = cons.find(key);
    if (it != cons.end()) return it->second;
    int id = alloc();
    nodes[id] = std::move(n);
    cons.emplace(std::move(key), id);
    return id;
  }

  int refl(const Term& t) {
    std::string key = canonical_key(t);
    auto it = refl_memo.find(key);
    if (it != refl_memo.end()) return it->second;
    BNode n;
    n.source = n.target = n.mid = t;
    int id = cons_node(std::move(n));
    refl_memo.emplace(std::move(key), id);
    return id;
  }

  // Drops the prefix, leaving the lift part from the mid term.
  int strip(int o) {
    if (nodes[o].prefix.empty()) return o;
    auto it = strip_memo.find(o);
    if (it != strip_memo.end()) return it->second;
    BNode n;
    n.source = nodes[o].mid;
    n.target = nodes[o].target;
    n.mid = nodes[o].mid;
    n.has_lift = nodes[o].has_lift;
    n.head = nodes[o].head;
    n.children = nodes[o].children;
    int id = cons_node(std::move(n));
    strip_memo.emplace(o, id);
    return id;
  }

  // Argument-wise views of the part behind the prefix: either the lift
  // children or fresh reflexive nodes over the mid term.
  std::vector<int> lift_children_of(int o, int expected_head) {
    const BNode& n = nodes[o];
    const TermNode& m = n.mid.root_node();
    if (m.is_var() || m.sym != expected_head)
      throw error(errc::format, "certificate claim does not fit the head symbol");
    if (n.has_lift) {
      if (n.head != expected_head)
        throw error(errc::format, "certificate claim does not fit the head symbol");
      return n.children;
    }
    std::vector<int> kids;
    for (int k : m.kids) kids.push_back(refl(Term(n.mid.sig(), n.mid.graph(), k)));
    return kids;
  }

  // Splits a value at a finite linear pattern: a finite reduction from the
  // value's source to an instance of the pattern, plus residual values for
  // the pattern's variables. Nullopt signals a claim that does not fit.
  std::optional<std::pair<std::vector<Step>, std::map<std::string, int>>>
  match_split(int o, const Term& pattern) {
    if (pattern.is_var()) {
      std::map<std::string, int> res;
      res.emplace(pattern.sig()->variable_name(pattern.root_node().var), o);
      return std::make_pair(std::vector<Step>{}, std::move(res));
    }
    const BNode& n = nodes[o];
    const TermNode& p = pattern.root_node();
    const TermNode& m = n.mid.root_node();
    if (m.is_var() || m.sym != p.sym) return std::nullopt;
    std::vector<int> kids;
    if (n.has_lift) {
      kids = n.children;
    } else {
      for (int k : m.kids) kids.push_back(refl(Term(n.mid.sig(), n.mid.graph(), k)));
    }
    std::vector<Step> steps = n.prefix;
    std::map<std::string, int> res;
    for (size_t i = 0; i < p.kids.size(); ++i) {
      Term sub(pattern.sig(), pattern.graph(), p.kids[i]);
      auto part = match_split_child(kids[i], sub);
      if (!part) return std::nullopt;
      for (Step s : part->first) {
        s.pos.insert(s.pos.begin(), static_cast<int>(i) + 1);
        steps.push_back(std::move(s));
      }
      for (auto& [x, node] : part->second) res.emplace(x, node);
    }
    return std::make_pair(std::move(steps), std::move(res));
  }

  std::optional<std::pair<std::vector<Step>, std::map<std::string, int>>>
  match_split_child(int o, const Term& pattern) {
    if (pattern.is_var()) {
      // The child is taken as the residual without unfolding it.
      std::map<std::string, int> res;
      res.emplace(pattern.sig()->variable_name(pattern.root_node().var), o);
      return std::make_pair(std::vector<Step>{}, std::move(res));
    }
    return match_split(o, pattern);
  }

  // Value for an instantiated right-hand side, with residual values wired at
  // the variables. Cycles in the rhs become cycles here.
  int subst_ored(const Term& rhs, const std::map<std::string, int>& residuals,
                 std::map<int, int>& memo) {
    const TermNode& r = rhs.root_node();
    if (r.is_var()) {
      auto it = residuals.find(rhs.sig()->variable_name(r.var));
      if (it == residuals.end())
        throw error(errc::format, "right-hand side variable without residual");
      return it->second;
    }
    auto hit = memo.find(rhs.root());
    if (hit != memo.end()) return hit->second;
    if (term_vars(rhs).empty()) {
      int id = refl(rhs);
      memo.emplace(rhs.root(), id);
      return id;
    }
    Substitution tau_hat, sigma_hat;
    for (const auto& [x, node] : residuals) {
      tau_hat.emplace(x, nodes[node].source);
      sigma_hat.emplace(x, nodes[node].target);
    }
    int id = alloc();
    memo.emplace(rhs.root(), id);
    std::vector<int> kids;
    for (int k : r.kids)
      kids.push_back(subst_ored(Term(rhs.sig(), rhs.graph(), k), residuals, memo));
    BNode& n = nodes[id];
    n.source = substitute(rhs, tau_hat);
    n.target = substitute(rhs, sigma_hat);
    n.mid = n.source;
    n.has_lift = true;
    n.head = r.sym;
    n.children = std::move(kids);
    n.filled = true;
    return id;
  }

  // Prepend a finite reduction to a value.
  int fuse(const Term& source, std::vector<Step> steps, int tail) {
    if (steps.empty()) return tail;
    const BNode& t = nodes[tail];
    BNode n;
    n.source = source;
    n.target = t.target;
    n.mid = t.mid;
    n.prefix = std::move(steps);
    n.prefix.insert(n.prefix.end(), t.prefix.begin(), t.prefix.end());
    n.has_lift = t.has_lift;
    n.head = t.head;
    n.children = t.children;
    return cons_node(std::move(n));
  }

  // Absorb a root step into a value.
  int rstep(int o, int rule_index) {
    const Rule& rule = trs.rules[rule_index];
    auto ms = match_split(o, rule.lhs);
    if (!ms)
      throw error(errc::format, "root step does not fit the compressed value");
    auto& [steps, residuals] = *ms;
    Substitution tau_hat;
    for (const auto& [x, node] : residuals)
      tau_hat.emplace(x, nodes[node].source);
    Step root;
    root.rule = rule_index;
    root.subst = tau_hat;
    steps.push_back(std::move(root));
    std::map<int, int> memo;
    int tail = subst_ored(rule.rhs, residuals, memo);
    return fuse(nodes[o].source, std::move(steps), tail);
  }
};

struct Compressor {
  const ProofCert& cert;
  OredBuilder b;
  // (certificate node, context value) -> result value; entries for splits
  // and lifts are allocated before descending so cycles close on them.
  std::map<std::pair<int, int>, int> memo;

  Compressor(const ProofCert& c, const Trs& trs, std::size_t cap)
      : cert(c), b(trs, c.sig, cap) {}

  int process(int node, int ctx) {
    auto key = std::make_pair(node, ctx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const ProofNode& n = cert.nodes[node];
    switch (n.kind) {
      case ProofNode::Kind::id: {
        memo.emplace(key, ctx);
        return ctx;
      }
      case ProofNode::Kind::root: {
        int r = b.rstep(ctx, n.rule);
        memo.emplace(key, r);
        return r;
      }
      case ProofNode::Kind::split: {
        int slot = b.alloc();
        memo.emplace(key, slot);
        int cur = ctx;
        for (int p : n.premises) cur = process(p, cur);
        b.nodes[slot] = b.nodes[cur];
        b.nodes[slot].filled = true;
        return slot;
      }
      case ProofNode::Kind::lift: {
        int slot = b.alloc();
        memo.emplace(key, slot);
        const TermNode& src = cert.terms->nodes[n.source];
        std::vector<int> ctx_kids = b.lift_children_of(ctx, src.sym);
        std::vector<int> kids;
        for (size_t i = 0; i < n.children.size(); ++i)
          kids.push_back(process(n.children[i], ctx_kids[i]));
        BNode& out = b.nodes[slot];
        out.source = b.nodes[ctx].source;
        out.target = cert.term(n.target);
        out.mid = b.nodes[ctx].mid;
        out.prefix = b.nodes[ctx].prefix;
        out.has_lift = true;
        out.head = src.sym;
        out.children = std::move(kids);
        out.filled = true;
        return slot;
      }
    }
    throw error(errc::format, "unknown node kind");
  }
};

// Quotient of the workspace graph by bisimilarity, emitted as an OredCert.
OredCert emit(const OredBuilder& b, int root, const SignaturePtr& sig) {
  // Reachable nodes.
  std::vector<int> reach;
  std::map<int, int> seen;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (seen.count(n)) continue;
    seen.emplace(n, 0);
    reach.push_back(n);
    for (int c : b.nodes[n].children) stack.push_back(c);
  }

  // Partition refinement with content labels.
  std::map<int, int> assign;
  {
    std::map<std::string, int> label_block;
    for (int id : reach) {
      const BNode& n = b.nodes[id];
      std::ostringstream os;
      os << canonical_key(n.source) << '|' << canonical_key(n.target) << '|'
         << steps_fingerprint(n.prefix) << '|' << (n.has_lift ? n.head : -1);
      auto it = label_block.find(os.str());
      if (it == label_block.end())
        it = label_block.emplace(os.str(), static_cast<int>(label_block.size())).first;
      assign[id] = it->second;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::vector<int>, int> sig_block;
      std::map<int, int> next;
      for (int id : reach) {
        std::vector<int> s{assign[id]};
        for (int c : b.nodes[id].children) s.push_back(assign[c]);
        auto it = sig_block.find(s);
        if (it == sig_block.end())
          it = sig_block.emplace(s, static_cast<int>(sig_block.size())).first;
        next[id] = it->second;
      }
      for (int id : reach)
        if (next[id] != assign[id]) changed = true;
      assign = std::move(next);
    }
  }

  std::map<int, int> rep;  // block -> representative workspace node
  for (int id : reach)
    if (!rep.count(assign[id])) rep.emplace(assign[id], id);
  // Canonical numbering: DFS preorder over the quotient.
  std::map<int, int> number;
  std::vector<int> order;
  std::vector<std::pair<int, size_t>> dfs{{assign[root], 0}};
  number[assign[root]] = 0;
  order.push_back(assign[root]);
  while (!dfs.empty()) {
    auto& [blk, i] = dfs.back();
    const auto& kids = b.nodes[rep[blk]].children;
    if (i == kids.size()) {
      dfs.pop_back();
      continue;
    }
    int nb = assign[kids[i++]];
    if (!number.count(nb)) {
      number[nb] = static_cast<int>(order.size());
      order.push_back(nb);
      dfs.emplace_back(nb, 0);
    }
  }

  OredCert out;
  out.sig = sig;
  TermBuilder terms(sig);
  std::map<std::string, int> term_memo;
  auto intern = [&](const Term& t) {
    std::string key = canonical_key(t);
    auto it = term_memo.find(key);
    if (it != term_memo.end()) return it->second;
    int id = terms.graft(t);
    term_memo.emplace(std::move(key), id);
    return id;
  };
  for (int blk : order) {
    const BNode& src = b.nodes[rep[blk]];
    OredNode n;
    n.source = intern(src.source);
    n.target = intern(src.target);
    n.prefix = src.prefix;
    n.has_lift = src.has_lift;
    n.head = src.head;
    for (int c : src.children) n.children.push_back(number.at(assign[c]));
    out.nodes.push_back(std::move(n));
  }
  out.terms = terms.snapshot();
  out.root = 0;
  return out;
}

}  // namespace

OredCert compress(const ProofCert& cert, const Trs& trs, std::size_t max_nodes) {
  if (!is_left_linear(trs))
    throw error(errc::not_left_linear, "compression needs a left-linear system");
  if (cert.kind != RelationKind::ired)
    throw error(errc::wrong_kind, "compress expects an ired certificate");
  if (!cert.validated())
    throw error(errc::not_validated, "run check_valid first");

  Compressor comp(cert, trs, max_nodes);
  int ctx = comp.b.refl(cert.term(cert.nodes[cert.root].source));
  int result = comp.process(cert.root, ctx);
  return emit(comp.b, result, cert.sig);
}

std::optional<OredMatchSplit> ored_match_split(const OredCert& cert, int node,
                                               const Term& pattern,
                                               const Trs& trs) {
  if (!cert.validated())
    throw error(errc::not_validated, "run validate_ored first");
  bool linear = true;
  {
    std::map<std::string, int> uses;
    std::vector<int> stack{pattern.root()};
    while (!stack.empty() && linear) {
      int n = stack.back();
      stack.pop_back();
      const TermNode& node = pattern.node(n);
      if (node.is_var()) {
        if (++uses[pattern.sig()->variable_name(node.var)] > 1) linear = false;
      } else {
        for (int k : node.kids) stack.push_back(k);
      }
    }
  }
  if (!pattern.finite() || !linear)
    throw error(errc::format, "pattern must be finite and linear");

  OredBuilder b(trs, cert.sig, 1000000);
  // Import the certificate, ids preserved.
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const OredNode& n = cert.nodes[i];
    int id = b.alloc();
    BNode& w = b.nodes[id];
    w.source = cert.term(n.source);
    w.target = cert.term(n.target);
    w.prefix = n.prefix;
    w.mid = replay({w.source, w.prefix}, trs);
    w.has_lift = n.has_lift;
    w.head = n.head;
    w.children = n.children;
    w.filled = true;
  }
  auto ms = b.match_split(node, pattern);
  if (!ms) return std::nullopt;

  OredMatchSplit out;
  out.reduction.source = b.nodes[node].source;
  out.reduction.steps = ms->first;
  out.residuals = ms->second;
  // Emit the extended graph with workspace ids preserved.
  OredCert ext;
  ext.sig = cert.sig;
  TermBuilder terms(cert.sig);
  for (const auto& w : b.nodes) {
    OredNode n;
    n.source = terms.graft(w.source);
    n.target = terms.graft(w.target);
    n.prefix = w.prefix;
    n.has_lift = w.has_lift;
    n.head = w.head;
    n.children = w.children;
    ext.nodes.push_back(std::move(n));
  }
  ext.terms = terms.snapshot();
  ext.root = cert.root;
  out.extended = std::move(ext);
  return out;
}

// ---------------------------------------------------------------------------
// Linearization

FiniteReduction linearize(const OredCert& cert, std::uint64_t k) {
  if (!cert.validated())
    throw error(errc::not_validated, "run validate_ored first");
  StreamGraph g;
  g.nodes.resize(cert.nodes.size());
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const OredNode& n = cert.nodes[i];
    StreamNode& s = g.nodes[i];
    s.own = n.prefix;
    s.dovetail = true;
    for (size_t c = 0; c < n.children.size(); ++c)
      s.children.emplace_back(n.children[c], static_cast<int>(c) + 1);
  }
  FiniteReduction red;
  red.source = cert.term(cert.nodes[cert.root].source);
  red.steps = pull_stream(g, cert.root, k);
  return red;
}

// ---------------------------------------------------------------------------
// Equality (graph bisimilarity) via canonical serialization

namespace {

std::string ored_canonical_key(const OredCert& cert) {
  std::vector<int> reach;
  std::vector<char> seen(cert.nodes.size(), 0);
  std::vector<int> stack{cert.root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    reach.push_back(n);
    for (int c : cert.nodes[n].children) stack.push_back(c);
  }
  auto label = [&](int id) {
    const OredNode& n = cert.nodes[id];
    std::ostringstream os;
    os << canonical_key(cert.term(n.source)) << '|'
       << canonical_key(cert.term(n.target)) << '|'
       << steps_fingerprint(n.prefix) << '|' << (n.has_lift ? n.head : -1);
    return os.str();
  };
  std::map<int, int> assign;
  {
    std::map<std::string, int> blocks;
    for (int id : reach) {
      std::string l = label(id);
      auto it = blocks.find(l);
      if (it == blocks.end())
        it = blocks.emplace(l, static_cast<int>(blocks.size())).first;
      assign[id] = it->second;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::vector<int>, int> blocks;
    std::map<int, int> next;
    for (int id : reach) {
      std::vector<int> s{assign[id]};
      for (int c : cert.nodes[id].children) s.push_back(assign[c]);
      auto it = blocks.find(s);
      if (it == blocks.end())
        it = blocks.emplace(s, static_cast<int>(blocks.size())).first;
      next[id] = it->second;
    }
    for (int id : reach)
      if (next[id] != assign[id]) changed = true;
    assign = std::move(next);
  }
  std::map<int, int> rep, number;
  for (int id : reach)
    if (!rep.count(assign[id])) rep.emplace(assign[id], id);
  std::vector<int> order;
  std::vector<std::pair<int, size_t>> dfs{{assign[cert.root], 0}};
  number[assign[cert.root]] = 0;
  order.push_back(assign[cert.root]);
  while (!dfs.empty()) {
    auto& [blk, i] = dfs.back();
    const auto& kids = cert.nodes[rep[blk]].children;
    if (i == kids.size()) {
      dfs.pop_back();
      continue;
    }
    int nb = assign[kids[i++]];
    if (!number.count(nb)) {
      number[nb] = static_cast<int>(order.size());
      order.push_back(nb);
      dfs.emplace_back(nb, 0);
    }
  }
  std::ostringstream os;
  for (int blk : order) {
    os << label(rep[blk]);
    for (int c : cert.nodes[rep[blk]].children) os << ' ' << number.at(assign[c]);
    os << ';';
  }
  return os.str();
}

}  // namespace

bool ored_equal(const OredCert& a, const OredCert& b) {
  return ored_canonical_key(a) == ored_canonical_key(b);
}

// ---------------------------------------------------------------------------
// Files

namespace {

using nlohmann::json;

json step_to_json(const Step& s) {
  json e;
  e["pos"] = s.pos;
  e["rule"] = s.rule;
  if (s.subst) {
    json sub = json::object();
    for (const auto& [x, v] : *s.subst) sub[x] = print_term(v);
    e["subst"] = std::move(sub);
  }
  return e;
}

Step step_from_json(const json& s, const SignaturePtr& sig) {
  if (!s.is_object() || !s.contains("pos") || !s.contains("rule"))
    throw error(errc::format, "step needs pos and rule");
  for (auto it = s.begin(); it != s.end(); ++it)
    if (it.key() != "pos" && it.key() != "rule" && it.key() != "subst")
      throw error(errc::format, "unknown field '" + it.key() + "' in step");
  Step step;
  for (const auto& p : s.at("pos")) {
    int i = p.get<int>();
    if (i < 1)
      throw error(errc::format, "positions are 1-based; got " + std::to_string(i));
    step.pos.push_back(i);
  }
  step.rule = s.at("rule").get<int>();
  if (s.contains("subst")) {
    Substitution subst;
    for (auto it = s.at("subst").begin(); it != s.at("subst").end(); ++it)
      subst.emplace(it.key(), parse_term(it.value().get<std::string>(), sig));
    step.subst = std::move(subst);
  }
  return step;
}

}  // namespace

OredCert load_ored_json(const std::string& text, const SignaturePtr& sig) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw error(errc::format, "malformed JSON");
  if (!j.is_object() || !j.contains("terms") || !j.contains("nodes") ||
      !j.contains("root"))
    throw error(errc::format, "ored certificate needs terms, nodes, root");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "terms" && it.key() != "nodes" && it.key() != "root")
      throw error(errc::format, "unknown field '" + it.key() + "'");

  OredCert cert;
  cert.sig = sig;
  std::map<std::string, int> term_ids;
  cert.terms = load_term_table(j.at("terms"), sig, term_ids);

  const json& nodes = j.at("nodes");
  std::map<std::string, int> node_ids;
  for (auto it = nodes.begin(); it != nodes.end(); ++it)
    node_ids.emplace(it.key(), static_cast<int>(node_ids.size()));
  cert.nodes.resize(node_ids.size());
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    const json& n = it.value();
    OredNode& node = cert.nodes[node_ids.at(it.key())];
    for (auto f = n.begin(); f != n.end(); ++f)
      if (f.key() != "source" && f.key() != "target" && f.key() != "prefix" &&
          f.key() != "lift")
        throw error(errc::format, "unknown field '" + f.key() + "' in node");
    if (!n.contains("source") || !n.contains("target") || !n.contains("prefix") ||
        !n.contains("lift"))
      throw error(errc::format, "node needs source, target, prefix, lift");
    auto tid = [&](const json& ref) {
      auto t = term_ids.find(ref.get<std::string>());
      if (t == term_ids.end())
        throw error(errc::format, "dangling term id " + ref.get<std::string>());
      return t->second;
    };
    node.source = tid(n.at("source"));
    node.target = tid(n.at("target"));
    for (const auto& s : n.at("prefix"))
      node.prefix.push_back(step_from_json(s, sig));
    const json& lift = n.at("lift");
    if (!lift.is_null()) {
      if (!lift.is_object() || !lift.contains("head") || !lift.contains("children"))
        throw error(errc::format, "lift needs head and children");
      for (auto f = lift.begin(); f != lift.end(); ++f)
        if (f.key() != "head" && f.key() != "children")
          throw error(errc::format, "unknown field '" + f.key() + "' in lift");
      node.has_lift = true;
      node.head = sig->symbol_index(lift.at("head").get<std::string>());
      if (node.head < 0)
        throw error(errc::unknown_symbol, lift.at("head").get<std::string>());
      for (const auto& c : lift.at("children")) {
        auto cn = node_ids.find(c.get<std::string>());
        if (cn == node_ids.end())
          throw error(errc::format, "dangling node id " + c.get<std::string>());
        node.children.push_back(cn->second);
      }
    }
  }
  auto rn = node_ids.find(j.at("root").get<std::string>());
  if (rn == node_ids.end()) throw error(errc::format, "dangling root id");
  cert.root = rn->second;
  return cert;
}

std::string save_ored_json(const OredCert& cert) {
  json j;
  j["terms"] = save_term_table(cert.terms, cert.sig);
  json nodes = json::object();
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const OredNode& n = cert.nodes[i];
    json e;
    e["source"] = "t" + std::to_string(n.source);
    e["target"] = "t" + std::to_string(n.target);
    json prefix = json::array();
    for (const auto& s : n.prefix) prefix.push_back(step_to_json(s));
    e["prefix"] = std::move(prefix);
    if (n.has_lift) {
      json lift;
      lift["head"] = cert.sig->symbol_name(n.head);
      json kids = json::array();
      for (int c : n.children) kids.push_back("o" + std::to_string(c));
      lift["children"] = std::move(kids);
      e["lift"] = std::move(lift);
    } else {
      e["lift"] = nullptr;
    }
    nodes["o" + std::to_string(i)] = std::move(e);
  }
  j["nodes"] = std::move(nodes);
  j["root"] = "o" + std::to_string(cert.root);
  return j.dump(2);
}

}  // namespace irew
