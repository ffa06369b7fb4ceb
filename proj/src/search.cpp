#include "irew/search.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "irew/errors.hpp"

namespace irew {

namespace {

constexpr size_t kPoolCap = 6;         // hole candidates per rule application
constexpr size_t kCandidateCap = 16;   // instantiations tried per rule

struct Searcher {
  const Trs& trs;
  RelationKind kind;
  SearchBudget budget;
  CertBuilder cb;

  std::uint64_t goals_used = 0;
  std::uint64_t work = 0;        // chain states and instantiations tried
  std::uint64_t work_limit = 0;  // scales with max_goals
  int size_limit = 0;            // candidate terms beyond this are pruned
  std::set<std::string> terms_seen;
  bool out_of_budget = false;

  // Canonical keys are requested constantly; cache them per graph node.
  std::map<std::pair<const TermGraph*, int>, std::string> key_cache;
  std::vector<TermGraphPtr> pinned;

  std::map<std::string, int> done;  // completed goals -> node id
  struct Frame {
    int node;
    int marked_depth;
  };
  std::map<std::string, Frame> in_progress;
  int marked_depth = 0;
  int depth_left = 0;  // remaining goal-nesting allowance
  // Failures are remembered per ancestor context and depth allowance: under
  // a different set of open goals a back-edge may become available, and a
  // larger allowance may reach further, so such goals are retried.
  std::set<std::string> failed;

  Searcher(const Trs& t, RelationKind k, const SearchBudget& b)
      : trs(t), kind(k), budget(b), cb(k, t.sig) {
    work_limit = budget.max_goals * 64;
  }

  bool spend() {
    if (++work > work_limit) out_of_budget = true;
    return !out_of_budget;
  }

  const std::string& key(const Term& t) {
    auto k = std::make_pair(t.graph().get(), t.root());
    auto it = key_cache.find(k);
    if (it == key_cache.end()) {
      pinned.push_back(t.graph());
      it = key_cache.emplace(std::move(k), canonical_key(t)).first;
    }
    return it->second;
  }

  std::string goal_key(const Term& s, const Term& t) {
    return key(s) + "=>" + key(t);
  }

  void note_term(const Term& t) {
    terms_seen.insert(key(t));
    if (terms_seen.size() > budget.max_new_terms) out_of_budget = true;
  }

  // Candidate substitutions overlaying a finite pattern onto u. Where the
  // pattern's structure runs past u's, variables below the clash stay open
  // and are filled from a small pool of subterms of u and the goal target.
  std::vector<Substitution> overlay(const Term& u, const Term& pattern,
                                    const Term& goal_target) {
    const TermNode& un = u.root_node();
    const TermNode& pn = pattern.root_node();
    if (un.is_var() || pn.is_var() || un.sym != pn.sym) return {};

    Substitution sigma;
    std::set<std::string> open;
    // Collect first-occurrence bindings; under clashes, record open vars.
    std::vector<std::pair<int, int>> stack{{pattern.root(), u.root()}};
    while (!stack.empty()) {
      auto [p, t] = stack.back();
      stack.pop_back();
      const TermNode& pnode = pattern.node(p);
      if (pnode.is_var()) {
        const std::string& x = pattern.sig()->variable_name(pnode.var);
        if (!sigma.count(x)) sigma.emplace(x, Term(u.sig(), u.graph(), t));
        continue;
      }
      const TermNode& tnode = u.node(t);
      if (!tnode.is_var() && tnode.sym == pnode.sym) {
        for (size_t i = 0; i < pnode.kids.size(); ++i)
          stack.emplace_back(pnode.kids[i], tnode.kids[i]);
        continue;
      }
      // Structure clash: everything below stays open.
      std::vector<int> below{p};
      while (!below.empty()) {
        int q = below.back();
        below.pop_back();
        const TermNode& qn = pattern.node(q);
        if (qn.is_var()) {
          const std::string& x = pattern.sig()->variable_name(qn.var);
          if (!sigma.count(x)) open.insert(x);
        } else {
          for (int k : qn.kids) below.push_back(k);
        }
      }
    }
    for (const auto& [x, v] : sigma) open.erase(x);

    if (open.empty()) return {sigma};

    // Pool: shallow subterms of the goal target, then of u.
    std::vector<Term> pool;
    std::set<std::string> pool_keys;
    auto add_pool = [&](const Term& t) {
      if (pool.size() >= kPoolCap) return;
      if (pool_keys.insert(key(t)).second) pool.push_back(t);
    };
    auto add_subterms = [&](const Term& t, int depth) {
      std::vector<std::pair<int, int>> q{{t.root(), 0}};
      while (!q.empty()) {
        auto [node, d] = q.front();
        q.erase(q.begin());
        add_pool(Term(t.sig(), t.graph(), node));
        if (d == depth) continue;
        for (int k : t.node(node).kids)
          q.emplace_back(k, d + 1);
      }
    };
    add_subterms(goal_target, 2);
    add_subterms(u, 2);
    if (pool.empty()) return {};

    std::vector<std::string> vars(open.begin(), open.end());
    std::vector<Substitution> out;
    std::vector<size_t> choice(vars.size(), 0);
    for (;;) {
      Substitution s = sigma;
      for (size_t i = 0; i < vars.size(); ++i) s.emplace(vars[i], pool[choice[i]]);
      out.push_back(std::move(s));
      if (out.size() >= kCandidateCap) break;
      size_t i = 0;
      for (; i < choice.size(); ++i) {
        if (++choice[i] < pool.size()) break;
        choice[i] = 0;
      }
      if (i == choice.size()) break;
    }
    return out;
  }

  std::string context_fingerprint() const {
    std::string fp;
    for (const auto& [k, frame] : in_progress) {
      fp += k;
      fp += '@';
      fp += std::to_string(marked_depth - frame.marked_depth);
      fp += '|';
    }
    return fp;
  }

  std::optional<int> solve(const Term& s, const Term& t) {
    if (out_of_budget) return std::nullopt;
    std::string key = goal_key(s, t);
    auto hit = done.find(key);
    if (hit != done.end()) return hit->second;
    auto anc = in_progress.find(key);
    if (anc != in_progress.end()) {
      // Back-edge, when no marked lift separates the two occurrences.
      if (kind != RelationKind::ired || anc->second.marked_depth == marked_depth)
        return anc->second.node;
      return std::nullopt;
    }
    if (depth_left == 0) return std::nullopt;
    std::string failure_key =
        key + '#' + std::to_string(depth_left) + '#' + context_fingerprint();
    if (failed.count(failure_key)) return std::nullopt;
    if (++goals_used > budget.max_goals) {
      out_of_budget = true;
      return std::nullopt;
    }
    int slot = cb.placeholder();
    in_progress.emplace(key, Frame{slot, marked_depth});
    --depth_left;
    // Segments are tried by increasing root-step count.
    bool ok = false;
    std::vector<int> premises;
    for (int limit = 0; limit <= budget.max_segment && !ok && !out_of_budget;
         ++limit) {
      std::set<std::string> visited;
      premises.clear();
      ok = chain(s, t, budget.max_segment - limit, visited, premises);
    }
    ++depth_left;
    in_progress.erase(key);
    if (!ok) {
      if (!out_of_budget) failed.insert(std::move(failure_key));
      return std::nullopt;
    }
    cb.fill_split(slot, cb.intern(s), cb.intern(t), std::move(premises));
    done.emplace(std::move(key), slot);
    return slot;
  }

  // Extends the premise chain from u toward t. Finishers first (bisimilar
  // endpoints, then a final lift), then root steps rule by rule, each
  // optionally preceded by a lift that rewrites the arguments into shape.
  bool chain(const Term& u, const Term& t, int roots_used,
             std::set<std::string>& visited, std::vector<int>& premises) {
    if (!spend()) return false;
    if (key(u) == key(t)) return true;

    const TermNode& un = u.root_node();
    const TermNode& tn = t.root_node();
    if (!un.is_var() && !tn.is_var() && un.sym == tn.sym) {
      size_t mark = premises.size();
      std::vector<int> kids;
      bool all = true;
      for (size_t i = 0; i < un.kids.size() && all; ++i) {
        auto child = solve(Term(u.sig(), u.graph(), un.kids[i]),
                           Term(t.sig(), t.graph(), tn.kids[i]));
        if (child)
          kids.push_back(*child);
        else
          all = false;
      }
      if (all) {
        premises.push_back(cb.add_lift(cb.intern(u), cb.intern(t), false, kids));
        return true;
      }
      premises.resize(mark);
    }

    if (roots_used >= budget.max_segment || un.is_var()) return false;
    if (!visited.insert(key(u)).second) return false;

    for (size_t r = 0; r < trs.rules.size(); ++r) {
      if (try_rule(u, t, static_cast<int>(r), false, roots_used, visited, premises))
        return true;
      if (kind == RelationKind::ieq && trs.rules[r].rhs.finite() &&
          !trs.rules[r].rhs.is_var() &&
          try_rule(u, t, static_cast<int>(r), true, roots_used, visited, premises))
        return true;
    }
    visited.erase(key(u));
    return false;
  }

  bool try_rule(const Term& u, const Term& t, int rule_index, bool backward,
                int roots_used, std::set<std::string>& visited,
                std::vector<int>& premises) {
    const Rule& rule = trs.rules[rule_index];
    const Term& pattern = backward ? rule.rhs : rule.lhs;
    const Term& other = backward ? rule.lhs : rule.rhs;
    for (const Substitution& sigma : overlay(u, pattern, t)) {
      if (!spend()) return false;
      // Quotienting keeps the rational terms generated along a chain small;
      // nested instantiation would otherwise pile up unshared copies.
      Term pre = minimize(substitute(pattern, sigma));
      Term nxt = minimize(substitute(other, sigma));
      if (pre.size() > size_limit || nxt.size() > size_limit) continue;
      note_term(pre);
      note_term(nxt);
      if (visited.count(key(nxt))) continue;

      size_t mark = premises.size();
      bool lift_needed = key(u) != key(pre);
      if (lift_needed) {
        const TermNode& uu = u.root_node();
        const TermNode& pp = pre.root_node();
        if (uu.is_var() || pp.is_var() || uu.sym != pp.sym) continue;
        bool marked = kind == RelationKind::ired;
        if (marked) ++marked_depth;
        std::vector<int> kids;
        bool all = true;
        for (size_t i = 0; i < uu.kids.size() && all; ++i) {
          auto child = solve(Term(u.sig(), u.graph(), uu.kids[i]),
                             Term(pre.sig(), pre.graph(), pp.kids[i]));
          if (child)
            kids.push_back(*child);
          else
            all = false;
        }
        if (marked) --marked_depth;
        if (!all) continue;
        premises.push_back(cb.add_lift(cb.intern(u), cb.intern(pre), marked, kids));
      }
      std::map<std::string, int> subst_ids;
      for (const auto& [x, v] : sigma) subst_ids.emplace(x, cb.intern(v));
      int src = cb.intern(pre);
      int tgt = cb.intern(nxt);
      premises.push_back(backward
                             ? cb.add_root(src, tgt, rule_index, subst_ids, true)
                             : cb.add_root(src, tgt, rule_index, subst_ids, false));
      if (chain(nxt, t, roots_used + 1, visited, premises)) return true;
      premises.resize(mark);
    }
    return false;
  }
};

}  // namespace

SearchResult search_proof(const Term& s, const Term& t, RelationKind kind,
                          const Trs& trs, const SearchBudget& budget) {
  Searcher searcher(trs, kind, budget);
  int base = s.size() + t.size();
  for (const Rule& r : trs.rules) base += r.lhs.size() + r.rhs.size();
  searcher.size_limit = 2 * base + 2 * budget.max_segment;
  searcher.note_term(s);
  searcher.note_term(t);
  // Iterative deepening over the goal-nesting allowance: misguided subtrees
  // are cut off cheaply before the combinatorial layers below them open up.
  std::optional<int> root;
  for (int depth = 1; depth <= 64 && !root && !searcher.out_of_budget; ++depth) {
    searcher.failed.clear();
    searcher.depth_left = depth;
    root = searcher.solve(s, t);
  }
  if (!root) {
    Exhausted ex;
    ex.goals_used = searcher.goals_used;
    ex.terms_used = searcher.terms_seen.size();
    ex.detail = searcher.out_of_budget ? "budget exhausted"
                                       : "search space exhausted within budget";
    return ex;
  }
  return searcher.cb.build(*root);
}

}  // namespace irew
