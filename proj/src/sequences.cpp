#include "irew/sequences.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "irew/errors.hpp"
#include "json.hpp"

namespace irew {

namespace {

bool parallel(const Position& p, const Position& q) {
  size_t n = std::min(p.size(), q.size());
  for (size_t i = 0; i < n; ++i)
    if (p[i] != q[i]) return true;  // neither is a prefix of the other
  return false;
}

}  // namespace

ProjectionResult project(const FiniteReduction& S,
                         const std::set<RuleApplication>& P, const Trs& trs) {
  replay(S, trs);  // surfaces ReplayError
  ProjectionResult out;
  for (size_t i = 0; i < S.steps.size(); ++i) {
    RuleApplication app{S.steps[i].rule, S.steps[i].pos};
    if (P.count(app)) {
      out.apps.push_back(std::move(app));
      out.embedding.push_back(i);
    }
  }
  return out;
}

std::optional<PermutationWitness> permutation_equiv_bruteforce(
    const FiniteReduction& S, const FiniteReduction& T, const Trs& trs) {
  // A step list that does not replay denotes no rewrite sequence at all, so
  // nothing is equivalent to it.
  try {
    replay(S, trs);
    replay(T, trs);
  } catch (const error&) {
    return std::nullopt;
  }
  if (!bisimilar(S.source, T.source)) return std::nullopt;
  if (S.steps.size() != T.steps.size()) return std::nullopt;
  size_t n = S.steps.size();

  auto app_of = [](const Step& s) { return RuleApplication{s.rule, s.pos}; };
  std::multiset<RuleApplication> ms, mt;
  for (const auto& s : S.steps) ms.insert(app_of(s));
  for (const auto& t : T.steps) mt.insert(app_of(t));
  if (ms != mt) return std::nullopt;

  std::vector<std::size_t> f(n, n);
  std::vector<char> used(n, 0);
  std::function<bool(size_t)> assign = [&](size_t i) -> bool {
    if (i == n) return true;
    for (size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (!(app_of(S.steps[i]) == app_of(T.steps[j]))) continue;
      bool ok = true;
      for (size_t i2 = 0; i2 < i && ok; ++i2) {
        // i2 < i; a swap (f(i2) > j) must involve parallel positions.
        if (f[i2] > j && !parallel(S.steps[i2].pos, S.steps[i].pos)) ok = false;
      }
      if (!ok) continue;
      f[i] = j;
      used[j] = 1;
      if (assign(i + 1)) return true;
      used[j] = 0;
    }
    return false;
  };
  if (!assign(0)) return std::nullopt;
  return PermutationWitness{std::move(f)};
}

// ---------------------------------------------------------------------------
// Canonical trees (splits alternate marked lifts and root steps, identity
// tails explicit, ids only on variables)

namespace {

struct CanonicalBuilder {
  const Trs& trs;
  CertBuilder cb;
  std::map<std::string, int> refl_memo;  // canonical term key -> split node

  CanonicalBuilder(const Trs& t, const SignaturePtr& sig)
      : trs(t), cb(RelationKind::ired, sig) {}

  // Reflexivity certificate of a term; cyclic for rational terms.
  int refl_split(const Term& t) {
    std::string key = canonical_key(t);
    auto it = refl_memo.find(key);
    if (it != refl_memo.end()) return it->second;
    int node = cb.placeholder();
    refl_memo.emplace(std::move(key), node);
    int tid = cb.intern(t);
    if (t.is_var()) {
      cb.fill_split(node, tid, tid, {cb.add_id(tid, tid)});
    } else {
      std::vector<int> kids;
      const TermNode& tn = t.root_node();
      for (int k : tn.kids)
        kids.push_back(refl_split(Term(t.sig(), t.graph(), k)));
      cb.fill_split(node, tid, tid, {cb.add_lift(tid, tid, false, kids)});
    }
    return node;
  }

  // Lift premise for a below-root segment from src; src is function-headed
  // whenever steps exist or a root step follows.
  int segment_lift(const Term& src, const Term& tgt,
                   const std::vector<Step>& steps, bool marked) {
    const TermNode& sn = src.root_node();
    size_t arity = sn.kids.size();
    std::vector<std::vector<Step>> child_steps(arity);
    for (const Step& s : steps) {
      Step inner = s;
      int arg = s.pos.front();
      inner.pos.erase(inner.pos.begin());
      child_steps[arg - 1].push_back(std::move(inner));
    }
    std::vector<int> kids;
    for (size_t i = 0; i < arity; ++i)
      kids.push_back(
          build(Term(src.sig(), src.graph(), sn.kids[i]), child_steps[i]));
    return cb.add_lift(cb.intern(src), cb.intern(tgt), marked, kids);
  }

  // Certificate for the full sequence from u.
  int build(const Term& u, const std::vector<Step>& steps) {
    if (steps.empty()) return refl_split(u);
    auto trace = replay_trace({u, steps}, trs);
    std::vector<int> premises;
    size_t seg_start = 0;
    for (size_t i = 0; i <= steps.size(); ++i) {
      bool at_root = i < steps.size() && steps[i].pos.empty();
      bool at_end = i == steps.size();
      if (!at_root && !at_end) continue;
      std::vector<Step> segment(steps.begin() + seg_start, steps.begin() + i);
      const Term& seg_src = trace[seg_start];
      const Term& seg_tgt = trace[i];
      if (at_end && seg_src.is_var()) {
        // Only an empty segment fits under a variable.
        int tid = cb.intern(seg_src);
        premises.push_back(cb.add_id(tid, tid));
      } else {
        premises.push_back(segment_lift(seg_src, seg_tgt, segment, !at_end));
      }
      if (at_end) break;
      // The root step itself.
      const Rule& rule = trs.rules[steps[i].rule];
      auto sigma = match_pattern(trace[i], rule.lhs);
      std::map<std::string, int> subst_ids;
      for (const auto& [x, v] : *sigma) subst_ids.emplace(x, cb.intern(v));
      premises.push_back(cb.add_root(cb.intern(trace[i]), cb.intern(trace[i + 1]),
                                     steps[i].rule, std::move(subst_ids)));
      seg_start = i + 1;
    }
    return cb.add_split(cb.intern(trace.front()), cb.intern(trace.back()),
                        std::move(premises));
  }
};

}  // namespace

ProofCert canonical_tree_of(const FiniteReduction& S, const Trs& trs) {
  CanonicalBuilder builder(trs, S.source.sig());
  int root;
  if (S.steps.empty() && S.source.is_var()) {
    int tid = builder.cb.intern(S.source);
    root = builder.cb.add_id(tid, tid);
  } else {
    root = builder.build(S.source, S.steps);
  }
  return builder.cb.build(root);
}

bool permutation_equiv(const FiniteReduction& S, const FiniteReduction& T,
                       const Trs& trs) {
  return cert_equal(canonical_tree_of(S, trs), canonical_tree_of(T, trs));
}

// ---------------------------------------------------------------------------
// Correspondence

namespace {

struct Corresponder {
  const ProofCert& cert;
  const Trs& trs;
  // 0 in progress (assumed, the coinductive reading), 1 true, 2 false
  std::map<std::string, int> memo;

  Corresponder(const ProofCert& c, const Trs& t) : cert(c), trs(t) {}

  static std::string chunk_key(int node, const Term& src,
                               const std::vector<Step>& steps) {
    std::ostringstream os;
    os << node << '!' << canonical_key(src) << '!';
    for (const auto& s : steps)
      os << position_to_string(s.pos) << ',' << s.rule << ';';
    return os.str();
  }

  bool corr(int node, const Term& src, const std::vector<Step>& steps) {
    std::string key = chunk_key(node, src, steps);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second != 2;
    memo[key] = 0;
    bool result = corr_uncached(node, src, steps);
    memo[key] = result ? 1 : 2;
    return result;
  }

  bool corr_uncached(int node, const Term& src, const std::vector<Step>& steps) {
    const ProofNode& n = cert.nodes[node];
    if (!bisimilar(src, cert.term(n.source))) return false;
    switch (n.kind) {
      case ProofNode::Kind::id:
        return steps.empty();
      case ProofNode::Kind::root:
        return steps.size() == 1 && steps[0].pos.empty() &&
               steps[0].rule == n.rule;
      case ProofNode::Kind::lift: {
        const TermNode& head = src.root_node();
        if (head.is_var()) return steps.empty() && n.children.empty();
        std::vector<std::vector<Step>> child_steps(head.kids.size());
        for (const Step& s : steps) {
          if (s.pos.empty()) return false;  // no root steps below a lift
          Step inner = s;
          int arg = s.pos.front();
          if (arg < 1 || arg > static_cast<int>(head.kids.size())) return false;
          inner.pos.erase(inner.pos.begin());
          child_steps[arg - 1].push_back(std::move(inner));
        }
        if (n.children.size() != head.kids.size()) return false;
        for (size_t i = 0; i < n.children.size(); ++i) {
          Term child_src(src.sig(), src.graph(), head.kids[i]);
          if (!corr(n.children[i], child_src, child_steps[i])) return false;
        }
        return true;
      }
      case ProofNode::Kind::split:
        return corr_split(n, src, steps);
    }
    return false;
  }

  bool corr_split(const ProofNode& n, const Term& src,
                  const std::vector<Step>& steps) {
    auto trace = replay_trace({src, steps}, trs);
    size_t np = n.premises.size();
    size_t ns = steps.size();
    // seq[i][j]: premises i.. consume steps j..
    std::map<std::pair<size_t, size_t>, int> dp;  // 1 true, 2 false
    std::function<bool(size_t, size_t)> seq = [&](size_t i, size_t j) -> bool {
      auto key = std::make_pair(i, j);
      auto it = dp.find(key);
      if (it != dp.end()) return it->second == 1;
      bool ok = false;
      if (i == np) {
        ok = (j == ns);
      } else {
        const ProofNode& p = cert.nodes[n.premises[i]];
        switch (p.kind) {
          case ProofNode::Kind::id:
            ok = corr(n.premises[i], trace[j], {}) && seq(i + 1, j);
            break;
          case ProofNode::Kind::root:
            if (j < ns && steps[j].pos.empty()) {
              std::vector<Step> one{steps[j]};
              ok = corr(n.premises[i], trace[j], one) && seq(i + 1, j + 1);
            }
            break;
          case ProofNode::Kind::lift: {
            size_t stop = j;
            while (stop < ns && !steps[stop].pos.empty()) ++stop;
            for (size_t k = j; k <= stop && !ok; ++k) {
              std::vector<Step> chunk(steps.begin() + j, steps.begin() + k);
              ok = corr(n.premises[i], trace[j], chunk) && seq(i + 1, k);
            }
            break;
          }
          case ProofNode::Kind::split:
            break;  // invalid shape; validation rejects it
        }
      }
      dp[key] = ok ? 1 : 2;
      return ok;
    };
    return seq(0, 0);
  }
};

}  // namespace

bool corresponds_finite(const FiniteReduction& S, const ProofCert& cert,
                        const Trs& trs) {
  if (!cert.validated())
    throw error(errc::not_validated, "run check_valid first");
  Term end = replay(S, trs);
  if (!bisimilar(end, cert.term(cert.nodes[cert.root].target))) return false;
  Corresponder c(cert, trs);
  return c.corr(cert.root, S.source, S.steps);
}

FiniteReduction permute_prefix(const FiniteReduction& S,
                               const FiniteReduction& T,
                               const PermutationWitness& w, std::size_t kappa,
                               const Trs& trs) {
  size_t n = S.steps.size();
  if (w.f.size() != n || T.steps.size() != n)
    throw error(errc::invalid_witness, "witness size mismatch");
  if (kappa > n)
    throw error(errc::invalid_witness, "prefix index beyond the sequence");
  std::vector<char> used(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (w.f[i] >= n || used[w.f[i]])
      throw error(errc::invalid_witness, "not a bijection");
    used[w.f[i]] = 1;
  }
  if (!bisimilar(S.source, T.source))
    throw error(errc::invalid_witness, "sources differ");
  for (size_t i = 0; i < n; ++i) {
    if (S.steps[i].rule != T.steps[w.f[i]].rule ||
        S.steps[i].pos != T.steps[w.f[i]].pos)
      throw error(errc::invalid_witness,
                  "step " + std::to_string(i) + " does not correspond");
    for (size_t i2 = 0; i2 < i; ++i2)
      if (w.f[i2] > w.f[i] && !parallel(S.steps[i2].pos, S.steps[i].pos))
        throw error(errc::invalid_witness, "non-parallel steps swapped");
  }

  FiniteReduction out;
  out.source = T.source;
  std::vector<std::size_t> inverse(n);
  for (size_t i = 0; i < n; ++i) inverse[w.f[i]] = i;
  for (size_t gamma = 0; gamma < n; ++gamma)
    if (inverse[gamma] < kappa) out.steps.push_back(T.steps[gamma]);
  return out;
}

// ---------------------------------------------------------------------------
// Sequence files

namespace {

using nlohmann::json;

}  // namespace

FiniteReduction load_sequence_json(const std::string& text,
                                   const SignaturePtr& sig) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw error(errc::format, "malformed JSON");
  if (!j.is_object() || !j.contains("source") || !j.contains("steps"))
    throw error(errc::format, "sequence needs source and steps");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "source" && it.key() != "steps")
      throw error(errc::format, "unknown field '" + it.key() + "' in sequence");
  FiniteReduction red;
  red.source = parse_term(j.at("source").get<std::string>(), sig);
  for (const auto& s : j.at("steps")) {
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
    red.steps.push_back(std::move(step));
  }
  return red;
}

std::string save_sequence_json(const FiniteReduction& red) {
  json j;
  j["source"] = print_term(red.source);
  json steps = json::array();
  for (const auto& s : red.steps) {
    json e;
    e["pos"] = s.pos;
    e["rule"] = s.rule;
    if (s.subst) {
      json sub = json::object();
      for (const auto& [x, v] : *s.subst) sub[x] = print_term(v);
      e["subst"] = std::move(sub);
    }
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  return j.dump(2);
}

}  // namespace irew
