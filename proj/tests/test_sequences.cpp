#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace irew;
using testutil::data_path;
using testutil::load_cert;
using testutil::load_trs;
using testutil::read_file;
using testutil::term;

namespace {

FiniteReduction load_seq(const std::string& name, const SignaturePtr& sig) {
  return load_sequence_json(read_file(data_path(name)), sig);
}

// All replayable step sequences of the given length from a start term,
// with redexes searched down to a fixed depth.
void enumerate_sequences(const Trs& trs, const Term& from, int len,
                         FiniteReduction cur, std::vector<FiniteReduction>& out,
                         int depth = 4) {
  out.push_back(cur);
  if (len == 0) return;
  for (const auto& [pos, rule] : redexes_to_depth(from, trs, depth)) {
    Step s{pos, rule, {}};
    FiniteReduction next = cur;
    next.steps.push_back(s);
    enumerate_sequences(trs, apply_step(from, s, trs), len - 1, next, out, depth);
  }
}

std::vector<FiniteReduction> sequences_from(const Trs& trs, const Term& t,
                                            int len) {
  std::vector<FiniteReduction> out;
  enumerate_sequences(trs, t, len, {t, {}}, out);
  return out;
}

}  // namespace

TEST_CASE("projection reproduces the worked example") {
  Trs proj_trs = load_trs("proj.trs");
  FiniteReduction seq = load_seq("proj_seq.json", proj_trs.sig);
  REQUIRE(seq.steps.size() == 6);

  std::set<RuleApplication> P{{0, {1}}, {1, {2}}};
  ProjectionResult r = project(seq, P, proj_trs);
  REQUIRE(r.apps.size() == 5);
  CHECK(r.apps[0].rule == 0);
  CHECK(r.apps[1].rule == 0);
  CHECK(r.apps[2].rule == 1);
  CHECK(r.apps[3].rule == 1);
  CHECK(r.apps[4].rule == 0);
  CHECK(r.embedding == std::vector<std::size_t>{0, 1, 2, 4, 5});

  CHECK(project(seq, {}, proj_trs).apps.empty());

  std::set<RuleApplication> all;
  for (const auto& s : seq.steps) all.insert({s.rule, s.pos});
  ProjectionResult full = project(seq, all, proj_trs);
  CHECK(full.apps.size() == seq.steps.size());
  for (size_t i = 0; i < full.embedding.size(); ++i)
    CHECK(full.embedding[i] == i);
}

TEST_CASE("brute-force permutation equivalence") {
  Trs ex = load_trs("nonlinear.trs");
  FiniteReduction a = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction b = load_seq("seq_swap_b.json", ex.sig);

  auto w = permutation_equiv_bruteforce(a, b, ex);
  REQUIRE(w.has_value());
  CHECK(w->f == std::vector<std::size_t>{1, 0});

  // Nested positions may not swap.
  Trs ac = load_trs("grow.trs");
  FiniteReduction s1{term(ac, "a"), {{{}, 0, {}}, {{1}, 0, {}}}};
  FiniteReduction s2{term(ac, "a"), {{{1}, 0, {}}, {{}, 0, {}}}};
  CHECK_FALSE(permutation_equiv_bruteforce(s1, s2, ac).has_value());

  // Different sources are never equivalent.
  FiniteReduction c{term(ex, "a"), {}};
  FiniteReduction d{term(ex, "b"), {}};
  CHECK_FALSE(permutation_equiv_bruteforce(c, d, ex).has_value());
}

TEST_CASE("canonical trees are valid and canonical") {
  Trs ac = load_trs("grow.trs");

  // A single root step.
  FiniteReduction one{term(ac, "a"), {{{}, 0, {}}}};
  ProofCert cert = canonical_tree_of(one, ac);
  REQUIRE(check_valid(cert, ac).ok());
  CHECK(is_canonical(cert));
  CHECK(bisimilar(cert.term(cert.nodes[cert.root].source), term(ac, "a")));
  CHECK(bisimilar(cert.term(cert.nodes[cert.root].target), term(ac, "C(a)")));
  CHECK(corresponds_finite(one, cert, ac));

  // The empty sequence at a variable is a single canonical id.
  FiniteReduction empty_var{term(ac, "x"), {}};
  ProofCert idcert = canonical_tree_of(empty_var, ac);
  REQUIRE(check_valid(idcert, ac).ok());
  CHECK(idcert.nodes[idcert.root].kind == ProofNode::Kind::id);

  // A two-step tower prefix.
  FiniteReduction two{term(ac, "a"), {{{}, 0, {}}, {{1}, 0, {}}}};
  ProofCert cert2 = canonical_tree_of(two, ac);
  REQUIRE(check_valid(cert2, ac).ok());
  CHECK(is_canonical(cert2));
  CHECK(corresponds_finite(two, cert2, ac));

  Trs fg = load_trs("rename.trs");
  FiniteReduction fgseq{term(fg, "rec X . f(X)"), {{{}, 0, {}}, {{1}, 0, {}}}};
  ProofCert cert3 = canonical_tree_of(fgseq, fg);
  REQUIRE(check_valid(cert3, fg).ok());
  CHECK(is_canonical(cert3));
  CHECK(corresponds_finite(fgseq, cert3, fg));
}

TEST_CASE("permutation equivalence via canonical trees") {
  Trs ex = load_trs("nonlinear.trs");
  FiniteReduction a = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction b = load_seq("seq_swap_b.json", ex.sig);
  CHECK(permutation_equiv(a, b, ex));
  CHECK(permutation_equiv(a, a, ex));

  Trs fg = load_trs("rename.trs");
  Term fw = term(fg, "rec X . f(X)");
  // Two distinct reduction strategies of the same length are inequivalent.
  FiniteReduction outer{fw, {{{}, 0, {}}, {{1}, 0, {}}, {{1, 1}, 0, {}}}};
  FiniteReduction inner{fw, {{{}, 0, {}}, {{1, 1}, 0, {}}, {{1}, 0, {}}}};
  replay(outer, fg);
  replay(inner, fg);
  CHECK_FALSE(permutation_equiv(outer, inner, fg));
  CHECK(permutation_equiv_bruteforce(outer, inner, fg).has_value() ==
        permutation_equiv(outer, inner, fg));
}

TEST_CASE("brute force and canonical trees agree exhaustively") {
  Trs trs = load_trs("rename_grow.trs");
  // Small-scale version of the full acceptance sweep.
  std::vector<std::string> starts{"f(a)", "f(f(b))", "C(f(a))", "g(a)"};
  for (const auto& text : starts) {
    Term t = term(trs, text);
    auto seqs = sequences_from(trs, t, 3);
    std::vector<std::string> keys;
    for (const auto& s : seqs) keys.push_back(cert_canonical_key(canonical_tree_of(s, trs)));
    for (size_t i = 0; i < seqs.size(); ++i)
      for (size_t j = 0; j < seqs.size(); ++j) {
        bool canonical_eq = keys[i] == keys[j];
        bool brute = permutation_equiv_bruteforce(seqs[i], seqs[j], trs).has_value();
        if (brute != canonical_eq) {
          CAPTURE(text);
          CAPTURE(i);
          CAPTURE(j);
          REQUIRE(brute == canonical_eq);
        }
        if (brute)
          CHECK(bisimilar(replay(seqs[i], trs), replay(seqs[j], trs)));
      }
  }
}

TEST_CASE("correspondence") {
  Trs ac = load_trs("grow.trs");
  ProofCert tower = load_cert("tower.json", ac.sig);
  REQUIRE(check_valid(tower, ac).ok());

  // A finite prefix does not correspond to the infinite certificate.
  FiniteReduction one{term(ac, "a"), {{{}, 0, {}}}};
  CHECK_FALSE(corresponds_finite(one, tower, ac));

  // A canonical prefix completed by its own tree corresponds.
  FiniteReduction two{term(ac, "a"), {{{}, 0, {}}, {{1}, 0, {}}}};
  ProofCert tree = canonical_tree_of(two, ac);
  REQUIRE(check_valid(tree, ac).ok());
  CHECK(corresponds_finite(two, tree, ac));
}

TEST_CASE("interleaving count under a lift") {
  Trs ex = load_trs("nonlinear.trs");
  // Certificate: one lift over f with two 2-step tower arguments.
  CertBuilder cb(RelationKind::ired, ex.sig);
  Term fab = term(ex, "f(a, b)");
  Term tgt = term(ex, "f(C(C(a)), C(C(b)))");
  // a -> C(a) -> C(C(a)): a root step, then the same step lifted one level.
  auto arm = [&](const std::string& from, const std::string& mid,
                 const std::string& to, int rule) {
    int t0 = cb.intern(term(ex, from));
    int t1 = cb.intern(term(ex, mid));
    int t2 = cb.intern(term(ex, to));
    int r0 = cb.add_root(t0, t1, rule, std::map<std::string, int>{});
    int lift_tail = cb.add_lift(
        t1, t2, false,
        {cb.add_split(t0, t1,
                      {cb.add_root(t0, t1, rule, std::map<std::string, int>{})})});
    return cb.add_split(t0, t2, {r0, lift_tail});
  };
  int sa = arm("a", "C(a)", "C(C(a))", 1);
  int sb = arm("b", "C(b)", "C(C(b))", 2);
  int lift = cb.add_lift(cb.intern(fab), cb.intern(tgt), false, {sa, sb});
  ProofCert cert = cb.build(lift);
  REQUIRE(check_valid(cert, ex).ok());

  // Count accepted merges among all candidate interleavings: the two
  // argument sequences have 2 steps each, at positions [1],[1,1] and
  // [2],[2,1] after shifting.
  std::vector<Step> left{{{1}, 1, {}}, {{1, 1}, 1, {}}};
  std::vector<Step> right{{{2}, 2, {}}, {{2, 1}, 2, {}}};
  int accepted = 0;
  for (const auto& merge : oracle::all_merges(2, 2)) {
    FiniteReduction red{fab, {}};
    size_t li = 0, ri = 0;
    for (int pick : merge)
      red.steps.push_back(pick == 0 ? left[li++] : right[ri++]);
    if (corresponds_finite(red, cert, ex)) ++accepted;
  }
  CHECK(accepted == 6);
  CHECK(oracle::binomial(4, 2) == 6);

  // The canonical reading of the certificate is itself one of the accepted
  // interleavings.
  FiniteReduction canonical = canonical_prefix(cert, 100);
  CHECK(canonical.steps.size() == 4);
  CHECK(corresponds_finite(canonical, cert, ex));

  // A wrong order within one argument is rejected.
  FiniteReduction bad{fab, {left[1], left[0], right[0], right[1]}};
  CHECK_THROWS_AS(replay(bad, ex), error);
}

TEST_CASE("projection stability across corresponding sequences") {
  Trs ex = load_trs("nonlinear.trs");
  // Reuse the 2x2 lift certificate: all its interleavings project equally
  // on every set of pairwise non-parallel applications.
  FiniteReduction base = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction swapped = load_seq("seq_swap_b.json", ex.sig);
  ProofCert tree = canonical_tree_of(base, ex);
  REQUIRE(check_valid(tree, ex).ok());
  REQUIRE(corresponds_finite(base, tree, ex));
  REQUIRE(corresponds_finite(swapped, tree, ex));
  // Sets whose positions are pairwise non-parallel: singletons and the
  // two prefix-related applications.
  std::vector<std::set<RuleApplication>> families{
      {{1, {1}}}, {{2, {2}}}, {{1, {1}}, {1, {1, 1}}}};
  for (const auto& P : families) {
    auto pa = project(base, P, ex);
    auto pb = project(swapped, P, ex);
    CHECK(pa.apps.size() == pb.apps.size());
    for (size_t i = 0; i < pa.apps.size(); ++i) CHECK(pa.apps[i] == pb.apps[i]);
  }
}

TEST_CASE("witness uniqueness under the strengthened conditions") {
  // An injective embedding of a sequence prefix into another sequence is
  // unique once it (i) preserves rule and position, (ii) swaps only steps at
  // parallel positions, and (iii) skips only steps parallel to every later
  // embedded one. Enumerate all candidate embeddings over an exhaustive
  // family of short sequences and count.
  Trs ex = load_trs("nonlinear.trs");
  Term start = term(ex, "f(a, b)");
  std::vector<FiniteReduction> seqs;
  enumerate_sequences(ex, start, 2, {start, {}}, seqs);

  auto parallel_pos = [](const Position& p, const Position& q) {
    size_t n = std::min(p.size(), q.size());
    for (size_t i = 0; i < n; ++i)
      if (p[i] != q[i]) return true;
    return false;
  };

  int families = 0;
  for (const auto& S : seqs) {
    for (const auto& T : seqs) {
      size_t ns = S.steps.size(), nt = T.steps.size();
      for (size_t prefix = 0; prefix <= ns; ++prefix) {
        // All injective maps {0..prefix-1} -> {0..nt-1}.
        std::vector<std::size_t> f(prefix, 0);
        std::vector<std::vector<std::size_t>> found;
        std::function<void(size_t, std::size_t)> rec = [&](size_t i,
                                                           std::size_t used) {
          if (i == prefix) {
            // (iii): unembedded steps of T are parallel to all later
            // embedded ones.
            for (size_t g1 = 0; g1 < nt; ++g1) {
              if (used & (1u << g1)) continue;
              for (size_t g2 = g1 + 1; g2 < nt; ++g2)
                if ((used & (1u << g2)) &&
                    !parallel_pos(T.steps[g1].pos, T.steps[g2].pos))
                  return;
            }
            found.push_back(f);
            return;
          }
          for (std::size_t j = 0; j < nt; ++j) {
            if (used & (1u << j)) continue;
            if (S.steps[i].rule != T.steps[j].rule ||
                S.steps[i].pos != T.steps[j].pos)
              continue;
            bool ok = true;
            for (size_t i2 = 0; i2 < i && ok; ++i2)
              if (f[i2] > j && !parallel_pos(S.steps[i2].pos, S.steps[i].pos))
                ok = false;
            if (!ok) continue;
            f[i] = j;
            rec(i + 1, used | (1u << j));
          }
        };
        rec(0, 0);
        CHECK(found.size() <= 1);
        if (found.size() == 1) ++families;
      }
    }
  }
  CHECK(families > 0);

  // The brute-force witness for the two-step swap is that unique embedding.
  FiniteReduction a = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction b = load_seq("seq_swap_b.json", ex.sig);
  auto w = permutation_equiv_bruteforce(a, b, ex);
  REQUIRE(w.has_value());
  CHECK(w->f == std::vector<std::size_t>{1, 0});
}

TEST_CASE("permuted prefixes") {
  Trs ex = load_trs("nonlinear.trs");
  FiniteReduction a = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction b = load_seq("seq_swap_b.json", ex.sig);
  auto w = permutation_equiv_bruteforce(a, b, ex);
  REQUIRE(w.has_value());

  CHECK(permute_prefix(a, b, *w, 0, ex).steps.empty());

  FiniteReduction full = permute_prefix(a, b, *w, 2, ex);
  CHECK(full.steps.size() == 2);
  CHECK(bisimilar(replay(full, ex), replay(b, ex)));

  FiniteReduction half = permute_prefix(a, b, *w, 1, ex);
  REQUIRE(half.steps.size() == 1);
  // The selected step is a's first step, replayed inside b's source.
  CHECK(half.steps[0].pos == a.steps[0].pos);
  Term end = replay(half, ex);
  Term a_half = replay({a.source, {a.steps[0]}}, ex);
  CHECK(truncation_equal(end, a_half, 2));

  PermutationWitness bad{{0, 0}};
  CHECK_THROWS_AS(permute_prefix(a, b, bad, 1, ex), error);
}

TEST_CASE("sequence files round-trip") {
  Trs ex = load_trs("nonlinear.trs");
  FiniteReduction a = load_seq("seq_swap_a.json", ex.sig);
  FiniteReduction back = load_sequence_json(save_sequence_json(a), ex.sig);
  CHECK(back.steps.size() == a.steps.size());
  CHECK(bisimilar(replay(back, ex), replay(a, ex)));

  CHECK_THROWS_AS(load_sequence_json("{}", ex.sig), error);
  CHECK_THROWS_AS(load_sequence_json(
                      R"({"source": "a", "steps": [{"pos": [0], "rule": 0}]})",
                      ex.sig),
                  error);
}
