#include "doctest.h"
#include "helpers.hpp"

using namespace irew;
using testutil::load_cert;
using testutil::load_trs;
using testutil::term;

namespace {

ProofCert validated(const std::string& name, const Trs& trs) {
  ProofCert cert = load_cert(name, trs.sig);
  auto result = check_valid(cert, trs);
  if (!result.ok()) {
    CAPTURE(result.violation->node);
    CAPTURE(result.violation->clause);
    CAPTURE(result.violation->message);
    REQUIRE(result.ok());
  }
  return cert;
}

// The f(a,b) -> D certificate, built programmatically; node id of the top
// split is returned.
int build_fab_cert(CertBuilder& cb, const Trs& ex) {
  Term a = parse_term("a", ex.sig), b = parse_term("b", ex.sig);
  Term cw = parse_term("rec X . C(X)", ex.sig);
  int ta = cb.intern(a), tb = cb.intern(b), tcw = cb.intern(cw);
  int tca = cb.intern(parse_term("C(a)", ex.sig));
  int tcb = cb.intern(parse_term("C(b)", ex.sig));
  int tfab = cb.intern(parse_term("f(a, b)", ex.sig));
  int tfww = cb.intern(make_fun(ex.sig, "f", {cw, cw}));
  int td = cb.intern(parse_term("D", ex.sig));

  int sa = cb.placeholder();
  cb.fill_split(sa, ta, tcw,
                {cb.add_root(ta, tca, 1, std::map<std::string, int>{}),
                 cb.add_lift(tca, tcw, false, {sa})});
  int sb = cb.placeholder();
  cb.fill_split(sb, tb, tcw,
                {cb.add_root(tb, tcb, 2, std::map<std::string, int>{}),
                 cb.add_lift(tcb, tcw, false, {sb})});
  int lm = cb.add_lift(tfab, tfww, true, {sa, sb});
  int r0 = cb.add_root(tfww, td, 0, std::map<std::string, int>{{"x", tcw}});
  return cb.add_split(tfab, td, {lm, r0});
}

}  // namespace

TEST_CASE("reference fixtures validate") {
  Trs ac = load_trs("grow.trs");
  Trs ca = load_trs("unwrap.trs");
  Trs ex = load_trs("nonlinear.trs");
  Trs fg = load_trs("rename.trs");

  validated("tower.json", ac);
  validated("collapse.json", ex);
  validated("tower_alt.json", ac);
  validated("alternation.json", fg);
  validated("alternation_nested.json", fg);
  validated("backward_eq.json", ca);
  validated("backward_bi.json", ca);
}

TEST_CASE("the nesting restriction rejects the backward limit") {
  Trs ca = load_trs("unwrap.trs");
  ProofCert bad = load_cert("backward_bad.json", ca.sig);
  auto result = check_valid(bad, ca);
  REQUIRE_FALSE(result.ok());
  CHECK(result.violation->clause == "mark-cycle");
  CHECK(result.violation->message == "marked Lift on cycle");
  CHECK_FALSE(bad.validated());

  // The same graph with the mark erased and kind ibi is fine.
  validated("backward_bi.json", ca);
}

TEST_CASE("structural violations are reported") {
  Trs ca = load_trs("unwrap.trs");

  // Root step with the wrong instance.
  ProofCert cert = load_cert("backward_eq.json", ca.sig);
  cert.nodes[cert.root].target = cert.nodes[cert.root].source;
  auto r = check_valid(cert, ca);
  REQUIRE_FALSE(r.ok());

  // Marked lift outside ired.
  ProofCert ibi = load_cert("backward_bi.json", ca.sig);
  for (auto& n : ibi.nodes)
    if (n.kind == ProofNode::Kind::lift) n.marked = true;
  auto r2 = check_valid(ibi, ca);
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violation->clause == "kind");

  // Reversed root outside ieq.
  ProofCert rev = load_cert("backward_bi.json", ca.sig);
  for (auto& n : rev.nodes)
    if (n.kind == ProofNode::Kind::root) n.reversed = true;
  CHECK_FALSE(check_valid(rev, ca).ok());

  // A non-final lift premise must be marked in ired.
  ProofCert unmarked = load_cert("backward_bad.json", ca.sig);
  for (auto& n : unmarked.nodes) n.marked = false;
  auto r3 = check_valid(unmarked, ca);
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.violation->clause == "split-marks");
}

TEST_CASE("unreachable nodes are rejected") {
  Trs ca = load_trs("unwrap.trs");
  ProofCert cert = load_cert("backward_eq.json", ca.sig);
  ProofNode orphan;
  orphan.kind = ProofNode::Kind::id;
  orphan.source = 0;
  orphan.target = 0;
  cert.nodes.push_back(orphan);
  auto r = check_valid(cert, ca);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violation->clause == "unreachable");
}

TEST_CASE("canonicity") {
  Trs ac = load_trs("grow.trs");
  Trs fg = load_trs("rename.trs");

  ProofCert tower = validated("tower.json", ac);
  CHECK(is_canonical(tower));

  ProofCert alternation_nested = validated("alternation_nested.json", fg);
  CHECK(is_canonical(alternation_nested));

  ProofCert tower_alt = validated("tower_alt.json", ac);
  CHECK_FALSE(is_canonical(tower_alt));  // its inner split ends in a root step

  // An id over a constant as split premise is not canonical.
  Trs ex = load_trs("nonlinear.trs");
  CertBuilder cb(RelationKind::ired, ex.sig);
  int ta = cb.intern(term(ex, "a"));
  int tca = cb.intern(term(ex, "C(a)"));
  int idn = cb.add_id(ta, ta);
  int r = cb.add_root(ta, tca, 1, std::map<std::string, int>{});
  int lift = cb.add_lift(tca, tca, false,
                         {cb.add_split(ta, ta, {cb.add_id(ta, ta)})});
  int split = cb.add_split(ta, tca, {idn, r, lift});
  ProofCert cert = cb.build(split);
  REQUIRE(check_valid(cert, ex).ok());
  CHECK_FALSE(is_canonical(cert));

  ProofCert unvalidated = load_cert("tower.json", ac.sig);
  CHECK_THROWS_AS(is_canonical(unvalidated), error);
}

TEST_CASE("mark forgetting and the inclusion chain") {
  Trs ac = load_trs("grow.trs");
  Trs ex = load_trs("nonlinear.trs");

  ProofCert tower = validated("tower.json", ac);
  ProofCert tower_ibi = forget_marks(tower);
  CHECK(tower_ibi.kind == RelationKind::ibi);
  CHECK(check_valid(tower_ibi, ac).ok());

  ProofCert collapse = validated("collapse.json", ex);
  ProofCert collapse_ibi = forget_marks(collapse);
  CHECK(check_valid(collapse_ibi, ex).ok());

  ProofCert collapse_ieq = embed_ieq(collapse_ibi);
  CHECK(collapse_ieq.kind == RelationKind::ieq);
  CHECK(check_valid(collapse_ieq, ex).ok());

  CHECK_THROWS_AS(forget_marks(collapse_ieq), error);
  CHECK_THROWS_AS(embed_ieq(collapse), error);

  Trs ca = load_trs("unwrap.trs");
  ProofCert cw_ibi = validated("backward_bi.json", ca);
  ProofCert cw_ieq = embed_ieq(cw_ibi);
  CHECK(check_valid(cw_ieq, ca).ok());
  CHECK(cert_equal(cw_ieq, validated("backward_eq.json", ca)));
}

TEST_CASE("certificate equality is unrolling-invariant") {
  Trs ac = load_trs("grow.trs");
  ProofCert tower = validated("tower.json", ac);

  // Unroll the cycle once by hand.
  CertBuilder cb(RelationKind::ired, ac.sig);
  Term a = term(ac, "a");
  Term ca_t = term(ac, "C(a)");
  Term cw = term(ac, "rec X . C(X)");
  int ta = cb.intern(a), tca = cb.intern(ca_t), tcw = cb.intern(cw);
  int inner = cb.placeholder();
  int inner_r = cb.add_root(ta, tca, 0, std::map<std::string, int>{});
  int inner_l = cb.add_lift(tca, tcw, false, {inner});
  cb.fill_split(inner, ta, tcw, {inner_r, inner_l});
  int outer_r = cb.add_root(ta, tca, 0, std::map<std::string, int>{});
  int outer_l = cb.add_lift(tca, tcw, false, {inner});
  int outer = cb.add_split(ta, tcw, {outer_r, outer_l});
  ProofCert unrolled = cb.build(outer);
  REQUIRE(check_valid(unrolled, ac).ok());

  CHECK(cert_equal(tower, unrolled));
  CHECK(cert_equal(tower, tower));

  ProofCert tower_alt = validated("tower_alt.json", ac);
  CHECK_FALSE(cert_equal(tower, tower_alt));

  Trs fg = load_trs("rename.trs");
  CHECK_FALSE(cert_equal(validated("alternation.json", fg), validated("alternation_nested.json", fg)));
}

TEST_CASE("mark nesting depth") {
  Trs ac = load_trs("grow.trs");
  Trs ex = load_trs("nonlinear.trs");
  Trs fg = load_trs("rename.trs");

  CHECK(mark_nesting_depth(validated("tower.json", ac)) == 0);
  CHECK(mark_nesting_depth(validated("collapse.json", ex)) == 1);
  CHECK(mark_nesting_depth(validated("alternation.json", fg)) == 0);
  CHECK(mark_nesting_depth(validated("alternation_nested.json", fg)) == 1);

  // Stacking the f(a,b) proof below another marked lift adds one level:
  // f(f(a,b), b) lifts to f(D, C^omega) with the inner proof at argument 1.
  CertBuilder cb(RelationKind::ired, ex.sig);
  int fab_cert = build_fab_cert(cb, ex);
  Term b = term(ex, "b");
  Term cw = term(ex, "rec X . C(X)");
  Term src = term(ex, "f(f(a, b), b)");
  Term mid = make_fun(ex.sig, "f", {term(ex, "D"), cw});
  int tb = cb.intern(b), tcb = cb.intern(term(ex, "C(b)")), tcw = cb.intern(cw);
  int sb = cb.placeholder();
  cb.fill_split(sb, tb, tcw,
                {cb.add_root(tb, tcb, 2, std::map<std::string, int>{}),
                 cb.add_lift(tcb, tcw, false, {sb})});
  int td = cb.intern(term(ex, "D"));
  int l_outer = cb.add_lift(cb.intern(src), cb.intern(mid), true, {fab_cert, sb});
  int tail = cb.add_lift(cb.intern(mid), cb.intern(mid), false,
                         {cb.add_split(td, td, {}), cb.add_split(tcw, tcw, {})});
  int top = cb.add_split(cb.intern(src), cb.intern(mid), {l_outer, tail});
  ProofCert stacked = cb.build(top);
  REQUIRE(check_valid(stacked, ex).ok());
  CHECK(mark_nesting_depth(stacked) == 2);
}

TEST_CASE("every cycle passes a lift") {
  Trs ac = load_trs("grow.trs");
  Trs ex = load_trs("nonlinear.trs");
  Trs fg = load_trs("rename.trs");
  std::vector<std::pair<std::string, const Trs*>> fixtures{
      {"tower.json", &ac}, {"collapse.json", &ex}, {"tower_alt.json", &ac},
      {"alternation.json", &fg}, {"alternation_nested.json", &fg}};
  for (auto& [name, trs] : fixtures) {
    ProofCert cert = validated(name, *trs);
    // A cycle avoiding every lift could only use split premise edges, and
    // premises are never splits, so no such cycle can close. Verify anyway.
    size_t n = cert.nodes.size();
    for (size_t start = 0; start < n; ++start) {
      std::vector<char> seen(n, 0);
      std::vector<int> stack;
      const ProofNode& s = cert.nodes[start];
      if (s.kind == ProofNode::Kind::split)
        for (int p : s.premises) stack.push_back(p);
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == static_cast<int>(start)) FAIL("lift-free cycle found");
        if (seen[v]) continue;
        seen[v] = 1;
        const ProofNode& node = cert.nodes[v];
        if (node.kind == ProofNode::Kind::split)
          for (int p : node.premises) stack.push_back(p);
      }
    }
  }
}

TEST_CASE("certificate files round-trip") {
  Trs ex = load_trs("nonlinear.trs");
  ProofCert collapse = validated("collapse.json", ex);
  ProofCert back = load_cert_json(save_cert_json(collapse), ex.sig);
  REQUIRE(check_valid(back, ex).ok());
  CHECK(cert_equal(collapse, back));

  CHECK_THROWS_AS(load_cert_json("{", ex.sig), error);
  CHECK_THROWS_AS(load_cert_json(R"({"kind": "ired", "terms": {}, "nodes": {},
                                     "root": "n0", "extra": 1})",
                                 ex.sig),
                  error);
  CHECK_THROWS_AS(
      load_cert_json(R"({"kind": "ired",
                         "terms": {"t0": {"sym": "zzz", "args": []}},
                         "nodes": {"n0": {"kind": "id", "source": "t0",
                                          "target": "t0"}},
                         "root": "n0"})",
                     ex.sig),
      error);
}
