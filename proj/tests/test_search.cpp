#include "doctest.h"
#include "helpers.hpp"

using namespace irew;
using testutil::load_cert;
using testutil::load_trs;
using testutil::term;

namespace {

ProofCert expect_found(const Term& s, const Term& t, RelationKind kind,
                       const Trs& trs, const SearchBudget& budget = {}) {
  SearchResult r = search_proof(s, t, kind, trs, budget);
  if (!std::holds_alternative<ProofCert>(r)) {
    auto& ex = std::get<Exhausted>(r);
    CAPTURE(ex.goals_used);
    CAPTURE(ex.detail);
    REQUIRE(std::holds_alternative<ProofCert>(r));
  }
  ProofCert cert = std::get<ProofCert>(std::move(r));
  auto v = check_valid(cert, trs);
  if (!v.ok()) {
    CAPTURE(v.violation->node);
    CAPTURE(v.violation->clause);
    CAPTURE(v.violation->message);
    REQUIRE(v.ok());
  }
  return cert;
}

}  // namespace

TEST_CASE("the backward limit is found bi-infinitely but not forward") {
  Trs ca = load_trs("unwrap.trs");
  Term cw = term(ca, "rec X . C(X)");
  Term a = term(ca, "a");

  ProofCert found = expect_found(cw, a, RelationKind::ibi, ca);
  ProofCert shape = load_cert("backward_bi.json", ca.sig);
  REQUIRE(check_valid(shape, ca).ok());
  CHECK(cert_equal(found, shape));

  SearchResult r = search_proof(cw, a, RelationKind::ired, ca);
  REQUIRE(std::holds_alternative<Exhausted>(r));
  CHECK(std::get<Exhausted>(r).goals_used > 0);
}

TEST_CASE("forward towers are found as ired") {
  Trs ac = load_trs("grow.trs");
  Term a = term(ac, "a");
  Term cw = term(ac, "rec X . C(X)");

  ProofCert cert = expect_found(a, cw, RelationKind::ired, ac);
  ProofCert tower = load_cert("tower.json", ac.sig);
  REQUIRE(check_valid(tower, ac).ok());
  CHECK(cert_equal(cert, tower));

  // Coherence between the two forward relations.
  ProofCert as_ibi = forget_marks(cert);
  CHECK(check_valid(as_ibi, ac).ok());
  ProofCert ibi_found = expect_found(a, cw, RelationKind::ibi, ac);
  CHECK(ibi_found.kind == RelationKind::ibi);
}

TEST_CASE("reflexive and trivial goals") {
  Trs ac = load_trs("grow.trs");
  Term ca_t = term(ac, "C(a)");
  ProofCert refl = expect_found(ca_t, term(ac, "C(a)"), RelationKind::ired, ac);
  CHECK(refl.nodes[refl.root].premises.empty());

  // Bisimilar representations count as equal endpoints.
  expect_found(term(ac, "rec X . C(X)"), term(ac, "rec X . C(C(X))"),
               RelationKind::ired, ac);
}

TEST_CASE("equational certificates via both directions") {
  Trs mixed = load_trs("mixed_eq.trs");
  expect_found(term(mixed, "a"), term(mixed, "b"), RelationKind::ieq, mixed);
  expect_found(term(mixed, "C(a)"), term(mixed, "rec X . C(X)"),
               RelationKind::ieq, mixed);
}

TEST_CASE("the two-letter equational system") {
  Trs ab = load_trs("letters.trs");
  Term aw = term(ab, "rec X . a(X)");
  Term bw = term(ab, "rec X . b(X)");
  expect_found(aw, bw, RelationKind::ieq, ab);
}

TEST_CASE("search is deterministic") {
  Trs ca = load_trs("unwrap.trs");
  Term cw = term(ca, "rec X . C(X)");
  Term a = term(ca, "a");
  ProofCert c1 = expect_found(cw, a, RelationKind::ibi, ca);
  ProofCert c2 = expect_found(cw, a, RelationKind::ibi, ca);
  CHECK(cert_equal(c1, c2));
}

TEST_CASE("budget monotonicity") {
  Trs mixed = load_trs("mixed_eq.trs");
  SearchBudget base;
  ProofCert small = expect_found(term(mixed, "a"), term(mixed, "b"),
                                 RelationKind::ieq, mixed, base);
  SearchBudget doubled;
  doubled.max_goals = base.max_goals * 2;
  doubled.max_segment = base.max_segment * 2;
  doubled.max_new_terms = base.max_new_terms * 2;
  ProofCert large = expect_found(term(mixed, "a"), term(mixed, "b"),
                                 RelationKind::ieq, mixed, doubled);
  CHECK(check_valid(large, mixed).ok());
  (void)small;
}

TEST_CASE("exhaustion reports budgets") {
  Trs ca = load_trs("unwrap.trs");
  SearchBudget tiny;
  tiny.max_goals = 1;
  tiny.max_new_terms = 2;
  SearchResult r = search_proof(term(ca, "rec X . C(X)"), term(ca, "a"),
                                RelationKind::ibi, ca, tiny);
  REQUIRE(std::holds_alternative<Exhausted>(r));
  CHECK_FALSE(std::get<Exhausted>(r).detail.empty());
}
