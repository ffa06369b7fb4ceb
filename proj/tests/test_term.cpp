#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace irew;
using testutil::small_sig;

namespace {

Term parse(const SignaturePtr& sig, const std::string& text) {
  return parse_term(text, sig);
}

// All single-rooted graphs with up to `max_nodes` nodes over {C/1, a/0},
// including cyclic ones.
std::vector<Term> enumerate_unary_graphs(const SignaturePtr& sig, int max_nodes) {
  std::vector<Term> out;
  for (int k = 1; k <= max_nodes; ++k) {
    // Each node is either the constant or C applied to some node id.
    std::vector<int> shape(k, -1);  // -1 constant, otherwise child id
    for (;;) {
      TermBuilder b(sig);
      std::vector<int> ids;
      for (int i = 0; i < k; ++i) ids.push_back(b.placeholder());
      for (int i = 0; i < k; ++i) {
        if (shape[i] < 0)
          b.fill_fun(ids[i], "a", {});
        else
          b.fill_fun(ids[i], "C", {ids[shape[i]]});
      }
      out.push_back(b.build(ids[0]));
      int i = 0;
      for (; i < k; ++i) {
        if (++shape[i] < k) break;
        shape[i] = -1;
      }
      if (i == k) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("signatures reject clashing names") {
  Signature sig;
  sig.add_symbol("C", 1);
  sig.add_variable("x");
  CHECK_THROWS_AS(sig.add_symbol("C", 2), error);
  CHECK_THROWS_AS(sig.add_variable("C"), error);
  CHECK_THROWS_AS(sig.add_symbol("x", 0), error);
  CHECK_THROWS_AS(sig.add_symbol("neg", -1), error);
}

TEST_CASE("subterm access") {
  auto sig = small_sig();
  Term ca = parse(sig, "C(a)");
  CHECK(bisimilar(subterm_at(ca, {}), ca));
  CHECK(subterm_at(ca, {1}).graph().get() == ca.graph().get());

  Term cw = parse(sig, "rec X . C(X)");
  CHECK(bisimilar(subterm_at(cw, {1}), cw));

  Term fab = parse(sig, "f(a, b)");
  CHECK(bisimilar(subterm_at(fab, {2}), parse(sig, "b")));

  CHECK_THROWS_AS(subterm_at(fab, {3}), error);
  CHECK_THROWS_AS(subterm_at(fab, {1, 1}), error);
}

TEST_CASE("truncation equality") {
  auto sig = small_sig();
  Term cw = parse(sig, "rec X . C(X)");
  Term ca = parse(sig, "C(a)");
  CHECK(truncation_equal(cw, ca, 0));
  CHECK_FALSE(truncation_equal(cw, ca, 1));
  CHECK_FALSE(truncation_equal(parse(sig, "rec X . C(X)"),
                               parse(sig, "rec X . g(X)"), 0));
}

TEST_CASE("metric distance") {
  auto sig = small_sig();
  Term cw = parse(sig, "rec X . C(X)");
  Term ca = parse(sig, "C(a)");

  // Pinned via the scanning oracle.
  auto level = oracle::naive_difference_level(cw, ca);
  REQUIRE(level.has_value());
  CHECK(*level == 1);
  MetricDistance d = metric_distance(cw, ca);
  CHECK_FALSE(d.zero);
  CHECK(d.exponent == 1);

  CHECK(metric_distance(cw, cw).zero);
  MetricDistance ab = metric_distance(parse(sig, "a"), parse(sig, "b"));
  CHECK_FALSE(ab.zero);
  CHECK(ab.exponent == 0);
}

TEST_CASE("bisimilarity") {
  auto sig = small_sig();
  Term cw = parse(sig, "rec X . C(X)");
  CHECK(bisimilar(cw, parse(sig, "C(rec X . C(X))")));

  Term cw2 = parse(sig, "rec X . C(C(X))");
  CHECK(oracle::naive_bisimilar(cw, cw2));
  CHECK(bisimilar(cw, cw2));

  CHECK_FALSE(bisimilar(parse(sig, "f(a, b)"), parse(sig, "f(b, a)")));
}

TEST_CASE("bisimilarity agrees with the unfolding oracle exhaustively") {
  auto sig = small_sig();
  auto graphs = enumerate_unary_graphs(sig, 4);
  std::vector<std::string> keys;
  keys.reserve(graphs.size());
  for (const auto& g : graphs) keys.push_back(canonical_key(g));
  int checked = 0;
  for (size_t i = 0; i < graphs.size(); ++i) {
    for (size_t j = i; j < graphs.size(); ++j) {
      bool fast = keys[i] == keys[j];
      int bound = 2 * graphs[i].size() * graphs[j].size();
      bool trunc_all = true;
      for (int n = 0; n <= bound && trunc_all; ++n)
        trunc_all = truncation_equal(graphs[i], graphs[j], n);
      if (fast != trunc_all) {
        CAPTURE(i);
        CAPTURE(j);
        REQUIRE(fast == trunc_all);
      }
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("bisimilarity is an equivalence") {
  auto sig = small_sig();
  auto graphs = enumerate_unary_graphs(sig, 3);
  for (const auto& g : graphs) CHECK(bisimilar(g, g));
  for (size_t i = 0; i < graphs.size(); i += 7)
    for (size_t j = 0; j < graphs.size(); j += 11) {
      CHECK(bisimilar(graphs[i], graphs[j]) == bisimilar(graphs[j], graphs[i]));
      for (size_t k = 0; k < graphs.size(); k += 13)
        if (bisimilar(graphs[i], graphs[j]) && bisimilar(graphs[j], graphs[k]))
          CHECK(bisimilar(graphs[i], graphs[k]));
    }
}

TEST_CASE("metric is consistent with truncation") {
  auto sig = small_sig();
  auto graphs = enumerate_unary_graphs(sig, 3);
  for (size_t i = 0; i < graphs.size(); i += 5)
    for (size_t j = 0; j < graphs.size(); j += 3) {
      MetricDistance d = metric_distance(graphs[i], graphs[j]);
      if (d.zero) {
        CHECK(bisimilar(graphs[i], graphs[j]));
      } else {
        if (d.exponent > 0)
          CHECK(truncation_equal(graphs[i], graphs[j], d.exponent - 1));
        CHECK_FALSE(truncation_equal(graphs[i], graphs[j], d.exponent));
      }
    }
}

TEST_CASE("substitution") {
  auto sig = small_sig();
  Substitution to_a{{"x", parse(sig, "a")}};
  CHECK(bisimilar(substitute(parse(sig, "C(x)"), to_a), parse(sig, "C(a)")));

  Term cw = parse(sig, "rec X . C(X)");
  Substitution to_cw{{"x", cw}};
  CHECK(bisimilar(substitute(parse(sig, "x"), to_cw), cw));

  Substitution to_ca{{"x", parse(sig, "C(a)")}};
  Term dup = substitute(parse(sig, "f(x, x)"), to_ca);
  CHECK(bisimilar(dup, parse(sig, "f(C(a), C(a))")));
}

TEST_CASE("substitution composes on disjoint domains") {
  auto sig = small_sig();
  std::vector<std::string> bodies{"f(x, y)", "C(x)", "f(C(x), g(y))", "x"};
  std::vector<std::string> images{"g(a)", "C(b)", "a", "rec X . C(X)"};
  for (const auto& body : bodies) {
    for (const auto& img1 : images) {
      for (const auto& img2 : images) {
        Term t = parse(sig, body);
        Substitution sigma{{"x", parse(sig, img1)}};
        Substitution tau{{"y", parse(sig, img2)}};
        // dom(sigma) and the variables of its range are disjoint here.
        Term lhs = substitute(substitute(t, sigma), tau);
        Substitution composed{{"x", substitute(parse(sig, img1), tau)},
                              {"y", parse(sig, img2)}};
        Term rhs = substitute(t, composed);
        CHECK(bisimilar(lhs, rhs));
      }
    }
  }
}

TEST_CASE("parsing and printing") {
  auto sig = small_sig();
  Term cw = parse(sig, "rec X . C(X)");
  CHECK(bisimilar(cw, parse(sig, "rec X . C(C(X))")));
  CHECK(parse(sig, "f(a, b)").size() == 3);

  CHECK_THROWS_AS(parse(sig, "C(a"), error);
  CHECK_THROWS_AS(parse(sig, "unknown(a)"), error);
  CHECK_THROWS_AS(parse(sig, "C(a, b)"), error);
  CHECK_THROWS_AS(parse(sig, "rec X . X"), error);
  CHECK_THROWS_AS(parse(sig, "rec X . rec X . C(X)"), error);

  for (const std::string text :
       {"a", "x", "f(a, C(b))", "rec X . C(X)", "rec X . f(X, rec Y . C(Y))",
        "C(rec X . C(C(X)))", "f(rec X . C(X), rec X . C(X))"}) {
    Term t = parse(sig, text);
    Term back = parse(sig, print_term(t));
    CHECK(bisimilar(t, back));
  }
}

TEST_CASE("variables as roots and leaves") {
  auto sig = small_sig();
  Term x = parse(sig, "x");
  CHECK(x.is_var());
  CHECK(bisimilar(x, make_var(sig, "x")));
  CHECK_FALSE(bisimilar(x, parse(sig, "y")));
  CHECK(term_vars(parse(sig, "f(x, C(y))")) ==
        std::vector<std::string>{"x", "y"});
}

TEST_CASE("canonical keys track bisimilarity") {
  auto sig = small_sig();
  CHECK(canonical_key(parse(sig, "rec X . C(X)")) ==
        canonical_key(parse(sig, "rec X . C(C(X))")));
  CHECK(canonical_key(parse(sig, "C(a)")) != canonical_key(parse(sig, "C(b)")));
  Term m = minimize(parse(sig, "rec X . C(C(X))"));
  CHECK(m.size() == 1);
}
