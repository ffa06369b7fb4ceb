#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "irew/term.hpp"

namespace irew {

/// Rewrite rule. The left-hand side is a finite term whose root is not a
/// variable; the right-hand side may be rational-infinite but uses only
/// variables of the lhs.
struct Rule {
  Term lhs;
  Term rhs;
  std::string name;
};

struct Trs {
  SignaturePtr sig;
  std::vector<Rule> rules;
};

/// One rewrite step: rule applied at a position. The substitution may be
/// omitted; replay infers it by matching.
struct Step {
  Position pos;
  int rule = 0;
  std::optional<Substitution> subst;
};

/// A source term plus an ordered list of steps, replayable.
struct FiniteReduction {
  Term source;
  std::vector<Step> steps;
};

/// Checks rule well-formedness and throws on violation.
void check_rule(const Rule& r);

/// Matches `pattern` (finite) against `t` modulo bisimilarity. Repeated
/// pattern variables require pairwise bisimilar matches. Returns nullopt on
/// symbol, arity, or non-linearity clashes.
std::optional<Substitution> match_pattern(const Term& t, const Term& pattern);

/// Applies one step; positions outside `s.pos` are untouched.
Term apply_step(const Term& t, const Step& s, const Trs& trs);

/// Applies the steps in order and returns the final term.
Term replay(const FiniteReduction& red, const Trs& trs);
/// All intermediate terms, from the source to the final term inclusive.
std::vector<Term> replay_trace(const FiniteReduction& red, const Trs& trs);

bool is_left_linear(const Trs& trs);

/// Redex occurrences at positions of length <= n, in lexicographic position
/// order, then rule order.
std::vector<std::pair<Position, int>> redexes_to_depth(const Term& t,
                                                       const Trs& trs, int n);

/// Parses the textual format
///   (VAR x y ...)
///   (RULES lhs -> rhs ...)
/// with symbol arities inferred from first use.
Trs parse_trs(const std::string& text);
std::string print_trs(const Trs& trs);

}  // namespace irew
