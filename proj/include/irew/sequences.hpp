#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "irew/proof.hpp"

namespace irew {

struct RuleApplication {
  int rule = 0;
  Position pos;

  bool operator==(const RuleApplication& o) const {
    return rule == o.rule && pos == o.pos;
  }
  bool operator<(const RuleApplication& o) const {
    return rule != o.rule ? rule < o.rule : pos < o.pos;
  }
};

/// Witness for parallel permutation equivalence: a bijection between the
/// step indices of two finite sequences. f[i] is the index in the second
/// sequence of step i of the first.
struct PermutationWitness {
  std::vector<std::size_t> f;
};

struct ProjectionResult {
  std::vector<RuleApplication> apps;
  std::vector<std::size_t> embedding;  // original step indices, increasing
};

/// Order-preserving subsequence of rulapp(S) consisting of the members of P.
ProjectionResult project(const FiniteReduction& S,
                         const std::set<RuleApplication>& P, const Trs& trs);

/// Searches for a bijection under which both sequences apply the same rule
/// at the same position, and any pair of swapped steps sits at parallel
/// positions. Sources must be bisimilar.
std::optional<PermutationWitness> permutation_equiv_bruteforce(
    const FiniteReduction& S, const FiniteReduction& T, const Trs& trs);

/// The canonical certificate of a finite sequence: split at root steps,
/// recurse argument-wise on the segments between them, identity tails made
/// explicit. Output passes check_valid and is_canonical.
ProofCert canonical_tree_of(const FiniteReduction& S, const Trs& trs);

/// Decision via canonical trees: equal canonical certificates iff the
/// sequences are parallel permutation equivalent.
bool permutation_equiv(const FiniteReduction& S, const FiniteReduction& T,
                       const Trs& trs);

/// True iff S decomposes along the certificate: splits concatenate, roots
/// take one matching step, lifts interleave argument subsequences, ids take
/// none. Requires a validated certificate.
bool corresponds_finite(const FiniteReduction& S, const ProofCert& cert,
                        const Trs& trs);

/// The subsequence of T induced by the prefix of S of length kappa under
/// witness w. Throws invalid_witness when w does not witness equivalence.
FiniteReduction permute_prefix(const FiniteReduction& S,
                               const FiniteReduction& T,
                               const PermutationWitness& w, std::size_t kappa,
                               const Trs& trs);

/// JSON sequence file format:
///   { "source": "<term>", "steps": [ {"pos": [...], "rule": i,
///     "subst": {"x": "<term>"}?}, ... ] }
FiniteReduction load_sequence_json(const std::string& text,
                                   const SignaturePtr& sig);
std::string save_sequence_json(const FiniteReduction& red);

}  // namespace irew
