#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "irew/proof.hpp"

namespace irew {

struct SearchBudget {
  std::uint64_t max_goals = 2000;     // goal expansions
  int max_segment = 4;                // root steps per split premise chain
  std::uint64_t max_new_terms = 5000; // distinct intermediate terms
};

struct Exhausted {
  std::uint64_t goals_used = 0;
  std::uint64_t terms_used = 0;
  std::string detail;
};

using SearchResult = std::variant<ProofCert, Exhausted>;

/// Bounded goal-directed construction of a certificate for `s R t`. Goals
/// are keyed by canonical term hashes; a goal equal to an in-progress
/// ancestor is closed by a back-edge — unconditionally for ibi/ieq, for
/// ired only when no marked lift lies on the path between the two
/// occurrences. Exhaustion is never a disproof.
SearchResult search_proof(const Term& s, const Term& t, RelationKind kind,
                          const Trs& trs, const SearchBudget& budget = {});

}  // namespace irew
