#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "irew/proof.hpp"

namespace irew {

// The canonical interleaving policy used to read rewrite sequences out of a
// certificate: split premises contribute in order (a premise with an
// infinite sequence absorbs everything after it for prefix purposes), lifts
// dovetail their children round-robin, left to right, one step per
// non-exhausted child per round.

struct SeqFiniteness {
  bool finite;          // subgraph reachable from the node is acyclic
  std::uint64_t steps;  // exact count when finite
};

/// Acyclicity plus exact step count of the subgraph under `node`.
SeqFiniteness seq_is_finite(const ProofCert& cert, int node);

/// First min(k, total) steps of the canonical sequence, as a replayable
/// reduction from the certificate's source. Requires a validated ired or
/// ibi certificate.
FiniteReduction canonical_prefix(const ProofCert& cert, std::uint64_t k);

/// All steps of the canonical sequence at positions of length <= n, in
/// canonical-sequence order. Finite for every validated ired certificate.
std::vector<std::pair<Position, int>> steps_at_depth(const ProofCert& cert,
                                                     int n);

struct PrefixAgreement {
  FiniteReduction prefix;
  bool agree;  // replay result truncation-equal to the target at depth n
};

/// Shortest canonical prefix containing all steps of depth <= n, plus the
/// truncation agreement of its replay result against the target. Rejects
/// certificates whose canonical sequence has order type beyond omega
/// (not_omega), detected syntactically: some split has a premise with an
/// infinite sequence followed by a premise containing a root step.
PrefixAgreement prefix_agreement(const ProofCert& cert, const Trs& trs, int n);

}  // namespace irew
