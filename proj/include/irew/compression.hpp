#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irew/proof.hpp"

namespace irew {

/// One node of a length-<=omega certificate: a finite reduction from the
/// source followed by either nothing (the prefix already ends bisimilar to
/// the target) or a lift over the target's head symbol with child nodes for
/// the arguments.
struct OredNode {
  int source = 0;  // term id
  int target = 0;  // term id
  std::vector<Step> prefix;
  bool has_lift = false;
  int head = -1;              // symbol index, lift only
  std::vector<int> children;  // lift only
};

class OredCert {
 public:
  SignaturePtr sig;
  TermGraphPtr terms;
  std::vector<OredNode> nodes;
  int root = 0;

  OredCert() = default;
  OredCert(const OredCert& o);
  OredCert& operator=(const OredCert& o);

  Term term(int id) const { return Term(sig, terms, id); }

  bool validated() const { return validated_.load(std::memory_order_acquire); }
  void set_validated(bool v) const { validated_.store(v, std::memory_order_release); }

 private:
  mutable std::atomic<bool> validated_{false};
};

struct OredViolation {
  int node = 0;
  std::string message;
};

struct OredValidation {
  std::optional<OredViolation> violation;
  bool ok() const { return !violation.has_value(); }
};

/// Checks every node: prefix replays from the source, and the final term is
/// bisimilar to the target (no lift) or shares the target's head with
/// children relating argument-wise.
OredValidation validate_ored(const OredCert& cert, const Trs& trs);

/// Transforms a validated ired certificate over a left-linear system into a
/// length-<=omega certificate with the same endpoints. `max_nodes` caps the
/// constructed graph; exceeding it raises resource_exceeded (a resource
/// error, never a semantic verdict).
OredCert compress(const ProofCert& cert, const Trs& trs,
                  std::size_t max_nodes = 1000000);

struct OredMatchSplit {
  OredCert extended;  // input graph plus any residual nodes
  FiniteReduction reduction;
  std::map<std::string, int> residuals;  // pattern var -> node id in extended
};

/// Splits node `node` of `cert` at a finite linear pattern: a finite
/// reduction from the node's source to an instance of the pattern, plus a
/// residual node per pattern variable. Returns nullopt when the node's
/// target does not fit the pattern (a malformed claim).
std::optional<OredMatchSplit> ored_match_split(const OredCert& cert, int node,
                                               const Term& pattern,
                                               const Trs& trs);

/// First k steps of the dovetailed sequence: the root node's prefix, then
/// children round-robin with positions shifted. Requires validation.
FiniteReduction linearize(const OredCert& cert, std::uint64_t k);

/// Graph bisimilarity of ored certificates (prefixes compared step-wise,
/// terms by bisimilarity).
bool ored_equal(const OredCert& a, const OredCert& b);

/// Number of nodes reachable from the root.
std::size_t ored_size(const OredCert& cert);

/// JSON ored certificate format. Step substitutions use term text.
OredCert load_ored_json(const std::string& text, const SignaturePtr& sig);
std::string save_ored_json(const OredCert& cert);

}  // namespace irew
