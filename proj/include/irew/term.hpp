#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "irew/signature.hpp"

namespace irew {

/// One node of a term graph. `sym >= 0` selects a function symbol of the
/// signature and `kids` lists the argument nodes (1-based positions index
/// into it); `sym < 0` marks a variable node and `var` names it.
struct TermNode {
  int sym = -1;
  int var = -1;
  std::vector<int> kids;

  bool is_var() const { return sym < 0; }
};

struct TermGraph {
  std::vector<TermNode> nodes;
};

using TermGraphPtr = std::shared_ptr<const TermGraph>;

/// A rational term: a rooted, possibly cyclic term graph. Cyclic graphs
/// denote infinite terms; semantic equality is bisimilarity throughout.
/// Immutable after construction and cheap to copy (shared node table).
class Term {
 public:
  Term() = default;
  Term(SignaturePtr sig, TermGraphPtr graph, int root)
      : sig_(std::move(sig)), graph_(std::move(graph)), root_(root) {}

  const SignaturePtr& sig() const { return sig_; }
  const TermGraphPtr& graph() const { return graph_; }
  int root() const { return root_; }
  const TermNode& node(int id) const { return graph_->nodes[id]; }
  const TermNode& root_node() const { return graph_->nodes[root_]; }

  bool is_var() const { return root_node().is_var(); }
  /// Number of nodes reachable from the root.
  int size() const;
  /// True when no cycle is reachable from the root (the term is finite).
  bool finite() const;

 private:
  SignaturePtr sig_;
  TermGraphPtr graph_;
  int root_ = 0;
};

using Position = std::vector<int>;      // 1-based child indices
using Substitution = std::map<std::string, Term>;

std::string position_to_string(const Position& p);

/// Assembles term graphs, including cyclic ones via placeholders.
class TermBuilder {
 public:
  explicit TermBuilder(SignaturePtr sig) : sig_(std::move(sig)) {}

  int fun(int sym, std::vector<int> kids);
  int fun(const std::string& name, std::vector<int> kids);
  int var(const std::string& name);
  /// Reserves a node to be filled in later (for back-edges).
  int placeholder();
  void fill_fun(int id, int sym, std::vector<int> kids);
  void fill_fun(int id, const std::string& name, std::vector<int> kids);
  void fill_var(int id, int var);
  /// Aliases node `id` to the contents of node `other`.
  void fill_alias(int id, int other);
  bool filled(int id) const { return nodes_[id].sym >= 0 || nodes_[id].var >= 0; }

  /// Copies a foreign term into this builder, returning its root id.
  /// Repeated grafts of the same (graph, node) share the copy.
  int graft(const Term& t);

  const SignaturePtr& sig() const { return sig_; }

  /// Finishes the graph; nodes unreachable from `root` are dropped.
  Term build(int root) const;

  /// Freezes the whole builder as one multi-rooted graph, ids preserved.
  TermGraphPtr snapshot() const;

 private:
  SignaturePtr sig_;
  std::vector<TermNode> nodes_;
  // Grafted source graphs are pinned so the pointer-keyed memo stays sound.
  std::vector<TermGraphPtr> pinned_;
  std::map<std::pair<const TermGraph*, int>, int> graft_memo_;
};

// Convenience constructors for tests and fixtures.
Term make_fun(const SignaturePtr& sig, const std::string& name,
              const std::vector<Term>& args);
Term make_var(const SignaturePtr& sig, const std::string& name);

/// Subterm at position `p`; shares the node table. Throws invalid_position
/// when `p` does not resolve.
Term subterm_at(const Term& t, const Position& p);
std::optional<int> resolve_position(const Term& t, const Position& p);

/// Labels agree on every position of length <= n.
bool truncation_equal(const Term& s, const Term& t, int n);

/// Coinductive equality of term graphs, decided by partition refinement.
bool bisimilar(const Term& s, const Term& t);

struct MetricDistance {
  bool zero;     // bisimilar
  int exponent;  // distance is 2^-exponent when nonzero
};
/// 2^-n with n the least depth where the terms differ; exact 0 when
/// bisimilar. Reported exponents are clamped to `cap`.
MetricDistance metric_distance(const Term& s, const Term& t, int cap = 64);

/// Applies a substitution by redirecting variable nodes; the result shares
/// structure for repeated variables.
Term substitute(const Term& t, const Substitution& sigma);

/// Variables occurring in the term (in first-DFS-visit order).
std::vector<std::string> term_vars(const Term& t);

/// Canonical key: equal strings iff the terms are bisimilar. Obtained by
/// quotienting the graph and serializing a deterministic traversal.
std::string canonical_key(const Term& t);
/// The bisimilarity-quotient graph itself.
Term minimize(const Term& t);

/// Parses the textual grammar
///   term := BINDER | VAR | SYM | SYM '(' term (',' term)* ')'
///         | 'rec' BINDER '.' term
/// where classification of identifiers comes from the signature.
Term parse_term(const std::string& text, const SignaturePtr& sig);
/// Prints a term, introducing `rec` binders at cycle entry nodes.
std::string print_term(const Term& t);

}  // namespace irew
