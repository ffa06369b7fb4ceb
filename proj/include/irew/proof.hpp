#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "irew/trs.hpp"

namespace irew {

/// The three relations certified by proof graphs:
///   ired — infinitary rewriting (forward limits only),
///   ibi  — bi-infinite rewriting,
///   ieq  — infinitary equational reasoning (backward root steps allowed).
enum class RelationKind { ired, ibi, ieq };

const char* kind_name(RelationKind k);
std::optional<RelationKind> kind_from_name(const std::string& s);

struct ProofNode {
  enum class Kind { split, lift, id, root };

  Kind kind = Kind::id;
  int source = 0;  // term id
  int target = 0;  // term id

  std::vector<int> premises;  // split
  std::vector<int> children;  // lift
  bool marked = false;        // lift, ired only
  int rule = -1;              // root
  std::optional<std::map<std::string, int>> subst;  // root; var -> term id
  bool reversed = false;      // root, ieq only
};

/// Regular proof-tree certificate: a finite node graph (back-edges allowed)
/// over a term table. Terms are nodes of one shared term graph, so term ids
/// are node ids of `terms`.
class ProofCert {
 public:
  RelationKind kind = RelationKind::ired;
  SignaturePtr sig;
  TermGraphPtr terms;
  std::vector<ProofNode> nodes;
  int root = 0;

  ProofCert() = default;
  ProofCert(const ProofCert& o);
  ProofCert& operator=(const ProofCert& o);

  Term term(int id) const { return Term(sig, terms, id); }

  bool validated() const { return validated_.load(std::memory_order_acquire); }
  void set_validated(bool v) const { validated_.store(v, std::memory_order_release); }

 private:
  mutable std::atomic<bool> validated_{false};
};

struct Violation {
  int node = 0;
  std::string clause;
  std::string message;
};

struct ValidationResult {
  std::optional<Violation> violation;
  bool ok() const { return !violation.has_value(); }
};

/// Checks local validity of every node, split-chain structure, kind-specific
/// legality, and (for ired) that no marked lift lies on a cycle. On success
/// the certificate is flagged validated. The reported violation is the one
/// with the smallest node id.
ValidationResult check_valid(const ProofCert& cert, const Trs& trs);

/// True iff every split matches (marked lift ; root)* ; final with the final
/// element an unmarked lift or a variable id, after completing premise lists
/// with identity lifts before unguarded roots. Requires prior check_valid.
bool is_canonical(const ProofCert& cert);

/// Erases all marks; kind becomes ibi. Input must be ired.
ProofCert forget_marks(const ProofCert& cert);
/// Reinterprets an ibi certificate as ieq.
ProofCert embed_ieq(const ProofCert& cert);

/// Equality of certificates as regular trees: bisimilarity of the node
/// graphs, with term payloads compared by term bisimilarity.
bool cert_equal(const ProofCert& a, const ProofCert& b);
/// Canonical serialization; equal strings iff cert_equal.
std::string cert_canonical_key(const ProofCert& cert);

/// Maximum number of marked lifts on any path of the condensation DAG.
/// Requires a validated ired certificate.
int mark_nesting_depth(const ProofCert& cert);

/// Assembles certificates, including cyclic ones.
class CertBuilder {
 public:
  CertBuilder(RelationKind kind, SignaturePtr sig);

  /// Interns a term into the certificate's term table (deduplicated by
  /// canonical key).
  int intern(const Term& t);

  int add_split(int source, int target, std::vector<int> premises);
  int add_lift(int source, int target, bool marked, std::vector<int> children);
  int add_id(int source, int target);
  int add_root(int source, int target, int rule,
               std::optional<std::map<std::string, int>> subst,
               bool reversed = false);

  /// Reserves a node id for back-edges; fill with one of the fill_* calls.
  int placeholder();
  void fill_split(int id, int source, int target, std::vector<int> premises);
  void fill_lift(int id, int source, int target, bool marked,
                 std::vector<int> children);

  Term term(int id) const;
  ProofCert build(int root) const;

 private:
  RelationKind kind_;
  SignaturePtr sig_;
  TermBuilder terms_;
  std::map<std::string, int> term_memo_;
  std::vector<ProofNode> nodes_;
};

/// JSON certificate file format. Unknown fields are rejected.
ProofCert load_cert_json(const std::string& text, const SignaturePtr& sig);
std::string save_cert_json(const ProofCert& cert);

}  // namespace irew
