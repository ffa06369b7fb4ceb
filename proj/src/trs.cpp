#include "irew/trs.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "irew/errors.hpp"

namespace irew {

void check_rule(const Rule& r) {
  if (r.lhs.is_var())
    throw error(errc::format, "rule lhs is a variable");
  if (!r.lhs.finite())
    throw error(errc::format, "rule lhs is not finite");
  auto lv = term_vars(r.lhs);
  std::set<std::string> lhs_vars(lv.begin(), lv.end());
  for (const auto& v : term_vars(r.rhs))
    if (!lhs_vars.count(v))
      throw error(errc::format, "rhs variable " + v + " not in lhs");
}

namespace {

bool match_rec(const Term& t, int tn, const Term& pat, int pn,
               Substitution& out) {
  const TermNode& p = pat.node(pn);
  if (p.is_var()) {
    const std::string& name = pat.sig()->variable_name(p.var);
    Term sub(t.sig(), t.graph(), tn);
    auto it = out.find(name);
    if (it != out.end()) return bisimilar(it->second, sub);
    out.emplace(name, sub);
    return true;
  }
  const TermNode& s = t.node(tn);
  if (s.is_var() || s.sym != p.sym) return false;
  for (size_t i = 0; i < p.kids.size(); ++i)
    if (!match_rec(t, s.kids[i], pat, p.kids[i], out)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match_pattern(const Term& t, const Term& pattern) {
  Substitution out;
  if (!match_rec(t, t.root(), pattern, pattern.root(), out))
    return std::nullopt;
  return out;
}

Term apply_step(const Term& t, const Step& s, const Trs& trs) {
  if (s.rule < 0 || s.rule >= static_cast<int>(trs.rules.size()))
    throw error(errc::format, "rule index " + std::to_string(s.rule) +
                                  " out of range");
  const Rule& rule = trs.rules[s.rule];

  // Resolve the position, remembering the spine.
  std::vector<int> spine;  // node ids along the path, excluding the redex
  int n = t.root();
  for (int i : s.pos) {
    const TermNode& node = t.node(n);
    if (node.is_var() || i < 1 || i > static_cast<int>(node.kids.size()))
      throw error(errc::invalid_position, position_to_string(s.pos));
    spine.push_back(n);
    n = node.kids[i - 1];
  }

  Term redex(t.sig(), t.graph(), n);
  auto sigma = match_pattern(redex, rule.lhs);
  if (!sigma)
    throw error(errc::no_match, "rule " + std::to_string(s.rule) + " at " +
                                    position_to_string(s.pos));
  if (s.subst) {
    for (const auto& [x, v] : *s.subst) {
      auto it = sigma->find(x);
      if (it != sigma->end() && !bisimilar(it->second, v))
        throw error(errc::subst_mismatch, x);
    }
  }

  Term replacement = substitute(rule.rhs, *sigma);
  TermBuilder b(t.sig());
  b.graft(t);  // whole graph, so untouched parts keep their sharing
  int repl = b.graft(replacement);
  // Fresh copies along the spine, deepest first.
  for (int i = static_cast<int>(spine.size()) - 1; i >= 0; --i) {
    const TermNode& orig = t.node(spine[i]);
    std::vector<int> kids;
    for (size_t j = 0; j < orig.kids.size(); ++j) {
      if (static_cast<int>(j) == s.pos[i] - 1)
        kids.push_back(repl);
      else
        kids.push_back(b.graft(Term(t.sig(), t.graph(), orig.kids[j])));
    }
    int fresh = b.placeholder();
    b.fill_fun(fresh, orig.sym, std::move(kids));
    repl = fresh;
  }
  return b.build(repl);
}

std::vector<Term> replay_trace(const FiniteReduction& red, const Trs& trs) {
  std::vector<Term> trace{red.source};
  for (size_t i = 0; i < red.steps.size(); ++i) {
    try {
      trace.push_back(apply_step(trace.back(), red.steps[i], trs));
    } catch (const error& e) {
      throw error(errc::replay,
                  "step " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return trace;
}

Term replay(const FiniteReduction& red, const Trs& trs) {
  return replay_trace(red, trs).back();
}

bool is_left_linear(const Trs& trs) {
  for (const auto& r : trs.rules) {
    // Count variable occurrences in the tree unfolding of the finite lhs.
    std::map<std::string, int> uses;
    std::vector<int> nodes{r.lhs.root()};
    while (!nodes.empty()) {
      int n = nodes.back();
      nodes.pop_back();
      const TermNode& node = r.lhs.node(n);
      if (node.is_var()) {
        if (++uses[r.lhs.sig()->variable_name(node.var)] > 1) return false;
      } else {
        for (int k : node.kids) nodes.push_back(k);
      }
    }
  }
  return true;
}

namespace {

void redexes_rec(const Term& t, int node, const Trs& trs, int depth_left,
                 Position& pos, std::vector<std::pair<Position, int>>& out) {
  Term sub(t.sig(), t.graph(), node);
  for (size_t r = 0; r < trs.rules.size(); ++r)
    if (match_pattern(sub, trs.rules[r].lhs))
      out.emplace_back(pos, static_cast<int>(r));
  if (depth_left == 0) return;
  const TermNode& n = t.node(node);
  for (size_t i = 0; i < n.kids.size(); ++i) {
    pos.push_back(static_cast<int>(i) + 1);
    redexes_rec(t, n.kids[i], trs, depth_left - 1, pos, out);
    pos.pop_back();
  }
}

}  // namespace

std::vector<std::pair<Position, int>> redexes_to_depth(const Term& t,
                                                       const Trs& trs, int n) {
  std::vector<std::pair<Position, int>> out;
  Position pos;
  redexes_rec(t, t.root(), trs, n, pos, out);
  return out;
}

// ---------------------------------------------------------------------------
// TRS text format

namespace {

// Uninterpreted syntax tree; identifiers are classified after arities are
// known.
struct Ast {
  bool is_rec = false;
  std::string head;  // identifier, or binder name when is_rec
  std::vector<Ast> args;
};

struct RawLexer {
  const std::string& text;
  size_t pos = 0;

  explicit RawLexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool accept_arrow() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      pos += 2;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw error(errc::syntax, std::string("expected '") + c + "' at offset " +
                                    std::to_string(pos));
  }
  bool at_ident() {
    skip_ws();
    return pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]));
  }
  std::string ident() {
    skip_ws();
    if (!at_ident())
      throw error(errc::syntax,
                  "expected identifier at offset " + std::to_string(pos));
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
};

Ast parse_ast(RawLexer& lex) {
  Ast a;
  a.head = lex.ident();
  if (a.head == "rec") {
    a.is_rec = true;
    a.head = lex.ident();
    lex.expect('.');
    a.args.push_back(parse_ast(lex));
    return a;
  }
  if (lex.accept('(')) {
    a.args.push_back(parse_ast(lex));
    while (lex.accept(',')) a.args.push_back(parse_ast(lex));
    lex.expect(')');
  }
  return a;
}

void collect_symbols(const Ast& a, const std::set<std::string>& vars,
                     std::set<std::string>& binders,
                     std::map<std::string, int>& arities) {
  if (a.is_rec) {
    if (binders.count(a.head))
      throw error(errc::syntax, "binder " + a.head + " shadows an enclosing binder");
    binders.insert(a.head);
    collect_symbols(a.args[0], vars, binders, arities);
    binders.erase(a.head);
    return;
  }
  if (binders.count(a.head)) {
    if (!a.args.empty())
      throw error(errc::syntax, "binder " + a.head + " used with arguments");
    return;
  }
  if (vars.count(a.head)) {
    if (!a.args.empty())
      throw error(errc::syntax, "variable " + a.head + " used with arguments");
    return;
  }
  auto it = arities.find(a.head);
  int ar = static_cast<int>(a.args.size());
  if (it == arities.end())
    arities[a.head] = ar;
  else if (it->second != ar)
    throw error(errc::arity_mismatch,
                a.head + " used with arities " + std::to_string(it->second) +
                    " and " + std::to_string(ar));
  for (const auto& k : a.args) collect_symbols(k, vars, binders, arities);
}

int build_from_ast(const Ast& a, TermBuilder& b,
                   std::map<std::string, int>& binders) {
  if (a.is_rec) {
    int slot = b.placeholder();
    binders[a.head] = slot;
    int body = build_from_ast(a.args[0], b, binders);
    binders.erase(a.head);
    if (body == slot || !b.filled(body))
      throw error(errc::unbound_binder, "rec " + a.head + " binds only itself");
    b.fill_alias(slot, body);
    return slot;
  }
  auto bound = binders.find(a.head);
  if (bound != binders.end()) return bound->second;
  if (b.sig()->variable_index(a.head) >= 0) return b.var(a.head);
  std::vector<int> kids;
  for (const auto& k : a.args) kids.push_back(build_from_ast(k, b, binders));
  return b.fun(a.head, std::move(kids));
}

}  // namespace

Trs parse_trs(const std::string& text) {
  RawLexer lex(text);
  lex.expect('(');
  if (lex.ident() != "VAR") throw error(errc::syntax, "expected VAR section");
  std::vector<std::string> var_list;
  std::set<std::string> vars;
  while (lex.at_ident()) {
    std::string v = lex.ident();
    if (!vars.insert(v).second)
      throw error(errc::syntax, "duplicate variable " + v);
    var_list.push_back(v);
  }
  lex.expect(')');
  lex.expect('(');
  if (lex.ident() != "RULES") throw error(errc::syntax, "expected RULES section");
  std::vector<std::pair<Ast, Ast>> rule_asts;
  while (lex.at_ident()) {
    Ast lhs = parse_ast(lex);
    if (!lex.accept_arrow())
      throw error(errc::syntax,
                  "expected -> at offset " + std::to_string(lex.pos));
    Ast rhs = parse_ast(lex);
    rule_asts.emplace_back(std::move(lhs), std::move(rhs));
  }
  lex.expect(')');
  lex.skip_ws();
  if (lex.pos != text.size())
    throw error(errc::syntax,
                "trailing input at offset " + std::to_string(lex.pos));

  std::map<std::string, int> arities;
  std::set<std::string> binders;
  for (const auto& [l, r] : rule_asts) {
    collect_symbols(l, vars, binders, arities);
    collect_symbols(r, vars, binders, arities);
  }

  auto sig_mut = std::make_shared<Signature>();
  for (const auto& [name, ar] : arities) sig_mut->add_symbol(name, ar);
  for (const auto& v : var_list) sig_mut->add_variable(v);
  SignaturePtr sig = sig_mut;

  Trs trs;
  trs.sig = sig;
  for (const auto& [l, r] : rule_asts) {
    TermBuilder bl(sig), br(sig);
    std::map<std::string, int> env;
    Term lhs = bl.build(build_from_ast(l, bl, env));
    env.clear();
    Term rhs = br.build(build_from_ast(r, br, env));
    Rule rule{lhs, rhs, ""};
    check_rule(rule);
    trs.rules.push_back(std::move(rule));
  }
  return trs;
}

std::string print_trs(const Trs& trs) {
  std::ostringstream os;
  os << "(VAR";
  for (const auto& v : trs.sig->variables()) os << ' ' << v;
  os << ")\n(RULES\n";
  for (const auto& r : trs.rules)
    os << "  " << print_term(r.lhs) << " -> " << print_term(r.rhs) << "\n";
  os << ")\n";
  return os.str();
}

}  // namespace irew
