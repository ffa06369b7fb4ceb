#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "irew/errors.hpp"
#include "irew/term.hpp"

namespace irew {

namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
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

  void expect(char c) {
    if (!accept(c))
      throw error(errc::syntax, std::string("expected '") + c + "' at offset " +
                                    std::to_string(pos));
  }

  std::string ident() {
    skip_ws();
    if (pos >= text.size() || !(std::isalpha(static_cast<unsigned char>(text[pos]))))
      throw error(errc::syntax,
                  "expected identifier at offset " + std::to_string(pos));
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
};

struct TermParser {
  Lexer lex;
  const SignaturePtr& sig;
  TermBuilder builder;
  std::map<std::string, int> binders;  // binder name -> node id

  TermParser(const std::string& text, const SignaturePtr& s)
      : lex(text), sig(s), builder(s) {}

  int parse() {
    if (lex.peek() == '\0') throw error(errc::syntax, "empty term");
    std::string id = lex.ident();
    if (id == "rec") return parse_rec();
    auto bound = binders.find(id);
    if (bound != binders.end()) {
      if (lex.peek() == '(')
        throw error(errc::syntax, "binder " + id + " used with arguments");
      return bound->second;
    }
    if (sig->variable_index(id) >= 0) {
      if (lex.peek() == '(')
        throw error(errc::syntax, "variable " + id + " used with arguments");
      return builder.var(id);
    }
    int sym = sig->symbol_index(id);
    if (sym < 0) throw error(errc::unknown_symbol, id);
    std::vector<int> kids;
    if (lex.accept('(')) {
      kids.push_back(parse());
      while (lex.accept(',')) kids.push_back(parse());
      lex.expect(')');
    }
    if (static_cast<int>(kids.size()) != sig->arity(sym))
      throw error(errc::arity_mismatch,
                  id + " used with " + std::to_string(kids.size()) +
                      " arguments, declared arity " +
                      std::to_string(sig->arity(sym)));
    return builder.fun(sym, std::move(kids));
  }

  int parse_rec() {
    std::string name = lex.ident();
    if (binders.count(name))
      throw error(errc::syntax, "binder " + name + " shadows an enclosing binder");
    lex.expect('.');
    int slot = builder.placeholder();
    binders[name] = slot;
    int body = parse();
    binders.erase(name);
    if (body == slot || !builder.filled(body))
      throw error(errc::unbound_binder, "rec " + name + " binds only itself");
    builder.fill_alias(slot, body);
    return slot;
  }
};

}  // namespace

Term parse_term(const std::string& text, const SignaturePtr& sig) {
  TermParser p(text, sig);
  int root = p.parse();
  if (!p.lex.eof())
    throw error(errc::syntax,
                "trailing input at offset " + std::to_string(p.lex.pos));
  // A placeholder may remain unfilled only through nested recs aliasing each
  // other; TermBuilder::build rejects that.
  return p.builder.build(root);
}

namespace {

// Nodes that are entered again while still on the DFS stack need binders.
void find_cycle_entries(const Term& t, std::set<int>& entries) {
  enum { White, Grey, Black };
  std::vector<char> color(t.graph()->nodes.size(), White);
  std::vector<std::pair<int, size_t>> stack{{t.root(), 0}};
  color[t.root()] = Grey;
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    const auto& kids = t.node(n).kids;
    if (i == kids.size()) {
      color[n] = Black;
      stack.pop_back();
      continue;
    }
    int k = kids[i++];
    if (color[k] == Grey) {
      entries.insert(k);
    } else if (color[k] == White) {
      color[k] = Grey;
      stack.emplace_back(k, 0);
    }
    // Black nodes are shared acyclically; printing duplicates them.
  }
}

std::string fresh_binder(const SignaturePtr& sig, int n) {
  for (;;) {
    std::string name = "R" + std::to_string(n);
    if (sig->symbol_index(name) < 0 && sig->variable_index(name) < 0) return name;
    ++n;
  }
}

void print_rec(const Term& t, int node, const std::set<int>& entries,
               std::map<int, std::string>& binder_name, int& counter,
               std::ostringstream& os) {
  auto named = binder_name.find(node);
  if (named != binder_name.end()) {
    os << named->second;
    return;
  }
  if (entries.count(node)) {
    std::string name = fresh_binder(t.sig(), counter++);
    binder_name[node] = name;
    os << "rec " << name << " . ";
  }
  const TermNode& n = t.node(node);
  if (n.is_var()) {
    os << t.sig()->variable_name(n.var);
  } else {
    os << t.sig()->symbol_name(n.sym);
    if (!n.kids.empty()) {
      os << '(';
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) os << ", ";
        print_rec(t, n.kids[i], entries, binder_name, counter, os);
      }
      os << ')';
    }
  }
  binder_name.erase(node);  // binders scope over the node's own subtree only
}

}  // namespace

std::string print_term(const Term& t) {
  std::set<int> entries;
  find_cycle_entries(t, entries);
  std::map<int, std::string> binder_name;
  std::ostringstream os;
  int counter = 0;
  print_rec(t, t.root(), entries, binder_name, counter, os);
  return os.str();
}

}  // namespace irew
