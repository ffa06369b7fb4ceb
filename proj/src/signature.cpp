#include "irew/signature.hpp"

#include "irew/errors.hpp"

namespace irew {

const char* errc_name(errc c) {
  switch (c) {
    case errc::syntax: return "SyntaxError";
    case errc::unknown_symbol: return "UnknownSymbol";
    case errc::arity_mismatch: return "ArityMismatch";
    case errc::unbound_binder: return "UnboundBinder";
    case errc::invalid_position: return "InvalidPosition";
    case errc::no_match: return "NoMatch";
    case errc::subst_mismatch: return "SubstMismatch";
    case errc::replay: return "ReplayError";
    case errc::wrong_kind: return "WrongKind";
    case errc::not_validated: return "NotValidated";
    case errc::not_left_linear: return "NotLeftLinear";
    case errc::resource_exceeded: return "ResourceExceeded";
    case errc::not_omega: return "NotOmega";
    case errc::invalid_witness: return "InvalidWitness";
    case errc::format: return "FormatError";
  }
  return "Error";
}

Signature::Signature(std::vector<Symbol> symbols,
                     std::vector<std::string> variables) {
  for (auto& s : symbols) add_symbol(s.name, s.arity);
  for (auto& v : variables) add_variable(v);
}

int Signature::add_symbol(const std::string& name, int arity) {
  if (arity < 0) throw error(errc::arity_mismatch, "negative arity for " + name);
  if (symbol_ix_.count(name))
    throw error(errc::syntax, "duplicate symbol " + name);
  if (variable_ix_.count(name))
    throw error(errc::syntax, "name " + name + " already declared as variable");
  symbols_.push_back({name, arity});
  symbol_ix_[name] = static_cast<int>(symbols_.size()) - 1;
  return symbol_ix_[name];
}

int Signature::add_variable(const std::string& name) {
  if (variable_ix_.count(name))
    throw error(errc::syntax, "duplicate variable " + name);
  if (symbol_ix_.count(name))
    throw error(errc::syntax, "name " + name + " already declared as symbol");
  variables_.push_back(name);
  variable_ix_[name] = static_cast<int>(variables_.size()) - 1;
  return variable_ix_[name];
}

int Signature::symbol_index(const std::string& name) const {
  auto it = symbol_ix_.find(name);
  return it == symbol_ix_.end() ? -1 : it->second;
}

int Signature::variable_index(const std::string& name) const {
  auto it = variable_ix_.find(name);
  return it == variable_ix_.end() ? -1 : it->second;
}

}  // namespace irew
