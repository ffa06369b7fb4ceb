#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace irew {

/// First-order signature: function symbols with fixed arities plus a disjoint
/// set of variable names.
class Signature {
 public:
  struct Symbol {
    std::string name;
    int arity;
  };

  Signature() = default;
  Signature(std::vector<Symbol> symbols, std::vector<std::string> variables);

  int add_symbol(const std::string& name, int arity);
  int add_variable(const std::string& name);

  const std::vector<Symbol>& symbols() const { return symbols_; }
  const std::vector<std::string>& variables() const { return variables_; }

  // -1 when the name is not declared.
  int symbol_index(const std::string& name) const;
  int variable_index(const std::string& name) const;

  const std::string& symbol_name(int i) const { return symbols_[i].name; }
  int arity(int i) const { return symbols_[i].arity; }
  const std::string& variable_name(int i) const { return variables_[i]; }

 private:
  std::vector<Symbol> symbols_;
  std::vector<std::string> variables_;
  std::unordered_map<std::string, int> symbol_ix_;
  std::unordered_map<std::string, int> variable_ix_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

}  // namespace irew
