#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irew {

enum class errc {
  syntax,
  unknown_symbol,
  arity_mismatch,
  unbound_binder,
  invalid_position,
  no_match,
  subst_mismatch,
  replay,
  wrong_kind,
  not_validated,
  not_left_linear,
  resource_exceeded,
  not_omega,
  invalid_witness,
  format,
};

const char* errc_name(errc c);

/// Library error carrying a machine-checkable code. `index` is the failing
/// step index for replay errors, 0 otherwise.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what, std::size_t index = 0)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        index_(index) {}

  errc code() const { return code_; }
  std::size_t index() const { return index_; }

 private:
  errc code_;
  std::size_t index_;
};

}  // namespace irew
