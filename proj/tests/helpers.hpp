#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "irew/compression.hpp"
#include "irew/errors.hpp"
#include "irew/proof.hpp"
#include "irew/search.hpp"
#include "irew/semantics.hpp"
#include "irew/sequences.hpp"
#include "irew/term.hpp"
#include "irew/trs.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(IREW_TEST_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline irew::Trs load_trs(const std::string& name) {
  return irew::parse_trs(read_file(data_path(name)));
}

inline irew::ProofCert load_cert(const std::string& name,
                                 const irew::SignaturePtr& sig) {
  return irew::load_cert_json(read_file(data_path(name)), sig);
}

inline irew::Term term(const irew::Trs& trs, const std::string& text) {
  return irew::parse_term(text, trs.sig);
}

inline irew::SignaturePtr small_sig() {
  auto s = std::make_shared<irew::Signature>();
  s->add_symbol("C", 1);
  s->add_symbol("f", 2);
  s->add_symbol("g", 1);
  s->add_symbol("a", 0);
  s->add_symbol("b", 0);
  s->add_variable("x");
  s->add_variable("y");
  return s;
}

}  // namespace testutil
