#pragma once

#include <map>
#include <string>

#include "irew/term.hpp"
#include "json.hpp"

namespace irew {

// Shared between the certificate and ored-certificate file formats.
TermGraphPtr load_term_table(const nlohmann::json& terms,
                             const SignaturePtr& sig,
                             std::map<std::string, int>& term_ids);
nlohmann::json save_term_table(const TermGraphPtr& terms,
                               const SignaturePtr& sig);

}  // namespace irew
