#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "irew/compression.hpp"
#include "irew/errors.hpp"
#include "irew/proof.hpp"
#include "irew/search.hpp"
#include "irew/semantics.hpp"
#include "irew/sequences.hpp"
#include "json.hpp"

using namespace irew;
using nlohmann::json;

namespace {

// 0 affirmative/valid, 1 negative/invalid/exhausted, 2 input error,
// 3 resource exceeded
enum ExitCode { kYes = 0, kNo = 1, kInputError = 2, kResource = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::format, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw error(errc::format, "cannot write " + path);
  out << content;
}

Trs load_trs_file(const std::string& path) {
  return parse_trs(read_file(path));
}

std::size_t compression_cap() {
  if (const char* env = std::getenv("IREW_MAX_NODES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw error(errc::format, "IREW_MAX_NODES must be a positive integer");
  }
  return 1000000;
}

json reduction_to_json(const FiniteReduction& red, const Trs& trs) {
  json j = json::parse(save_sequence_json(red));
  j["result"] = print_term(replay(red, trs));
  return j;
}

// Sniffs between proof certificates (kind field) and compressed ones.
bool is_proof_cert_file(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  return j.is_object() && j.contains("kind");
}

int run(int argc, char** argv) {
  CLI::App app{"coinductive infinitary rewriting toolkit"};
  app.require_subcommand(1);

  std::string trs_path, cert_path, out_path, emit_path, sig_path;
  std::string kind_name_arg, from_text, to_text, oracle = "canonical";
  std::vector<std::string> seq_paths;
  std::string term_a, term_b;
  std::uint64_t steps = 0;
  int depth = -1;
  bool have_steps = false;
  SearchBudget budget;

  auto* check = app.add_subcommand("check", "validate a certificate");
  check->add_option("--trs", trs_path)->required();
  check->add_option("--cert", cert_path)->required();

  auto* search = app.add_subcommand("search", "search for a certificate");
  search->add_option("--trs", trs_path)->required();
  search->add_option("--kind", kind_name_arg)->required();
  search->add_option("--from", from_text)->required();
  search->add_option("--to", to_text)->required();
  search->add_option("--emit", emit_path);
  search->add_option("--max-goals", budget.max_goals);
  search->add_option("--max-segment", budget.max_segment);
  search->add_option("--max-new-terms", budget.max_new_terms);

  auto* compress_cmd = app.add_subcommand("compress", "compress to length at most omega");
  compress_cmd->add_option("--trs", trs_path)->required();
  compress_cmd->add_option("--cert", cert_path)->required();
  compress_cmd->add_option("--out", out_path)->required();

  auto* prefix = app.add_subcommand("prefix", "extract a reduction prefix");
  prefix->add_option("--trs", trs_path)->required();
  prefix->add_option("--cert", cert_path)->required();
  auto* steps_opt = prefix->add_option("--steps", steps);
  prefix->add_option("--depth", depth);

  auto* equiv = app.add_subcommand("equiv", "decide parallel permutation equivalence");
  equiv->add_option("--trs", trs_path)->required();
  equiv->add_option("--seq", seq_paths)->expected(2)->required();
  equiv->add_option("--oracle", oracle)->check(CLI::IsMember({"brute", "canonical"}));

  auto* canon = app.add_subcommand("canon", "canonical certificate of a sequence");
  canon->add_option("--trs", trs_path)->required();
  canon->add_option("--seq", seq_paths)->expected(1)->required();
  canon->add_option("--out", out_path)->required();

  auto* bisim = app.add_subcommand("bisim", "decide bisimilarity of two terms");
  bisim->add_option("term_a", term_a)->required();
  bisim->add_option("term_b", term_b)->required();
  bisim->add_option("--sig", sig_path)->required();

  auto* sad = app.add_subcommand("steps-at-depth", "canonical steps at shallow positions");
  sad->add_option("--trs", trs_path)->required();
  sad->add_option("--cert", cert_path)->required();
  sad->add_option("--depth", depth)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kYes : kInputError;
  }
  have_steps = steps_opt->count() > 0;

  if (check->parsed()) {
    Trs trs = load_trs_file(trs_path);
    ProofCert cert = load_cert_json(read_file(cert_path), trs.sig);
    auto v = check_valid(cert, trs);
    json out;
    out["valid"] = v.ok();
    if (!v.ok()) {
      out["node"] = v.violation->node;
      out["clause"] = v.violation->clause;
      out["message"] = v.violation->message;
    }
    std::cout << out.dump(2) << "\n";
    return v.ok() ? kYes : kNo;
  }

  if (search->parsed()) {
    Trs trs = load_trs_file(trs_path);
    auto kind = kind_from_name(kind_name_arg);
    if (!kind) throw error(errc::format, "kind must be ired, ibi or ieq");
    Term from = parse_term(from_text, trs.sig);
    Term to = parse_term(to_text, trs.sig);
    SearchResult r = search_proof(from, to, *kind, trs, budget);
    if (std::holds_alternative<Exhausted>(r)) {
      const auto& ex = std::get<Exhausted>(r);
      json out;
      out["found"] = false;
      out["goals"] = ex.goals_used;
      out["terms"] = ex.terms_used;
      out["detail"] = ex.detail;
      std::cout << out.dump(2) << "\n";
      return kNo;
    }
    const ProofCert& cert = std::get<ProofCert>(r);
    if (!emit_path.empty()) write_file(emit_path, save_cert_json(cert));
    json out;
    out["found"] = true;
    out["nodes"] = cert.nodes.size();
    std::cout << out.dump(2) << "\n";
    return kYes;
  }

  if (compress_cmd->parsed()) {
    Trs trs = load_trs_file(trs_path);
    ProofCert cert = load_cert_json(read_file(cert_path), trs.sig);
    auto v = check_valid(cert, trs);
    if (!v.ok()) {
      std::cerr << "certificate invalid at node " << v.violation->node << ": "
                << v.violation->message << "\n";
      return kNo;
    }
    OredCert ored = compress(cert, trs, compression_cap());
    write_file(out_path, save_ored_json(ored));
    json out;
    out["nodes"] = ored_size(ored);
    out["out"] = out_path;
    std::cout << out.dump(2) << "\n";
    return kYes;
  }

  if (prefix->parsed()) {
    Trs trs = load_trs_file(trs_path);
    std::string text = read_file(cert_path);
    if (is_proof_cert_file(text)) {
      ProofCert cert = load_cert_json(text, trs.sig);
      auto v = check_valid(cert, trs);
      if (!v.ok()) {
        std::cerr << "certificate invalid: " << v.violation->message << "\n";
        return kNo;
      }
      if (depth >= 0) {
        PrefixAgreement pa = prefix_agreement(cert, trs, depth);
        json out = reduction_to_json(pa.prefix, trs);
        out["agree"] = pa.agree;
        std::cout << out.dump(2) << "\n";
        return pa.agree ? kYes : kNo;
      }
      if (!have_steps) throw error(errc::format, "need --steps or --depth");
      std::cout << reduction_to_json(canonical_prefix(cert, steps), trs).dump(2)
                << "\n";
      return kYes;
    }
    OredCert ored = load_ored_json(text, trs.sig);
    auto v = validate_ored(ored, trs);
    if (!v.ok()) {
      std::cerr << "compressed certificate invalid: " << v.violation->message
                << "\n";
      return kNo;
    }
    if (!have_steps) throw error(errc::format, "need --steps for compressed certificates");
    std::cout << reduction_to_json(linearize(ored, steps), trs).dump(2) << "\n";
    return kYes;
  }

  if (equiv->parsed()) {
    Trs trs = load_trs_file(trs_path);
    FiniteReduction a = load_sequence_json(read_file(seq_paths[0]), trs.sig);
    FiniteReduction b = load_sequence_json(read_file(seq_paths[1]), trs.sig);
    bool eq;
    json out;
    if (oracle == "brute") {
      auto w = permutation_equiv_bruteforce(a, b, trs);
      eq = w.has_value();
      if (w) out["witness"] = w->f;
    } else {
      eq = permutation_equiv(a, b, trs);
    }
    out["equivalent"] = eq;
    std::cout << out.dump(2) << "\n";
    return eq ? kYes : kNo;
  }

  if (canon->parsed()) {
    Trs trs = load_trs_file(trs_path);
    FiniteReduction seq = load_sequence_json(read_file(seq_paths[0]), trs.sig);
    ProofCert cert = canonical_tree_of(seq, trs);
    write_file(out_path, save_cert_json(cert));
    json out;
    out["nodes"] = cert.nodes.size();
    out["out"] = out_path;
    std::cout << out.dump(2) << "\n";
    return kYes;
  }

  if (bisim->parsed()) {
    Trs trs = load_trs_file(sig_path);
    Term a = parse_term(term_a, trs.sig);
    Term b = parse_term(term_b, trs.sig);
    bool eq = bisimilar(a, b);
    json out;
    out["bisimilar"] = eq;
    std::cout << out.dump(2) << "\n";
    return eq ? kYes : kNo;
  }

  if (sad->parsed()) {
    Trs trs = load_trs_file(trs_path);
    ProofCert cert = load_cert_json(read_file(cert_path), trs.sig);
    auto v = check_valid(cert, trs);
    if (!v.ok()) {
      std::cerr << "certificate invalid: " << v.violation->message << "\n";
      return kNo;
    }
    json out = json::array();
    for (const auto& [pos, rule] : steps_at_depth(cert, depth)) {
      json e;
      e["pos"] = pos;
      e["rule"] = rule;
      out.push_back(std::move(e));
    }
    std::cout << out.dump(2) << "\n";
    return kYes;
  }

  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case errc::resource_exceeded:
        return kResource;
      case errc::not_left_linear:
      case errc::not_omega:
        return kNo;
      default:
        return kInputError;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
}
