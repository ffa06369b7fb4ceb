#include <map>
#include <set>
#include <string>

#include "irew/errors.hpp"
#include "irew/proof.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace irew {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw error(errc::format, "malformed JSON");
  return j;
}

void expect_fields(const json& obj, const std::set<std::string>& required,
                   const std::set<std::string>& optional,
                   const std::string& what) {
  if (!obj.is_object()) throw error(errc::format, what + " is not an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!required.count(it.key()) && !optional.count(it.key()))
      throw error(errc::format, "unknown field '" + it.key() + "' in " + what);
  }
  for (const auto& f : required)
    if (!obj.contains(f))
      throw error(errc::format, "missing field '" + f + "' in " + what);
}

int lookup(const std::map<std::string, int>& ids, const json& ref,
           const std::string& what) {
  if (!ref.is_string()) throw error(errc::format, what + " id is not a string");
  auto it = ids.find(ref.get<std::string>());
  if (it == ids.end())
    throw error(errc::format, "dangling " + what + " id " + ref.get<std::string>());
  return it->second;
}

}  // namespace

// Shared by the certificate and ored loaders.
TermGraphPtr load_term_table(const json& terms, const SignaturePtr& sig,
                             std::map<std::string, int>& term_ids) {
  if (!terms.is_object()) throw error(errc::format, "terms is not an object");
  for (auto it = terms.begin(); it != terms.end(); ++it)
    term_ids.emplace(it.key(), static_cast<int>(term_ids.size()));
  auto g = std::make_shared<TermGraph>();
  g->nodes.resize(term_ids.size());
  for (auto it = terms.begin(); it != terms.end(); ++it) {
    const json& t = it.value();
    TermNode& node = g->nodes[term_ids.at(it.key())];
    if (t.contains("var")) {
      expect_fields(t, {"var"}, {}, "term " + it.key());
      int v = sig->variable_index(t.at("var").get<std::string>());
      if (v < 0)
        throw error(errc::unknown_symbol,
                    "variable " + t.at("var").get<std::string>());
      node.var = v;
    } else {
      expect_fields(t, {"sym", "args"}, {}, "term " + it.key());
      int s = sig->symbol_index(t.at("sym").get<std::string>());
      if (s < 0)
        throw error(errc::unknown_symbol, t.at("sym").get<std::string>());
      node.sym = s;
      const json& args = t.at("args");
      if (!args.is_array()) throw error(errc::format, "args is not an array");
      if (static_cast<int>(args.size()) != sig->arity(s))
        throw error(errc::arity_mismatch, t.at("sym").get<std::string>());
      for (const auto& a : args)
        node.kids.push_back(lookup(term_ids, a, "term"));
    }
  }
  return g;
}

ProofCert load_cert_json(const std::string& text, const SignaturePtr& sig) {
  json j = parse_json(text);
  expect_fields(j, {"kind", "terms", "nodes", "root"}, {}, "certificate");
  ProofCert cert;
  cert.sig = sig;
  auto k = kind_from_name(j.at("kind").get<std::string>());
  if (!k) throw error(errc::format, "bad kind " + j.at("kind").dump());
  cert.kind = *k;

  std::map<std::string, int> term_ids;
  cert.terms = load_term_table(j.at("terms"), sig, term_ids);

  const json& nodes = j.at("nodes");
  if (!nodes.is_object()) throw error(errc::format, "nodes is not an object");
  std::map<std::string, int> node_ids;
  for (auto it = nodes.begin(); it != nodes.end(); ++it)
    node_ids.emplace(it.key(), static_cast<int>(node_ids.size()));
  cert.nodes.resize(node_ids.size());
  for (auto it = nodes.begin(); it != nodes.end(); ++it) {
    const json& n = it.value();
    ProofNode& node = cert.nodes[node_ids.at(it.key())];
    std::string what = "node " + it.key();
    if (!n.is_object() || !n.contains("kind"))
      throw error(errc::format, what + " lacks a kind");
    std::string kind = n.at("kind").get<std::string>();
    node.source = lookup(term_ids, n.at("source"), "term");
    node.target = lookup(term_ids, n.at("target"), "term");
    if (kind == "split") {
      expect_fields(n, {"kind", "source", "target", "premises"}, {}, what);
      node.kind = ProofNode::Kind::split;
      for (const auto& p : n.at("premises"))
        node.premises.push_back(lookup(node_ids, p, "node"));
    } else if (kind == "lift") {
      expect_fields(n, {"kind", "source", "target", "children"}, {"marked"}, what);
      node.kind = ProofNode::Kind::lift;
      for (const auto& c : n.at("children"))
        node.children.push_back(lookup(node_ids, c, "node"));
      if (n.contains("marked")) node.marked = n.at("marked").get<bool>();
    } else if (kind == "id") {
      expect_fields(n, {"kind", "source", "target"}, {}, what);
      node.kind = ProofNode::Kind::id;
    } else if (kind == "root") {
      expect_fields(n, {"kind", "source", "target", "rule"},
                    {"subst", "reversed"}, what);
      node.kind = ProofNode::Kind::root;
      node.rule = n.at("rule").get<int>();
      if (n.contains("reversed")) node.reversed = n.at("reversed").get<bool>();
      if (n.contains("subst")) {
        std::map<std::string, int> subst;
        for (auto s = n.at("subst").begin(); s != n.at("subst").end(); ++s)
          subst.emplace(s.key(), lookup(term_ids, s.value(), "term"));
        node.subst = std::move(subst);
      }
    } else {
      throw error(errc::format, what + " has bad kind " + kind);
    }
  }
  cert.root = lookup(node_ids, j.at("root"), "node");
  return cert;
}

json save_term_table(const TermGraphPtr& terms, const SignaturePtr& sig) {
  json out = json::object();
  for (size_t i = 0; i < terms->nodes.size(); ++i) {
    const TermNode& t = terms->nodes[i];
    json entry;
    if (t.is_var()) {
      entry["var"] = sig->variable_name(t.var);
    } else {
      entry["sym"] = sig->symbol_name(t.sym);
      json args = json::array();
      for (int k : t.kids) args.push_back("t" + std::to_string(k));
      entry["args"] = std::move(args);
    }
    out["t" + std::to_string(i)] = std::move(entry);
  }
  return out;
}

std::string save_cert_json(const ProofCert& cert) {
  json j;
  j["kind"] = kind_name(cert.kind);
  j["terms"] = save_term_table(cert.terms, cert.sig);
  json nodes = json::object();
  for (size_t i = 0; i < cert.nodes.size(); ++i) {
    const ProofNode& n = cert.nodes[i];
    json e;
    e["source"] = "t" + std::to_string(n.source);
    e["target"] = "t" + std::to_string(n.target);
    switch (n.kind) {
      case ProofNode::Kind::split: {
        e["kind"] = "split";
        json ps = json::array();
        for (int p : n.premises) ps.push_back("n" + std::to_string(p));
        e["premises"] = std::move(ps);
        break;
      }
      case ProofNode::Kind::lift: {
        e["kind"] = "lift";
        json cs = json::array();
        for (int c : n.children) cs.push_back("n" + std::to_string(c));
        e["children"] = std::move(cs);
        if (n.marked) e["marked"] = true;
        break;
      }
      case ProofNode::Kind::id:
        e["kind"] = "id";
        break;
      case ProofNode::Kind::root: {
        e["kind"] = "root";
        e["rule"] = n.rule;
        if (n.reversed) e["reversed"] = true;
        if (n.subst) {
          json s = json::object();
          for (const auto& [x, tid] : *n.subst)
            s[x] = "t" + std::to_string(tid);
          e["subst"] = std::move(s);
        }
        break;
      }
    }
    nodes["n" + std::to_string(i)] = std::move(e);
  }
  j["nodes"] = std::move(nodes);
  j["root"] = "n" + std::to_string(cert.root);
  return j.dump(2);
}

}  // namespace irew
