// Command-line front end for the opb library.
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 for
// usage errors and unreadable or malformed input.

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "opb/canonical.hpp"
#include "opb/json_io.hpp"
#include "opb/lattice.hpp"
#include "opb/numeric.hpp"
#include "opb/opb_io.hpp"
#include "opb/verify.hpp"

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  bool as_json = false;
  std::string command;
  json inputs = json::array();
  json result = json::object();
  std::ostringstream text;

  void input(const std::string& path, const std::string& bytes) {
    inputs.push_back({{"path", path}, {"fnv1a64", opb::fnv1a_hex(bytes)}});
  }

  void flush(int code) {
    if (as_json) {
      json env{{"tool", "opbtool"}, {"version", OPB_VERSION}, {"command", command},
               {"inputs", inputs},  {"exit_code", code},      {"result", result}};
      std::cout << env.dump(2) << "\n";
    } else {
      std::cout << text.str();
    }
  }
};

opb::PatternMatrix load_matrix(Output& out, const std::string& path) {
  const std::string text = opb::read_text_file(path);
  out.input(path, text);
  opb::PatternMatrix m = opb::to_matrix(opb::read_opb(text));
  auto report = opb::validate(m);
  if (!report.ok()) throw opb::ParseError(path + " is not in O(n):\n" + report.to_string());
  return m;
}

std::vector<int> parse_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v - 1);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a positive integer");
    }
  }
  return out;
}

json signature_json(const opb::Signature& s) { return {{"partitions", s.partitions}, {"nu", s.nu}}; }

std::string join1(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i] + 1);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_validate(Output& out, const std::string& path) {
  const std::string text = opb::read_text_file(path);
  out.input(path, text);
  const opb::OpbFile file = opb::read_opb(text);
  if (file.fragment) {
    const auto rows = opb::expand_rows(file);
    out.text << "fragment: " << rows.size() << " rows after expansion\n";
    out.result = {{"fragment", true}, {"rows", rows.size()}};
    return 0;
  }
  const opb::PatternMatrix m = opb::to_matrix(file);
  const auto report = opb::validate(m);
  bool ok = report.ok();
  json problems = json::array();
  for (const auto& v : report.violations) problems.push_back(v.message);
  if (ok) {
    const auto sig = opb::signature(m);
    if (file.expected_signature && *file.expected_signature != sig) {
      ok = false;
      problems.push_back("signature header differs: computed " + sig.to_string());
    }
    if (file.expected_nu && *file.expected_nu != sig.nu) {
      ok = false;
      problems.push_back("nu header differs: computed " + std::to_string(sig.nu));
    }
    out.result["signature"] = signature_json(sig);
    out.text << "signature: " << sig.to_string() << "\n";
  }
  out.result["valid"] = ok;
  out.result["problems"] = problems;
  for (const auto& p : problems) out.text << p.get<std::string>() << "\n";
  out.text << (ok ? "valid" : "invalid") << "\n";
  return ok ? 0 : 1;
}

int cmd_expand(Output& out, const std::string& path) {
  const std::string text = opb::read_text_file(path);
  out.input(path, text);
  const opb::OpbFile file = opb::read_opb(text);
  if (file.fragment) {
    const auto rows = opb::expand_rows(file);
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) out.text << (c ? " " : "") << r[c];
      out.text << "\n";
    }
    out.result["rows"] = rows;
    return 0;
  }
  const opb::PatternMatrix m = opb::to_matrix(file);
  out.text << opb::serialize(m, opb::Style::kFull, file.name);
  out.result["opb"] = opb::serialize(m, opb::Style::kFull, file.name);
  return 0;
}

int cmd_canon(Output& out, const std::string& path) {
  const auto m = load_matrix(out, path);
  const auto [key, form] = opb::canonical_form(m);
  out.text << key.hex() << "\n" << opb::serialize(form);
  out.result = {{"key", key.hex()}, {"signature", signature_json(opb::signature(m))}, {"canonical", opb::serialize(form)}};
  return 0;
}

int cmd_equiv(Output& out, const std::string& a, const std::string& b) {
  const auto ma = load_matrix(out, a);
  const auto mb = load_matrix(out, b);
  if (ma.n() != mb.n()) throw UsageError("the matrices have different qubit counts");
  const bool eq = opb::are_equivalent(ma, mb);
  out.text << (eq ? "equivalent" : "inequivalent") << "\n";
  out.result = {{"equivalent", eq}};
  return 0;
}

int cmd_maximal(Output& out, const std::string& path) {
  const auto m = load_matrix(out, path);
  const bool max = opb::is_maximal(m);
  out.text << (max ? "maximal" : "not maximal") << "\n";
  out.result = {{"maximal", max}, {"parents", opb::splits(m).size()}};
  return 0;
}

int cmd_children(Output& out, const std::string& path) {
  const auto m = load_matrix(out, path);
  std::map<opb::CanonicalKey, std::pair<opb::PatternMatrix, opb::Identification>> unique;
  for (auto& [child, d] : opb::identifications(m)) unique.emplace(opb::canonical_key(child), std::make_pair(child, d));
  json list = json::array();
  for (const auto& [key, entry] : unique) {
    const auto& [child, d] = entry;
    const auto sig = opb::signature(child);
    out.text << key.hex() << "  column " << d.column + 1 << ": " << m.name(d.column, d.merged) << " := "
             << m.name(d.column, d.kept) << (d.opposite ? "'" : "") << "  " << sig.to_string() << "\n";
    list.push_back({{"key", key.hex()},
                    {"column", d.column + 1},
                    {"kept", m.name(d.column, d.kept)},
                    {"merged", m.name(d.column, d.merged)},
                    {"opposite", d.opposite},
                    {"signature", signature_json(sig)}});
  }
  out.text << unique.size() << " classes directly below\n";
  out.result = {{"children", list}};
  return 0;
}

int cmd_parents(Output& out, const std::string& path) {
  const auto m = load_matrix(out, path);
  std::map<opb::CanonicalKey, std::pair<opb::PatternMatrix, opb::Split>> unique;
  for (auto& [parent, d] : opb::splits(m)) unique.emplace(opb::canonical_key(parent), std::make_pair(parent, d));
  json list = json::array();
  for (const auto& [key, entry] : unique) {
    const auto& [parent, d] = entry;
    const auto sig = opb::signature(parent);
    out.text << key.hex() << "  column " << d.column + 1 << ": split " << m.name(d.column, d.cls) << " on rows "
             << join1(d.moved_rows) << "  " << sig.to_string() << "\n";
    list.push_back({{"key", key.hex()},
                    {"column", d.column + 1},
                    {"class", m.name(d.column, d.cls)},
                    {"moved_rows", d.moved_rows},
                    {"signature", signature_json(sig)}});
  }
  out.text << unique.size() << " classes directly above\n";
  out.result = {{"parents", list}};
  return 0;
}

int cmd_enumerate(Output& out, int n, bool maximal_only, int jobs, const std::string& dir, double max_seconds,
                  long long max_classes) {
  opb::EnumerateOptions opt;
  opt.maximal_only = maximal_only;
  opt.jobs = jobs;
  opt.max_seconds = max_seconds;
  opt.max_classes = max_classes;
  const opb::ClassStore store = opb::enumerate_classes(n, opt);
  if (!dir.empty()) opb::write_store(store, dir);
  out.result = json::parse(opb::store_manifest(store));
  if (store.complete) {
    out.text << "n=" << n << ": " << store.classes_seen << " classes, " << store.maximal_seen << " maximal, "
             << store.size() << " stored\n";
  } else {
    out.text << "n=" << n << ": incomplete, budget exhausted after " << store.classes_seen << " classes\n";
  }
  out.text << opb::store_manifest(store);
  return store.complete ? 0 : 1;
}

int cmd_orbits(Output& out, const std::string& path) {
  const auto m = load_matrix(out, path);
  if (!opb::is_maximal(m)) throw UsageError("switching is defined for maximal matrices only");
  const auto orbit = opb::switching_orbit(m);
  json list = json::array();
  for (const auto& [key, rep] : orbit) {
    const auto sig = opb::signature(rep);
    out.text << key.hex() << "  " << sig.to_string() << "\n";
    list.push_back({{"key", key.hex()}, {"signature", signature_json(sig)}});
  }
  out.text << orbit.size() << " equivalence classes in the switching class\n";
  out.result = {{"size", orbit.size()}, {"classes", list}};
  return 0;
}

int cmd_hasse(Output& out, int n, bool dot) {
  const auto store = opb::enumerate_classes(n);
  const auto h = opb::hasse(store);
  if (dot) {
    out.text << "digraph hasse {\n  rankdir=BT;\n";
    for (std::size_t v = 0; v < h.nodes.size(); ++v) {
      const auto& sig = store.classes.at(h.nodes[v]).signature;
      std::string parts;
      for (std::size_t c = 0; c < sig.partitions.size(); ++c) {
        parts += c ? " | " : "";
        for (std::size_t i = 0; i < sig.partitions[c].size(); ++i)
          parts += (i ? "," : "") + std::to_string(sig.partitions[c][i]);
      }
      out.text << "  n" << v << " [label=\"nu=" << sig.nu << "\\n" << parts << "\"];\n";
    }
    for (auto [lo, hi] : h.edges) out.text << "  n" << lo << " -> n" << hi << ";\n";
    out.text << "}\n";
  } else {
    out.text << opb::hasse_edge_text(h);
  }
  json edges = json::array();
  for (auto [lo, hi] : h.edges) edges.push_back({h.nodes[lo].hex(), h.nodes[hi].hex()});
  json nodes = json::array();
  for (const auto& k : h.nodes) nodes.push_back({{"key", k.hex()}, {"nu", store.classes.at(k).signature.nu}});
  out.result = {{"nodes", nodes}, {"edges", edges}, {"minimum", h.nodes.at(h.minimum).hex()}};
  if (dot) out.result["dot"] = out.text.str();
  return 0;
}

int cmd_instantiate(Output& out, const std::string& path, std::uint64_t seed, const std::string& dest) {
  const auto m = load_matrix(out, path);
  const auto inst = opb::instantiate(m, seed);
  const std::string text = opb::numeric_to_json({inst.basis, seed, opb::canonical_key(m).hex()});
  if (dest.empty() || dest == "-") {
    out.text << text;
  } else {
    opb::write_text_file_atomic(dest, text);
    out.text << "wrote " << inst.basis.size() << " product vectors to " << dest << "\n";
  }
  out.result = {{"vectors", inst.basis.size()}, {"seed", seed}, {"gram_defect", opb::gram_defect(inst.basis)}};
  return 0;
}

opb::NumericDocument load_numeric(Output& out, const std::string& path) {
  const std::string text = opb::read_text_file(path);
  out.input(path, text);
  return opb::numeric_from_json(text);
}

int cmd_verify_gram(Output& out, const std::string& path, double tol) {
  const auto doc = load_numeric(out, path);
  const double defect = opb::gram_defect(doc.basis);
  const bool ok = defect <= tol;
  out.text << "gram defect " << defect << (ok ? " within " : " exceeds ") << tol << "\n";
  out.result = {{"gram_defect", defect}, {"tolerance", tol}, {"ok", ok}};
  return ok ? 0 : 1;
}

int cmd_associate(Output& out, const std::string& path, double tol) {
  const auto doc = load_numeric(out, path);
  const auto m = opb::associate_matrix(doc.basis, tol);
  const auto key = opb::canonical_key(m);
  out.text << opb::serialize(m, opb::Style::kFull);
  out.result = {{"opb", opb::serialize(m, opb::Style::kFull)}, {"key", key.hex()}};
  if (!doc.source_key.empty()) {
    const bool same = doc.source_key == key.hex();
    out.text << "# " << (same ? "same class as the source pattern" : "differs from the source pattern") << "\n";
    out.result["matches_source"] = same;
  }
  return 0;
}

int cmd_switch_unitary(Output& out, const std::string& path, const std::string& site_text, const std::string& perm_text,
                       std::uint64_t seed, bool list) {
  const auto m = load_matrix(out, path);
  if (!opb::is_maximal(m)) throw UsageError("switching is defined for maximal matrices only");
  const auto sites = opb::switching_sites(m);
  if (list || site_text.empty()) {
    json arr = json::array();
    for (std::size_t i = 0; i < sites.size(); ++i) {
      out.text << "site " << i + 1 << ": rows " << join1(sites[i].rows) << " / columns " << join1(sites[i].cols) << "\n";
      arr.push_back({{"rows", sites[i].rows}, {"cols", sites[i].cols}});
    }
    out.result = {{"sites", arr}};
    if (!list) throw UsageError("--site is required (see --list)");
    return 0;
  }

  const opb::SwitchSite* site = nullptr;
  if (auto slash = site_text.find('/'); slash != std::string::npos) {
    const auto rows = parse_list(site_text.substr(0, slash), "--site rows");
    const auto cols = parse_list(site_text.substr(slash + 1), "--site columns");
    for (const auto& s : sites)
      if (s.rows == rows && s.cols == cols) site = &s;
    if (!site) throw UsageError("rows " + site_text.substr(0, slash) + " and columns " + site_text.substr(slash + 1) +
                                " do not form a switching site");
  } else {
    const auto idx = parse_list(site_text, "--site");
    if (idx.size() != 1 || idx[0] >= static_cast<int>(sites.size())) throw UsageError("no site " + site_text);
    site = &sites[idx[0]];
  }
  std::vector<int> perm = parse_list(perm_text, "--perm");
  const auto inst = opb::instantiate(m, seed);
  const Eigen::MatrixXcd u = opb::build_switch_unitary(m, *site, perm, inst.assignment);
  const auto check = opb::check_switch_unitary(m, *site, perm, inst.assignment);
  const auto switched = opb::apply_switch(m, *site, perm);
  out.text << "unitarity defect " << check.unitarity_defect << ", worst line overlap " << check.min_overlap << "\n"
           << (check.ok() ? "the unitary maps the basis onto the switched family" : "check failed") << "\n"
           << opb::serialize(switched);
  json mat = json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < u.cols(); ++j) row.push_back({u(i, j).real(), u(i, j).imag()});
    mat.push_back(row);
  }
  out.result = {{"unitarity_defect", check.unitarity_defect},
                {"min_overlap", check.min_overlap},
                {"ok", check.ok()},
                {"switched", opb::serialize(switched)},
                {"unitary", mat}};
  return check.ok() ? 0 : 1;
}

int cmd_verify_paper(Output& out, const std::string& criteria) {
  std::vector<int> ids;
  if (criteria.empty()) {
    for (int i = 1; i <= opb::Acceptance::kCriteria; ++i) ids.push_back(i);
  } else {
    for (int i : parse_list(criteria, "--criteria")) ids.push_back(i + 1);
  }
  opb::Acceptance run([&](const std::string& msg) {
    if (!out.as_json) std::cerr << "... " << msg << "\n";
  });
  bool all = true;
  json list = json::array();
  for (int id : ids) {
    const auto r = run.run(id);
    all = all && r.passed;
    if (!out.as_json) std::cout << opb::format_result(r) << std::endl;
    list.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  out.result = {{"criteria", list}, {"all_passed", all}};
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal product bases of qubits through pattern matrices"};
  app.require_subcommand(1);
  Output out;
  app.add_flag("--json", out.as_json, "Print a JSON envelope instead of text");

  std::string file, file_b, site, perm, out_path, dir, criteria;
  int n = 0, jobs = 1;
  bool maximal_only = false, dot = false, list = false;
  std::uint64_t seed = 0;
  double tol = 1e-9, assoc_tol = 1e-6, max_seconds = 4 * 3600.0;
  long long max_classes = 5'000'000;

  auto* validate = app.add_subcommand("validate", "Check the axioms and the header of a .opb file");
  validate->add_option("FILE", file)->required();
  auto* expand = app.add_subcommand("expand", "Undo star and 0/1 shorthand");
  expand->add_option("FILE", file)->required();
  auto* canon = app.add_subcommand("canon", "Canonical key and form");
  canon->add_option("FILE", file)->required();
  auto* equiv = app.add_subcommand("equiv", "Decide equivalence of two matrices");
  equiv->add_option("A", file)->required();
  equiv->add_option("B", file_b)->required();
  auto* maximal = app.add_subcommand("maximal", "Decide maximality");
  maximal->add_option("FILE", file)->required();
  auto* children = app.add_subcommand("children", "Classes obtained by one identification");
  children->add_option("FILE", file)->required();
  auto* parents = app.add_subcommand("parents", "Classes obtained by one split");
  parents->add_option("FILE", file)->required();
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the equivalence classes of O(n)");
  enumerate->add_option("--n", n, "Number of qubits")->required()->check(CLI::Range(1, opb::kMaxQubits));
  enumerate->add_flag("--maximal-only", maximal_only, "Store maximal classes only");
  enumerate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  enumerate->add_option("--out", dir, "Write one .opb per class and manifest.json here");
  enumerate->add_option("--max-seconds", max_seconds, "Time budget");
  enumerate->add_option("--max-classes", max_classes, "Class budget");
  auto* orbits = app.add_subcommand("orbits", "Switching class of a maximal matrix");
  orbits->add_option("FILE", file)->required();
  auto* hasse = app.add_subcommand("hasse", "Hasse diagram of O(n)");
  hasse->add_option("--n", n)->required()->check(CLI::Range(1, 4));
  hasse->add_flag("--dot", dot, "Graphviz output");
  auto* instantiate = app.add_subcommand("instantiate", "Random member of the family of a matrix");
  instantiate->add_option("FILE", file)->required();
  instantiate->add_option("--seed", seed);
  instantiate->add_option("--out", out_path, "Destination JSON (stdout when omitted)");
  auto* verify_gram = app.add_subcommand("verify-gram", "Orthonormality of a numeric basis");
  verify_gram->add_option("FILE", file)->required();
  verify_gram->add_option("--tol", tol);
  auto* associate = app.add_subcommand("associate", "Pattern matrix of a numeric basis");
  associate->add_option("FILE", file)->required();
  associate->add_option("--tol", assoc_tol);
  auto* switch_unitary = app.add_subcommand("switch-unitary", "Controlled unitary realizing a switching operation");
  switch_unitary->add_option("FILE", file)->required();
  switch_unitary->add_option("--site", site, "ROWS/COLS as 1-based lists, or the site number from --list");
  switch_unitary->add_option("--perm", perm, "1-based permutation of the site columns")->default_val("");
  switch_unitary->add_option("--seed", seed);
  switch_unitary->add_flag("--list", list, "List the switching sites");
  auto* verify_paper = app.add_subcommand("verify-paper", "Run the acceptance checks");
  verify_paper->add_option("--criteria", criteria, "Comma list of criteria (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  int code = 0;
  try {
    CLI::App* sub = app.get_subcommands().front();
    out.command = sub->get_name();
    if (sub == validate) code = cmd_validate(out, file);
    else if (sub == expand) code = cmd_expand(out, file);
    else if (sub == canon) code = cmd_canon(out, file);
    else if (sub == equiv) code = cmd_equiv(out, file, file_b);
    else if (sub == maximal) code = cmd_maximal(out, file);
    else if (sub == children) code = cmd_children(out, file);
    else if (sub == parents) code = cmd_parents(out, file);
    else if (sub == enumerate) code = cmd_enumerate(out, n, maximal_only, jobs, dir, max_seconds, max_classes);
    else if (sub == orbits) code = cmd_orbits(out, file);
    else if (sub == hasse) code = cmd_hasse(out, n, dot);
    else if (sub == instantiate) code = cmd_instantiate(out, file, seed, out_path);
    else if (sub == verify_gram) code = cmd_verify_gram(out, file, tol);
    else if (sub == associate) code = cmd_associate(out, file, assoc_tol);
    else if (sub == switch_unitary) code = cmd_switch_unitary(out, file, site, perm, seed, list);
    else if (sub == verify_paper) code = cmd_verify_paper(out, criteria);
  } catch (const UsageError& e) {
    out.result["error"] = e.what();
    std::cerr << "error: " << e.what() << "\n";
    code = 2;
  } catch (const opb::ParseError& e) {
    out.result["error"] = e.what();
    std::cerr << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    out.result["error"] = e.what();
    std::cerr << "error: " << e.what() << "\n";
    code = 1;
  }
  out.flush(code);
  return code;
}
