#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "opb/canonical.hpp"
#include "opb/dataset.hpp"
#include "opb/json_io.hpp"
#include "opb/lattice.hpp"
#include "opb/numeric.hpp"
#include "opb/opb_io.hpp"

using namespace opb;
using testing_support::load;

namespace {

std::string base(const std::string& token) { return token.ends_with("'") ? token.substr(0, token.size() - 1) : token; }
bool primed(const std::string& token) { return token.ends_with("'"); }

int count_rows(const std::string& text) {
  int rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line.find(':') == std::string::npos) ++rows;
  return rows;
}

}  // namespace

TEST_CASE("shorthand rows expand to the full irreducible matrix") {
  const std::string& text = data_text("examples", "irreducible-shorthand.opb");
  const OpbFile file = read_opb(text);
  CHECK(file.rows.size() == 5);
  CHECK(expand_rows(file).size() == 8);
  const PatternMatrix m = parse(text);
  CHECK(m.row_count() == 8);
  CHECK(are_equivalent(m, load("n3-maximal", "irreducible.opb")));
  CHECK(are_equivalent(m, load("examples", "irreducible-normalized.opb")));
  CHECK(signature(m) == *file.expected_signature);
  CHECK(signature(m).nu == *file.expected_nu);
}

TEST_CASE("two star rows match their expansion up to naming") {
  const auto got = expand_rows(read_opb(data_text("examples", "two-star-rows.opb")));
  const auto want = expand_rows(read_opb(data_text("examples", "two-star-rows-expanded.opb")));
  REQUIRE(got.size() == want.size());
  std::map<std::string, std::string> rename;
  std::set<std::string> used;
  for (std::size_t r = 0; r < got.size(); ++r) {
    REQUIRE(got[r].size() == want[r].size());
    for (std::size_t c = 0; c < got[r].size(); ++c) {
      CHECK(primed(got[r][c]) == primed(want[r][c]));
      const auto [it, fresh] = rename.emplace(base(got[r][c]), base(want[r][c]));
      CHECK(it->second == base(want[r][c]));
      if (fresh) CHECK(used.insert(base(want[r][c])).second);
    }
  }
  CHECK(read_opb(data_text("examples", "two-star-rows.opb")).fragment);
  CHECK_THROWS_AS(to_matrix(read_opb(data_text("examples", "two-star-rows.opb"))), ParseError);
}

TEST_CASE("fresh variables avoid names already in the file") {
  const std::string text = "n: 2\nv1 *\nv1' *\n";
  const auto rows = expand_rows(read_opb(text));
  REQUIRE(rows.size() == 4);
  CHECK(base(rows[0][1]) != "v1");
  CHECK(base(rows[0][1]) != base(rows[2][1]));
}

TEST_CASE("the first switching representative expands to 16 rows") {
  const auto f = collection("n4-switching").front();
  CHECK(f.file == "sw01.opb");
  REQUIRE(f.matrix.has_value());
  CHECK(f.matrix->row_count() == 16);
  CHECK(signature(*f.matrix) == parse_signature("8 | 4^2 | 2^4 | 1^8"));
  CHECK(signature(*f.matrix).nu == 15);
  CHECK(f.source.group == 1);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("n: 2\na b\na b'\na' b\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\na b\na b'\nb' a\nb a\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\na b\na b'\na' b\na' %\n"), ParseError);
  CHECK_THROWS_AS(parse("a b\na b'\na' b\na' b'\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\ncolour: red\na b\na b'\na' b\na' b'\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\na b\na b'\nname: late\na' b\na' b'\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\na b c\na b'\na' b\na' b'\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 0\n"), ParseError);
  CHECK_THROWS_AS(parse("n: 2\nfragment: maybe\n"), ParseError);
  // well formed but not an OPB pattern
  CHECK_THROWS(parse("n: 2\na b\na b\na' b\na' b'\n"));
}

TEST_CASE("comments and normalized tokens") {
  const PatternMatrix m = parse("# header comment\nn: 2\nname: M\n0 0  # trailing\n0 1\n1 a\n1 a'\n");
  CHECK(m.row_count() == 4);
  CHECK(are_equivalent(m, load("n2", "N.opb")));
  CHECK(are_equivalent(load("examples", "N-normalized.opb"), load("n2", "N.opb")));
}

TEST_CASE("full serialization round trips every stored class") {
  for (const auto& name : collection_names()) {
    for (const auto& f : collection(name)) {
      if (!f.matrix) continue;
      const std::string text = serialize(*f.matrix, Style::kFull, f.source.name);
      const PatternMatrix back = parse(text);
      CHECK(back == *f.matrix);
      CHECK(canonical_key(parse(serialize(*f.matrix, Style::kCompact))) == canonical_key(*f.matrix));
    }
  }
  for (const auto& [key, info] : enumerate_classes(3).classes) {
    CHECK(canonical_key(parse(serialize(info.representative))) == key);
    CHECK(canonical_key(parse(serialize(info.representative, Style::kCompact))) == key);
  }
}

TEST_CASE("compact serialization") {
  const std::string irr = serialize(load("n3-maximal", "irreducible.opb"), Style::kCompact);
  CHECK(count_rows(irr) == 5);
  CHECK(irr.find('*') != std::string::npos);
  const std::string std2 = serialize(standard_matrix(2), Style::kCompact);
  CHECK(count_rows(std2) == 4);
  const std::string full = serialize(standard_matrix(2), Style::kFull, "std");
  CHECK(full.find("name: std") != std::string::npos);
  CHECK(full.find("nu: 2") != std::string::npos);
}

TEST_CASE("embedded data collections") {
  CHECK(collection("n4-switching").size() == 15);
  CHECK(collection("n4-classes").size() == 33);
  CHECK(collection("n3-classes").size() == 17);
  CHECK(collection("n3-maximal").size() == 3);
  CHECK(collection("n2").size() == 2);
  CHECK_THROWS_AS(collection("nope"), std::out_of_range);
  CHECK_THROWS_AS(data_text("n2", "nope.opb"), std::out_of_range);
  for (const auto& name : collection_names()) {
    for (const auto& f : collection(name)) {
      if (!f.matrix) continue;
      CAPTURE(f.file);
      CHECK(validate(*f.matrix).ok());
      if (f.source.expected_signature) CHECK(signature(*f.matrix) == *f.source.expected_signature);
      if (f.source.expected_nu) CHECK(signature(*f.matrix).nu == *f.source.expected_nu);
      if (name == "n4-switching" || name == "n4-classes" || name == "n3-maximal") CHECK(is_maximal(*f.matrix));
    }
  }
}

TEST_CASE("atomic file writes") {
  const auto dir = std::filesystem::temp_directory_path() / "opb-io-test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.opb").string();
  write_text_file_atomic(path, "first");
  write_text_file_atomic(path, serialize(standard_matrix(2)));
  CHECK(are_equivalent(parse(read_text_file(path)), standard_matrix(2)));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS(read_text_file((dir / "missing.opb").string()));
  CHECK_THROWS(write_text_file_atomic((dir / "no" / "such" / "dir.opb").string(), "x"));

  const ClassStore store = enumerate_classes(2);
  write_store(store, (dir / "store").string());
  std::size_t opb_files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "store"))
    if (e.path().extension() == ".opb") {
      ++opb_files;
      CHECK(store.classes.contains(CanonicalKey::from_hex(e.path().stem().string())));
    }
  CHECK(opb_files == store.size());
  CHECK(std::filesystem::exists(dir / "store" / "manifest.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("numeric JSON documents round trip") {
  const PatternMatrix m = load("n3-maximal", "reducible-b.opb");
  NumericDocument doc{instantiate(m, 9).basis, 9, canonical_key(m).hex()};
  const NumericDocument back = numeric_from_json(numeric_to_json(doc));
  CHECK(back.seed == 9);
  CHECK(back.source_key == doc.source_key);
  CHECK(back.basis.dims == doc.basis.dims);
  REQUIRE(back.basis.size() == doc.basis.size());
  for (int s = 0; s < doc.basis.size(); ++s)
    for (int p = 0; p < 3; ++p) CHECK((back.basis.vectors[s][p] - doc.basis.vectors[s][p]).norm() == 0.0);
  CHECK_THROWS_AS(numeric_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(numeric_from_json("{\"dims\": [2]}"), ParseError);
}

TEST_CASE("FNV-1a digests") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
