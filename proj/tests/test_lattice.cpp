#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "helpers.hpp"
#include "opb/canonical.hpp"
#include "opb/lattice.hpp"
#include "opb/verify.hpp"

using namespace opb;
using testing_support::load;

namespace {

std::set<CanonicalKey> keys_of(const std::vector<std::pair<PatternMatrix, Identification>>& xs) {
  std::set<CanonicalKey> out;
  for (const auto& [m, d] : xs) out.insert(canonical_key(m));
  return out;
}

bool rows_orthogonal(const std::vector<std::vector<Entry>>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      bool w = false;
      for (std::size_t c = 0; c < rows[i].size(); ++c) w = w || rows[i][c].orthogonal_to(rows[j][c]);
      if (!w) return false;
    }
  return true;
}

// Cover relation of O(3), recomputed from scratch: merges are formed
// directly on the rows, children are matched to classes with the
// exhaustive equivalence test, and the reduction is done on a dense
// reachability matrix.
std::string hasse_oracle(const ClassStore& store) {
  std::vector<CanonicalKey> keys;
  std::vector<PatternMatrix> reps;
  for (const auto& [k, info] : store.classes) {
    keys.push_back(k);
    reps.push_back(info.representative);
  }
  const int size = static_cast<int>(reps.size());
  std::vector<std::vector<bool>> below(size, std::vector<bool>(size, false));  // below[lo][hi]
  for (int hi = 0; hi < size; ++hi) {
    const PatternMatrix& m = reps[hi];
    for (int c = 0; c < m.n(); ++c)
      for (int k1 = 0; k1 < m.class_count(c); ++k1)
        for (int k2 = k1 + 1; k2 < m.class_count(c); ++k2)
          for (bool opposite : {false, true}) {
            auto rows = m.rows();
            for (auto& r : rows)
              if (r[c].cls == k2) r[c] = Entry{static_cast<std::uint8_t>(k1), r[c].perp != opposite};
            REQUIRE(rows_orthogonal(rows));
            const PatternMatrix child(m.n(), rows);
            int hits = 0;
            for (int lo = 0; lo < size; ++lo)
              if (brute_force_equivalent(child, reps[lo])) {
                below[lo][hi] = true;
                ++hits;
              }
            REQUIRE(hits == 1);
          }
  }
  auto reach = below;
  for (int k = 0; k < size; ++k)
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  std::vector<std::string> lines;
  for (int lo = 0; lo < size; ++lo)
    for (int hi = 0; hi < size; ++hi) {
      if (!reach[lo][hi]) continue;
      bool covered = true;
      for (int mid = 0; mid < size; ++mid)
        if (reach[lo][mid] && reach[mid][hi]) covered = false;
      if (covered) lines.push_back(keys[lo].hex() + " " + keys[hi].hex());
    }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_CASE("identifications") {
  const PatternMatrix n = load("n2", "N.opb");
  const auto kids = identifications(n);
  CHECK(kids.size() == 2);
  CHECK(keys_of(kids).count(canonical_key(load("n2", "M.opb"))) == 1);
  CHECK(identifications(standard_matrix(3)).empty());

  const PatternMatrix irr = load("n3-maximal", "irreducible.opb");
  const auto children = identifications(irr);
  CHECK(children.size() == 6);
  for (const auto& [child, d] : children) {
    CHECK(validate(child).ok());
    CHECK(signature(child).nu == 5);
  }
  CHECK(keys_of(children).size() == 1);
}

TEST_CASE("splits") {
  const auto parents = splits(load("n2", "M.opb"));
  REQUIRE_FALSE(parents.empty());
  std::set<CanonicalKey> keys;
  for (const auto& [p, d] : parents) {
    CHECK(validate(p).ok());
    keys.insert(canonical_key(p));
  }
  CHECK(keys == std::set<CanonicalKey>{canonical_key(load("n2", "N.opb"))});
  CHECK_FALSE(splits(standard_matrix(3)).empty());
  for (const auto& f : collection("n4-classes")) CHECK(splits(*f.matrix).empty());
}

TEST_CASE("witness components drive the split count") {
  const PatternMatrix s = standard_matrix(3);
  for (int c = 0; c < 3; ++c) {
    const auto comps = witness_components(s, c, 0);
    CHECK(comps.size() == 4);
  }
  CHECK(splits(s).size() == 3 * 7);
  CHECK_THROWS(witness_components(s, 0, 3));
}

TEST_CASE("maximality") {
  CHECK(is_maximal(load("n2", "N.opb")));
  CHECK_FALSE(is_maximal(load("n2", "M.opb")));
  for (const auto& f : collection("n4-classes")) CHECK(is_maximal(*f.matrix));
  for (const auto& f : collection("n3-maximal")) CHECK(is_maximal(*f.matrix));
}

TEST_CASE("maximality does not depend on the representative") {
  std::mt19937_64 rng(17);
  for (const auto& [k, info] : enumerate_classes(3).classes)
    for (int i = 0; i < 20; ++i) CHECK(is_maximal(scramble(info.representative, rng)) == info.maximal);
}

TEST_CASE("identification and split are inverse") {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& [key, info] : enumerate_classes(n).classes) {
      for (const auto& [parent, d] : splits(info.representative)) {
        CHECK(keys_of(identifications(parent)).count(key) == 1);
      }
      for (const auto& [child, d] : identifications(info.representative)) {
        bool found = false;
        for (const auto& [p, sd] : splits(child)) found = found || canonical_key(p) == key;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("enumeration of small systems") {
  const auto s1 = enumerate_classes(1);
  CHECK(s1.size() == 1);
  const auto s2 = enumerate_classes(2);
  CHECK(s2.complete);
  CHECK(s2.size() == 2);
  CHECK(s2.maximal_count() == 1);
  const auto s3 = enumerate_classes(3);
  CHECK(s3.size() == 17);
  CHECK(s3.maximal_count() == 3);
  std::map<int, int> nu;
  for (const auto& [k, info] : s3.classes) ++nu[info.signature.nu];
  CHECK(nu == std::map<int, int>{{3, 1}, {4, 3}, {5, 6}, {6, 5}, {7, 2}});
  check_store(s3);

  std::set<CanonicalKey> listed;
  for (const auto& f : collection("n3-classes")) listed.insert(canonical_key(*f.matrix));
  CHECK(listed.size() == 17);
  for (const auto& [k, info] : s3.classes) CHECK(listed.count(k) == 1);

  std::set<CanonicalKey> maximal;
  for (const auto& f : collection("n3-maximal")) maximal.insert(canonical_key(*f.matrix));
  for (const auto& [k, info] : s3.classes) CHECK(info.maximal == (maximal.count(k) == 1));
}

TEST_CASE("enumeration results do not depend on the worker count") {
  EnumerateOptions one, four;
  four.jobs = 4;
  const auto a = enumerate_classes(3, one);
  const auto b = enumerate_classes(3, four);
  REQUIRE(a.size() == b.size());
  auto ia = a.classes.begin();
  for (auto ib = b.classes.begin(); ib != b.classes.end(); ++ia, ++ib) {
    CHECK(ia->first == ib->first);
    CHECK(ia->second.representative == ib->second.representative);
  }
}

TEST_CASE("enumeration budgets flag incomplete stores") {
  EnumerateOptions opt;
  opt.max_classes = 5;
  const auto s = enumerate_classes(3, opt);
  CHECK_FALSE(s.complete);
  CHECK_THROWS_AS(hasse(s), PatternError);
  CHECK_THROWS_AS(enumerate_classes(0), PatternError);
}

TEST_CASE("check_store catches a tampered store") {
  auto s = enumerate_classes(2);
  check_store(s);
  s.classes.begin()->second.maximal = !s.classes.begin()->second.maximal;
  CHECK_THROWS_AS(check_store(s), PatternError);
}

TEST_CASE("Hasse diagram of two qubits") {
  const auto s = enumerate_classes(2);
  const auto h = hasse(s);
  REQUIRE(h.edges.size() == 1);
  CHECK(h.nodes[h.edges[0].first] == canonical_key(standard_matrix(2)));
  CHECK(h.nodes[h.edges[0].second] == canonical_key(load("n2", "N.opb")));
}

TEST_CASE("Hasse diagram of three qubits matches the golden edge list") {
  const auto s = enumerate_classes(3);
  const auto h = hasse(s);
  CHECK(h.nodes.size() == 17);
  CHECK(h.nodes[h.minimum] == canonical_key(standard_matrix(3)));
  CHECK(h.edges == h.raw_edges);
  const std::string oracle = hasse_oracle(s);
  if (const char* path = std::getenv("OPB_WRITE_GOLDEN")) std::ofstream(path) << oracle;
  CHECK(oracle == data_text("golden", "hasse-n3.txt"));
  CHECK(hasse_edge_text(h) == oracle);
}

TEST_CASE("switching sites") {
  const PatternMatrix a = load("n3-maximal", "reducible-a.opb");
  const auto sites = switching_sites(a);
  bool found = false;
  for (const auto& s : sites) {
    CHECK(validate(s.block).ok());
    CHECK(static_cast<int>(s.rows.size()) == 1 << s.cols.size());
    if (s.cols == std::vector<int>{1, 2} && s.rows == std::vector<int>{4, 5, 6, 7}) found = true;
  }
  CHECK(found);

  const PatternMatrix s3 = standard_matrix(3);
  const auto std_sites = switching_sites(s3);
  CHECK_FALSE(std_sites.empty());
  for (const auto& site : std_sites) {
    std::vector<int> perm(site.cols.size());
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end()))
      CHECK(are_equivalent(apply_switch(s3, site, perm), s3));
  }

  const PatternMatrix sw11 = load("n4-switching", "sw11.opb");
  for (const auto& site : switching_sites(sw11)) {
    std::vector<int> perm(site.cols.size());
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end()))
      CHECK(are_equivalent(apply_switch(sw11, site, perm), sw11));
  }
}

TEST_CASE("apply_switch") {
  const PatternMatrix a = load("n3-maximal", "reducible-a.opb");
  const PatternMatrix b = load("n3-maximal", "reducible-b.opb");
  const SwitchSite* lower = nullptr;
  const auto sites = switching_sites(a);
  for (const auto& s : sites)
    if (s.cols == std::vector<int>{1, 2} && s.rows == std::vector<int>{4, 5, 6, 7}) lower = &s;
  REQUIRE(lower);
  const PatternMatrix swapped = apply_switch(a, *lower, {1, 0});
  CHECK(are_equivalent(swapped, b));
  CHECK(is_maximal(swapped));
  CHECK(apply_switch(a, *lower, {0, 1}) == a);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) CHECK(swapped.at(r, c) == a.at(r, c));

  const PatternMatrix x = load("examples", "switch-X.opb");
  const SwitchSite whole{{0, 1, 2, 3}, {0, 1}, x};
  CHECK(apply_switch(x, whole, {1, 0}) == load("examples", "switch-Y.opb"));

  CHECK_THROWS_AS(apply_switch(a, *lower, {0, 0}), PatternError);
  CHECK_THROWS_AS(apply_switch(a, *lower, {0}), PatternError);
  SwitchSite bad = *lower;
  bad.rows = {0, 1, 4, 5};
  CHECK_THROWS_AS(apply_switch(a, bad, {1, 0}), PatternError);
}

TEST_CASE("switching preserves nu and maximality") {
  for (const auto& f : collection("n4-switching")) {
    const PatternMatrix& m = *f.matrix;
    const int nu = signature(m).nu;
    for (const auto& site : switching_sites(m)) {
      std::vector<int> perm(site.cols.size());
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) {
        const PatternMatrix s = apply_switch(m, site, perm);
        CHECK(signature(s).nu == nu);
        CHECK(is_maximal(s));
      }
    }
  }
}

TEST_CASE("switching orbits of three qubits") {
  const auto a = switching_orbit(load("n3-maximal", "reducible-a.opb"));
  const auto b = switching_orbit(load("n3-maximal", "reducible-b.opb"));
  CHECK(a.size() == 2);
  CHECK(a.count(canonical_key(load("n3-maximal", "reducible-b.opb"))) == 1);
  CHECK(b.size() == 2);
  CHECK(switching_orbit(load("n3-maximal", "irreducible.opb")).size() == 1);
  CHECK_THROWS_AS(switching_orbit(load("n2", "M.opb")), PatternError);
}

TEST_CASE("switching orbits of four qubits") {
  // The group listed first has ten equivalence classes: every choice of
  // column roles for the two reducible three-qubit halves.
  const std::vector<int> sizes{10, 2, 4, 1, 4, 3, 2, 2, 2, 2, 1, 1, 1, 1, 1};
  std::set<CanonicalKey> all;
  std::size_t total = 0;
  int i = 0;
  for (const auto& f : collection("n4-switching")) {
    const auto orbit = switching_orbit(*f.matrix);
    CHECK(static_cast<int>(orbit.size()) == sizes[i++]);
    const bool reducible = is_reducible(*f.matrix).has_value();
    for (const auto& [k, rep] : orbit) {
      CHECK(is_reducible(rep).has_value() == reducible);
      all.insert(k);
    }
    total += orbit.size();
  }
  CHECK(all.size() == total);
  CHECK(total == 37);
}

TEST_CASE("family membership") {
  const PatternMatrix m = load("n2", "M.opb");
  const PatternMatrix n = load("n2", "N.opb");
  CHECK(family_membership(n, n, true));
  CHECK(family_membership(n, n, false));
  CHECK(family_membership(m, n, false));
  CHECK_FALSE(family_membership(m, n, true));
  CHECK_FALSE(family_membership(n, m, false));
  CHECK_THROWS_AS(family_membership(m, standard_matrix(3), false), PatternError);

  // column order matters
  const PatternMatrix a = load("n3-maximal", "reducible-a.opb");
  CHECK(family_membership(standard_matrix(3), a, false));
  std::vector<std::vector<Entry>> rot;
  for (const auto& r : a.rows()) rot.push_back({r[2], r[0], r[1]});
  const PatternMatrix rotated(3, rot);
  CHECK(family_membership(PatternMatrix(3, rot), rotated, true));
  CHECK_FALSE(family_membership(a, rotated, false));
}
