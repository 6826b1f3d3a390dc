#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "opb/lattice.hpp"
#include "opb/verify.hpp"

using namespace opb;
using testing_support::load;

namespace {

PatternMatrix with_row(const PatternMatrix& m, int r, std::vector<Entry> row) {
  auto rows = m.rows();
  rows[r] = std::move(row);
  return PatternMatrix(m.n(), rows);
}

}  // namespace

TEST_CASE("entry flip is an involution and orthogonality needs the same class") {
  const Entry a{3, false};
  CHECK(a.flipped().flipped() == a);
  CHECK(a.orthogonal_to(a.flipped()));
  CHECK_FALSE(a.orthogonal_to(a));
  CHECK_FALSE(a.orthogonal_to(Entry{2, true}));
  CHECK(Entry{3, true}.code() == 7);
}

TEST_CASE("construction renumbers classes by first appearance") {
  const PatternMatrix m(1, {{Entry{5, true}}, {Entry{5, false}}});
  CHECK(m.at(0, 0) == Entry{0, true});
  CHECK(m.class_count(0) == 1);
  CHECK(m.name(0, 0) == "a0");
  CHECK_THROWS_AS(PatternMatrix(2, {{Entry{}}}), PatternError);
  CHECK_THROWS_AS(PatternMatrix(0, {}), PatternError);
  CHECK_THROWS_AS(PatternMatrix(kMaxQubits + 1, {}), PatternError);
}

TEST_CASE("validate accepts the small reference matrices") {
  CHECK(validate(standard_matrix(2)).ok());
  CHECK(validate(load("n2", "N.opb")).ok());
  CHECK(validate(load("n2", "M.opb")).ok());
}

TEST_CASE("validate reports each failing axiom") {
  const PatternMatrix n = load("n2", "N.opb");
  SUBCASE("duplicated row") {
    const auto bad = with_row(n, 1, {n.at(0, 0), n.at(0, 1)});
    const auto report = validate(bad);
    REQUIRE_FALSE(report.ok());
    bool orth = false, balance = false;
    for (const auto& v : report.violations) {
      if (v.axiom == Axiom::kOrthogonality && v.row_a == 0 && v.row_b == 1) orth = true;
      if (v.axiom == Axiom::kBalance) balance = true;
    }
    CHECK(orth);
    CHECK(balance);
    CHECK_THROWS_AS(require_valid(bad), PatternError);
    CHECK_THROWS_AS(signature(bad), PatternError);
  }
  SUBCASE("wrong row count") {
    auto rows = n.rows();
    rows.pop_back();
    const auto report = validate(PatternMatrix(2, rows));
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().axiom == Axiom::kShape);
  }
  SUBCASE("all violations are listed") {
    const PatternMatrix flat(2, std::vector<std::vector<Entry>>(4, std::vector<Entry>(2, Entry{0, false})));
    const auto report = validate(flat);
    int orth = 0;
    for (const auto& v : report.violations) orth += v.axiom == Axiom::kOrthogonality;
    CHECK(orth == 6);
    CHECK(report.to_string().find("orthogonal") != std::string::npos);
  }
}

TEST_CASE("multiplicities") {
  const PatternMatrix n = load("n2", "N.opb");
  CHECK(multiplicity(n, 0, 0) == Multiplicity{2, 2});
  const PatternMatrix s = standard_matrix(3);
  for (int c = 0; c < 3; ++c) CHECK(multiplicity(s, c, 0) == Multiplicity{4, 4});
  const PatternMatrix irr = load("n3-maximal", "irreducible.opb");
  // column 1 holds u (three times) and a (once)
  CHECK(multiplicity(irr, 0, 1) == Multiplicity{1, 1});
  CHECK(multiplicity(irr, 0, 0) == Multiplicity{3, 3});
  CHECK_THROWS(multiplicity(n, 0, 7));
  CHECK_THROWS(multiplicity(n, 5, 0));
}

TEST_CASE("signatures") {
  CHECK(signature(standard_matrix(3)) == parse_signature("4 | 4 | 4"));
  CHECK(signature(standard_matrix(3)).nu == 3);
  const Signature n = signature(load("n2", "N.opb"));
  CHECK(n.nu == 3);
  CHECK(n == parse_signature("2 | 1,1"));
  const Signature sw1 = signature(load("n4-switching", "sw01.opb"));
  CHECK(sw1 == parse_signature("8 | 4^2 | 2^4 | 1^8"));
  CHECK(sw1.nu == 15);
  CHECK(sw1.to_string() == "8 | 4^2 | 2^4 | 1^8 ; nu=15");
}

TEST_CASE("signature text") {
  const Signature s = parse_signature("1^2 | 2 ; nu=3");
  CHECK(s.partitions == std::vector<Partition>{{2}, {1, 1}});
  CHECK(s.nu == 3);
  CHECK_THROWS_AS(parse_signature(""), PatternError);
  CHECK_THROWS_AS(parse_signature("2 | x"), PatternError);
  CHECK_THROWS_AS(parse_signature("2^"), PatternError);
}

TEST_CASE("signature survives random equivalence operations") {
  std::mt19937_64 rng(7);
  for (const auto& f : collection("n4-classes")) {
    const Signature s = signature(*f.matrix);
    PatternMatrix m = *f.matrix;
    for (int i = 0; i < 100; ++i) {
      m = scramble(m, rng);
      REQUIRE(signature(m) == s);
    }
  }
}

TEST_CASE("reducibility witnesses") {
  for (int n = 1; n <= 4; ++n) CHECK(is_reducible(standard_matrix(n)) == 0);
  CHECK_FALSE(is_reducible(load("n3-maximal", "irreducible.opb")).has_value());
  CHECK(is_reducible(load("n3-maximal", "reducible-a.opb")) == 0);
  CHECK(is_reducible(load("n3-maximal", "reducible-b.opb")) == 0);
}

TEST_CASE("standard matrices") {
  const PatternMatrix s1 = standard_matrix(1);
  CHECK(s1.row_count() == 2);
  CHECK(s1.at(0, 0) == Entry{0, false});
  CHECK(s1.at(1, 0) == Entry{0, true});
  CHECK(s1.name(0, 0) == "s1");
  const PatternMatrix s3 = standard_matrix(3);
  CHECK(s3.row_count() == 8);
  CHECK(signature(s3) == parse_signature("4|4|4"));
  CHECK(validate(standard_matrix(kMaxQubits)).ok());
  CHECK_THROWS_AS(standard_matrix(0), PatternError);
  CHECK_THROWS_AS(standard_matrix(kMaxQubits + 1), PatternError);
}

TEST_CASE("orthogonality witnesses") {
  CHECK(orthogonality_witnesses(standard_matrix(2), 0, 3) == std::vector<int>{0, 1});
  const PatternMatrix n = load("n2", "N.opb");
  CHECK(orthogonality_witnesses(n, 0, 1) == std::vector<int>{1});
  CHECK(orthogonality_witnesses(n, 0, 2) == std::vector<int>{0});
  CHECK(witness_mask(n, 0, 2) == 1u);
  CHECK_THROWS_AS(orthogonality_witnesses(n, 1, 1), PatternError);
  CHECK_THROWS_AS(orthogonality_witnesses(n, 0, 9), PatternError);
}

TEST_CASE("balance and the row bound hold on every n<=3 class") {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& [key, info] : enumerate_classes(n).classes) {
      const PatternMatrix& m = info.representative;
      std::vector<std::vector<int>> mu;
      for (int c = 0; c < n; ++c) {
        mu.push_back(column_multiplicities(m, c));
        for (int k = 0; k < m.class_count(c); ++k) {
          const auto x = multiplicity(m, c, k);
          CHECK(x.plain == x.perp);
        }
      }
      for (int r = 0; r < m.row_count(); ++r) {
        int total = 0;
        for (int c = 0; c < n; ++c) total += mu[c][m.at(r, c).cls];
        CHECK(total >= m.row_count() - 1);
      }
      for (int c = 0; c < n; ++c) {
        int sum = 0;
        for (int x : mu[c]) sum += x;
        CHECK(sum == m.row_count() / 2);
      }
    }
  }
}

TEST_CASE("a row is determined by the other rows") {
  for (int n = 2; n <= 3; ++n) {
    for (const auto& [key, info] : enumerate_classes(n).classes) {
      const PatternMatrix& m = info.representative;
      std::vector<std::vector<int>> mu;
      for (int c = 0; c < n; ++c) mu.push_back(column_multiplicities(m, c));
      for (int r = 0; r < m.row_count(); ++r) {
        // per column: every entry of an existing class, or -1 for a fresh class
        std::vector<std::vector<int>> options(n);
        for (int c = 0; c < n; ++c) {
          options[c].push_back(-1);
          for (int k = 0; k < m.class_count(c); ++k) {
            options[c].push_back(2 * k);
            options[c].push_back(2 * k + 1);
          }
        }
        std::vector<int> pick(n, 0);
        for (;;) {
          bool orthogonal = true;
          for (int o = 0; o < m.row_count() && orthogonal; ++o) {
            if (o == r) continue;
            bool witness = false;
            for (int c = 0; c < n; ++c) {
              const int code = options[c][pick[c]];
              if (code >= 0 && Entry{static_cast<std::uint8_t>(code / 2), (code & 1) != 0}.orthogonal_to(m.at(o, c)))
                witness = true;
            }
            orthogonal = witness;
          }
          if (orthogonal) {
            for (int c = 0; c < n; ++c) {
              const int code = options[c][pick[c]];
              const Entry own = m.at(r, c);
              const bool same = code == own.code();
              const bool renamed_single = code < 0 && mu[c][own.cls] == 1;
              CHECK((same || renamed_single));
            }
          }
          int c = 0;
          while (c < n && ++pick[c] == static_cast<int>(options[c].size())) pick[c++] = 0;
          if (c == n) break;
        }
      }
    }
  }
}
