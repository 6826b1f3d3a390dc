#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace opb {

/// Largest qubit count any pattern matrix may have (2^6 rows).
inline constexpr int kMaxQubits = 6;

class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One cell of a pattern matrix: a column-scoped variable class and whether
/// the cell holds the variable itself or its perpendicular.
struct Entry {
  std::uint8_t cls = 0;
  bool perp = false;

  constexpr Entry flipped() const { return Entry{cls, !perp}; }
  constexpr bool orthogonal_to(Entry o) const { return cls == o.cls && perp != o.perp; }
  constexpr std::uint8_t code() const { return static_cast<std::uint8_t>((cls << 1) | (perp ? 1 : 0)); }

  friend constexpr auto operator<=>(Entry, Entry) = default;
};

/// Matrix in O(n): 2^n rows of n entries. Immutable after construction.
///
/// Class ids in each column are renumbered densely in order of first
/// appearance (scanning rows top to bottom), so two matrices that differ
/// only in the numeric ids they were built from compare equal. Polarity
/// is kept exactly as given.
class PatternMatrix {
 public:
  PatternMatrix() = default;

  /// `rows` may have any count (validate() reports a wrong one) but each
  /// row must have exactly n entries. `names[col][cls]` are optional
  /// display names keyed by the *input* class ids.
  PatternMatrix(int n, const std::vector<std::vector<Entry>>& rows,
                const std::vector<std::vector<std::string>>& names = {});

  int n() const { return n_; }
  int row_count() const { return rows_; }
  Entry at(int row, int col) const { return cells_[static_cast<std::size_t>(row) * n_ + col]; }
  const Entry* row(int r) const { return cells_.data() + static_cast<std::size_t>(r) * n_; }
  std::vector<std::vector<Entry>> rows() const;

  int class_count(int col) const { return class_counts_[col]; }
  int total_classes() const;

  /// Display name of a class; generated ("a0", "b3", ...) when none was given.
  const std::string& name(int col, int cls) const { return names_[col][cls]; }

  friend bool operator==(const PatternMatrix& a, const PatternMatrix& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_ && a.cells_ == b.cells_;
  }

 private:
  int n_ = 0;
  int rows_ = 0;
  std::vector<Entry> cells_;
  std::vector<int> class_counts_;
  std::vector<std::vector<std::string>> names_;
};

std::string default_class_name(int col, int cls);

// ---------------------------------------------------------------------------
// Validation

enum class Axiom {
  kShape,         // row count is not 2^n
  kBalance,       // mu(a) != mu(a-perp)
  kOrthogonality  // two rows share no witness column
};

struct Violation {
  Axiom axiom;
  int row_a = -1;
  int row_b = -1;
  int column = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const PatternMatrix& m);

/// Throws PatternError carrying the report text when m is not in O(n).
void require_valid(const PatternMatrix& m);

// ---------------------------------------------------------------------------
// Multiplicities and signatures

struct Multiplicity {
  int plain = 0;  // mu(a)
  int perp = 0;   // mu(a-perp)
  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
};

Multiplicity multiplicity(const PatternMatrix& m, int column, int cls);

/// mu of each class of a column, indexed by class id.
std::vector<int> column_multiplicities(const PatternMatrix& m, int column);

using Partition = std::vector<int>;

struct Signature {
  std::vector<Partition> partitions;  // decreasing, list in decreasing lex order
  int nu = 0;

  std::string to_string() const;
  friend bool operator==(const Signature&, const Signature&) = default;
  friend auto operator<=>(const Signature&, const Signature&) = default;
};

Signature signature(const PatternMatrix& m);

/// Parses "8 | 4,4 | 2^4 | 1^8" (exponents allowed, as in the displays).
Signature parse_signature(const std::string& text);

/// First column (0-based) holding a single class, if any.
std::optional<int> is_reducible(const PatternMatrix& m);

PatternMatrix standard_matrix(int n);

/// Columns in which rows i and j hold a class and its perpendicular.
std::vector<int> orthogonality_witnesses(const PatternMatrix& m, int i, int j);

/// Bitmask form of orthogonality_witnesses, no argument checks.
inline unsigned witness_mask(const PatternMatrix& m, int i, int j) {
  unsigned mask = 0;
  const Entry* a = m.row(i);
  const Entry* b = m.row(j);
  for (int c = 0; c < m.n(); ++c)
    if (a[c].orthogonal_to(b[c])) mask |= 1u << c;
  return mask;
}

}  // namespace opb
