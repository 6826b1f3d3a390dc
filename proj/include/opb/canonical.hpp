#pragma once

#include <string>
#include <utility>

#include "opb/pattern.hpp"

namespace opb {

/// Identity of an equivalence class of O(n): the smallest row-major
/// serialization of the matrix over all row orders, column orders and
/// renamings (polarity exchange included). Byte 0 is n; each further
/// byte is one cell encoded as (label << 1) | perp.
struct CanonicalKey {
  std::string bytes;

  int n() const { return bytes.empty() ? 0 : static_cast<unsigned char>(bytes[0]); }
  std::string hex() const;
  static CanonicalKey from_hex(const std::string& hex);

  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const noexcept { return std::hash<std::string>{}(k.bytes); }
};

/// Matrix whose cells are exactly the key bytes.
PatternMatrix matrix_from_key(const CanonicalKey& key);

CanonicalKey canonical_key(const PatternMatrix& m);

std::pair<CanonicalKey, PatternMatrix> canonical_form(const PatternMatrix& m);

/// Key under row permutations and renamings only; the column order is
/// left as is. Used where families are attached to one specific matrix.
CanonicalKey column_fixed_key(const PatternMatrix& m);

/// Equal keys, after a signature pre-filter. Both matrices must be valid
/// and have the same n.
bool are_equivalent(const PatternMatrix& a, const PatternMatrix& b);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search over column permutations and per-column renamings,
/// matching rows as multisets. Refuses (BudgetExceeded) beyond 8 rows or
/// past `node_budget` search nodes.
bool brute_force_equivalent(const PatternMatrix& a, const PatternMatrix& b,
                            long long node_budget = 50'000'000);

}  // namespace opb
