#include "opb/canonical.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>

namespace opb {

namespace {

constexpr int kMaxRows = 1 << kMaxQubits;

// Row-by-row branch and bound. For a fixed column order the smallest key
// has its labels appearing in increasing order in every column, each first
// appearing with polarity 0, so a row order determines the labeling: the
// search only has to choose the next row, branching on ties.
class KeySearch {
 public:
  explicit KeySearch(const PatternMatrix& m) : m_(m), n_(m.n()), rows_(m.row_count()) {
    best_.assign(rows_, 0);
    cur_.assign(rows_, 0);
    for (auto& col : label_) col.fill(-1);
  }

  void run(const std::array<int, kMaxQubits>& order) {
    order_ = order;
    for (int c = 0; c < n_; ++c) next_[c] = 0;
    used_ = 0;
    descend(0, have_best_ ? State::kEqual : State::kLess);
  }

  CanonicalKey key() const {
    CanonicalKey k;
    k.bytes.reserve(1 + static_cast<std::size_t>(rows_) * n_);
    k.bytes.push_back(static_cast<char>(n_));
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < n_; ++c)
        k.bytes.push_back(static_cast<char>((best_[r] >> (8 * (n_ - 1 - c))) & 0xff));
    return k;
  }

 private:
  enum class State { kEqual, kLess };

  // Packs the row's codes big-endian so integer order is lexicographic order.
  std::uint64_t row_code(int r) const {
    const Entry* e = m_.row(r);
    std::uint64_t code = 0;
    for (int k = 0; k < n_; ++k) {
      const int c = order_[k];
      const Entry x = e[c];
      const int lab = label_[c][x.cls];
      const std::uint64_t byte = lab < 0 ? static_cast<std::uint64_t>(next_[c]) << 1
                                         : (static_cast<std::uint64_t>(lab) << 1) | (x.perp != flip_[c][x.cls]);
      code = (code << 8) | byte;
    }
    return code;
  }

  void descend(int depth, State state) {
    if (depth == rows_) {
      if (state == State::kLess) {
        best_ = cur_;
        have_best_ = true;
        ++best_version_;
      }
      return;
    }

    std::uint64_t min_code = ~std::uint64_t{0};
    std::array<int, kMaxRows> ties;
    int tie_count = 0;
    for (int r = 0; r < rows_; ++r) {
      if (used_ & (std::uint64_t{1} << r)) continue;
      const std::uint64_t code = row_code(r);
      if (code < min_code) {
        min_code = code;
        tie_count = 0;
      }
      if (code == min_code) ties[tie_count++] = r;
    }

    if (state == State::kEqual) {
      if (min_code > best_[depth]) return;
      if (min_code < best_[depth]) state = State::kLess;
    }

    const std::uint64_t version = best_version_;
    for (int t = 0; t < tie_count; ++t) {
      const int r = ties[t];
      const Entry* e = m_.row(r);
      std::array<int, kMaxQubits> assigned;
      int assigned_count = 0;
      for (int c = 0; c < n_; ++c) {
        if (label_[c][e[c].cls] < 0) {
          label_[c][e[c].cls] = static_cast<std::int8_t>(next_[c]++);
          flip_[c][e[c].cls] = e[c].perp;
          assigned[assigned_count++] = c;
        }
      }
      used_ |= std::uint64_t{1} << r;
      cur_[depth] = min_code;

      // A leaf below a sibling may have replaced best_; it then shares this
      // prefix, so the comparison restarts from "equal".
      const State child_state = best_version_ != version ? State::kEqual : state;
      descend(depth + 1, child_state);

      used_ &= ~(std::uint64_t{1} << r);
      for (int a = 0; a < assigned_count; ++a) {
        const int c = assigned[a];
        label_[c][e[c].cls] = -1;
        --next_[c];
      }
    }
  }

  const PatternMatrix& m_;
  const int n_;
  const int rows_;
  std::array<int, kMaxQubits> order_{};
  std::array<std::array<std::int8_t, kMaxRows>, kMaxQubits> label_{};
  std::array<std::array<bool, kMaxRows>, kMaxQubits> flip_{};
  std::array<int, kMaxQubits> next_{};
  std::uint64_t used_ = 0;
  std::vector<std::uint64_t> cur_;
  std::vector<std::uint64_t> best_;
  bool have_best_ = false;
  std::uint64_t best_version_ = 0;
};

CanonicalKey search_key(const PatternMatrix& m, bool all_column_orders) {
  require_valid(m);
  KeySearch search(m);
  std::array<int, kMaxQubits> order{};
  std::iota(order.begin(), order.begin() + m.n(), 0);
  do {
    search.run(order);
  } while (all_column_orders && std::next_permutation(order.begin(), order.begin() + m.n()));
  return search.key();
}

}  // namespace

std::string CanonicalKey::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

CanonicalKey CanonicalKey::from_hex(const std::string& hex) {
  auto nibble = [&](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw PatternError("bad hex digit in key '" + hex + "'");
  };
  if (hex.size() % 2 != 0) throw PatternError("odd-length key '" + hex + "'");
  CanonicalKey k;
  for (std::size_t i = 0; i < hex.size(); i += 2)
    k.bytes.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  return k;
}

PatternMatrix matrix_from_key(const CanonicalKey& key) {
  const int n = key.n();
  if (n < 1 || n > kMaxQubits || (key.bytes.size() - 1) % n != 0) throw PatternError("malformed canonical key");
  const int rows = static_cast<int>((key.bytes.size() - 1) / n);
  std::vector<std::vector<Entry>> grid(rows, std::vector<Entry>(n));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < n; ++c) {
      const auto b = static_cast<unsigned char>(key.bytes[1 + static_cast<std::size_t>(r) * n + c]);
      grid[r][c] = Entry{static_cast<std::uint8_t>(b >> 1), (b & 1) != 0};
    }
  return PatternMatrix(n, grid);
}

CanonicalKey canonical_key(const PatternMatrix& m) { return search_key(m, true); }

std::pair<CanonicalKey, PatternMatrix> canonical_form(const PatternMatrix& m) {
  CanonicalKey key = canonical_key(m);
  PatternMatrix rep = matrix_from_key(key);
  return {std::move(key), std::move(rep)};
}

CanonicalKey column_fixed_key(const PatternMatrix& m) { return search_key(m, false); }

bool are_equivalent(const PatternMatrix& a, const PatternMatrix& b) {
  if (a.n() != b.n())
    throw PatternError("cannot compare matrices with n=" + std::to_string(a.n()) + " and n=" + std::to_string(b.n()));
  if (signature(a) != signature(b)) return false;
  return canonical_key(a) == canonical_key(b);
}

// ---------------------------------------------------------------------------

namespace {

class BruteForce {
 public:
  BruteForce(const PatternMatrix& a, const PatternMatrix& b, long long budget)
      : a_(a), b_(b), n_(a.n()), rows_(a.row_count()), budget_(budget) {}

  bool run() {
    std::vector<int> perm(n_);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      // b column k is matched against a column perm[k]
      perm_ = perm;
      map_.assign(n_, {});
      if (assign_column(0)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  }

 private:
  // Sorted multiset of the first `cols` columns of the mapped a and of b.
  bool prefix_matches(int cols) const {
    std::vector<std::vector<Entry>> left(rows_), right(rows_);
    for (int r = 0; r < rows_; ++r) {
      for (int k = 0; k < cols; ++k) {
        const Entry e = a_.at(r, perm_[k]);
        const Entry mapped = map_[k][e.cls];
        left[r].push_back(e.perp ? mapped.flipped() : mapped);
        right[r].push_back(b_.at(r, k));
      }
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    return left == right;
  }

  bool assign_column(int k) {
    if (k == n_) return true;
    if (++nodes_ > budget_) throw BudgetExceeded("brute-force equivalence exceeded its node budget");
    const int ka = a_.class_count(perm_[k]);
    const int kb = b_.class_count(k);
    if (ka != kb) return false;
    std::vector<int> target(kb);
    std::iota(target.begin(), target.end(), 0);
    do {
      for (unsigned flips = 0; flips < (1u << ka); ++flips) {
        if (++nodes_ > budget_) throw BudgetExceeded("brute-force equivalence exceeded its node budget");
        map_[k].assign(ka, Entry{});
        for (int c = 0; c < ka; ++c)
          map_[k][c] = Entry{static_cast<std::uint8_t>(target[c]), ((flips >> c) & 1) != 0};
        if (prefix_matches(k + 1) && assign_column(k + 1)) return true;
      }
    } while (std::next_permutation(target.begin(), target.end()));
    return false;
  }

  const PatternMatrix& a_;
  const PatternMatrix& b_;
  const int n_;
  const int rows_;
  const long long budget_;
  long long nodes_ = 0;
  std::vector<int> perm_;
  std::vector<std::vector<Entry>> map_;
};

}  // namespace

bool brute_force_equivalent(const PatternMatrix& a, const PatternMatrix& b, long long node_budget) {
  if (a.n() != b.n()) throw PatternError("cannot compare matrices of different n");
  if (a.row_count() > 8 || b.row_count() > 8)
    throw BudgetExceeded("brute-force equivalence is limited to 8 rows (n <= 3)");
  if (a.row_count() != b.row_count()) return false;
  return BruteForce(a, b, node_budget).run();
}

}  // namespace opb
