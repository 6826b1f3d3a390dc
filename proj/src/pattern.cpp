#include "opb/pattern.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace opb {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string default_class_name(int col, int cls) {
  return std::string(1, static_cast<char>('a' + col)) + std::to_string(cls);
}

PatternMatrix::PatternMatrix(int n, const std::vector<std::vector<Entry>>& rows,
                             const std::vector<std::vector<std::string>>& names)
    : n_(n), rows_(static_cast<int>(rows.size())) {
  if (n < 1 || n > kMaxQubits)
    throw PatternError("qubit count " + std::to_string(n) + " outside 1.." + std::to_string(kMaxQubits));
  if (rows_ > (1 << kMaxQubits))
    throw PatternError("too many rows: " + std::to_string(rows_));
  cells_.reserve(static_cast<std::size_t>(rows_) * n_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n)
      throw PatternError("row of length " + std::to_string(r.size()) + " in a matrix with " +
                         std::to_string(n) + " columns");
    cells_.insert(cells_.end(), r.begin(), r.end());
  }

  class_counts_.assign(n_, 0);
  names_.assign(n_, {});
  for (int c = 0; c < n_; ++c) {
    std::vector<int> remap(256, -1);
    for (int r = 0; r < rows_; ++r) {
      Entry& e = cells_[static_cast<std::size_t>(r) * n_ + c];
      int& slot = remap[e.cls];
      if (slot < 0) {
        slot = class_counts_[c]++;
        const bool named = c < static_cast<int>(names.size()) && e.cls < names[c].size() &&
                           !names[c][e.cls].empty();
        names_[c].push_back(named ? names[c][e.cls] : default_class_name(c, slot));
      }
      e.cls = static_cast<std::uint8_t>(slot);
    }
  }
}

std::vector<std::vector<Entry>> PatternMatrix::rows() const {
  std::vector<std::vector<Entry>> out(rows_);
  for (int r = 0; r < rows_; ++r) out[r].assign(row(r), row(r) + n_);
  return out;
}

int PatternMatrix::total_classes() const {
  int total = 0;
  for (int k : class_counts_) total += k;
  return total;
}

// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) os << v.message << '\n';
  return os.str();
}

ValidationReport validate(const PatternMatrix& m) {
  ValidationReport report;
  const int n = m.n();
  const int expected = 1 << n;
  if (m.row_count() != expected) {
    report.violations.push_back({Axiom::kShape, -1, -1, -1,
                                 "shape: " + std::to_string(m.row_count()) + " rows, expected " +
                                     std::to_string(expected)});
  }

  for (int c = 0; c < n; ++c) {
    std::vector<int> plain(m.class_count(c), 0), perp(m.class_count(c), 0);
    for (int r = 0; r < m.row_count(); ++r) {
      Entry e = m.at(r, c);
      (e.perp ? perp : plain)[e.cls]++;
    }
    for (int k = 0; k < m.class_count(c); ++k) {
      if (plain[k] != perp[k]) {
        report.violations.push_back(
            {Axiom::kBalance, -1, -1, c,
             "balance: column " + std::to_string(c + 1) + " class " + m.name(c, k) + " occurs " +
                 std::to_string(plain[k]) + " times but its perpendicular " +
                 std::to_string(perp[k]) + " times"});
      }
    }
  }

  for (int i = 0; i < m.row_count(); ++i) {
    for (int j = i + 1; j < m.row_count(); ++j) {
      if (witness_mask(m, i, j) == 0) {
        report.violations.push_back({Axiom::kOrthogonality, i, j, -1,
                                     "orthogonality: rows " + std::to_string(i + 1) + " and " +
                                         std::to_string(j + 1) + " are not orthogonal"});
      }
    }
  }
  return report;
}

void require_valid(const PatternMatrix& m) {
  auto report = validate(m);
  if (!report.ok()) throw PatternError("matrix is not in O(" + std::to_string(m.n()) + "):\n" + report.to_string());
}

// ---------------------------------------------------------------------------

Multiplicity multiplicity(const PatternMatrix& m, int column, int cls) {
  if (column < 0 || column >= m.n()) throw PatternError("column out of range");
  if (cls < 0 || cls >= m.class_count(column))
    throw PatternError("unknown class " + std::to_string(cls) + " in column " + std::to_string(column + 1));
  Multiplicity mu;
  for (int r = 0; r < m.row_count(); ++r) {
    Entry e = m.at(r, column);
    if (e.cls != cls) continue;
    (e.perp ? mu.perp : mu.plain)++;
  }
  return mu;
}

std::vector<int> column_multiplicities(const PatternMatrix& m, int column) {
  std::vector<int> mu(m.class_count(column), 0);
  for (int r = 0; r < m.row_count(); ++r) {
    Entry e = m.at(r, column);
    if (!e.perp) mu[e.cls]++;
  }
  return mu;
}

std::string Signature::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (i) os << " | ";
    const auto& p = partitions[i];
    for (std::size_t j = 0; j < p.size();) {
      std::size_t k = j;
      while (k < p.size() && p[k] == p[j]) ++k;
      if (j) os << ',';
      os << p[j];
      if (k - j > 1) os << '^' << (k - j);
      j = k;
    }
  }
  os << " ; nu=" << nu;
  return os.str();
}

Signature signature(const PatternMatrix& m) {
  require_valid(m);
  Signature s;
  for (int c = 0; c < m.n(); ++c) {
    Partition p = column_multiplicities(m, c);
    std::sort(p.begin(), p.end(), std::greater<>());
    s.nu += static_cast<int>(p.size());
    s.partitions.push_back(std::move(p));
  }
  std::sort(s.partitions.begin(), s.partitions.end(), std::greater<>());
  return s;
}

Signature parse_signature(const std::string& text) {
  Signature s;
  std::string body = text;
  if (auto semi = body.find(';'); semi != std::string::npos) body = body.substr(0, semi);
  std::stringstream columns(body);
  std::string column;
  while (std::getline(columns, column, '|')) {
    Partition p;
    std::stringstream parts(trim(column));
    std::string part;
    while (std::getline(parts, part, ',')) {
      part = trim(part);
      if (part.empty()) throw PatternError("empty part in signature '" + text + "'");
      int value = 0, repeat = 1;
      try {
        if (auto caret = part.find('^'); caret != std::string::npos) {
          value = std::stoi(part.substr(0, caret));
          repeat = std::stoi(part.substr(caret + 1));
        } else {
          value = std::stoi(part);
        }
      } catch (const std::exception&) {
        throw PatternError("bad part '" + part + "' in signature '" + text + "'");
      }
      if (value < 1 || repeat < 1) throw PatternError("bad part '" + part + "' in signature '" + text + "'");
      p.insert(p.end(), repeat, value);
    }
    std::sort(p.begin(), p.end(), std::greater<>());
    s.nu += static_cast<int>(p.size());
    s.partitions.push_back(std::move(p));
  }
  if (s.partitions.empty()) throw PatternError("empty signature");
  std::sort(s.partitions.begin(), s.partitions.end(), std::greater<>());
  return s;
}

std::optional<int> is_reducible(const PatternMatrix& m) {
  for (int c = 0; c < m.n(); ++c)
    if (m.class_count(c) == 1) return c;
  return std::nullopt;
}

PatternMatrix standard_matrix(int n) {
  if (n < 1 || n > kMaxQubits)
    throw PatternError("standard matrix: n=" + std::to_string(n) + " outside 1.." + std::to_string(kMaxQubits));
  std::vector<std::vector<Entry>> rows(1u << n, std::vector<Entry>(n));
  std::vector<std::vector<std::string>> names(n);
  for (int j = 0; j < n; ++j) names[j] = {"s" + std::to_string(j + 1)};
  for (int i = 0; i < (1 << n); ++i)
    for (int j = 0; j < n; ++j) rows[i][j] = Entry{0, ((i >> j) & 1) != 0};
  return PatternMatrix(n, rows, names);
}

std::vector<int> orthogonality_witnesses(const PatternMatrix& m, int i, int j) {
  if (i == j) throw PatternError("orthogonality witnesses need two distinct rows");
  if (i < 0 || j < 0 || i >= m.row_count() || j >= m.row_count()) throw PatternError("row out of range");
  std::vector<int> cols;
  unsigned mask = witness_mask(m, i, j);
  for (int c = 0; c < m.n(); ++c)
    if (mask & (1u << c)) cols.push_back(c);
  return cols;
}

}  // namespace opb
