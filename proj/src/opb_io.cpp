#include "opb/opb_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace opb {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char ch) { return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9'); });
}

bool is_token(const std::string& t) {
  if (t == "0" || t == "1" || t == "*") return true;
  const std::string base = (!t.empty() && t.back() == '\'') ? t.substr(0, t.size() - 1) : t;
  return is_identifier(base);
}

int parse_int(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("line " + std::to_string(line) + ": '" + key + "' needs an integer, got '" + value + "'");
}

// Hands out identifiers that do not occur in the file.
class FreshNames {
 public:
  explicit FreshNames(const OpbFile& file) {
    for (const auto& row : file.rows)
      for (const auto& t : row) used_.insert(t.back() == '\'' ? t.substr(0, t.size() - 1) : t);
  }
  std::string next() {
    for (;;) {
      std::string candidate = "v" + std::to_string(++counter_);
      if (used_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

void expand_row(std::vector<std::string> row, FreshNames& fresh, std::vector<std::vector<std::string>>& out) {
  auto star = std::find(row.begin(), row.end(), "*");
  if (star == row.end()) {
    out.push_back(std::move(row));
    return;
  }
  const std::string name = fresh.next();
  *star = name;
  auto twin = row;
  twin[star - row.begin()] = name + "'";
  expand_row(std::move(row), fresh, out);
  expand_row(std::move(twin), fresh, out);
}

}  // namespace

OpbFile read_opb(const std::string& text) {
  OpbFile file;
  bool have_n = false;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (auto colon = line.find(':'); colon != std::string::npos) {
      if (!file.rows.empty()) throw ParseError("line " + std::to_string(line_no) + ": header after the matrix rows");
      const std::string key = trim(line.substr(0, colon));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "n") {
        file.n = parse_int(value, key, line_no);
        if (file.n < 1 || file.n > kMaxQubits)
          throw ParseError("line " + std::to_string(line_no) + ": n must be in 1.." + std::to_string(kMaxQubits));
        have_n = true;
      } else if (key == "name") {
        file.name = value;
      } else if (key == "signature") {
        try {
          file.expected_signature = parse_signature(value);
        } catch (const PatternError& e) {
          throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
      } else if (key == "nu") {
        file.expected_nu = parse_int(value, key, line_no);
      } else if (key == "group") {
        file.group = parse_int(value, key, line_no);
      } else if (key == "fragment") {
        if (value != "yes" && value != "no")
          throw ParseError("line " + std::to_string(line_no) + ": fragment must be yes or no");
        file.fragment = value == "yes";
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown header key '" + key + "'");
      }
      continue;
    }

    if (!have_n) throw ParseError("line " + std::to_string(line_no) + ": matrix row before the 'n:' header");
    std::istringstream tokens(line);
    std::vector<std::string> row;
    for (std::string t; tokens >> t;) {
      if (!is_token(t)) throw ParseError("line " + std::to_string(line_no) + ": bad token '" + t + "'");
      row.push_back(t);
    }
    if (static_cast<int>(row.size()) != file.n)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(file.n) + " tokens, found " +
                       std::to_string(row.size()));
    file.rows.push_back(std::move(row));
  }
  if (!have_n) throw ParseError("missing 'n:' header");
  if (file.rows.empty()) throw ParseError("no matrix rows");

  std::map<std::string, int> column_of;
  for (const auto& row : file.rows) {
    for (int c = 0; c < file.n; ++c) {
      const std::string& t = row[c];
      if (t == "0" || t == "1" || t == "*") continue;
      const std::string base = t.back() == '\'' ? t.substr(0, t.size() - 1) : t;
      auto [it, inserted] = column_of.emplace(base, c);
      if (!inserted && it->second != c)
        throw ParseError("variable '" + base + "' occurs in columns " + std::to_string(it->second + 1) + " and " +
                         std::to_string(c + 1));
    }
  }
  return file;
}

std::vector<std::vector<std::string>> expand_rows(const OpbFile& file) {
  FreshNames fresh(file);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : file.rows) expand_row(row, fresh, rows);

  for (int c = 0; c < file.n; ++c) {
    const bool normalized =
        std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r[c] == "0" || r[c] == "1"; });
    if (!normalized) continue;
    const std::string name = fresh.next();
    for (auto& r : rows) {
      if (r[c] == "0") r[c] = name;
      else if (r[c] == "1") r[c] = name + "'";
    }
  }
  return rows;
}

PatternMatrix to_matrix(const OpbFile& file) {
  if (file.fragment) throw ParseError("'" + file.name + "' is a fragment, not a whole matrix");
  const auto rows = expand_rows(file);
  const int expected = 1 << file.n;
  if (static_cast<int>(rows.size()) != expected)
    throw ParseError("expansion gives " + std::to_string(rows.size()) + " rows, expected " + std::to_string(expected));

  std::vector<std::map<std::string, int>> ids(file.n);
  std::vector<std::vector<std::string>> names(file.n);
  std::vector<std::vector<Entry>> grid(rows.size(), std::vector<Entry>(file.n));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < file.n; ++c) {
      const std::string& t = rows[r][c];
      const bool perp = t.back() == '\'';
      const std::string base = perp ? t.substr(0, t.size() - 1) : t;
      auto [it, inserted] = ids[c].emplace(base, static_cast<int>(ids[c].size()));
      if (inserted) names[c].push_back(base);
      grid[r][c] = Entry{static_cast<std::uint8_t>(it->second), perp};
    }
  }
  return PatternMatrix(file.n, grid, names);
}

PatternMatrix parse(const std::string& text) {
  PatternMatrix m = to_matrix(read_opb(text));
  require_valid(m);
  return m;
}

// ---------------------------------------------------------------------------

namespace {

// Class names of m when they are usable identifiers, unique across columns;
// generated names otherwise.
std::vector<std::vector<std::string>> display_names(const PatternMatrix& m) {
  std::vector<std::vector<std::string>> names(m.n());
  std::set<std::string> seen;
  bool usable = true;
  for (int c = 0; c < m.n(); ++c)
    for (int k = 0; k < m.class_count(c); ++k) {
      names[c].push_back(m.name(c, k));
      if (!is_identifier(m.name(c, k)) || !seen.insert(m.name(c, k)).second) usable = false;
    }
  if (usable) return names;
  for (int c = 0; c < m.n(); ++c)
    for (int k = 0; k < m.class_count(c); ++k) names[c][k] = default_class_name(c, k);
  return names;
}

}  // namespace

std::string serialize(const PatternMatrix& m, Style style, const std::string& name) {
  const auto names = display_names(m);
  std::ostringstream os;
  os << "n: " << m.n() << '\n';
  if (!name.empty()) os << "name: " << name << '\n';
  if (validate(m).ok()) {
    const Signature sig = signature(m);
    std::string text = sig.to_string();
    os << "signature: " << text.substr(0, text.find(" ;")) << '\n';
    os << "nu: " << sig.nu << '\n';
  }

  const int rows = m.row_count();
  std::vector<std::vector<std::string>> tokens(rows, std::vector<std::string>(m.n()));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < m.n(); ++c) {
      const Entry e = m.at(r, c);
      tokens[r][c] = names[c][e.cls] + (e.perp ? "'" : "");
    }
  std::vector<bool> dropped(rows, false);

  if (style == Style::kCompact) {
    require_valid(m);
    std::vector<bool> starred(rows, false);
    for (int c = 0; c < m.n(); ++c) {
      const auto mu = column_multiplicities(m, c);
      for (int k = 0; k < m.class_count(c); ++k) {
        if (mu[k] != 1) continue;
        int plain = -1, perp = -1;
        for (int r = 0; r < rows; ++r)
          if (m.at(r, c).cls == k) (m.at(r, c).perp ? perp : plain) = r;
        if (starred[plain] || starred[perp] || dropped[plain] || dropped[perp]) continue;
        if (witness_mask(m, plain, perp) != (1u << c)) continue;
        bool compatible = true;
        for (int o = 0; o < m.n(); ++o)
          if (o != c && m.at(plain, o) != m.at(perp, o)) compatible = false;
        if (!compatible) continue;
        tokens[plain][c] = "*";
        starred[plain] = true;
        dropped[perp] = true;
      }
      // normalize the most frequent class when it occurs more than once
      int top = 0;
      for (int k = 1; k < m.class_count(c); ++k)
        if (mu[k] > mu[top]) top = k;
      if (mu[top] > 1)
        for (int r = 0; r < rows; ++r)
          if (m.at(r, c).cls == top) tokens[r][c] = m.at(r, c).perp ? "1" : "0";
    }
  }

  for (int r = 0; r < rows; ++r) {
    if (dropped[r]) continue;
    for (int c = 0; c < m.n(); ++c) os << (c ? " " : "") << tokens[r][c];
    os << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + tmp + "'");
    out << text;
    if (!out.flush()) throw ParseError("cannot write '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ParseError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace opb
