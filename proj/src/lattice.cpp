#include "opb/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace opb {

namespace {

struct DisjointSets {
  explicit DisjointSets(int size) : parent(size) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  std::vector<int> parent;
};

}  // namespace

std::vector<std::pair<PatternMatrix, Identification>> identifications(const PatternMatrix& m) {
  require_valid(m);
  std::vector<std::pair<PatternMatrix, Identification>> out;
  const auto base = m.rows();
  for (int c = 0; c < m.n(); ++c) {
    for (int kept = 0; kept < m.class_count(c); ++kept) {
      for (int merged = kept + 1; merged < m.class_count(c); ++merged) {
        for (bool opposite : {false, true}) {
          auto grid = base;
          for (auto& row : grid) {
            if (row[c].cls != merged) continue;
            row[c] = Entry{static_cast<std::uint8_t>(kept), row[c].perp != opposite};
          }
          out.emplace_back(PatternMatrix(m.n(), grid), Identification{c, kept, merged, opposite});
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> witness_components(const PatternMatrix& m, int column, int cls) {
  if (column < 0 || column >= m.n() || cls < 0 || cls >= m.class_count(column))
    throw PatternError("no class " + std::to_string(cls) + " in column " + std::to_string(column));
  std::vector<int> nodes;
  for (int r = 0; r < m.row_count(); ++r)
    if (m.at(r, column).cls == cls) nodes.push_back(r);
  DisjointSets sets(static_cast<int>(nodes.size()));
  const unsigned sole = 1u << column;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (witness_mask(m, nodes[i], nodes[j]) == sole) sets.unite(static_cast<int>(i), static_cast<int>(j));

  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(nodes.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int root = sets.find(static_cast<int>(i));
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[root]].push_back(nodes[i]);
  }
  return comps;
}

std::vector<std::pair<PatternMatrix, Split>> splits(const PatternMatrix& m) {
  require_valid(m);
  std::vector<std::pair<PatternMatrix, Split>> out;
  const auto base = m.rows();
  for (int c = 0; c < m.n(); ++c) {
    const auto fresh = static_cast<std::uint8_t>(m.class_count(c));
    for (int k = 0; k < m.class_count(c); ++k) {
      const auto comps = witness_components(m, c, k);
      const int count = static_cast<int>(comps.size());
      if (count < 2) continue;
      if (count > 30) throw PatternError("witness graph with too many components to split");
      // component 0 always stays, so each bipartition is produced once
      for (unsigned mask = 1; mask < (1u << (count - 1)); ++mask) {
        auto grid = base;
        Split desc{c, k, {}};
        for (int comp = 1; comp < count; ++comp) {
          if (!(mask & (1u << (comp - 1)))) continue;
          for (int r : comps[comp]) {
            grid[r][c].cls = fresh;
            desc.moved_rows.push_back(r);
          }
        }
        std::sort(desc.moved_rows.begin(), desc.moved_rows.end());
        out.emplace_back(PatternMatrix(m.n(), grid), std::move(desc));
      }
    }
  }
  return out;
}

bool is_maximal(const PatternMatrix& m) {
  require_valid(m);
  for (int c = 0; c < m.n(); ++c)
    for (int k = 0; k < m.class_count(c); ++k)
      if (witness_components(m, c, k).size() > 1) return false;
  return true;
}

std::size_t ClassStore::maximal_count() const {
  std::size_t count = 0;
  for (const auto& [key, info] : classes)
    if (info.maximal) ++count;
  return count;
}

void check_store(const ClassStore& store) {
  for (const auto& [key, info] : store.classes) {
    if (key.n() != store.n) throw PatternError("store entry with wrong n: " + key.hex());
    if (canonical_key(info.representative) != key)
      throw PatternError("representative does not reproduce its key " + key.hex());
    if (signature(info.representative) != info.signature) throw PatternError("stale signature for " + key.hex());
    if (is_maximal(info.representative) != info.maximal) throw PatternError("stale maximal flag for " + key.hex());
    if (is_reducible(info.representative).has_value() != info.reducible)
      throw PatternError("stale reducible flag for " + key.hex());
  }
}

// ---------------------------------------------------------------------------

HasseDiagram hasse(const ClassStore& store) {
  if (!store.complete || store.maximal_only)
    throw PatternError("the Hasse diagram needs a complete store of all classes");
  HasseDiagram h;
  std::map<CanonicalKey, int> index;
  for (const auto& [key, info] : store.classes) {
    index.emplace(key, static_cast<int>(h.nodes.size()));
    h.nodes.push_back(key);
  }
  const int size = static_cast<int>(h.nodes.size());

  std::vector<std::set<int>> up(size);
  std::vector<int> nu(size);
  int i = 0;
  for (const auto& [key, info] : store.classes) {
    nu[i] = info.signature.nu;
    for (const auto& [child, desc] : identifications(info.representative)) {
      auto it = index.find(canonical_key(child));
      if (it == index.end()) throw PatternError("class below " + key.hex() + " is missing from the store");
      up[it->second].insert(i);
    }
    ++i;
  }
  for (int lo = 0; lo < size; ++lo)
    for (int hi : up[lo]) h.raw_edges.emplace_back(lo, hi);

  // Reachability over a topological order (nu strictly increases upward),
  // then drop every edge implied by a longer path.
  std::vector<int> topo(size);
  std::iota(topo.begin(), topo.end(), 0);
  std::stable_sort(topo.begin(), topo.end(), [&](int a, int b) { return nu[a] > nu[b]; });
  const std::size_t words = (static_cast<std::size_t>(size) + 63) / 64;
  std::vector<std::vector<std::uint64_t>> reach(size, std::vector<std::uint64_t>(words, 0));
  for (int v : topo) {
    reach[v][v / 64] |= std::uint64_t{1} << (v % 64);
    for (int w : up[v]) {
      if (nu[w] <= nu[v]) throw PatternError("identification did not lower nu");
      for (std::size_t x = 0; x < words; ++x) reach[v][x] |= reach[w][x];
    }
  }
  for (int lo = 0; lo < size; ++lo) {
    for (int hi : up[lo]) {
      bool implied = false;
      for (int mid : up[lo]) {
        if (mid != hi && (reach[mid][hi / 64] >> (hi % 64) & 1)) {
          implied = true;
          break;
        }
      }
      if (!implied) h.edges.emplace_back(lo, hi);
    }
  }
  std::sort(h.edges.begin(), h.edges.end());

  std::vector<bool> has_lower(size, false);
  for (auto [lo, hi] : h.raw_edges) has_lower[hi] = true;
  for (int v = 0; v < size; ++v) {
    if (has_lower[v]) continue;
    if (h.minimum >= 0) throw PatternError("the class order has more than one minimum");
    h.minimum = v;
  }
  return h;
}

// ---------------------------------------------------------------------------

std::vector<SwitchSite> switching_sites(const PatternMatrix& m) {
  require_valid(m);
  const int n = m.n();
  std::vector<SwitchSite> sites;
  for (unsigned jmask = 1; jmask < (1u << n); ++jmask) {
    const int k = __builtin_popcount(jmask);
    if (k < 2) continue;
    std::vector<int> cols;
    for (int c = 0; c < n; ++c)
      if (jmask & (1u << c)) cols.push_back(c);

    std::map<std::vector<Entry>, std::vector<int>> groups;
    for (int r = 0; r < m.row_count(); ++r) {
      std::vector<Entry> outside;
      for (int c = 0; c < n; ++c)
        if (!(jmask & (1u << c))) outside.push_back(m.at(r, c));
      groups[outside].push_back(r);
    }
    for (const auto& [outside, rows] : groups) {
      if (static_cast<int>(rows.size()) != (1 << k)) continue;
      std::vector<std::vector<Entry>> block(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (int c : cols) block[i].push_back(m.at(rows[i], c));
      PatternMatrix b(k, block);
      if (!validate(b).ok()) continue;
      sites.push_back(SwitchSite{rows, cols, std::move(b)});
    }
  }
  return sites;
}

PatternMatrix apply_switch(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm) {
  require_valid(m);
  const int k = static_cast<int>(site.cols.size());
  if (k < 1 || static_cast<int>(site.rows.size()) != (1 << k)) throw PatternError("malformed switching site");
  if (static_cast<int>(perm.size()) != k) throw PatternError("permutation size does not match the site");
  {
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k; ++i)
      if (sorted[i] != i) throw PatternError("not a permutation of the site columns");
  }
  std::vector<bool> in_rows(m.row_count(), false), in_cols(m.n(), false);
  for (int r : site.rows) {
    if (r < 0 || r >= m.row_count()) throw PatternError("site row out of range");
    in_rows[r] = true;
  }
  for (int c : site.cols) {
    if (c < 0 || c >= m.n()) throw PatternError("site column out of range");
    in_cols[c] = true;
  }
  for (int c = 0; c < m.n(); ++c) {
    if (in_cols[c]) continue;
    for (int r : site.rows)
      if (m.at(r, c) != m.at(site.rows[0], c)) throw PatternError("site rows are not compatible outside the site columns");
  }
  bool shared = false;
  for (int c : site.cols) {
    std::vector<bool> inside(m.class_count(c), false);
    for (int r : site.rows) inside[m.at(r, c).cls] = true;
    for (int r = 0; r < m.row_count(); ++r)
      if (!in_rows[r] && inside[m.at(r, c).cls]) shared = true;
  }
  if (shared) {
    // Only a switch that can be renamed back onto the block's own classes
    // is meaningful here, and it leaves m as it was.
    std::vector<std::vector<Entry>> before(site.rows.size()), after(site.rows.size());
    for (std::size_t i = 0; i < site.rows.size(); ++i)
      for (int j = 0; j < k; ++j) {
        before[i].push_back(m.at(site.rows[i], site.cols[j]));
        after[i].push_back(m.at(site.rows[i], site.cols[perm[j]]));
      }
    if (column_fixed_key(PatternMatrix(k, before)) != column_fixed_key(PatternMatrix(k, after)))
      throw PatternError("a class of the switching block also occurs outside it");
    return m;
  }

  // Cells are tagged with (source column, class) so that moved classes stay
  // distinct from the classes already living in their target column.
  std::vector<std::vector<std::pair<int, Entry>>> tagged(m.row_count(), std::vector<std::pair<int, Entry>>(m.n()));
  for (int r = 0; r < m.row_count(); ++r)
    for (int c = 0; c < m.n(); ++c) tagged[r][c] = {c, m.at(r, c)};
  for (int r : site.rows)
    for (int i = 0; i < k; ++i) tagged[r][site.cols[i]] = {site.cols[perm[i]], m.at(r, site.cols[perm[i]])};

  std::vector<std::vector<Entry>> grid(m.row_count(), std::vector<Entry>(m.n()));
  for (int c = 0; c < m.n(); ++c) {
    std::map<std::pair<int, int>, std::uint8_t> ids;
    for (int r = 0; r < m.row_count(); ++r) {
      const auto [src, e] = tagged[r][c];
      auto it = ids.try_emplace({src, e.cls}, static_cast<std::uint8_t>(ids.size())).first;
      grid[r][c] = Entry{it->second, e.perp};
    }
  }
  return PatternMatrix(m.n(), grid);
}

std::map<CanonicalKey, PatternMatrix> switching_orbit(const PatternMatrix& m) {
  if (!is_maximal(m)) throw PatternError("switching orbits are defined for maximal matrices only");
  std::map<CanonicalKey, PatternMatrix> orbit;
  std::queue<PatternMatrix> frontier;
  auto [key, rep] = canonical_form(m);
  orbit.emplace(key, rep);
  frontier.push(rep);
  while (!frontier.empty()) {
    PatternMatrix cur = frontier.front();
    frontier.pop();
    for (const auto& site : switching_sites(cur)) {
      std::vector<int> perm(site.cols.size());
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) {
        auto [k2, r2] = canonical_form(apply_switch(cur, site, perm));
        if (orbit.emplace(k2, r2).second) frontier.push(r2);
      }
    }
  }
  return orbit;
}

// ---------------------------------------------------------------------------

bool family_membership(const PatternMatrix& a, const PatternMatrix& m, bool strict) {
  if (a.n() != m.n()) throw PatternError("family membership needs matrices with the same n");
  require_valid(a);
  require_valid(m);
  const CanonicalKey target = column_fixed_key(a);
  const CanonicalKey self = column_fixed_key(m);
  if (target == self) return true;
  if (strict) return false;

  auto dominates = [&](const PatternMatrix& x) {
    for (int c = 0; c < x.n(); ++c)
      if (x.class_count(c) < a.class_count(c)) return false;
    return true;
  };
  if (!dominates(m)) return false;

  std::set<CanonicalKey> seen{self};
  std::vector<PatternMatrix> level{m};
  while (!level.empty()) {
    std::vector<PatternMatrix> next;
    for (const auto& x : level) {
      for (auto& [child, desc] : identifications(x)) {
        if (!dominates(child)) continue;
        CanonicalKey key = column_fixed_key(child);
        if (key == target) return true;
        if (seen.insert(key).second) next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }
  return false;
}

}  // namespace opb
