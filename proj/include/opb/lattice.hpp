#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opb/canonical.hpp"
#include "opb/pattern.hpp"

namespace opb {

// ---------------------------------------------------------------------------
// The identification order "<"

/// Class `merged` of `column` was set equal to `kept` (or to its
/// perpendicular when `opposite`).
struct Identification {
  int column = 0;
  int kept = 0;
  int merged = 0;
  bool opposite = false;
};

/// The rows listed in `moved_rows` had their (column, cls) entries replaced
/// by a fresh class of the same polarity.
struct Split {
  int column = 0;
  int cls = 0;
  std::vector<int> moved_rows;
};

std::vector<std::pair<PatternMatrix, Identification>> identifications(const PatternMatrix& m);

/// Every matrix N with m < N, one per bipartition of the components of
/// each witness-dependency graph.
std::vector<std::pair<PatternMatrix, Split>> splits(const PatternMatrix& m);

/// Connected components of the witness-dependency graph of one class:
/// nodes are rows holding the class (either polarity) in `column`, and two
/// rows are linked when `column` is their only orthogonality witness.
std::vector<std::vector<int>> witness_components(const PatternMatrix& m, int column, int cls);

bool is_maximal(const PatternMatrix& m);

// ---------------------------------------------------------------------------
// Enumeration of O(n)

struct ClassInfo {
  PatternMatrix representative;
  Signature signature;
  bool maximal = false;
  bool reducible = false;
};

struct EnumerateOptions {
  bool maximal_only = false;
  long long max_classes = 5'000'000;
  double max_seconds = 4 * 3600.0;
  int jobs = 1;
};

struct ClassStore {
  int n = 0;
  bool complete = false;      // closure finished inside the budget
  bool maximal_only = false;  // classes holds only the maximal ones
  long long classes_seen = 0;
  long long maximal_seen = 0;
  long long matrices_canonicalized = 0;
  double seconds = 0.0;
  EnumerateOptions options;
  std::map<CanonicalKey, ClassInfo> classes;

  std::size_t size() const { return classes.size(); }
  std::size_t maximal_count() const;
};

/// Breadth-first closure of the standard matrix under splits, deduplicated
/// by canonical key. The stored order (key order) and content do not depend
/// on the worker count.
ClassStore enumerate_classes(int n, const EnumerateOptions& options = {});

/// Recomputes every key and flag; throws PatternError on any mismatch.
void check_store(const ClassStore& store);

// ---------------------------------------------------------------------------
// Hasse diagram of the order induced by "<"

struct HasseDiagram {
  std::vector<CanonicalKey> nodes;           // store order
  std::vector<std::pair<int, int>> edges;    // (lower, upper), sorted
  std::vector<std::pair<int, int>> raw_edges;  // every "<" pair before reduction
  int minimum = -1;
};

HasseDiagram hasse(const ClassStore& store);

// ---------------------------------------------------------------------------
// Switching

struct SwitchSite {
  std::vector<int> rows;  // I, ascending, |I| = 2^|J|
  std::vector<int> cols;  // J, ascending, |J| >= 2
  PatternMatrix block;    // rows I, columns J
};

std::vector<SwitchSite> switching_sites(const PatternMatrix& m);

/// Block column i of the result is block column perm[i] of m. Throws when
/// the site does not belong to m, perm is not a permutation of J, or a
/// block class also occurs outside the block.
PatternMatrix apply_switch(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm);

/// Equivalence classes weakly equivalent to maximal m, with representatives.
std::map<CanonicalKey, PatternMatrix> switching_orbit(const PatternMatrix& m);

// ---------------------------------------------------------------------------

/// Whether the OPBs of F_a lie in F_m (column order fixed). `strict` asks
/// for a to be m itself up to row order and renaming.
bool family_membership(const PatternMatrix& a, const PatternMatrix& m, bool strict);

}  // namespace opb
