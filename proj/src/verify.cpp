#include "opb/verify.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "opb/dataset.hpp"
#include "opb/numeric.hpp"

namespace opb {

PatternMatrix scramble(const PatternMatrix& m, std::mt19937_64& rng) {
  const int n = m.n();
  std::vector<int> col_order(n);
  std::iota(col_order.begin(), col_order.end(), 0);
  std::shuffle(col_order.begin(), col_order.end(), rng);
  std::vector<int> row_order(m.row_count());
  std::iota(row_order.begin(), row_order.end(), 0);
  std::shuffle(row_order.begin(), row_order.end(), rng);

  std::vector<std::vector<int>> relabel(n);
  std::vector<std::vector<bool>> flip(n);
  for (int c = 0; c < n; ++c) {
    relabel[c].resize(m.class_count(c));
    std::iota(relabel[c].begin(), relabel[c].end(), 0);
    std::shuffle(relabel[c].begin(), relabel[c].end(), rng);
    for (int k = 0; k < m.class_count(c); ++k) flip[c].push_back(rng() & 1);
  }

  std::vector<std::vector<Entry>> rows;
  for (int r : row_order) {
    std::vector<Entry> row;
    for (int c : col_order) {
      const Entry e = m.at(r, c);
      row.push_back(Entry{static_cast<std::uint8_t>(relabel[c][e.cls]), e.perp != flip[c][e.cls]});
    }
    rows.push_back(std::move(row));
  }
  return PatternMatrix(n, rows);
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << " [" << r.seconds << " s] "
     << r.detail;
  return os.str();
}

std::string hasse_edge_text(const HasseDiagram& h) {
  std::vector<std::string> lines;
  for (auto [lo, hi] : h.edges) lines.push_back(h.nodes[lo].hex() + " " + h.nodes[hi].hex());
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<int>& xs, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + std::to_string(xs[i]);
  return out;
}

class Failures {
 public:
  void add(const std::string& what) {
    if (count_++ < 5) text_ += (text_.empty() ? "" : "; ") + what;
  }
  bool any() const { return count_ > 0; }
  std::string text() const {
    return count_ > 5 ? text_ + "; ... (" + std::to_string(count_) + " problems)" : text_;
  }

 private:
  std::string text_;
  int count_ = 0;
};

int largest_multiplicity(const PatternMatrix& m) {
  int best = 0;
  for (int c = 0; c < m.n(); ++c) {
    const auto mu = column_multiplicities(m, c);
    best = std::max(best, *std::max_element(mu.begin(), mu.end()));
  }
  return best;
}

// Smallest row sum of multiplicities.
int smallest_row_mu_sum(const PatternMatrix& m) {
  std::vector<std::vector<int>> mu;
  for (int c = 0; c < m.n(); ++c) mu.push_back(column_multiplicities(m, c));
  int worst = 1 << 30;
  for (int r = 0; r < m.row_count(); ++r) {
    int total = 0;
    for (int c = 0; c < m.n(); ++c) total += mu[c][m.at(r, c).cls];
    worst = std::min(worst, total);
  }
  return worst;
}

std::vector<std::vector<int>> permutations(int k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

const std::vector<int> kGroupSizes{6, 2, 4, 1, 4, 3, 2, 2, 2, 2, 1, 1, 1, 1, 1};
const std::vector<int> kGroupNu{15, 14, 14, 13, 13, 13, 12, 12, 12, 12, 12, 11, 11, 11, 10};

}  // namespace

struct Acceptance::State {
  Log log;
  std::map<int, ClassStore> full;
  std::optional<ClassStore> maximal4;

  void say(const std::string& s) {
    if (log) log(s);
  }

  const ClassStore& store(int n) {
    auto it = full.find(n);
    if (it != full.end()) return it->second;
    say("enumerating O(" + std::to_string(n) + ")");
    return full.emplace(n, enumerate_classes(n)).first->second;
  }

  std::vector<NamedMatrix> files(const std::string& name) { return collection(name); }
};

Acceptance::Acceptance(Log log) : state_(std::make_unique<State>()) { state_->log = std::move(log); }
Acceptance::~Acceptance() = default;

std::string Acceptance::title(int id) {
  switch (id) {
    case 1: return "class counts for n=2 and n=3";
    case 2: return "four-qubit maximal classes and switching groups from the data files";
    case 3: return "independent enumeration of maximal classes for n=4";
    case 4: return "multiplicity bounds";
    case 5: return "Hasse diagram for n=3";
    case 6: return "canonical form against brute force";
    case 7: return "numeric instantiation, Gram, roundtrip, reducibility, frames";
    case 8: return "switching as controlled unitaries";
    case 9: return "tensor and prepend constructions";
    default: return "unknown";
  }
}

std::vector<CriterionResult> Acceptance::run_all(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run(id));
  return out;
}

CriterionResult Acceptance::run(int id) {
  State& st = *state_;
  CriterionResult res;
  res.id = id;
  res.title = title(id);
  const auto started = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };
  Failures fail;
  std::ostringstream detail;

  try {
    switch (id) {
      case 1: {
        const ClassStore& s2 = st.store(2);
        const ClassStore& s3 = st.store(3);
        if (!s2.complete || s2.size() != 2 || s2.maximal_count() != 1)
          fail.add("n=2: " + std::to_string(s2.size()) + " classes, " + std::to_string(s2.maximal_count()) + " maximal");
        std::map<int, int> nu;
        for (const auto& [k, info] : s3.classes) ++nu[info.signature.nu];
        const std::map<int, int> want{{7, 2}, {6, 5}, {5, 6}, {4, 3}, {3, 1}};
        if (!s3.complete || s3.size() != 17) fail.add("n=3: " + std::to_string(s3.size()) + " classes");
        if (nu != want) fail.add("n=3: nu multiset differs");
        if (s3.maximal_count() != 3) fail.add("n=3: " + std::to_string(s3.maximal_count()) + " maximal");
        std::set<std::set<CanonicalKey>> orbits;
        for (const auto& [k, info] : s3.classes) {
          if (!info.maximal) continue;
          std::set<CanonicalKey> orbit;
          for (const auto& [ok, rep] : switching_orbit(info.representative)) orbit.insert(ok);
          orbits.insert(orbit);
        }
        if (orbits.size() != 2) fail.add("n=3: " + std::to_string(orbits.size()) + " switching orbits");
        if (seconds() >= 10.0) fail.add("took longer than 10 s");
        detail << "n=2: " << s2.size() << " classes, " << s2.maximal_count() << " maximal; n=3: " << s3.size()
               << " classes, " << s3.maximal_count() << " maximal in " << orbits.size() << " orbits";
        break;
      }

      case 2: {
        const auto classes = st.files("n4-classes");
        const auto reps = st.files("n4-switching");
        if (classes.size() != 33) fail.add(std::to_string(classes.size()) + " class files");
        if (reps.size() != 15) fail.add(std::to_string(reps.size()) + " switching files");

        std::map<CanonicalKey, std::string> keys;
        std::vector<CanonicalKey> class_key;
        for (const auto& f : classes) {
          const PatternMatrix& m = *f.matrix;
          if (!validate(m).ok()) {
            fail.add(f.file + " is invalid");
            class_key.emplace_back();
            continue;
          }
          if (!is_maximal(m)) fail.add(f.file + " is not maximal");
          const Signature sig = signature(m);
          if (f.source.expected_signature && *f.source.expected_signature != sig) fail.add(f.file + ": signature header");
          if (f.source.expected_nu && *f.source.expected_nu != sig.nu) fail.add(f.file + ": nu header");
          const CanonicalKey k = canonical_key(m);
          if (auto [it, fresh] = keys.emplace(k, f.file); !fresh) fail.add(f.file + " is equivalent to " + it->second);
          class_key.push_back(k);
        }

        std::vector<std::set<CanonicalKey>> orbit(reps.size());
        std::vector<int> orbit_sizes;
        for (std::size_t g = 0; g < reps.size(); ++g) {
          const PatternMatrix& m = *reps[g].matrix;
          require_valid(m);
          const Signature sig = signature(m);
          if (g < kGroupNu.size() && sig.nu != kGroupNu[g]) fail.add(reps[g].file + ": nu " + std::to_string(sig.nu));
          if (reps[g].source.expected_nu && *reps[g].source.expected_nu != sig.nu) fail.add(reps[g].file + ": nu header");
          for (const auto& [k, rep] : switching_orbit(m)) orbit[g].insert(k);
          orbit_sizes.push_back(static_cast<int>(orbit[g].size()));
          for (std::size_t h = 0; h < g; ++h)
            for (const auto& k : orbit[g])
              if (orbit[h].count(k)) fail.add("orbits of " + reps[h].file + " and " + reps[g].file + " meet");
        }

        std::vector<int> sizes(reps.size(), 0);
        std::vector<bool> has_rep(reps.size(), false);
        for (std::size_t i = 0; i < classes.size(); ++i) {
          std::vector<int> hits;
          for (std::size_t g = 0; g < reps.size(); ++g)
            if (orbit[g].count(class_key[i])) hits.push_back(static_cast<int>(g));
          if (hits.size() != 1) {
            fail.add(classes[i].file + " lies in " + std::to_string(hits.size()) + " switching groups");
            continue;
          }
          const int g = hits.front();
          ++sizes[g];
          if (classes[i].source.group && *classes[i].source.group != g + 1)
            fail.add(classes[i].file + " belongs to group " + std::to_string(g + 1));
          if (g < static_cast<int>(kGroupNu.size()) && signature(*classes[i].matrix).nu != kGroupNu[g])
            fail.add(classes[i].file + ": nu differs from its group");
          if (class_key[i] == canonical_key(*reps[g].matrix)) has_rep[g] = true;
        }
        for (std::size_t g = 0; g < reps.size(); ++g)
          if (!has_rep[g]) fail.add("group " + std::to_string(g + 1) + " lacks " + reps[g].file);
        if (sizes != kGroupSizes) fail.add("group sizes " + join(sizes));
        if (seconds() >= 120.0) fail.add("took longer than 2 min");
        detail << "33 files in groups of sizes " << join(sizes) << "; whole switching orbits have sizes "
               << join(orbit_sizes);
        break;
      }

      case 3: {
        if (!st.maximal4) {
          st.say("enumerating maximal classes of O(4)");
          EnumerateOptions opt;
          opt.maximal_only = true;
          opt.max_seconds = 4 * 3600.0;
          st.maximal4 = enumerate_classes(4, opt);
        }
        const ClassStore& s = *st.maximal4;
        if (!s.complete) {
          fail.add("enumeration stopped by its budget; no count reported");
          detail << "incomplete after " << s.seconds << " s";
          break;
        }
        std::set<CanonicalKey> listed;
        for (const auto& f : st.files("n4-classes")) listed.insert(canonical_key(*f.matrix));
        std::vector<std::string> extra;
        int matched = 0;
        for (const auto& [k, info] : s.classes) {
          if (listed.count(k)) ++matched;
          else extra.push_back(info.signature.to_string());
        }
        if (s.size() != 33) fail.add("found " + std::to_string(s.size()) + " maximal classes, expected 33");
        if (!extra.empty()) {
          std::string list;
          for (const auto& e : extra) list += (list.empty() ? "" : "; ") + e;
          fail.add(std::to_string(extra.size()) + " match no data file: " + list);
        }
        detail << s.size() << " maximal classes out of " << s.classes_seen << ", " << matched
               << " equivalent to data files, " << s.seconds << " s";
        break;
      }

      case 4: {
        long long checked = 0;
        int min_mu1 = 1 << 30;
        auto check_n4 = [&](const PatternMatrix& m, const std::string& what) {
          const int mu1 = largest_multiplicity(m);
          min_mu1 = std::min(min_mu1, mu1);
          if (mu1 < 6) fail.add(what + ": largest multiplicity " + std::to_string(mu1));
        };
        auto check_rows = [&](const PatternMatrix& m, const std::string& what) {
          ++checked;
          const int need = m.row_count() - 1;
          if (smallest_row_mu_sum(m) < need) fail.add(what + ": a row has multiplicity sum below " + std::to_string(need));
        };
        for (int n : {2, 3, 4})
          for (const auto& [k, info] : st.store(n).classes) {
            check_rows(info.representative, "class " + k.hex());
            if (n == 4) check_n4(info.representative, "class " + k.hex());
          }
        if (st.maximal4)
          for (const auto& [k, info] : st.maximal4->classes) check_n4(info.representative, "maximal class " + k.hex());
        for (const auto& name : collection_names())
          for (const auto& f : st.files(name)) {
            if (!f.matrix || f.matrix->n() < 2 || !validate(*f.matrix).ok()) continue;
            check_rows(*f.matrix, f.file);
            if (f.matrix->n() == 4) check_n4(*f.matrix, f.file);
          }
        int irreducible = 0;
        for (const auto& [k, info] : st.store(3).classes) {
          if (info.reducible) continue;
          ++irreducible;
          for (int c = 0; c < 3; ++c)
            for (int mu : column_multiplicities(info.representative, c))
              if (mu != 1 && mu != 3) fail.add("irreducible class " + k.hex() + " has multiplicity " + std::to_string(mu));
        }
        detail << checked << " matrices meet the row bound; smallest largest multiplicity at n=4 is " << min_mu1 << "; "
               << irreducible << " irreducible n=3 classes use multiplicities 1 and 3 only";
        break;
      }

      case 5: {
        const ClassStore& s3 = st.store(3);
        const HasseDiagram h = hasse(s3);
        if (h.nodes.size() != 17) fail.add(std::to_string(h.nodes.size()) + " nodes");
        std::set<int> minimal;
        for (std::size_t v = 0; v < h.nodes.size(); ++v) minimal.insert(static_cast<int>(v));
        for (auto [lo, hi] : h.edges) minimal.erase(hi);
        if (minimal.size() != 1) fail.add(std::to_string(minimal.size()) + " minimal nodes");
        const CanonicalKey standard = canonical_key(standard_matrix(3));
        if (h.minimum < 0 || h.nodes[h.minimum] != standard) fail.add("minimum is not the standard class");
        std::map<int, int> levels;
        for (const auto& k : h.nodes) ++levels[s3.classes.at(k).signature.nu];
        const std::map<int, int> want{{7, 2}, {6, 5}, {5, 6}, {4, 3}, {3, 1}};
        if (levels != want) fail.add("level sizes differ");
        const std::string golden = data_text("golden", "hasse-n3.txt");
        if (hasse_edge_text(h) != golden) fail.add("edge set differs from the golden file");
        detail << h.nodes.size() << " nodes, " << h.edges.size() << " covering edges, levels";
        for (auto it = levels.rbegin(); it != levels.rend(); ++it) detail << ' ' << it->first << ':' << it->second;
        break;
      }

      case 6: {
        std::mt19937_64 rng(20240601);
        int pairs = 0;
        const ClassStore& s2 = st.store(2);
        for (const auto& [ka, a] : s2.classes)
          for (const auto& [kb, b] : s2.classes) {
            const auto x = scramble(a.representative, rng);
            const auto y = scramble(b.representative, rng);
            ++pairs;
            if (are_equivalent(x, y) != brute_force_equivalent(x, y)) fail.add("n=2 pair disagrees");
          }
        const ClassStore& s3 = st.store(3);
        std::vector<const PatternMatrix*> reps3;
        for (const auto& [k, info] : s3.classes) reps3.push_back(&info.representative);
        int equal_pairs = 0;
        for (int t = 0; t < 600; ++t) {
          const std::size_t i = rng() % reps3.size();
          const std::size_t j = (rng() & 1) ? i : rng() % reps3.size();
          const auto x = scramble(*reps3[i], rng);
          const auto y = scramble(*reps3[j], rng);
          const bool fast = are_equivalent(x, y);
          if (fast != brute_force_equivalent(x, y)) fail.add("n=3 pair " + std::to_string(t) + " disagrees");
          if (fast != (i == j)) fail.add("n=3 pair " + std::to_string(t) + " misclassified");
          equal_pairs += fast;
          ++pairs;
        }
        long long chains = 0;
        auto invariant = [&](const CanonicalKey& k, const PatternMatrix& m) {
          for (int t = 0; t < 100; ++t) {
            PatternMatrix x = m;
            const int steps = 1 + static_cast<int>(rng() % 3);
            for (int s = 0; s < steps; ++s) x = scramble(x, rng);
            ++chains;
            if (canonical_key(x) != k) fail.add("key of " + k.hex() + " changed");
          }
        };
        for (int n : {2, 3})
          for (const auto& [k, info] : st.store(n).classes) invariant(k, info.representative);
        for (const auto& f : st.files("n4-classes")) invariant(canonical_key(*f.matrix), *f.matrix);
        detail << pairs << " pairs agree with brute force (" << equal_pairs << " equivalent n=3 pairs), " << chains
               << " scrambled copies keep their key";
        break;
      }

      case 7: {
        long long runs = 0;
        double worst_gram = 0.0, worst_projector = 0.0;
        for (int n : {2, 3, 4}) {
          const ClassStore& s = st.store(n);
          st.say("numeric checks on O(" + std::to_string(n) + ")");
          for (const auto& [k, info] : s.classes) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
              ++runs;
              const Instantiation inst = instantiate(info.representative, seed);
              const double g = gram_defect(inst.basis);
              worst_gram = std::max(worst_gram, g);
              if (g > 1e-9) fail.add(k.hex() + " seed " + std::to_string(seed) + ": Gram defect " + std::to_string(g));
              if (canonical_key(associate_matrix(inst.basis)) != k)
                fail.add(k.hex() + " seed " + std::to_string(seed) + ": associated matrix is another class");
              if (is_reducible_numeric(inst.basis).has_value() != info.reducible)
                fail.add(k.hex() + " seed " + std::to_string(seed) + ": reducibility disagrees");
              for (int slot = 0; slot < n; ++slot) {
                const FrameReport fr = verify_frame_structure(inst.basis, slot);
                for (const auto& f : fr.frames) worst_projector = std::max(worst_projector, f.projector_distance);
                if (!fr.ok()) fail.add(k.hex() + " slot " + std::to_string(slot + 1) + ": " + fr.failures.front());
              }
            }
          }
        }
        detail << runs << " instantiations; worst Gram defect " << worst_gram << ", worst projector distance "
               << worst_projector;
        break;
      }

      case 8: {
        int sites = 0, cases = 0;
        double worst_unitary = 0.0, worst_overlap = 1.0;
        for (const auto& f : st.files("n4-switching")) {
          const PatternMatrix& m = *f.matrix;
          const Instantiation inst = instantiate(m, 0);
          for (const auto& site : switching_sites(m)) {
            ++sites;
            for (const auto& perm : permutations(static_cast<int>(site.cols.size()))) {
              ++cases;
              const SwitchCheck c = check_switch_unitary(m, site, perm, inst.assignment);
              worst_unitary = std::max(worst_unitary, c.unitarity_defect);
              worst_overlap = std::min(worst_overlap, c.min_overlap);
              if (!c.ok()) fail.add(f.file + ": site on columns " + join(site.cols) + " perm " + join(perm));
            }
          }
        }
        detail << sites << " sites, " << cases << " permutations; worst unitarity defect " << worst_unitary
               << ", worst overlap 1-" << (1.0 - worst_overlap);
        break;
      }

      case 9: {
        const auto reps = st.files("n4-switching");
        const Instantiation a = instantiate(*reps.front().matrix, 0);
        const Instantiation b = instantiate(*reps.back().matrix, 0);
        const NumericOPB five = prepend_qubit(a.basis, b.basis);
        const double g5 = gram_defect(five);
        if (five.size() != 32 || five.parties() != 5) fail.add("prepend does not give 32 vectors on 5 qubits");
        if (g5 > 1e-9) fail.add("prepend Gram defect " + std::to_string(g5));
        auto red5 = is_reducible_numeric(five);
        if (!red5 || red5->slot != 0) fail.add("prepend result is not reducible through the new qubit");

        const auto n3 = st.files("n3-maximal");
        auto find3 = [&](const std::string& file) -> const PatternMatrix& {
          for (const auto& f : n3)
            if (f.file == file) return *f.matrix;
          throw std::out_of_range(file);
        };
        const PatternMatrix& irr = find3("irreducible.opb");
        const PatternMatrix& red = find3("reducible-a.opb");
        const NumericOPB i0 = instantiate(irr, 0).basis;
        const NumericOPB i1 = instantiate(irr, 1).basis;
        const NumericOPB r0 = instantiate(red, 0).basis;
        if (is_reducible_numeric(i0) || is_reducible_numeric(i1)) fail.add("irreducible instantiation is reducible");
        const NumericOPB ii = tensor_opb(i0, i1);
        const NumericOPB ri = tensor_opb(r0, i1);
        if (gram_defect(ii) > 1e-9 || gram_defect(ri) > 1e-9) fail.add("tensor product is not orthonormal");
        if (is_reducible_numeric(ii)) fail.add("irreducible tensor irreducible is reducible");
        if (!is_reducible_numeric(ri)) fail.add("reducible tensor irreducible is irreducible");
        detail << "5-qubit basis of " << five.size() << " vectors, Gram defect " << g5 << "; tensor products of "
               << ii.size() << " vectors";
        break;
      }

      default:
        fail.add("no such criterion");
    }
  } catch (const std::exception& e) {
    fail.add(std::string("error: ") + e.what());
  }

  res.seconds = seconds();
  res.passed = !fail.any();
  res.detail = detail.str();
  if (fail.any()) res.detail += (res.detail.empty() ? "" : " | ") + fail.text();
  return res;
}

}  // namespace opb
