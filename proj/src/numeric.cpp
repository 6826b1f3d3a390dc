#include "opb/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace opb {

namespace {

using Complex = std::complex<double>;

Eigen::VectorXcd kron(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  Eigen::VectorXcd out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return out;
}

double overlap(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) { return std::abs(u.dot(v)); }

// Product of the local inner products; equals <a_s|a_t> without forming
// the full vectors.
Complex inner(const NumericOPB& b, int s, int t) {
  Complex z = 1.0;
  for (int p = 0; p < b.parties(); ++p) z *= b.vectors[s][p].dot(b.vectors[t][p]);
  return z;
}

int qubit_count(const NumericOPB& b) {
  for (int d : b.dims)
    if (d != 2) throw NumericError("expected a system of qubits");
  if (b.parties() > kMaxQubits) throw NumericError("too many parties for a pattern matrix");
  return b.parties();
}

// Orthogonal projector onto the span of the given vectors.
Eigen::MatrixXcd span_projector(const std::vector<Eigen::VectorXcd>& vs, Eigen::Index dim) {
  if (vs.empty()) return Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd a(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = vs[k];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-6 * sv(0)) ++rank;
  Eigen::MatrixXcd u = svd.matrixU().leftCols(rank);
  return u * u.adjoint();
}

}  // namespace

Eigen::VectorXcd NumericOPB::full_vector(int s) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
  for (const auto& v : vectors[s]) out = kron(out, v);
  return out;
}

void check_opb(const NumericOPB& b) {
  long long d = 1;
  for (int di : b.dims) {
    if (di < 1) throw NumericError("party dimension must be positive");
    d *= di;
  }
  if (b.size() != d)
    throw NumericError("basis has " + std::to_string(b.size()) + " vectors, dimension is " + std::to_string(d));
  for (int s = 0; s < b.size(); ++s) {
    if (static_cast<int>(b.vectors[s].size()) != b.parties())
      throw NumericError("vector " + std::to_string(s) + " has the wrong number of factors");
    for (int p = 0; p < b.parties(); ++p) {
      if (b.vectors[s][p].size() != b.dims[p])
        throw NumericError("vector " + std::to_string(s) + ", party " + std::to_string(p) + ": wrong local dimension");
      if (std::abs(b.vectors[s][p].norm() - 1.0) > b.tolerance)
        throw NumericError("vector " + std::to_string(s) + ", party " + std::to_string(p) + ": not unit length");
    }
  }
  const double defect = gram_defect(b);
  if (defect > b.tolerance) throw NumericError("Gram defect " + std::to_string(defect) + " exceeds tolerance");
}

NumericOPB computational_basis(const std::vector<int>& dims) {
  NumericOPB b;
  b.dims = dims;
  b.tolerance = 0.0;
  const int d = std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
  for (int s = 0; s < d; ++s) {
    std::vector<Eigen::VectorXcd> locals(dims.size());
    int rest = s;
    for (int p = static_cast<int>(dims.size()) - 1; p >= 0; --p) {
      locals[p] = Eigen::VectorXcd::Zero(dims[p]);
      locals[p](rest % dims[p]) = 1.0;
      rest /= dims[p];
    }
    b.vectors.push_back(std::move(locals));
  }
  return b;
}

NumericOPB trivial_basis(int n) { return computational_basis(std::vector<int>(n, 1)); }

// ---------------------------------------------------------------------------

Eigen::Vector2cd perpendicular(const Eigen::Vector2cd& v) { return {-std::conj(v(1)), std::conj(v(0))}; }

double BlochSampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Eigen::Vector2cd BlochSampler::next() {
  const double z = 2.0 * uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform();
  return {std::sqrt((1.0 + z) / 2.0), std::polar(std::sqrt((1.0 - z) / 2.0), phi)};
}

Eigen::Vector2cd Assignment::vector(int column, Entry e) const {
  const Eigen::Vector2cd& v = lines.at(column).at(e.cls);
  return e.perp ? perpendicular(v) : v;
}

namespace {

bool generic_column(const std::vector<Eigen::Vector2cd>& col) {
  for (std::size_t i = 0; i < col.size(); ++i)
    for (std::size_t j = i + 1; j < col.size(); ++j) {
      const double ov = std::abs(col[i].dot(col[j]));
      if (ov < kGenericOverlapMin || ov > kGenericOverlapMax) return false;
    }
  return true;
}

}  // namespace

bool is_generic(const Assignment& asg) { return std::all_of(asg.lines.begin(), asg.lines.end(), generic_column); }

NumericOPB realize(const PatternMatrix& m, const Assignment& asg) {
  NumericOPB b;
  b.dims.assign(m.n(), 2);
  b.tolerance = 1e-9;
  for (int r = 0; r < m.row_count(); ++r) {
    std::vector<Eigen::VectorXcd> locals;
    for (int c = 0; c < m.n(); ++c) locals.emplace_back(asg.vector(c, m.at(r, c)));
    b.vectors.push_back(std::move(locals));
  }
  return b;
}

Instantiation instantiate(const PatternMatrix& m, std::uint64_t seed) {
  require_valid(m);
  BlochSampler sampler(seed);
  Assignment asg;
  asg.seed = seed;
  constexpr int kMaxAttempts = 1000;
  for (int c = 0; c < m.n(); ++c) {
    std::vector<Eigen::Vector2cd> col;
    int attempts = 0;
    do {
      if (++attempts > kMaxAttempts)
        throw NumericError("no generic assignment for column " + std::to_string(c + 1) + " after " +
                           std::to_string(kMaxAttempts) + " draws");
      col.clear();
      for (int k = 0; k < m.class_count(c); ++k) col.push_back(sampler.next());
    } while (!generic_column(col));
    asg.lines.push_back(std::move(col));
  }
  NumericOPB b = realize(m, asg);
  const double defect = gram_defect(b);
  if (defect > b.tolerance) throw NumericError("instantiation has Gram defect " + std::to_string(defect));
  return {std::move(b), std::move(asg)};
}

double gram_defect(const NumericOPB& b) {
  double worst = 0.0;
  for (int s = 0; s < b.size(); ++s)
    for (int t = s; t < b.size(); ++t) {
      const Complex z = inner(b, s, t) - (s == t ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(z));
    }
  return worst;
}

// ---------------------------------------------------------------------------

PatternMatrix associate_matrix(const NumericOPB& b, double tol) {
  const int n = qubit_count(b);
  if (b.size() != (1 << n)) throw NumericError("basis size does not match the number of qubits");
  if (!(tol > 0.0) || 100.0 * tol >= 0.5) throw NumericError("tolerance bands overlap");

  std::vector<std::vector<Entry>> rows(b.size(), std::vector<Entry>(n));
  for (int c = 0; c < n; ++c) {
    std::vector<int> frame_row;  // first row seen on the plain line of each frame
    for (int s = 0; s < b.size(); ++s) {
      const Eigen::VectorXcd& v = b.vectors[s][c];
      std::optional<Entry> found;
      for (int k = 0; k < static_cast<int>(frame_row.size()) && !found; ++k) {
        const double ov = overlap(b.vectors[frame_row[k]][c], v);
        if (ov >= 1.0 - tol) {
          found = Entry{static_cast<std::uint8_t>(k), false};
        } else if (ov <= tol) {
          found = Entry{static_cast<std::uint8_t>(k), true};
        } else if (ov < 100.0 * tol || ov > 1.0 - 100.0 * tol) {
          throw AmbiguityError("slot " + std::to_string(c + 1) + ": rows " + std::to_string(frame_row[k]) + " and " +
                                   std::to_string(s) + " have overlap " + std::to_string(ov) +
                                   ", neither collinear, orthogonal nor generic",
                               c, frame_row[k], s);
        }
      }
      if (!found) {
        found = Entry{static_cast<std::uint8_t>(frame_row.size()), false};
        frame_row.push_back(s);
      }
      rows[s][c] = *found;
    }
  }
  PatternMatrix m(n, rows);
  auto report = validate(m);
  if (!report.ok()) throw NumericError("associated matrix is not in O(n): " + report.to_string());
  return m;
}

FrameReport verify_frame_structure(const NumericOPB& b, int slot, double tol) {
  if (slot < 0 || slot >= b.parties()) throw NumericError("slot out of range");
  if (b.dims[slot] != 2) throw NumericError("slot " + std::to_string(slot + 1) + " is not a qubit");
  FrameReport report;
  report.slot = slot;
  const int d = b.size();

  auto rest = [&](int s) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
    for (int p = 0; p < b.parties(); ++p)
      if (p != slot) out = kron(out, b.vectors[s][p]);
    return out;
  };

  // Group rows into frames.
  for (int s = 0; s < d; ++s) {
    const Eigen::VectorXcd& v = b.vectors[s][slot];
    bool placed = false;
    for (auto& f : report.frames) {
      const double ov = overlap(f.line, v);
      if (ov >= 1.0 - tol) {
        f.plain_rows.push_back(s);
        placed = true;
        break;
      }
      if (ov <= tol) {
        f.perp_rows.push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) report.frames.push_back(Frame{v, {s}, {}, 0.0});
  }

  report.frames_ok = true;
  for (std::size_t j = 0; j < report.frames.size(); ++j) {
    const auto& f = report.frames[j];
    if (f.plain_rows.size() != f.perp_rows.size()) {
      report.frames_ok = false;
      report.failures.push_back("frame " + std::to_string(j) + ": line count " + std::to_string(f.plain_rows.size()) +
                                " but perpendicular count " + std::to_string(f.perp_rows.size()));
    }
  }

  std::vector<Eigen::VectorXcd> reduced;
  for (const auto& f : report.frames)
    for (int s : f.plain_rows) reduced.push_back(rest(s));
  const Eigen::Index rest_dim = d / 2;
  double worst = 0.0;
  for (std::size_t i = 0; i < reduced.size(); ++i)
    for (std::size_t j = i; j < reduced.size(); ++j)
      worst = std::max(worst, std::abs(reduced[i].dot(reduced[j]) - (i == j ? 1.0 : 0.0)));
  report.reduced_basis_ok = static_cast<Eigen::Index>(reduced.size()) == rest_dim && worst <= tol;
  if (!report.reduced_basis_ok)
    report.failures.push_back("the " + std::to_string(reduced.size()) + " reduced vectors are not an orthonormal basis of dimension " +
                              std::to_string(rest_dim));

  report.subspaces_ok = true;
  for (std::size_t j = 0; j < report.frames.size(); ++j) {
    auto& f = report.frames[j];
    std::vector<Eigen::VectorXcd> p, q;
    for (int s : f.plain_rows) p.push_back(rest(s));
    for (int s : f.perp_rows) q.push_back(rest(s));
    f.projector_distance = (span_projector(p, rest_dim) - span_projector(q, rest_dim)).norm();
    if (f.projector_distance > tol) {
      report.subspaces_ok = false;
      report.failures.push_back("frame " + std::to_string(j) + ": spans differ by " + std::to_string(f.projector_distance));
    }
  }

  if (std::all_of(b.dims.begin(), b.dims.end(), [](int x) { return x == 2; })) {
    report.row_bound_ok = true;
    for (int s = 0; s < d; ++s) {
      long long total = 0;
      for (int p = 0; p < b.parties(); ++p)
        for (int t = 0; t < d; ++t)
          if (overlap(b.vectors[s][p], b.vectors[t][p]) >= 1.0 - tol) ++total;
      if (total < d - 1) {
        report.row_bound_ok = false;
        report.failures.push_back("row " + std::to_string(s) + ": multiplicities sum to " + std::to_string(total));
      }
    }
  }
  return report;
}

std::optional<NumericReduction> is_reducible_numeric(const NumericOPB& b, double tol) {
  const int d = b.size();
  for (int p = 0; p < b.parties(); ++p) {
    std::vector<bool> reached(d, false);
    std::vector<int> stack{0};
    reached[0] = true;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      for (int t = 0; t < d; ++t)
        if (!reached[t] && overlap(b.vectors[s][p], b.vectors[t][p]) > tol) {
          reached[t] = true;
          stack.push_back(t);
        }
    }
    if (std::all_of(reached.begin(), reached.end(), [](bool x) { return x; })) continue;
    NumericReduction red;
    red.slot = p;
    for (int s = 0; s < d; ++s) (reached[s] ? red.part_j : red.part_k).push_back(s);
    return red;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

NumericOPB tensor_opb(const NumericOPB& a, const NumericOPB& b) {
  if (a.parties() != b.parties())
    throw NumericError("tensor of bases with " + std::to_string(a.parties()) + " and " + std::to_string(b.parties()) +
                       " parties");
  NumericOPB out;
  for (int p = 0; p < a.parties(); ++p) out.dims.push_back(a.dims[p] * b.dims[p]);
  out.tolerance = a.tolerance + b.tolerance + 1e-15;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      std::vector<Eigen::VectorXcd> locals;
      for (int p = 0; p < a.parties(); ++p) locals.push_back(kron(a.vectors[i][p], b.vectors[j][p]));
      out.vectors.push_back(std::move(locals));
    }
  return out;
}

NumericOPB prepend_qubit(const NumericOPB& a, const NumericOPB& b) {
  if (a.dims != b.dims) throw NumericError("prepend_qubit needs bases over the same dimensions");
  NumericOPB out;
  out.dims = a.dims;
  out.dims.insert(out.dims.begin(), 2);
  out.tolerance = std::max(a.tolerance, b.tolerance);
  const Eigen::VectorXcd zero = Eigen::Vector2cd(1.0, 0.0);
  const Eigen::VectorXcd one = Eigen::Vector2cd(0.0, 1.0);
  for (const auto* src : {&a, &b})
    for (const auto& locals : src->vectors) {
      std::vector<Eigen::VectorXcd> v{src == &a ? zero : one};
      v.insert(v.end(), locals.begin(), locals.end());
      out.vectors.push_back(std::move(v));
    }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd build_switch_unitary(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm,
                                      const Assignment& asg) {
  apply_switch(m, site, perm);  // rejects foreign sites and bad permutations
  const int n = m.n();
  const Eigen::Index dim = Eigen::Index{1} << n;
  auto in_site = [&](int c) { return std::find(site.cols.begin(), site.cols.end(), c) != site.cols.end(); };

  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Ones(1, 1);
  for (int c = 0; c < n; ++c) {
    Eigen::Matrix2cd factor = Eigen::Matrix2cd::Identity();
    if (!in_site(c)) {
      const Eigen::Vector2cd v = asg.vector(c, m.at(site.rows.front(), c));
      factor = v * v.adjoint();
    }
    Eigen::MatrixXcd next(pi.rows() * 2, pi.cols() * 2);
    for (Eigen::Index i = 0; i < pi.rows(); ++i)
      for (Eigen::Index j = 0; j < pi.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = pi(i, j) * factor;
    pi = std::move(next);
  }

  auto bit = [n](Eigen::Index x, int party) { return (x >> (n - 1 - party)) & 1; };
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::Index y = x;
    for (std::size_t i = 0; i < site.cols.size(); ++i) {
      const int to = site.cols[i];
      const int from = site.cols[perm[i]];
      y = (y & ~(Eigen::Index{1} << (n - 1 - to))) | (bit(x, from) << (n - 1 - to));
    }
    s(y, x) = 1.0;
  }
  return pi * s + (Eigen::MatrixXcd::Identity(dim, dim) - pi);
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

SwitchCheck check_switch_unitary(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm,
                                 const Assignment& asg) {
  SwitchCheck check;
  const Eigen::MatrixXcd u = build_switch_unitary(m, site, perm, asg);
  check.unitarity_defect = unitarity_defect(u);

  const PatternMatrix target = apply_switch(m, site, perm);
  const int n = m.n();
  std::vector<bool> in_rows(m.row_count(), false);
  for (int r : site.rows) in_rows[r] = true;

  // Local vectors carried along with the moved cells.
  std::vector<std::vector<Eigen::Vector2cd>> moved(m.row_count(), std::vector<Eigen::Vector2cd>(n));
  for (int r = 0; r < m.row_count(); ++r)
    for (int c = 0; c < n; ++c) {
      int src = c;
      if (in_rows[r])
        for (std::size_t i = 0; i < site.cols.size(); ++i)
          if (site.cols[i] == c) src = site.cols[perm[i]];
      moved[r][c] = asg.vector(src, m.at(r, src));
    }

  Assignment carried;
  carried.seed = asg.seed;
  carried.lines.resize(n);
  check.transported = true;
  for (int c = 0; c < n; ++c) {
    carried.lines[c].resize(target.class_count(c));
    std::vector<bool> set(target.class_count(c), false);
    for (int r = 0; r < target.row_count(); ++r) {
      const Entry e = target.at(r, c);
      if (!set[e.cls]) {
        carried.lines[c][e.cls] = e.perp ? perpendicular(moved[r][c]) : moved[r][c];
        set[e.cls] = true;
      }
      if (std::abs(carried.vector(c, e).dot(moved[r][c])) < 1.0 - 1e-12) check.transported = false;
    }
  }
  const NumericOPB image = realize(target, carried);
  const NumericOPB source = realize(m, asg);

  std::vector<Eigen::VectorXcd> targets;
  for (int s = 0; s < image.size(); ++s) targets.push_back(image.full_vector(s));
  std::vector<bool> used(targets.size(), false);
  check.matched = true;
  check.min_overlap = 1.0;
  for (int s = 0; s < source.size(); ++s) {
    const Eigen::VectorXcd v = u * source.full_vector(s);
    int best = -1;
    double best_ov = -1.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (used[t]) continue;
      const double ov = overlap(targets[t], v);
      if (ov > best_ov) {
        best_ov = ov;
        best = static_cast<int>(t);
      }
    }
    check.min_overlap = std::min(check.min_overlap, best_ov);
    if (best < 0 || best_ov < 1.0 - 1e-8) {
      check.matched = false;
      continue;
    }
    used[best] = true;
  }
  return check;
}

}  // namespace opb
