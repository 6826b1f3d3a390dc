#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opb/lattice.hpp"
#include "opb/pattern.hpp"

namespace opb {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by associate_matrix when an overlap falls between the bands.
class AmbiguityError : public NumericError {
 public:
  AmbiguityError(const std::string& what, int slot, int s, int t) : NumericError(what), slot(slot), row_a(s), row_b(t) {}
  int slot;
  int row_a;
  int row_b;
};

/// D product vectors of an n-partite space, D = prod(dims). Local
/// vectors are stored per basis element and party; party 0 is the most
/// significant factor of the full state vector.
struct NumericOPB {
  std::vector<int> dims;
  std::vector<std::vector<Eigen::VectorXcd>> vectors;
  double tolerance = 1e-9;

  int parties() const { return static_cast<int>(dims.size()); }
  int size() const { return static_cast<int>(vectors.size()); }
  Eigen::VectorXcd full_vector(int s) const;
};

/// Checks shape, local norms and pairwise orthogonality against
/// `tolerance`; throws NumericError with the first offending element.
void check_opb(const NumericOPB& b);

NumericOPB computational_basis(const std::vector<int>& dims);

/// One vector on n one-dimensional parties; the unit for tensor_opb.
NumericOPB trivial_basis(int n);

// ---------------------------------------------------------------------------
// Assignments and instantiation

/// The perpendicular representative (-conj(b), conj(a)) of (a, b).
Eigen::Vector2cd perpendicular(const Eigen::Vector2cd& v);

/// Uniform Bloch-sphere states from a seeded std::mt19937_64. Each state
/// uses two 64-bit draws u, v mapped to [0,1) by their top 53 bits; then
/// z = 2u - 1, phi = 2 pi v and the state is
/// (sqrt((1+z)/2), e^{i phi} sqrt((1-z)/2)).
class BlochSampler {
 public:
  explicit BlochSampler(std::uint64_t seed) : engine_(seed) {}
  Eigen::Vector2cd next();

 private:
  double uniform();
  std::mt19937_64 engine_;
};

/// Concrete unit vectors for the classes of a pattern matrix.
struct Assignment {
  std::uint64_t seed = 0;
  std::vector<std::vector<Eigen::Vector2cd>> lines;  // [column][class]

  Eigen::Vector2cd vector(int column, Entry e) const;
};

/// Overlap window for two classes of one column in a sampled assignment.
inline constexpr double kGenericOverlapMin = 1e-3;
inline constexpr double kGenericOverlapMax = 1.0 - 1e-3;

bool is_generic(const Assignment& asg);

/// The product vectors of m under asg (no orthogonality check).
NumericOPB realize(const PatternMatrix& m, const Assignment& asg);

struct Instantiation {
  NumericOPB basis;
  Assignment assignment;
};

/// Deterministic in (m, seed). Columns whose classes come out non-generic
/// are redrawn from the continuing stream.
Instantiation instantiate(const PatternMatrix& m, std::uint64_t seed);

double gram_defect(const NumericOPB& b);

// ---------------------------------------------------------------------------
// From numbers back to patterns

/// Overlaps |<u|v>| at most `tol` count as orthogonal, at least 1 - tol
/// as collinear, and within [100 tol, 1 - 100 tol] as generic.
PatternMatrix associate_matrix(const NumericOPB& b, double tol = 1e-6);

struct Frame {
  Eigen::VectorXcd line;  // representative of V
  std::vector<int> plain_rows;  // P: rows on V
  std::vector<int> perp_rows;   // Q: rows on V-perp
  double projector_distance = 0.0;
};

struct FrameReport {
  int slot = 0;
  std::vector<Frame> frames;
  bool frames_ok = false;         // lines pair into frames with equal counts
  bool reduced_basis_ok = false;  // rows on the chosen lines form a basis of the rest
  bool subspaces_ok = false;      // every frame has equal P and Q spans
  std::optional<bool> row_bound_ok;  // all-qubit systems only
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Frame structure of one qubit slot; throws NumericError when that slot
/// is not two-dimensional.
FrameReport verify_frame_structure(const NumericOPB& b, int slot, double tol = 1e-8);

struct NumericReduction {
  int slot = 0;
  std::vector<int> part_j;
  std::vector<int> part_k;
};

/// First slot whose non-orthogonality graph is disconnected.
std::optional<NumericReduction> is_reducible_numeric(const NumericOPB& b, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Constructions

NumericOPB tensor_opb(const NumericOPB& a, const NumericOPB& b);

/// |0>|a_s> followed by |1>|b_s>.
NumericOPB prepend_qubit(const NumericOPB& a, const NumericOPB& b);

// ---------------------------------------------------------------------------
// Switching as a controlled unitary

/// U = Pi S + (1 - Pi): S moves party J[perm[i]] to party J[i], Pi projects
/// the parties outside J onto the lines shared by the rows of the site.
Eigen::MatrixXcd build_switch_unitary(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm,
                                      const Assignment& asg);

double unitarity_defect(const Eigen::MatrixXcd& u);

struct SwitchCheck {
  double unitarity_defect = 0.0;
  double min_overlap = 0.0;  // worst matched line overlap
  bool transported = false;  // the moved vectors form an assignment of the switched matrix
  bool matched = false;      // U maps the basis onto that instantiation
  bool ok(double unitary_tol = 1e-10, double overlap_tol = 1e-8) const {
    return transported && matched && unitarity_defect <= unitary_tol && min_overlap >= 1.0 - overlap_tol;
  }
};

SwitchCheck check_switch_unitary(const PatternMatrix& m, const SwitchSite& site, const std::vector<int>& perm,
                                 const Assignment& asg);

}  // namespace opb
