#pragma once

#include <optional>
#include <vector>

#include "pq/rng.hpp"
#include "pq/types.hpp"

namespace pq {

// A symmetric bilinear form on R^dim (an element of Q = S^2 V*).
struct Quadric {
  int dim = 0;
  Mat mat;

  Quadric() = default;
  Quadric(int d, const Mat& m) : dim(d), mat(m) { validate(); }
  explicit Quadric(const Mat& m) : dim(static_cast<int>(m.rows())), mat(m) { validate(); }

  void validate() const {
    if (dim < 1)
      throw Error(ErrorCode::malformed_input, "Quadric: dim must be positive");
    if (mat.rows() != dim || mat.cols() != dim)
      throw Error(ErrorCode::malformed_input, "Quadric: matrix shape does not match dim");
    require_symmetric(mat, "Quadric");
  }

  // Ambient quadrics on R^{2n}; restrictions to frames may be any size.
  void require_ambient() const {
    validate();
    if (dim < 2 || dim % 2 != 0)
      throw Error(ErrorCode::malformed_input, "Quadric: ambient dim must be a positive even integer");
  }

  double operator()(const Vec& v) const { return v.dot(mat * v); }
  double operator()(const Vec& v, const Vec& w) const { return v.dot(mat * w); }
};

// An element of S^2 V (the dual side); hosts the points of P(S^2 V^{>=0}).
struct SymTensor {
  int dim = 0;
  Mat mat;
  bool positive = false;  // certified by lambda_min > 0 when set

  SymTensor() = default;
  SymTensor(int d, const Mat& m, bool pos = false) : dim(d), mat(m), positive(pos) {
    if (mat.rows() != dim || mat.cols() != dim)
      throw Error(ErrorCode::malformed_input, "SymTensor: matrix shape does not match dim");
    require_symmetric(mat, "SymTensor");
  }
  explicit SymTensor(const Mat& m, bool pos = false)
      : SymTensor(static_cast<int>(m.rows()), m, pos) {}
};

struct Signature {
  int pos = 0;
  int neg = 0;
  int zero = 0;
  bool operator==(const Signature& o) const {
    return pos == o.pos && neg == o.neg && zero == o.zero;
  }
};

// Certificate for a point of the open PD cone inside a span of quadrics.
struct FeasibilityWitness {
  Vec coeffs;     // coordinates in the queried basis, |coeffs| = 1
  double margin;  // lambda_min of the witness matrix
};

struct PdFeasibility {
  Tri status = Tri::inconclusive;
  std::optional<FeasibilityWitness> witness;
  double best = 0.0;  // best sphere-restricted lambda_min seen
};

// Result of sweeping the unit circle q_theta = cos A + sin B.
struct CircleReport {
  Tri mixed = Tri::inconclusive;          // every q_theta indefinite
  Tri degeneracy_free = Tri::inconclusive;  // no q_theta singular
  double min_abs_eig = 0.0;    // observed min |lambda| of spectrally normalized q_theta
  double indef_margin = 0.0;   // certified lower bound on min(lambda_max, -lambda_min)
  double theta_at_min = 0.0;
  int grid_size = 0;
  std::optional<double> psd_theta;  // a ray carrying a PSD element, when one exists
};

Vec sym_eigenvalues(const Mat& m);
double lambda_min(const Mat& m);
Vec min_eigenvector(const Mat& m);

Signature signature(const Quadric& q, double tolerance);

// Decides whether span(basis) meets the open PD cone. Supgradient ascent
// of the concave map c -> lambda_min(sum c_i B_i) restricted to the unit
// sphere of the span, with restarts; 2-dimensional spans additionally get
// a Weyl-certified circle sweep so the "no" answer is certified there.
PdFeasibility pd_feasibility(const std::vector<Quadric>& basis, int budget = 2000,
                             std::uint64_t seed = 0, int restarts = 50,
                             double band = tol::feasibility_band);

CircleReport circle_sweep(const Quadric& A, const Quadric& B, double tolerance,
                          int max_grid = 1 << 14);

// Hilbert metric of the PD cone: log of the boundary cross ratio, in
// closed form log(lambda_max/lambda_min) of p1^{-1} p2.
double hilbert_distance(const SymTensor& p1, const SymTensor& p2);

Quadric restrict_quadric(const Quadric& q, const Mat& frame);

// Frobenius inner product Tr(q p); the duality pairing between Q and S^2 V.
inline double pairing(const Mat& q, const Mat& p) { return (q * p).trace(); }

}  // namespace pq
