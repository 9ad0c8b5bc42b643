#pragma once

#include <vector>

#include "pq/quadric.hpp"
#include "pq/rng.hpp"

namespace pq {

// Standard symplectic R^{2n} in the basis (x_1..x_n, y_1..y_n), where
// omega = sum x_i^* wedge y_i^*.
struct SymplecticSpace {
  int n;
  Mat omega;

  explicit SymplecticSpace(int half_dim) : n(half_dim) {
    if (n < 1) throw Error(ErrorCode::malformed_input, "SymplecticSpace: n must be >= 1");
    omega = Mat::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Mat::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  }
  int dim() const { return 2 * n; }
};

// An n-dimensional omega-isotropic subspace, stored as a 2n x n frame.
struct Lagrangian {
  Mat frame;

  Lagrangian() = default;
  explicit Lagrangian(const Mat& f) : frame(f) {}

  int n() const { return static_cast<int>(frame.cols()); }
  int dim() const { return static_cast<int>(frame.rows()); }

  // Orthonormal frame of the same subspace.
  Mat orthonormal() const;
};

struct LagrangianLoop {
  std::vector<Lagrangian> samples;
  std::vector<double> params;  // in [0, 2pi)
};

bool is_lagrangian(const SymplecticSpace& sp, const Lagrangian& l,
                   double tolerance = tol::lagrangian_abs);

// Smallest singular value of the concatenated frame, relative to the
// largest; the transversality margin.
double transversality_margin(const Lagrangian& l1, const Lagrangian& l2);

inline bool transverse(const Lagrangian& l1, const Lagrangian& l2,
                       double threshold = tol::transversality_rel) {
  return transversality_margin(l1, l2) > threshold;
}

// Largest principal angle between the column spans.
double principal_angle(const Lagrangian& l1, const Lagrangian& l2);

// q_{l1,l2}(v,v) = omega(pi_1 v, pi_2 v) for the splitting l1 (+) l2.
Quadric pair_quadric(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2);

int maslov_index(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                 const Lagrangian& l3);

bool is_maximal_triple(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                       const Lagrangian& l3);
bool is_maximal_quadruple(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                          const Lagrangian& l3, const Lagrangian& l4);

// Class of the loop in pi_1(L_n) ~ Z, computed as the winding of
// det^2 of the unitary representative under L_n ~ U(n)/O(n); the
// generator tau below returns +1.
int maslov_winding(const SymplecticSpace& sp, const LagrangianLoop& loop);

LagrangianLoop tau_loop(const SymplecticSpace& sp, int samples);

// Haar-ish random symplectic matrix exp(J S), S symmetric Gaussian.
Mat random_symplectic(const SymplecticSpace& sp, Rng& rng, double scale = 0.7);

Lagrangian random_lagrangian(const SymplecticSpace& sp, Rng& rng);

// Section 2.1 normal form: l1 = <x_i>, l2 = <x_i + eps_i y_i>, l3 = <y_i>.
struct NormalFormTriple {
  Lagrangian l1, l2, l3;
};
NormalFormTriple normal_form_triple(const SymplecticSpace& sp, const std::vector<int>& eps);

}  // namespace pq
