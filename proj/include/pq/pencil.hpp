#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pq/quadric.hpp"
#include "pq/symplectic.hpp"

namespace pq {

// A d-dimensional subspace of Q given by an ordered (oriented) basis.
struct Pencil {
  int dim = 0;  // ambient 2n
  int d = 0;
  std::vector<Quadric> basis;

  Pencil() = default;
  Pencil(int ambient_dim, std::vector<Quadric> b);

  const Quadric& q(int i) const { return basis[i]; }
  Mat element(const Vec& coeffs) const;
};

// svec with sqrt(2) off-diagonal weights: Tr(AB) = svec(A).svec(B).
Vec svec(const Mat& m);
Mat unsvec(const Vec& v, int n);

struct PencilClass {
  Tri mixed = Tri::inconclusive;
  Tri nn_regular = Tri::inconclusive;
  Tri omega_regular = Tri::inconclusive;
  Tri maximal = Tri::inconclusive;

  double mixed_margin = 0.0;
  double nn_margin = 0.0;          // min |Im| of generalized eigenvalues, scaled
  double omega_margin = 0.0;       // worst positive-restriction margin over the loop
  std::optional<int> winding;
  std::optional<std::pair<Lagrangian, Lagrangian>> omega_witness;  // (positive, negative) for basis[0]
  std::optional<LagrangianLoop> boundary;
};

// Orthonormal basis of {p in S^2V : Tr(q_i p) = 0 for all i}.
std::vector<SymTensor> annihilator(const Pencil& P);

struct LagrangianWitness {
  Lagrangian l;
  double margin;  // lambda_min of the whitened restriction of q
};

// Searches for a Lagrangian on which q is positive definite. Ascent of the
// generalized lambda_min over graph charts; Lemma-6.2 geometry makes the
// success region star shaped, so warm starts from inside cannot escape.
// Ascent stops once target_margin is reached, which keeps warm-started
// continuation sections from chasing a far-away maximizer.
std::optional<LagrangianWitness> positive_lagrangian(
    const SymplecticSpace& sp, const Quadric& q, std::uint64_t seed,
    int restarts = 12, int iters = 120,
    const Lagrangian* warm_start = nullptr,
    double target_margin = std::numeric_limits<double>::infinity());

struct BoundaryLoopResult {
  LagrangianLoop loop;
  double min_margin = 0.0;
  bool closed = false;
  std::optional<double> failed_theta;  // set when the witness search failed
};

// xi_P : SP -> L_n by continuation over a theta grid (Prop 6.3 section).
BoundaryLoopResult boundary_loop(const SymplecticSpace& sp, const Pencil& P, int k,
                                 std::uint64_t seed = 0);

struct ClassifyOptions {
  std::uint64_t seed = 0;
  int loop_samples = 64;
  int feasibility_budget = 2000;
};

PencilClass classify(const Pencil& P, double tolerance, const ClassifyOptions& opt = {});

struct FittingPairResult {
  Tri fitting = Tri::inconclusive;
  std::optional<std::pair<Quadric, Quadric>> witness;  // q1 in P1, q2 in P2, q2 - q1 > 0
  double margin = 0.0;
  // sampled Prop 3.2 (iii) cross-validation: min of q2 over sampled {q1 >= 0}
  double geometric_min = 0.0;
  int samples = 0;
};

FittingPairResult fitting_pair(const Pencil& P1, const Pencil& P2, int budget = 2000,
                               std::uint64_t seed = 0);

// Tangent vector at a pencil: representatives of v(q_i) in Q, stored
// reduced against span(basis).
struct TangentVector {
  Pencil base;
  std::vector<Mat> images;

  TangentVector(Pencil P, std::vector<Mat> imgs);
};

// The straight-line curve t -> span{q_i + t v(q_i)} in a chart.
Pencil move_pencil(const TangentVector& v, double t);

struct FittingDirectionResult {
  Tri fitting = Tri::inconclusive;
  std::optional<FeasibilityWitness> witness;
  double margin = 0.0;
  Tri dual_check = Tri::inconclusive;  // Ker(v°) meets PSD only at 0
  double dual_max = 0.0;
};

FittingDirectionResult fitting_direction(const TangentVector& v, int budget = 2000,
                                         std::uint64_t seed = 0);

}  // namespace pq
