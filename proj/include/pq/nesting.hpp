#pragma once

#include <optional>
#include <vector>

#include "pq/quadric.hpp"
#include "pq/rng.hpp"

namespace pq {

// Two mixed quadrics with q2 - q1 certified positive definite for the
// stored representatives (Def 5.1 requires a choice of scaling).
struct NestedPair {
  Quadric q1, q2;
  double gap_margin = 0.0;  // lambda_min(q2.mat - q1.mat)
};

// Finds a positive rescaling making q2 - q1 positive definite; the scale
// is searched over log range +-width (concave in the scale, so ternary).
std::optional<NestedPair> make_nested(const Quadric& q1, const Quadric& q2,
                                      double log_width = 5.0);

enum class LineCr { ok, infinite, no_crossing, not_nested };

struct LineCrResult {
  LineCr status = LineCr::no_crossing;
  double value = std::numeric_limits<double>::quiet_NaN();  // >= 1 when ok
  // root parameters in the chart used, ordered x'2 < x'1 <= x1 < x2
  double roots[4] = {0, 0, 0, 0};
};

LineCrResult line_cross_ratio(const NestedPair& pair, const Vec& a, const Vec& b);

struct CrossRatioResult {
  double value = std::numeric_limits<double>::infinity();
  Vec argmin_a, argmin_b;  // the achieving line
  int lines_searched = 0;
  bool any_crossing = false;
};

// Stochastic global-minimum estimate over crossing lines with local
// refinement; the returned value is an upper bound on the true minimum.
CrossRatioResult cross_ratio_distance(const NestedPair& pair, int budget = 2000,
                                      std::uint64_t seed = 0);

struct LimitSubspace {
  Mat frame;        // dim x r, orthonormal columns
  double residual;  // first dropped singular value over sigma_1
  bool converged;
  int survivors;
};

// Extracts the projective subspace that the nested family {q_k <= 0}
// collapses onto (Prop 5.3 / Thm 5.4 limit formula).
LimitSubspace limit_subspace(const std::vector<Quadric>& seq, double tolerance,
                             int samples = 4000, std::uint64_t seed = 0);

}  // namespace pq
