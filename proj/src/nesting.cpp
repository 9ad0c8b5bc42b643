#include "pq/nesting.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace pq {

std::optional<NestedPair> make_nested(const Quadric& q1, const Quadric& q2, double log_width) {
  Quadric a(q1.dim, (q1.mat / q1.mat.norm()).eval());
  Quadric b(q2.dim, (q2.mat / q2.mat.norm()).eval());
  auto margin = [&](double s) { return lambda_min(s * b.mat - a.mat); };
  // concave in s: ternary search over the log-scale window
  double lo = std::exp(-log_width), hi = std::exp(log_width);
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (margin(m1) < margin(m2))
      lo = m1;
    else
      hi = m2;
  }
  double s = 0.5 * (lo + hi);
  double m = margin(s);
  if (m <= 0) return std::nullopt;
  NestedPair out{a, Quadric(b.dim, (s * b.mat).eval()), m};
  return out;
}

namespace {

struct HomRoots {
  int count = 0;       // distinct real roots
  double disc = 0.0;   // scaled discriminant
  Eigen::Vector2d r1, r2;  // root directions in the 2d coords
};

// roots of R11 a^2 + 2 R12 ab + R22 b^2 = 0 on the projective line
HomRoots homogeneous_roots(const Eigen::Matrix2d& R, double rel_tol) {
  HomRoots out;
  const double scale = R.cwiseAbs().maxCoeff();
  const double disc = R(0, 1) * R(0, 1) - R(0, 0) * R(1, 1);
  out.disc = disc / std::max(scale * scale, 1e-300);
  if (out.disc < -rel_tol) return out;           // no real roots
  if (out.disc <= rel_tol) {                     // double root
    out.count = 1;
    if (std::abs(R(0, 0)) >= std::abs(R(1, 1)))
      out.r1 << -R(0, 1), R(0, 0);
    else
      out.r1 << R(1, 1), -R(0, 1);
    out.r1.normalize();
    return out;
  }
  const double s = std::sqrt(disc);
  out.count = 2;
  if (std::abs(R(0, 0)) >= std::abs(R(1, 1))) {
    out.r1 << (-R(0, 1) + s), R(0, 0);
    out.r2 << (-R(0, 1) - s), R(0, 0);
  } else {
    out.r1 << R(1, 1), (-R(0, 1) + s);
    out.r2 << R(1, 1), (-R(0, 1) - s);
  }
  out.r1.normalize();
  out.r2.normalize();
  return out;
}

}  // namespace

LineCrResult line_cross_ratio(const NestedPair& pair, const Vec& a, const Vec& b) {
  const int dim = pair.q1.dim;
  if (a.size() != dim || b.size() != dim)
    throw Error(ErrorCode::malformed_input, "line_cross_ratio: point dimension mismatch");
  Mat span(dim, 2);
  span.col(0) = a;
  span.col(1) = b;
  Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU);
  if (svd.singularValues()(1) < 1e-10 * svd.singularValues()(0))
    throw Error(ErrorCode::degenerate_basis, "line_cross_ratio: points are dependent");
  Mat u = svd.matrixU();  // orthonormal basis of the line

  Eigen::Matrix2d R1 = (u.transpose() * pair.q1.mat * u).eval();
  Eigen::Matrix2d R2 = (u.transpose() * pair.q2.mat * u).eval();
  R1 = 0.5 * (R1 + R1.transpose());
  R2 = 0.5 * (R2 + R2.transpose());

  LineCrResult out;
  HomRoots roots1 = homogeneous_roots(R1, 1e-12);
  if (roots1.count == 0) return out;  // line misses {q1 = 0}
  HomRoots roots2 = homogeneous_roots(R2, 1e-12);
  if (roots2.count == 0) return out;
  if (roots1.count == 1 || roots2.count == 1) {
    out.status = LineCr::infinite;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }

  // chart: send a q2-negative direction to infinity; all four roots are
  // then finite and interleave as x'2 < x'1 <= x1 < x2
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(R2);
  if (es.eigenvalues()(0) >= 0) return out;  // no q2-negative point on the line
  Eigen::Vector2d m = es.eigenvectors().col(0);
  Eigen::Vector2d c(-m(1), m(0));
  auto chart = [&](const Eigen::Vector2d& r) {
    double gamma = r.dot(c), delta = r.dot(m);
    return delta / gamma;
  };
  double t1a = chart(roots1.r1), t1b = chart(roots1.r2);
  double t2a = chart(roots2.r1), t2b = chart(roots2.r2);
  double x1p = std::min(t1a, t1b), x1 = std::max(t1a, t1b);
  double x2p = std::min(t2a, t2b), x2 = std::max(t2a, t2b);
  if (!(x2p <= x1p && x1 <= x2)) {
    out.status = LineCr::not_nested;
    return out;
  }
  out.status = LineCr::ok;
  out.roots[0] = x2p;
  out.roots[1] = x1p;
  out.roots[2] = x1;
  out.roots[3] = x2;
  out.value = ((x2 - x1p) / (x2 - x2p)) * ((x1 - x2p) / (x1 - x1p));
  return out;
}

namespace {

// candidate line through the eigenvectors of the extreme real generalized
// eigenvalues of (q1, q2); often the minimizer, always a legal candidate
std::optional<std::pair<Vec, Vec>> eigen_candidate(const NestedPair& pair) {
  Eigen::EigenSolver<Mat> es(pair.q2.mat.partialPivLu().solve(pair.q1.mat));
  std::vector<std::pair<double, Vec>> real_pairs;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i).imag()) < 1e-9 * (1 + std::abs(es.eigenvalues()(i)))) {
      Vec v = es.eigenvectors().col(i).real();
      if (v.norm() > 1e-9) real_pairs.push_back({es.eigenvalues()(i).real(), v.normalized()});
    }
  }
  if (real_pairs.size() < 2) return std::nullopt;
  auto lo = std::min_element(real_pairs.begin(), real_pairs.end(),
                             [](auto& x, auto& y) { return x.first < y.first; });
  auto hi = std::max_element(real_pairs.begin(), real_pairs.end(),
                             [](auto& x, auto& y) { return x.first < y.first; });
  if ((lo->second - hi->second).norm() < 1e-8) return std::nullopt;
  return std::make_pair(lo->second, hi->second);
}

}  // namespace

CrossRatioResult cross_ratio_distance(const NestedPair& pair, int budget, std::uint64_t seed) {
  const int dim = pair.q1.dim;
  CrossRatioResult out;

  auto consider = [&](const Vec& a, const Vec& b) {
    LineCrResult r = line_cross_ratio(pair, a, b);
    if (r.status == LineCr::ok) {
      out.any_crossing = true;
      if (r.value < out.value) {
        out.value = r.value;
        out.argmin_a = a;
        out.argmin_b = b;
      }
    } else if (r.status == LineCr::infinite) {
      out.any_crossing = true;
    }
  };

  if (auto cand = eigen_candidate(pair)) consider(cand->first, cand->second);

  // random crossing lines: one endpoint where q1 > 0, one where q2 < 0,
  // sampled parametrically from the eigendecompositions so thin cones
  // still get hit
  Eigen::SelfAdjointEigenSolver<Mat> es1(pair.q1.mat), es2(pair.q2.mat);
  auto sample_signed = [&](Rng& rng, const Eigen::SelfAdjointEigenSolver<Mat>& es,
                           bool positive) -> std::optional<Vec> {
    const Vec& ev = es.eigenvalues();
    Vec c = rng.gaussian_vec(dim);
    double good = 0, bad = 0;
    for (int i = 0; i < dim; ++i) {
      double term = ev(i) * c(i) * c(i);
      if ((positive && term > 0) || (!positive && term < 0))
        good += std::abs(term);
      else
        bad += std::abs(term);
    }
    if (good <= 0) return std::nullopt;
    if (bad > 0) {
      double shrink = std::sqrt(good / bad) * rng.uniform(0.0, 0.95);
      for (int i = 0; i < dim; ++i)
        if ((positive && ev(i) <= 0) || (!positive && ev(i) >= 0)) c(i) *= shrink;
    }
    return Vec((es.eigenvectors() * c).normalized());
  };
  for (int i = 0; i < budget; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    auto u = sample_signed(rng, es1, true);
    auto w = sample_signed(rng, es2, false);
    if (!u || !w) continue;
    consider(*u, *w);
    ++out.lines_searched;
  }

  if (!out.any_crossing)
    throw Error(ErrorCode::budget_exhausted,
                "cross_ratio_distance: no crossing line found within budget");

  // local refinement around the best line
  if (out.argmin_a.size() == dim) {
    Rng rng = Rng::stream(seed, 0x5ef1ed);
    double sigma = 0.3;
    Vec a = out.argmin_a, b = out.argmin_b;
    for (int it = 0; it < 200; ++it) {
      Vec a2 = (a + sigma * rng.gaussian_vec(dim)).normalized();
      Vec b2 = (b + sigma * rng.gaussian_vec(dim)).normalized();
      LineCrResult r = line_cross_ratio(pair, a2, b2);
      if (r.status == LineCr::ok && r.value < out.value) {
        out.value = r.value;
        a = a2;
        b = b2;
        out.argmin_a = a2;
        out.argmin_b = b2;
      } else {
        sigma *= 0.97;
      }
    }
  }
  return out;
}

LimitSubspace limit_subspace(const std::vector<Quadric>& seq, double tolerance, int samples,
                             std::uint64_t seed) {
  if (seq.size() < 2)
    throw Error(ErrorCode::malformed_input, "limit_subspace: need at least two quadrics");
  const int dim = seq[0].dim;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (seq[k].dim != dim)
      throw Error(ErrorCode::malformed_input, "limit_subspace: dimension mismatch");
    // PD up to the floating-point resolution of the difference: deep flow
    // sequences have margins far below the representable relative scale
    Mat diff = seq[k].mat - seq[k - 1].mat;
    if (lambda_min(diff) < -1e-10 * diff.norm())
      throw Error(ErrorCode::malformed_input,
                  "limit_subspace: consecutive differences must be positive definite");
  }

  // proposals come from the deepest quadric whose eigen-split is still
  // trustworthy in double precision; candidates are then pushed into the
  // deeper sublevel sets by tangential descent, which only needs
  // matrix-vector products and stays well defined at any depth
  std::size_t kstar = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    Vec ev = sym_eigenvalues(seq[k].mat);
    double big = ev.cwiseAbs().maxCoeff();
    if (ev.cwiseAbs().minCoeff() > 1e-12 * big) kstar = k;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(seq[kstar].mat);
  Vec ev = es.eigenvalues();
  Mat U = es.eigenvectors();

  auto rel_value = [&](const Quadric& q, const Vec& v) {
    return v.dot(q.mat * v) / q.mat.norm();
  };
  auto push_into = [&](const Quadric& q, Vec& v) {
    for (int it = 0; it < 60; ++it) {
      double f = rel_value(q, v);
      if (f <= 0) return true;
      Vec g = 2.0 * (q.mat * v) / q.mat.norm();
      g -= g.dot(v) * v;
      double gn2 = g.squaredNorm();
      if (gn2 < 1e-30) return false;
      v = (v - (f / gn2) * g).normalized();
    }
    return rel_value(q, v) <= tolerance;
  };

  Rng rng(mix64(seed ^ 0x115b));
  std::vector<Vec> kept;
  for (int s = 0; s < samples; ++s) {
    Vec c = rng.gaussian_vec(dim);
    double pos = 0, neg = 0;
    for (int i = 0; i < dim; ++i) {
      double term = ev(i) * c(i) * c(i);
      if (term > 0)
        pos += term;
      else
        neg -= term;
    }
    if (neg <= 0) continue;
    if (pos > 0) {
      double shrink = std::sqrt(neg / pos) * rng.uniform(0.0, 1.0);
      for (int i = 0; i < dim; ++i)
        if (ev(i) > 0) c(i) *= shrink;
    }
    Vec v = (U * c).normalized();
    bool ok = true;
    for (std::size_t k = kstar + 1; k < seq.size() && ok; ++k) ok = push_into(seq[k], v);
    for (const auto& q : seq)
      if (rel_value(q, v) > tolerance) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(v);
  }
  if (kept.empty())
    throw Error(ErrorCode::budget_exhausted, "limit_subspace: empty survivor set (tolerance too tight)");

  Mat S(static_cast<int>(kept.size()), dim);
  for (std::size_t i = 0; i < kept.size(); ++i) S.row(static_cast<int>(i)) = kept[i].transpose();
  // drop threshold 1e-3: the populated transverse width of a deep flow
  // sequence in a fixed basis floors at max(e^{-T}, sqrt(eps) e^{T}), which
  // never gets below ~1e-4 once the quadric weights spread over e^{3T};
  // collapsed directions sit well under this threshold, surviving ones
  // well above (see the flow tests)
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeThinV);
  Vec sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) >= 1e-3 * sv(0)) ++r;
  LimitSubspace out;
  out.frame = svd.matrixV().leftCols(r);
  if (r == dim) {
    // the survivor set did not collapse onto any proper subspace
    out.residual = 1.0;
    out.converged = false;
  } else {
    out.residual = sv(r) / sv(0);
    out.converged = out.residual < 0.05;
  }
  out.survivors = static_cast<int>(kept.size());
  return out;
}

}  // namespace pq
