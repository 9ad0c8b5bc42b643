#include "pq/quadric.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>

namespace pq {

Vec sym_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double lambda_min(const Mat& m) { return sym_eigenvalues(m)(0); }

Vec min_eigenvector(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvectors().col(0);
}

Signature signature(const Quadric& q, double tolerance) {
  if (tolerance <= 0)
    throw Error(ErrorCode::malformed_input, "signature: tol must be positive");
  q.validate();
  Vec ev = sym_eigenvalues(q.mat);
  Signature s;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= tolerance)
      ++s.zero;
    else if (ev(i) > 0)
      ++s.pos;
    else
      ++s.neg;
  }
  return s;
}

namespace {

// Frobenius-orthonormalize the basis; returns the change of coordinates
// back to the original basis (columns: orthonormal basis in original coords).
struct OrthoBasis {
  std::vector<Mat> mats;  // orthonormal under Tr(AB)
  Mat to_original;        // original coeffs = to_original * ortho coeffs
};

Vec vectorize_sym(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec v(n * n);
  for (int j = 0, k = 0; j < n; ++j)
    for (int i = 0; i < n; ++i, ++k) v(k) = m(i, j);
  return v;
}

OrthoBasis orthonormalize(const std::vector<Quadric>& basis) {
  const int k = static_cast<int>(basis.size());
  const int n = basis[0].dim;
  Mat V(n * n, k);
  for (int j = 0; j < k; ++j) {
    if (basis[j].dim != n)
      throw Error(ErrorCode::malformed_input, "pd_feasibility: mixed dimensions in basis");
    V.col(j) = vectorize_sym(basis[j].mat);
  }
  Eigen::HouseholderQR<Mat> qr(V);
  Mat R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  double rmax = R.cwiseAbs().maxCoeff();
  for (int j = 0; j < k; ++j)
    if (std::abs(R(j, j)) < 1e-10 * std::max(1.0, rmax))
      throw Error(ErrorCode::degenerate_basis, "pd_feasibility: basis is rank deficient");
  Mat Q = qr.householderQ() * Mat::Identity(n * n, k);
  OrthoBasis out;
  out.mats.reserve(k);
  for (int j = 0; j < k; ++j) {
    Mat mj(n, n);
    for (int jj = 0, t = 0; jj < n; ++jj)
      for (int ii = 0; ii < n; ++ii, ++t) mj(ii, jj) = Q(t, j);
    out.mats.push_back(symmetrized(mj));
  }
  out.to_original = R.inverse();
  return out;
}

Mat combine(const std::vector<Mat>& mats, const Vec& c) {
  Mat m = c(0) * mats[0];
  for (int i = 1; i < c.size(); ++i) m += c(i) * mats[i];
  return m;
}

// Ascent of lambda_min over the unit sphere of the span. Supgradient of
// lambda_min at M is u u^T for the minimal eigenvector u, so the gradient
// in coefficients is (u^T B_i u)_i.
double sphere_ascent(const std::vector<Mat>& mats, Vec& c, int iters) {
  const int k = static_cast<int>(mats.size());
  double f = lambda_min(combine(mats, c));
  double step = 0.5;
  for (int it = 0; it < iters; ++it) {
    Vec u = min_eigenvector(combine(mats, c));
    Vec g(k);
    for (int i = 0; i < k; ++i) g(i) = u.dot(mats[i] * u);
    g -= g.dot(c) * c;  // tangent component
    if (g.norm() < 1e-14) break;
    bool improved = false;
    while (step > 1e-14) {
      Vec cn = (c + step * g).normalized();
      double fn = lambda_min(combine(mats, cn));
      if (fn > f + 1e-16) {
        c = cn;
        f = fn;
        improved = true;
        step *= 1.8;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return f;
}

}  // namespace

PdFeasibility pd_feasibility(const std::vector<Quadric>& basis, int budget,
                             std::uint64_t seed, int restarts, double band) {
  if (basis.empty())
    throw Error(ErrorCode::malformed_input, "pd_feasibility: empty basis");
  const std::size_t cap = static_cast<std::size_t>(basis[0].dim) *
                          (static_cast<std::size_t>(basis[0].dim) + 1) / 2;
  if (basis.size() > cap)
    throw Error(ErrorCode::malformed_input, "pd_feasibility: basis larger than dim of S^2V*");
  for (const auto& q : basis) q.validate();

  OrthoBasis ob = orthonormalize(basis);
  const int k = static_cast<int>(ob.mats.size());

  PdFeasibility out;
  Vec best_c;
  double best = -std::numeric_limits<double>::infinity();

  if (k == 1) {
    for (double s : {1.0, -1.0}) {
      double f = lambda_min(s * ob.mats[0]);
      if (f > best) {
        best = f;
        best_c = Vec::Constant(1, s);
      }
    }
  } else {
    Rng rng(mix64(seed ^ 0x7051bd4c7f23ULL));
    const int iters = std::max(20, budget / std::max(1, restarts));
    for (int r = 0; r < restarts + 2 * k; ++r) {
      Vec c;
      if (r < 2 * k) {
        c = Vec::Zero(k);
        c(r / 2) = (r % 2 == 0) ? 1.0 : -1.0;
      } else {
        c = rng.sphere_vec(k);
      }
      double f = sphere_ascent(ob.mats, c, iters);
      if (f > best) {
        best = f;
        best_c = c;
        if (best > 10 * band) break;  // feasible with comfortable margin
      }
    }
    // 2d spans get a certified sweep; it can only improve the estimate
    // and it certifies infeasibility.
    if (k == 2 && best < band) {
      Quadric qa(basis[0].dim, ob.mats[0]), qb(basis[0].dim, ob.mats[1]);
      CircleReport cr = circle_sweep(qa, qb, band);
      if (cr.mixed == Tri::yes) {
        out.status = Tri::no;
        out.best = best;
        return out;
      }
      if (cr.psd_theta) {
        Vec c(2);
        c << std::cos(*cr.psd_theta), std::sin(*cr.psd_theta);
        double f = sphere_ascent(ob.mats, c, 200);
        if (f > best) {
          best = f;
          best_c = c;
        }
      }
    }
  }

  out.best = best;
  if (best > band) {
    // map back to the original basis; scale so |coeffs| = 1 there
    Vec c0 = ob.to_original * best_c;
    c0.normalize();
    Mat w = Mat::Zero(basis[0].dim, basis[0].dim);
    for (int i = 0; i < k; ++i) w += c0(i) * basis[i].mat;
    double margin = lambda_min(w);
    if (margin <= 0) {
      out.status = Tri::inconclusive;  // rescale lost positivity: borderline
      return out;
    }
    out.status = Tri::yes;
    out.witness = FeasibilityWitness{c0, margin};
  } else if (best < -band) {
    out.status = Tri::no;
  } else {
    out.status = Tri::inconclusive;
  }
  return out;
}

CircleReport circle_sweep(const Quadric& A, const Quadric& B, double tolerance,
                          int max_grid) {
  A.validate();
  B.validate();
  if (A.dim != B.dim)
    throw Error(ErrorCode::malformed_input, "circle_sweep: dimension mismatch");
  {
    // linear independence
    double na = A.mat.norm(), nb = B.mat.norm();
    if (na < 1e-300 || nb < 1e-300)
      throw Error(ErrorCode::degenerate_pencil, "circle_sweep: zero quadric");
    double ip = pairing(A.mat, B.mat) / (na * nb);
    Mat resid = A.mat / na - ip * B.mat / nb;
    if (resid.norm() < 1e-12)
      throw Error(ErrorCode::degenerate_pencil, "circle_sweep: dependent quadrics");
  }

  const double lip = spectral_norm(A.mat) + spectral_norm(B.mat);

  CircleReport rep;
  rep.min_abs_eig = std::numeric_limits<double>::infinity();
  rep.indef_margin = std::numeric_limits<double>::infinity();

  struct Interval {
    double lo, hi;
  };
  std::deque<Interval> work;
  const int init = 64;
  for (int i = 0; i < init; ++i)
    work.push_back({M_PI * i / init, M_PI * (i + 1) / init});
  // q_{theta+pi} = -q_theta, so [0, pi) covers the circle when both signs
  // of the spectrum are inspected.

  int evaluations = 0;
  bool inconclusive = false;
  while (!work.empty()) {
    Interval iv = work.front();
    work.pop_front();
    const double th = 0.5 * (iv.lo + iv.hi);
    const double halfwidth = 0.5 * (iv.hi - iv.lo);
    Mat q = std::cos(th) * A.mat + std::sin(th) * B.mat;
    Vec ev = sym_eigenvalues(q);
    ++evaluations;
    const double lmin = ev(0), lmax = ev(ev.size() - 1);
    const double snorm = std::max(std::abs(lmin), std::abs(lmax));
    double min_abs = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ev.size(); ++i) min_abs = std::min(min_abs, std::abs(ev(i)));
    if (snorm > 0 && min_abs / snorm < rep.min_abs_eig) {
      rep.min_abs_eig = min_abs / snorm;
      rep.theta_at_min = th;
    }

    if (lmin > tolerance) {  // PSD (in fact PD) element certified on this ray
      rep.mixed = Tri::no;
      rep.psd_theta = th;
      rep.degeneracy_free = (min_abs > tolerance * std::max(1.0, snorm))
                                ? rep.degeneracy_free
                                : Tri::no;
      return rep;
    }
    if (-lmax > tolerance) {  // NSD: its antipode is PSD
      rep.mixed = Tri::no;
      rep.psd_theta = th + M_PI;
      return rep;
    }

    const double indef = std::min(lmax, -lmin);
    const double slack = halfwidth * lip;
    if (indef > slack) {
      // Weyl: every eigenvalue moves at most slack across the interval,
      // so all q_theta in it keep both signs.
      rep.indef_margin = std::min(rep.indef_margin, indef - slack);
      continue;
    }
    if (evaluations >= max_grid || halfwidth < 1e-12) {
      inconclusive = true;
      continue;
    }
    work.push_back({iv.lo, th});
    work.push_back({th, iv.hi});
  }

  rep.grid_size = evaluations;
  rep.mixed = inconclusive ? Tri::inconclusive : Tri::yes;
  if (!inconclusive) {
    // a certified-indefinite sweep cannot certify nondegeneracy by itself;
    // report the observed margin and decide with the eigenvalue tolerance
    rep.degeneracy_free = (rep.min_abs_eig > tolerance) ? Tri::yes : Tri::inconclusive;
  }
  return rep;
}

double hilbert_distance(const SymTensor& p1, const SymTensor& p2) {
  const double s1 = p1.mat.norm(), s2 = p2.mat.norm();
  if (lambda_min(p1.mat) <= 1e-14 * s1 || lambda_min(p2.mat) <= 1e-14 * s2)
    throw Error(ErrorCode::cone_membership, "hilbert_distance: inputs must be positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(p2.mat, p1.mat, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return std::log(ev(ev.size() - 1) / ev(0));
}

Quadric restrict_quadric(const Quadric& q, const Mat& frame) {
  if (frame.rows() != q.dim)
    throw Error(ErrorCode::malformed_input, "restrict: frame row count must equal dim");
  Eigen::JacobiSVD<Mat> svd(frame);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-10 * std::max(1.0, sv(0)))
    throw Error(ErrorCode::rank_deficient, "restrict: frame is rank deficient");
  Quadric out;
  out.dim = static_cast<int>(frame.cols());
  out.mat = symmetrized(frame.transpose() * q.mat * frame);
  return out;  // k may be odd here; restriction is used as raw algebra
}

}  // namespace pq
