#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pq/pencil.hpp"
#include "pq/quadric.hpp"
#include "pq/rng.hpp"

using namespace pq;

namespace {

Mat diag4(double a, double b, double c, double d) {
  Vec v(4);
  v << a, b, c, d;
  return v.asDiagonal();
}

// boundary-root oracle for the Hilbert distance: the segment through p1, p2
// leaves the PD cone where lambda_min((1-s) p1 + s p2) = 0; lambda_min is
// concave in s, so doubling plus bisection brackets the two roots safely
double hilbert_oracle(const Mat& p1, const Mat& p2) {
  auto lmin_at = [&](double s) { return lambda_min(((1 - s) * p1 + s * p2).eval()); };
  auto bisect = [&](double inside, double outside) {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (inside + outside);
      if (lmin_at(mid) > 0)
        inside = mid;
      else
        outside = mid;
    }
    return 0.5 * (inside + outside);
  };
  double lo = 0.0, step = 1.0;
  while (lmin_at(lo) > 0 && step < 1e9) {
    lo -= step;
    step *= 2;
  }
  if (step >= 1e9) return 0.0;  // proportional pair: boundary at infinity
  double hi = 1.0;
  step = 1.0;
  while (lmin_at(hi) > 0 && step < 1e9) {
    hi += step;
    step *= 2;
  }
  double sm = bisect(0.0, lo), sp = bisect(1.0, hi);
  return std::log(((1 - sm) * sp) / ((-sm) * (sp - 1)));
}

}  // namespace

TEST_CASE("signature basics") {
  CHECK(signature(Quadric(Mat::Identity(4, 4)), 1e-9) == Signature{4, 0, 0});
  CHECK(signature(Quadric(diag4(1, 1, -1, -1)), 1e-9) == Signature{2, 2, 0});

  // Appendix-B pair quadric: ones on the off-diagonal 2x2 blocks' antidiagonals
  Mat m = Mat::Zero(4, 4);
  m(0, 1) = m(1, 0) = 1;
  m(2, 3) = m(3, 2) = 1;
  CHECK(signature(Quadric(m), 1e-9) == Signature{2, 2, 0});

  CHECK_THROWS_AS(signature(Quadric(Mat::Identity(4, 4)), -1.0), Error);
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1;  // not symmetric
  CHECK_THROWS_AS((Quadric{bad}), Error);
}

TEST_CASE("pd_feasibility singleton and diagonal certificates") {
  {
    PdFeasibility r = pd_feasibility({Quadric(Mat::Identity(4, 4))});
    REQUIRE(r.status == Tri::yes);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->margin == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.witness->coeffs(0)) == doctest::Approx(1.0));
  }
  {
    // every combination of these two has a non-positive eigenvalue
    PdFeasibility r = pd_feasibility({Quadric(diag4(1, -1, 0, 0)), Quadric(diag4(0, 0, 1, -1))});
    CHECK(r.status == Tri::no);
  }
  {
    // PD p: margin equals lambda_min(p)
    Mat p = diag4(3, 2, 1.5, 0.5);
    PdFeasibility r = pd_feasibility({Quadric(p)});
    REQUIRE(r.status == Tri::yes);
    CHECK(r.witness->margin == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("pd_feasibility is invariant under basis recombination") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Quadric> basis;
    for (int i = 0; i < 3; ++i) basis.emplace_back(rng.gaussian_sym(4));
    PdFeasibility r1 = pd_feasibility(basis, 2000, 11);
    // invertible recombination
    Mat g = rng.gaussian_mat(3, 3);
    while (std::abs(g.determinant()) < 0.2) g = rng.gaussian_mat(3, 3);
    std::vector<Quadric> basis2;
    for (int i = 0; i < 3; ++i) {
      Mat m = Mat::Zero(4, 4);
      for (int j = 0; j < 3; ++j) m += g(i, j) * basis[j].mat;
      basis2.emplace_back(m);
    }
    PdFeasibility r2 = pd_feasibility(basis2, 2000, 13);
    if (r1.status != Tri::inconclusive && r2.status != Tri::inconclusive)
      CHECK(r1.status == r2.status);
  }
}

TEST_CASE("circle_sweep decides mixedness") {
  {
    // 2x2: det(cos q_a + sin q_b) = -1 for all theta
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = -1;
    b(0, 1) = b(1, 0) = 1;
    CircleReport r = circle_sweep(Quadric(a), Quadric(b), 1e-9);
    CHECK(r.mixed == Tri::yes);
    CHECK(r.indef_margin > 0);

    // dense-theta oracle
    for (int k = 0; k < 720; ++k) {
      double th = 2 * M_PI * k / 720;
      Vec ev = sym_eigenvalues(std::cos(th) * a + std::sin(th) * b);
      CHECK(ev(0) < 0);
      CHECK(ev(1) > 0);
    }
  }
  {
    Mat a = Mat::Identity(2, 2), b = Mat::Zero(2, 2);
    b(0, 0) = 1;
    b(1, 1) = -1;
    CircleReport r = circle_sweep(Quadric(a), Quadric(b), 1e-9);
    CHECK(r.mixed == Tri::no);
    CHECK(r.psd_theta.has_value());
  }
  {
    // Appendix B theta-family plane: mixed and degeneracy free
    Mat a = Mat::Zero(4, 4);
    a(0, 1) = a(1, 0) = 1;
    a(2, 3) = a(3, 2) = 1;
    Mat b = diag4(1, -1, 1, -1);
    CircleReport r = circle_sweep(Quadric(a), Quadric(b), 1e-9);
    CHECK(r.mixed == Tri::yes);
    CHECK(r.min_abs_eig > 0.1);
  }
  {
    Mat a = Mat::Identity(2, 2);
    CHECK_THROWS_AS(circle_sweep(Quadric(a), Quadric((2.0 * a).eval()), 1e-9), Error);
  }
}

TEST_CASE("circle_sweep agrees across basis rotations") {
  Rng rng(21);
  for (int trial = 0; trial < 8; ++trial) {
    Mat a = rng.gaussian_sym(4), b = rng.gaussian_sym(4);
    CircleReport r1 = circle_sweep(Quadric(a), Quadric(b), 1e-9);
    CircleReport r2 = circle_sweep(Quadric(b), Quadric(a), 1e-9);
    double th = rng.uniform(0.1, 3.0);
    Mat a2 = std::cos(th) * a + std::sin(th) * b;
    Mat b2 = -std::sin(th) * a + std::cos(th) * b;
    CircleReport r3 = circle_sweep(Quadric(a2), Quadric(b2), 1e-9);
    CHECK(r1.mixed == r2.mixed);
    CHECK(r1.mixed == r3.mixed);
  }
}

TEST_CASE("hilbert_distance closed form matches the boundary-root oracle") {
  {
    SymTensor p(Mat::Identity(4, 4));
    CHECK(hilbert_distance(p, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    SymTensor p1(Mat::Identity(4, 4));
    SymTensor p2(diag4(std::exp(1.0), 1, 1, 1));
    CHECK(hilbert_distance(p1, p2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(hilbert_oracle(p1.mat, p2.mat) == doctest::Approx(1.0).epsilon(1e-9));
  }
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    Mat g1 = rng.gaussian_mat(4, 4), g2 = rng.gaussian_mat(4, 4);
    Mat p1 = g1 * g1.transpose() + 0.3 * Mat::Identity(4, 4);
    Mat p2 = g2 * g2.transpose() + 0.3 * Mat::Identity(4, 4);
    double d = hilbert_distance(SymTensor(p1), SymTensor(p2));
    CHECK(d == doctest::Approx(hilbert_oracle(p1, p2)).epsilon(1e-9));

    // SL invariance
    Mat g = rng.gaussian_mat(4, 4);
    while (std::abs(g.determinant()) < 0.1) g = rng.gaussian_mat(4, 4);
    double d2 = hilbert_distance(SymTensor(symmetrized(g * p1 * g.transpose())),
                                 SymTensor(symmetrized(g * p2 * g.transpose())));
    CHECK(d2 == doctest::Approx(d).epsilon(1e-9));
  }
  CHECK_THROWS_AS(hilbert_distance(SymTensor(diag4(1, 1, 1, -1)), SymTensor(Mat::Identity(4, 4))),
                  Error);
}

TEST_CASE("hilbert_distance triangle inequality and scaling kernel") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    Mat g1 = rng.gaussian_mat(4, 4), g2 = rng.gaussian_mat(4, 4), g3 = rng.gaussian_mat(4, 4);
    Mat p1 = g1 * g1.transpose() + 0.2 * Mat::Identity(4, 4);
    Mat p2 = g2 * g2.transpose() + 0.2 * Mat::Identity(4, 4);
    Mat p3 = g3 * g3.transpose() + 0.2 * Mat::Identity(4, 4);
    double d12 = hilbert_distance(SymTensor(p1), SymTensor(p2));
    double d23 = hilbert_distance(SymTensor(p2), SymTensor(p3));
    double d13 = hilbert_distance(SymTensor(p1), SymTensor(p3));
    CHECK(d13 <= d12 + d23 + 1e-9);
    // vanishes exactly on proportional pairs
    double s = std::exp(rng.gaussian());
    CHECK(hilbert_distance(SymTensor(p1), SymTensor((s * p1).eval())) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("restrict computes frame-pullbacks") {
  Quadric q(diag4(1, -1, 1, -1));
  Mat f = Mat::Zero(4, 2);
  f(0, 0) = 1;
  f(2, 1) = 1;  // columns e1, e3
  Quadric r = restrict_quadric(q, f);
  CHECK((r.mat - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0));

  Mat bad = Mat::Zero(4, 2);
  bad.col(0) = Vec::Ones(4);
  bad.col(1) = 2 * Vec::Ones(4);
  CHECK_THROWS_AS(restrict_quadric(q, bad), Error);
}

TEST_CASE("extremal points of a trace slice of the PSD cone are rank one") {
  // Lemma 3.3 check: maximize a random linear functional over
  // K = {p PSD : Tr(qp) = 0, Tr(p) = 1} by rank-agnostic projected ascent;
  // the maximizer must be numerically rank one, and its value must match
  // the maximum over the rank-one points of K (the hull equality).
  Rng rng(33);
  const int d = 4;
  Mat q = rng.gaussian_sym(d);
  if (lambda_min(q) > 0) q -= 2 * lambda_min(q) * Mat::Identity(d, d);

  Vec nq = svec(q);
  Vec ni = svec(Mat::Identity(d, d));
  Mat N(nq.size(), 2);
  N << ni, nq;
  Mat gram_inv = (N.transpose() * N).inverse();
  auto project_affine = [&](Vec x) {
    Vec resid = N.transpose() * x - Eigen::Vector2d(1.0, 0.0);
    return Vec(x - N * (gram_inv * resid));
  };
  auto project_psd = [&](const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    Vec ev = es.eigenvalues().cwiseMax(0.0);
    return Mat(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  };

  auto project_k = [&](Mat m, int rounds) {
    for (int alt = 0; alt < rounds; ++alt) {
      Mat next = project_psd(unsvec(project_affine(svec(m)), d));
      if ((next - m).norm() < 1e-15) return next;
      m = next;
    }
    return m;
  };

  for (int trial = 0; trial < 6; ++trial) {
    Mat C = rng.gaussian_sym(d);
    Mat p = project_k(Mat::Identity(d, d) / d, 400);
    double step = 0.2;
    for (int it = 0; it < 8000 && step > 1e-15; ++it) {
      Mat pn = project_k(p + step * C, 120);
      if ((C * pn).trace() > (C * p).trace() + 1e-15)
        p = pn;
      else
        step *= 0.8;
    }
    // vertex ride with annealed steps: the spectrahedron is curved at the
    // vertex, so the stationary offset scales with the step size
    for (double ride = 2e-3; ride > 1e-10; ride *= 0.6)
      for (int it = 0; it < 60; ++it) p = project_k(p + ride * C, 60);
    p = project_k(p, 400);

    CHECK(std::abs((q * p).trace()) < 1e-8);
    CHECK(std::abs(p.trace() - 1.0) < 1e-8);
    Vec sv = p.jacobiSvd().singularValues();
    CHECK(sv(1) / sv(0) < 1e-8);

    // independent maximum over the rank-one points {v v^T : q(v,v) = 0, |v| = 1}
    double best = -1e300;
    for (int s = 0; s < 400; ++s) {
      Vec v = rng.sphere_vec(d);
      // walk v onto the quadric along the gradient of q(v,v), then polish
      for (int it = 0; it < 200; ++it) {
        double f = v.dot(q * v);
        Vec g = 2 * q * v;
        g -= g.dot(v) * v;
        if (g.norm() < 1e-14) break;
        v = (v - (f / g.dot(g)) * g).normalized();
        if (std::abs(v.dot(q * v)) < 1e-14) break;
      }
      if (std::abs(v.dot(q * v)) > 1e-12) continue;
      // ascent of v^T C v within the constraint surface
      for (int it = 0; it < 500; ++it) {
        Vec gc = 2 * C * v, gq = 2 * q * v;
        gc -= gc.dot(v) * v;
        gq -= gq.dot(v) * v;
        if (gq.norm() > 1e-13) gc -= gc.dot(gq) / gq.dot(gq) * gq;
        if (gc.norm() < 1e-13) break;
        Vec vn = (v + 0.02 * gc).normalized();
        double f = vn.dot(q * vn);
        Vec g2 = 2 * q * vn;
        g2 -= g2.dot(vn) * vn;
        if (g2.norm() > 1e-13) vn = (vn - (f / g2.dot(g2)) * g2).normalized();
        if (vn.dot(C * vn) > v.dot(C * v))
          v = vn;
        else
          break;
      }
      best = std::max(best, v.dot(C * v));
    }
    CHECK((C * p).trace() == doctest::Approx(best).epsilon(1e-3));
  }
}
