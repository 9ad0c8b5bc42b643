#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pq/flows.hpp"

using namespace pq;
using h2::cplx;

namespace {

double pencil_gap(const Pencil& a, const Pencil& b) {
  // principal-angle style distance of the svec spans
  Mat va(svec(a.basis[0].mat).size(), 2), vb(va.rows(), 2);
  va.col(0) = svec(a.basis[0].mat).normalized();
  va.col(1) = svec(a.basis[1].mat);
  va.col(1) = (va.col(1) - va.col(1).dot(va.col(0)) * va.col(0)).normalized();
  vb.col(0) = svec(b.basis[0].mat).normalized();
  vb.col(1) = svec(b.basis[1].mat);
  vb.col(1) = (vb.col(1) - vb.col(1).dot(vb.col(0)) * vb.col(0)).normalized();
  return (va * va.transpose() - vb * vb.transpose()).norm();
}

}  // namespace

TEST_CASE("averaged field signs, linearity and quadrature convergence") {
  for (int n : {1, 2}) {
    Embedding emb(EmbedKind::irreducible, n);
    PencilField field = PencilField::averaged(emb, 256);
    cplx x(0.3, 1.4);
    double phi = 0.8;
    Quadric qv = field.quadric(x, phi);

    // Prop 6.13: q_v negative on l_v and positive on l_{-v}
    Mat fv = emb.boundary(h2::geodesic_endpoint(x, phi)).orthonormal();
    Mat fmv = emb.boundary(h2::geodesic_endpoint(x, phi + M_PI)).orthonormal();
    CHECK(sym_eigenvalues(symmetrized(fv.transpose() * qv.mat * fv)).maxCoeff() < 0);
    CHECK(lambda_min(symmetrized(fmv.transpose() * qv.mat * fmv)) > 0);

    // the fiber map is linear in the tangent direction
    Mat q0 = field.quadric(x, 0.0).mat, q90 = field.quadric(x, M_PI / 2).mat;
    CHECK((qv.mat - std::cos(phi) * q0 - std::sin(phi) * q90).norm() < 1e-12 * qv.mat.norm());

    // trapezoid quadrature of the analytic integrand is spectrally accurate
    PencilField fine = PencilField::averaged(emb, 512);
    CHECK((fine.quadric(x, phi).mat - qv.mat).norm() < 1e-10 * qv.mat.norm());
  }
}

TEST_CASE("averaged field is equivariant") {
  FuchsianRep rep = build_schottky(2.0, 2.0, 1.0);
  Rng rng(7);
  SymplecticSpace s1(1);
  for (int n : {1, 2, 3}) {
    for (auto kind : {EmbedKind::irreducible, EmbedKind::diagonal}) {
      Embedding emb(kind, n);
      PencilField field = PencilField::averaged(emb, 256);
      for (int t = 0; t < 6; ++t) {
        // keep both the point and its image in the well-conditioned window
        cplx x(rng.gaussian(0.3), std::exp(rng.gaussian(0.25)));
        double phi = rng.uniform(0.0, 2 * M_PI);
        h2::Mat2 g = (t % 2 == 0) ? rep.word({1 + t % 2})
                                  : h2::Mat2(random_symplectic(s1, rng, 0.35));
        h2::UnitTangent ut{x, phi};
        h2::UnitTangent gut = h2::push(g, ut);
        Mat gi = emb.lift(g).inverse();
        Mat lhs = field.quadric(gut.x, gut.phi).mat;
        Mat rhs = gi.transpose() * field.quadric(x, phi).mat * gi;
        CHECK((lhs - rhs).norm() < 1e-8 * lhs.norm());
      }
    }
  }
}

TEST_CASE("averaged and gauss pencils classify as maximal") {
  for (int n : {1, 2}) {
    for (auto kindcase : {0, 1}) {
      Embedding emb(EmbedKind::irreducible, n);
      PencilField field = kindcase == 0 ? PencilField::averaged(emb, 128)
                                        : PencilField::gauss(emb);
      PencilClass pc = classify(field.pencil(cplx(0.2, 1.1)), 1e-9, {5, 48, 2000});
      CHECK(pc.mixed == Tri::yes);
      CHECK(pc.nn_regular == Tri::yes);
      CHECK(pc.omega_regular == Tri::yes);
      CHECK(pc.maximal == Tri::yes);
      REQUIRE(pc.winding.has_value());
      CHECK(std::abs(*pc.winding) == n);
    }
  }
}

TEST_CASE("geodesic flow: identity, composition, quasi-geodesy") {
  Embedding emb(EmbedKind::irreducible, 2);
  PencilField field = PencilField::averaged(emb, 128);
  FlowSample s0 = flow_start(field, cplx(0.4, 0.8), 1.1);

  FlowSample same = geodesic_flow_step(s0, field, 0.0);
  CHECK(std::abs(same.ut.x - s0.ut.x) < 1e-12);
  CHECK((same.q.mat - s0.q.mat).norm() < 1e-12);

  FlowSample one = geodesic_flow_step(s0, field, 0.7);
  FlowSample two = geodesic_flow_step(one, field, 0.5);
  FlowSample direct = geodesic_flow_step(s0, field, 1.2);
  CHECK(std::abs(two.ut.x - direct.ut.x) < 1e-10);
  CHECK((two.q.mat - direct.q.mat).norm() < 1e-10 * direct.q.mat.norm());

  // flow lines are unit-speed geodesics
  for (double t : {0.5, 1.5, 3.0})
    CHECK(h2::dist(s0.ut.x, geodesic_flow_step(s0, field, t).ut.x) ==
          doctest::Approx(t).epsilon(1e-10));
}

TEST_CASE("Def 4.1 nestedness along flow lines") {
  Rng rng(23);
  for (int n : {1, 2}) {
    Embedding emb(EmbedKind::irreducible, n);
    PencilField field = PencilField::averaged(emb, 128);
    for (int trial = 0; trial < 10; ++trial) {
      cplx x(rng.gaussian(0.5), std::exp(rng.gaussian(0.4)));
      FlowSample s0 = flow_start(field, x, rng.uniform(0.0, 2 * M_PI));
      for (double t : {0.1, 0.5, 1.0}) {
        FlowSample st = geodesic_flow_step(s0, field, t);
        CHECK(lambda_min(st.q.mat - s0.q.mat) > 0);
        CHECK(nested_margin_scaled(s0.q, st.q) > 0);
      }
      // not only single steps: every sampled forward increment nests
      FlowSample a = geodesic_flow_step(s0, field, 0.4);
      FlowSample b = geodesic_flow_step(s0, field, 1.3);
      CHECK(lambda_min(b.q.mat - a.q.mat) > 0);
    }
  }
}

TEST_CASE("Lemma 4.2 proxy: the pencil never repeats along a flow line") {
  Embedding emb(EmbedKind::irreducible, 1);
  PencilField field = PencilField::averaged(emb, 128);
  std::vector<Pencil> line;
  for (double t = 0.0; t <= 3.0; t += 0.5)
    line.push_back(field.pencil(h2::flow({cplx(0.1, 1.0), 0.7}, t).x));
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < line.size(); ++i)
    for (std::size_t j = i + 1; j < line.size(); ++j)
      min_gap = std::min(min_gap, pencil_gap(line[i], line[j]));
  CHECK(min_gap > 1e-3);
}

TEST_CASE("contraction audit along axes: alpha > 0 and the limit map") {
  FuchsianRep rep = build_schottky(2.2, 2.2, 1.0);
  for (int n : {1, 2}) {
    Embedding emb(EmbedKind::irreducible, n);
    PencilField field = PencilField::averaged(emb, 128);
    AxisFlow axis(field, rep.generators[0]);
    std::vector<double> tg;
    for (double t = 1.0; t <= 8.0; t += 1.0) tg.push_back(t);
    ContractionReport cr = contraction_audit(axis, tg, 900, 5);
    CHECK(cr.nested_ok);
    CHECK(cr.alpha > 0);
    CHECK(cr.ls_slope > 0);
    CHECK(cr.superadd_slack < 0.05 * std::abs(cr.log_cr.back()));
    if (n == 1) CHECK(cr.ls_dev_rel < 0.05);

    // Thm 5.4 limit formula: survivors collapse onto the boundary
    // Lagrangian of the forward endpoint; the reversed flow (the inverse
    // word's axis) recovers the repelling one. The horizon balances the
    // geometric width e^{-T} against the fp evaluation floor sqrt(eps) e^{T}
    double tmax = n == 1 ? 12.0 : 9.0;
    for (bool reversed : {false, true}) {
      AxisFlow a = reversed ? AxisFlow(field, rep.generators[0].inverse().eval()) : axis;
      std::vector<Quadric> seq;
      for (double t = 0.0; t <= tmax + 1e-9; t += 0.5) seq.push_back(a.at(t));
      LimitSubspace ls = limit_subspace(seq, 1e-13, 5000, 7);
      REQUIRE(ls.frame.cols() == n);
      Mat xi = emb.boundary(a.forward_endpoint()).orthonormal();
      Vec sv = (ls.frame.transpose() * xi).jacobiSvd().singularValues();
      CHECK(std::acos(std::clamp(sv(sv.size() - 1), -1.0, 1.0)) < 1e-3);
    }
  }
}

TEST_CASE("winding audit: projected fiber circles wind once") {
  for (int n : {1, 2}) {
    Embedding emb(EmbedKind::irreducible, n);
    PencilField field = PencilField::averaged(emb, 64);
    Rng rng(31);
    for (int t = 0; t < 5; ++t) {
      cplx x(rng.gaussian(0.5), std::exp(rng.gaussian(0.3)));
      int w = winding_audit(field, x, 0.3);
      CHECK(std::abs(w) == 1);
      // Remark 4.4: the fiber-circle orientation matches the surface one:
      // theta -> q(x, theta) winds +1 in the (q(x,0), q(x,pi/2)) basis by
      // linearity, and the projected circle winds +1 spatially
      CHECK(w == 1);
    }
  }
  // degenerate projected circle
  Embedding emb(EmbedKind::irreducible, 1);
  PencilField field = PencilField::averaged(emb, 64);
  CHECK_THROWS_AS(winding_audit(field, cplx(0, 1), 0.0), Error);
}

TEST_CASE("gauss map geodesic closed forms (Prop 7.1)") {
  {
    Vec lam(2);
    lam << 1, -1;
    for (double t : {0.0, 1.0}) {
      GaussGeodesic g = gauss_map_geodesic(lam, t);
      CHECK(g.q.mat(0, 0) == doctest::Approx(-std::exp(-t)));
      CHECK(g.q.mat(1, 1) == doctest::Approx(std::exp(t)));
      CHECK(lambda_min(g.dq) > 0);  // derivative PD when all lambda nonzero
      // central finite differences against the closed form
      const double h = 1e-5;
      Mat fd = (gauss_map_geodesic(lam, t + h).q.mat - gauss_map_geodesic(lam, t - h).q.mat) /
               (2 * h);
      CHECK((fd - g.dq).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  {
    Vec lam(4);
    lam << 1, 0, -1, 0;
    GaussGeodesic g = gauss_map_geodesic(lam, 0.3);
    CHECK(lambda_min(g.dq) == doctest::Approx(0.0));  // PSD-degenerate
    // the degenerate derivative is not a fitting direction of the geodesic
    // Gauss line <q_t>
    TangentVector v(Pencil(4, {g.q}), {g.dq});
    FittingDirectionResult r = fitting_direction(v, 1500, 3);
    CHECK(r.fitting != Tri::yes);
    CHECK(r.dual_check != Tri::yes);
  }
  {
    Vec bad(2);
    bad << 1, 1;
    CHECK_THROWS_AS(gauss_map_geodesic(bad, 0.0), Error);
  }
}

TEST_CASE("fitting direction of the regular gauss geodesic") {
  // all lambda nonzero: the derivative class contains a PD element, so the
  // tangent of t -> <q_t> is fitting (Prop 7.1)
  Vec lam(4);
  lam << 2, 1, -1, -2;
  GaussGeodesic g = gauss_map_geodesic(lam, 0.2);
  REQUIRE(g.pencil.has_value());  // q_t and its derivative span a plane
  FittingDirectionResult r =
      fitting_direction(TangentVector(Pencil(4, {g.q}), {g.dq}), 2000, 11);
  CHECK(r.fitting == Tri::yes);
  CHECK(r.dual_check == Tri::yes);
}

TEST_CASE("X_Sp membership, tangent frame, tangent regularity") {
  SymplecticSpace sp(2);
  SymTensor base(Mat::Identity(4, 4));
  CHECK(sp_membership(sp, base) == doctest::Approx(0.0));

  auto frame = sp_tangent_frame(sp, base);
  CHECK(frame.size() == 6);  // n(n+1)
  // frame directions are genuine tangents: membership stays second order
  for (const auto& t : frame) {
    double eps = 1e-5;
    Mat moved = base.mat + eps * t / t.norm();
    CHECK(sp_membership(sp, SymTensor(symmetrized(moved))) < 10 * eps * eps);
  }

  {
    // normal-form tangent with all lambda nonzero: omega-regular with
    // witnesses; the x-plane and y-plane are positive/negative witnesses
    Mat xd = Mat::Zero(4, 4);
    xd(0, 0) = 1;
    xd(1, 1) = 2;
    xd(2, 2) = -1;
    xd(3, 3) = -2;
    TangentRegularity tr = tangent_regularity(sp, base, xd, 5);
    CHECK(tr.regular == Tri::yes);
    REQUIRE(tr.positive.has_value());
    REQUIRE(tr.negative.has_value());
    CHECK(tr.positive->margin > 0);
    CHECK(tr.negative->margin > 0);
    Mat q = -xd;  // corresponding quadric at the identity
    Mat fy = Mat::Zero(4, 2);
    fy(2, 0) = fy(3, 1) = 1;
    CHECK(lambda_min(symmetrized(fy.transpose() * q * fy)) > 0);  // positive on <y_i>
    Mat fx = Mat::Zero(4, 2);
    fx(0, 0) = fx(1, 1) = 1;
    CHECK(sym_eigenvalues(symmetrized(fx.transpose() * q * fx)).maxCoeff() < 0);  // negative on <x_i>
  }
  {
    Mat xz = Mat::Zero(4, 4);
    xz(0, 0) = 1;
    xz(2, 2) = -1;  // lambda_2 = 0
    CHECK(tangent_regularity(sp, base, xz, 5).regular == Tri::no);
  }
  {
    // retraction: noisy tensors return to the manifold, staying PD
    Rng rng(3);
    for (int t = 0; t < 6; ++t) {
      Mat noisy = Mat::Identity(4, 4) + 0.2 * rng.gaussian_sym(4);
      Mat y = sp_retract(sp, noisy);
      CHECK(sp_membership(sp, SymTensor(y)) < 1e-9);
      CHECK(lambda_min(y) > 0);
    }
  }
}

TEST_CASE("transversality of omega-regular pencil slices with X_Sp (Lemma 7.4)") {
  SymplecticSpace sp(2);
  Embedding emb(EmbedKind::irreducible, 2);
  PencilField field = PencilField::averaged(emb, 96);
  Rng rng(41);
  int done = 0;
  for (int trial = 0; trial < 8 && done < 4; ++trial) {
    cplx x(rng.gaussian(0.4), std::exp(rng.gaussian(0.3)));
    Pencil P = field.pencil(x);
    PencilClass pc = classify(P, 1e-9, {11, 48, 1500});
    if (pc.omega_regular != Tri::yes) continue;  // precondition of the audit
    TransversalityReport tr = transversality_audit(sp, P, SymTensor(Mat::Identity(4, 4)));
    CHECK(tr.status == Tri::yes);
    CHECK(tr.gap > 1e-6);
    CHECK(tr.membership_residual < 1e-9);
    ++done;
  }
  CHECK(done == 4);
}

TEST_CASE("fibration audit: the base-locus criterion fibers Omega for n = 2") {
  FuchsianRep rep = build_schottky(2.5, 2.5, 1.0);
  Embedding emb(EmbedKind::irreducible, 2);
  PencilField field = PencilField::averaged(emb, 64);
  FibrationReport fr = fibration_audit(field, rep, 30, 8, 3.4, 64, 11);
  CHECK(fr.interior_samples == 30);
  CHECK(fr.interior_hits_one == 30);
  CHECK(fr.limit_hits_zero == fr.limit_samples);
}

TEST_CASE("fibration audit: mixed pencils on R^2 have empty base loci") {
  // at n = 1 a common zero v of the pencil would put v v^T inside the
  // annihilator, which is spanned by a positive tensor; so no point of
  // RP^1 ever lies on a fiber
  FuchsianRep rep = build_schottky(2.5, 2.5, 1.0);
  Embedding emb(EmbedKind::irreducible, 1);
  PencilField field = PencilField::averaged(emb, 64);
  FibrationReport fr = fibration_audit(field, rep, 20, 8, 3.2, 56, 13);
  CHECK(fr.interior_hits_one == 0);
  CHECK(fr.limit_hits_zero == fr.limit_samples);
}
