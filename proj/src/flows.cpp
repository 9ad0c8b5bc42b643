#include "pq/flows.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace pq {

using h2::cplx;

PencilField PencilField::averaged(const Embedding& emb, int quadrature) {
  if (quadrature < 64)
    throw Error(ErrorCode::malformed_input, "averaged field: quadrature must be >= 64");
  return PencilField(Kind::averaged, emb, quadrature);
}

PencilField PencilField::gauss(const Embedding& emb) {
  return PencilField(Kind::gauss, emb, 0);
}

PencilField::Fiber PencilField::fiber(cplx x) const {
  Fiber f;
  f.x = x;
  if (kind_ == Kind::averaged) {
    const SymplecticSpace& sp = emb_->space();
    const int K = quadrature_;
    f.nodes.reserve(K);
    f.weight = 2 * M_PI / K;
    for (int k = 0; k < K; ++k) {
      double phi = 2 * M_PI * k / K;
      // J is rotation by -pi/2 here; this matches the maximality
      // orientation used by maslov_index (see flow tests)
      Eigen::Vector2d zp = h2::geodesic_endpoint(x, phi - M_PI / 2);
      Eigen::Vector2d zm = h2::geodesic_endpoint(x, phi + M_PI / 2);
      Lagrangian lp = emb_->boundary(zp);
      Lagrangian lm = emb_->boundary(zm);
      try {
        f.nodes.push_back(pair_quadric(sp, lp, lm).mat);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::transversality) throw;
        // measure-zero node hit a non-transverse pair: nudge by half a step
        double phi2 = phi + M_PI / K;
        lp = emb_->boundary(h2::geodesic_endpoint(x, phi2 - M_PI / 2));
        lm = emb_->boundary(h2::geodesic_endpoint(x, phi2 + M_PI / 2));
        f.nodes.push_back(pair_quadric(sp, lp, lm).mat);
      }
    }
  } else {
    f.frame_inv = emb_->lift(h2::frame_at(x)).inverse();
  }
  return f;
}

Mat PencilField::quadric_mat(const Fiber& f, double phi) const {
  if (kind_ == Kind::averaged) {
    const int K = quadrature_;
    Mat q = Mat::Zero(dim(), dim());
    for (int k = 0; k < K; ++k) {
      double w = std::cos(phi - 2 * M_PI * k / K);
      q += w * f.nodes[k];
    }
    return (f.weight * q).eval();
  }
  // gauss: derivative of the dual immersion along the geodesic direction
  h2::Mat2 xa;
  xa << 0.5, 0, 0, -0.5;
  h2::Mat2 r = h2::rotation(M_PI / 2 - phi);
  h2::Mat2 xphi = r * xa * r.transpose();
  Mat d = emb_->dlift(xphi);
  return (-f.frame_inv.transpose() * (d + d.transpose()) * f.frame_inv).eval();
}

Quadric PencilField::quadric(cplx x, double phi) const {
  Fiber f = fiber(x);
  return Quadric(dim(), symmetrized(quadric_mat(f, phi)));
}

Pencil PencilField::pencil(cplx x) const {
  Fiber f = fiber(x);
  Quadric q0(dim(), symmetrized(quadric_mat(f, 0.0)));
  Quadric q1(dim(), symmetrized(quadric_mat(f, M_PI / 2)));
  return Pencil(dim(), {q0, q1});
}

FlowSample flow_start(const PencilField& field, cplx x, double phi) {
  return {h2::UnitTangent{x, phi}, field.quadric(x, phi)};
}

FlowSample geodesic_flow_step(const FlowSample& s, const PencilField& field, double t) {
  h2::UnitTangent ut = h2::flow(s.ut, t);
  return {ut, field.quadric(ut.x, ut.phi)};
}

AxisFlow::AxisFlow(const PencilField& field, const h2::Mat2& gamma) : field_(&field) {
  Eigen::EigenSolver<h2::Mat2> es(gamma);
  if (std::abs(es.eigenvalues()(0).imag()) > 1e-10 || std::abs(gamma.trace()) <= 2.0)
    throw Error(ErrorCode::malformed_input, "AxisFlow: element is not hyperbolic");
  int big = std::abs(es.eigenvalues()(0).real()) >= std::abs(es.eigenvalues()(1).real()) ? 0 : 1;
  double lam = std::abs(es.eigenvalues()(big).real());
  length_ = 2.0 * std::log(lam);
  Eigen::Vector2d vp = es.eigenvectors().col(big).real().normalized();
  Eigen::Vector2d vm = es.eigenvectors().col(1 - big).real().normalized();
  zplus_ = vp;
  zminus_ = vm;

  // apex of the axis: for finite endpoints a < b the semicircle top, for a
  // vertical axis the height-1 point
  auto finite = [](const Eigen::Vector2d& p) { return std::abs(p(1)) > 1e-8 * std::abs(p(0)); };
  h2::cplx x0;
  double phi0;
  if (finite(vp) && finite(vm)) {
    double a = vp(0) / vp(1), b = vm(0) / vm(1);
    double c = 0.5 * (a + b), r = 0.5 * std::abs(a - b);
    x0 = h2::cplx(c, r);
    phi0 = (a > b) ? 0.0 : M_PI;  // horizontal at the apex, toward the attracting end
  } else if (finite(vm)) {
    x0 = h2::cplx(vm(0) / vm(1), 1.0);
    phi0 = M_PI / 2;  // straight up toward infinity = attracting
  } else {
    x0 = h2::cplx(vp(0) / vp(1), 1.0);
    phi0 = -M_PI / 2;  // attracting end is the finite point below
  }
  start_ = {x0, phi0};
  if (h2::dist(x0, h2::cplx(0, 1)) > 6.0)
    throw Error(ErrorCode::malformed_input,
                "AxisFlow: axis passes too far from the base point for direct evaluation");

  Mat g = field.embedding().lift(gamma);
  Mat gi = g.inverse();
  push_ = gi.transpose();
  push_inv_ = g.transpose();
}

Quadric AxisFlow::at(double t) const {
  double k = std::floor(t / length_);
  double tau = t - k * length_;
  h2::UnitTangent s = h2::flow(start_, tau);
  Mat q = field_->quadric(s.x, s.phi).mat;
  long reps = static_cast<long>(k);
  if (reps >= 0) {
    for (long i = 0; i < reps; ++i) q = push_ * q * push_.transpose();
  } else {
    for (long i = 0; i < -reps; ++i) q = push_inv_ * q * push_inv_.transpose();
  }
  return Quadric(field_->dim(), symmetrized(q));
}

double nested_margin_scaled(const Quadric& q1, const Quadric& q2, double log_width) {
  Mat a = q1.mat / q1.mat.norm();
  Mat b = q2.mat / q2.mat.norm();
  auto margin = [&](double s) { return lambda_min(s * b - a); };
  double lo = std::exp(-log_width), hi = std::exp(log_width);
  for (int it = 0; it < 120; ++it) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (margin(m1) < margin(m2))
      lo = m1;
    else
      hi = m2;
  }
  return margin(0.5 * (lo + hi));
}

namespace {

ContractionReport contraction_core(const std::function<Quadric(double)>& q_at,
                                   const std::vector<double>& tgrid, int cr_budget,
                                   std::uint64_t seed) {
  ContractionReport rep;
  rep.nested_ok = true;

  std::vector<Quadric> qs = {q_at(0.0)};
  std::vector<double> times = {0.0};
  for (double t : tgrid) {
    qs.push_back(q_at(t));
    times.push_back(t);
  }
  for (std::size_t j = 1; j < qs.size(); ++j) {
    Mat diff = qs[j].mat - qs[j - 1].mat;
    double m = lambda_min(diff);
    rep.nested_margins.push_back(m);
    if (m < -1e-10 * diff.norm()) {
      rep.nested_ok = false;
      if (!rep.failed_t) rep.failed_t = times[j];
    }
  }
  if (!rep.nested_ok) return rep;

  for (std::size_t j = 1; j < qs.size(); ++j) {
    NestedPair np{qs[0], qs[j], std::max(rep.nested_margins[j - 1], 0.0)};
    CrossRatioResult cr = cross_ratio_distance(np, cr_budget, mix64(seed + j));
    rep.times.push_back(times[j]);
    rep.log_cr.push_back(std::log(cr.value));
  }

  // alpha: the Thm 5.4 estimate log cr >= alpha (t - 1) on the grid
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rep.times.size(); ++j)
    if (rep.times[j] > 1.0) alpha = std::min(alpha, rep.log_cr[j] / (rep.times[j] - 1.0));
  rep.alpha = std::isfinite(alpha) ? alpha : 0.0;

  {  // least squares of log cr against t
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = static_cast<double>(rep.times.size());
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
      sx += rep.times[j];
      sy += rep.log_cr[j];
      sxx += rep.times[j] * rep.times[j];
      sxy += rep.times[j] * rep.log_cr[j];
    }
    double denom = cnt * sxx - sx * sx;
    rep.ls_slope = (cnt * sxy - sx * sy) / denom;
    double intercept = (sy - rep.ls_slope * sx) / cnt;
    double dev = 0, scale = 0;
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
      double fit = rep.ls_slope * rep.times[j] + intercept;
      dev = std::max(dev, std::abs(rep.log_cr[j] - fit));
      scale = std::max(scale, std::abs(rep.log_cr[j]));
    }
    rep.ls_dev_rel = (scale > 0) ? dev / scale : 0.0;
  }

  // Prop 5.2 superadditivity along the flow line on consecutive pairs
  double slack = 0.0;
  for (std::size_t j = 0; j + 1 < rep.times.size(); ++j) {
    Quadric mid = q_at(rep.times[j]);
    Quadric end = q_at(rep.times[j + 1]);
    NestedPair seg{mid, end, lambda_min(end.mat - mid.mat)};
    if (seg.gap_margin <= 0) continue;
    CrossRatioResult cr = cross_ratio_distance(seg, cr_budget, mix64(seed ^ (j + 77)));
    slack = std::max(slack, rep.log_cr[j] + std::log(cr.value) - rep.log_cr[j + 1]);
  }
  rep.superadd_slack = slack;
  return rep;
}

}  // namespace

ContractionReport contraction_audit(const PencilField& field, const FlowSample& start,
                                    const std::vector<double>& tgrid, int cr_budget,
                                    std::uint64_t seed) {
  auto q_at = [&](double t) {
    return t == 0.0 ? start.q : geodesic_flow_step(start, field, t).q;
  };
  return contraction_core(q_at, tgrid, cr_budget, seed);
}

ContractionReport contraction_audit(const AxisFlow& axis, const std::vector<double>& tgrid,
                                    int cr_budget, std::uint64_t seed) {
  return contraction_core([&](double t) { return axis.at(t); }, tgrid, cr_budget, seed);
}

int winding_audit(const PencilField& field, cplx x, double t_small, int circle_samples) {
  (void)field;
  std::vector<cplx> pts;
  for (int k = 0; k < circle_samples; ++k) {
    double theta = 2 * M_PI * k / circle_samples;
    h2::UnitTangent ut = h2::flow({x, theta}, t_small);
    pts.push_back(ut.x);
  }
  double total = 0.0;
  cplx prev = pts[0] - x;
  if (std::abs(prev) < 1e-12)
    throw Error(ErrorCode::malformed_input, "winding_audit: projected circle degenerates; decrease t");
  for (int k = 1; k <= circle_samples; ++k) {
    cplx cur = pts[k % circle_samples] - x;
    if (std::abs(cur) < 1e-12)
      throw Error(ErrorCode::malformed_input, "winding_audit: projected circle degenerates; decrease t");
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

GaussGeodesic gauss_map_geodesic(const Vec& lambda, double t) {
  const int d = static_cast<int>(lambda.size());
  if (std::abs(lambda.sum()) > 1e-9 * (1.0 + lambda.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::malformed_input, "gauss_map_geodesic: eigenvalues must sum to zero");
  Mat q = Mat::Zero(d, d), dq = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    q(i, i) = -lambda(i) * std::exp(-t * lambda(i));
    dq(i, i) = lambda(i) * lambda(i) * std::exp(-t * lambda(i));
  }
  GaussGeodesic out{Quadric(d, q), dq, std::nullopt};
  if (d >= 2 && d % 2 == 0) {
    // the pencil spanned by q_t and its derivative, when independent
    Vec vq = svec(q).normalized(), vd = svec(dq);
    Vec res = vd - vd.dot(vq) * vq;
    if (res.norm() > 1e-9 * vd.norm())
      out.pencil = Pencil(d, {out.q, Quadric(d, dq)});
  }
  return out;
}

double sp_membership(const SymplecticSpace& sp, const SymTensor& X) {
  Mat k = X.mat * sp.omega;
  return (k * k + Mat::Identity(sp.dim(), sp.dim())).norm();
}

std::vector<Mat> sp_tangent_frame(const SymplecticSpace& sp, const SymTensor& X) {
  const int n = sp.n, d = sp.dim();
  if (lambda_min(X.mat) <= 0)
    throw Error(ErrorCode::cone_membership, "sp_tangent_frame: X must be positive definite");
  if (sp_membership(sp, X) > 1e-6 * X.mat.norm())
    throw Error(ErrorCode::malformed_input, "sp_tangent_frame: X is not on X_Sp");
  Eigen::SelfAdjointEigenSolver<Mat> es(X.mat);
  Mat g = es.operatorSqrt();
  std::vector<Mat> out;
  auto push_pair = [&](const Mat& p, const Mat& q) {
    Mat m = Mat::Zero(d, d);
    m.topLeftCorner(n, n) = p;
    m.bottomRightCorner(n, n) = -p;
    m.topRightCorner(n, n) = q;
    m.bottomLeftCorner(n, n) = q;
    out.push_back(symmetrized(g * m * g.transpose()));
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = e(j, i) = 1.0;
      push_pair(e, Mat::Zero(n, n));
      push_pair(Mat::Zero(n, n), e);
    }
  return out;
}

Mat sp_retract(const SymplecticSpace& sp, Mat S, int iters) {
  const int d = sp.dim();
  S = symmetrized(S);
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  Vec ev = es.eigenvalues();
  double floor = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < d; ++i) ev(i) = std::max(ev(i), floor);
  Mat X = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  for (int it = 0; it < iters; ++it) {
    double res = (X * sp.omega * X * sp.omega + Mat::Identity(d, d)).norm();
    if (res < 1e-12) break;
    X = symmetrized(0.5 * (X - sp.omega * X.inverse() * sp.omega));
  }
  return X;
}

TangentRegularity tangent_regularity(const SymplecticSpace& sp, const SymTensor& X,
                                     const Mat& Xdot, std::uint64_t seed) {
  TangentRegularity out;
  Mat xinv = X.mat.inverse();
  Mat q = symmetrized((-xinv * symmetrized(Xdot) * xinv).eval());
  Vec ev = sym_eigenvalues(q);
  double scale = ev.cwiseAbs().maxCoeff();
  if (scale < 1e-300) {
    out.regular = Tri::no;
    return out;
  }
  out.margin = ev.cwiseAbs().minCoeff() / scale;
  if (out.margin > 1e-8) {
    out.regular = Tri::yes;
    Quadric qq(sp.dim(), q);
    out.positive = positive_lagrangian(sp, qq, seed);
    Quadric qn(sp.dim(), (-q).eval());
    out.negative = positive_lagrangian(sp, qn, mix64(seed ^ 0x9e1));
  } else if (out.margin < 1e-10) {
    out.regular = Tri::no;
  } else {
    out.regular = Tri::inconclusive;
  }
  return out;
}

TransversalityReport transversality_audit(const SymplecticSpace& sp, const Pencil& P,
                                          const SymTensor& X0, int iters) {
  TransversalityReport rep;
  const int d = sp.dim();
  if (P.dim != d)
    throw Error(ErrorCode::malformed_input, "transversality_audit: dimension mismatch");

  // orthonormal pencil directions in svec coordinates
  std::vector<Vec> dirs;
  for (const auto& q : P.basis) dirs.push_back(svec(q.mat));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) dirs[i] -= dirs[i].dot(dirs[j]) * dirs[j];
    dirs[i].normalize();
  }

  Mat Y = X0.mat;
  for (int it = 0; it < iters; ++it) {
    Vec y = svec(Y);
    for (const auto& dir : dirs) y -= y.dot(dir) * dir;
    Y = unsvec(y, d);
    Y = sp_retract(sp, Y, 40);
    double nrm = Y.norm();
    rep.pencil_residual = 0.0;
    for (const auto& q : P.basis)
      rep.pencil_residual = std::max(rep.pencil_residual,
                                     std::abs(pairing(q.mat, Y)) / (q.mat.norm() * nrm));
    rep.membership_residual = sp_membership(sp, SymTensor(d, Y)) / (nrm * nrm);
    if (rep.pencil_residual < 1e-10 && rep.membership_residual < 1e-9) break;
  }
  if (!(rep.pencil_residual < 1e-10 && rep.membership_residual < 1e-9)) {
    rep.status = Tri::inconclusive;
    return rep;
  }
  rep.point = Y;

  // transversality: P° + (T_Y X_Sp + R Y) must be all of S^2 V
  const int N = d * (d + 1) / 2;
  std::vector<SymTensor> ann = annihilator(P);
  std::vector<Mat> tans = sp_tangent_frame(sp, SymTensor(d, Y));
  Mat W(N, static_cast<int>(ann.size() + tans.size()) + 1);
  int c = 0;
  for (const auto& p : ann) W.col(c++) = svec(p.mat).normalized();
  for (const auto& t : tans) W.col(c++) = svec(t).normalized();
  W.col(c++) = svec(Y).normalized();
  Vec sv = W.jacobiSvd().singularValues();
  rep.gap = sv(N - 1);
  rep.status = rep.gap > 1e-8 ? Tri::yes : Tri::inconclusive;
  return rep;
}

FibrationReport fibration_audit(const PencilField& field, const FuchsianRep& rep,
                                int interior_samples, int limit_samples, double mesh_radius,
                                int mesh_steps, std::uint64_t seed) {
  const int dimv = field.dim();
  FibrationReport out;

  // polar mesh of the hyperbolic disk around i (Poincare disk chart)
  const int nr = mesh_steps, na = 2 * mesh_steps;
  auto to_h = [](cplx w) { return cplx(0, 1) * (cplx(1, 0) + w) / (cplx(1, 0) - w); };
  std::vector<std::vector<Mat>> q1(nr + 1), q2(nr + 1);
  std::vector<std::vector<cplx>> zs(nr + 1);
  for (int j = 0; j <= nr; ++j) {
    q1[j].resize(na);
    q2[j].resize(na);
    zs[j].resize(na);
    double rho = std::tanh(0.5 * mesh_radius * j / nr);
    for (int k = 0; k < na; ++k) {
      double psi = 2 * M_PI * k / na;
      cplx z = to_h(std::polar(rho, psi));
      zs[j][k] = z;
      PencilField::Fiber f = field.fiber(z);
      Mat a = field.quadric_mat(f, 0.0), b = field.quadric_mat(f, M_PI / 2);
      q1[j][k] = a / a.norm();
      q2[j][k] = b / b.norm();
    }
  }

  std::vector<Eigen::Vector2d> limit = limit_set_sample(rep, 256, 12, mix64(seed ^ 0xful));
  const Embedding& emb = field.embedding();

  // distance of a projective point to the sampled limit-set image
  auto limit_gap = [&](const Vec& v) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& zeta : limit) {
      Mat f = emb.boundary(zeta).orthonormal();
      best = std::min(best, (v - f * (f.transpose() * v)).norm());
    }
    return best;
  };

  // count isolated zeros in the mesh of x -> (q1(x)(v), q2(x)(v)); also
  // report whether a zero sits by the mesh edge (the sample is then not
  // robust for this mesh) and where the residual minimum lies
  auto count_fibers = [&](const Vec& v, bool& near_edge, bool& min_on_edge) {
    std::vector<std::vector<double>> f1(nr + 1, std::vector<double>(na)),
        f2(nr + 1, std::vector<double>(na));
    double best_res = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j <= nr; ++j)
      for (int k = 0; k < na; ++k) {
        f1[j][k] = v.dot(q1[j][k] * v);
        f2[j][k] = v.dot(q2[j][k] * v);
        double r = std::hypot(f1[j][k], f2[j][k]);
        if (r < best_res) {
          best_res = r;
          best_j = j;
        }
      }
    min_on_edge = best_j >= nr - 2;
    std::vector<cplx> zeros;
    near_edge = false;
    for (int j = 0; j < nr; ++j)
      for (int k = 0; k < na; ++k) {
        int k2 = (k + 1) % na;
        double a[4] = {f1[j][k], f1[j][k2], f1[j + 1][k], f1[j + 1][k2]};
        double b[4] = {f2[j][k], f2[j][k2], f2[j + 1][k], f2[j + 1][k2]};
        auto sign_change = [](double* x) {
          double lo = std::min(std::min(x[0], x[1]), std::min(x[2], x[3]));
          double hi = std::max(std::max(x[0], x[1]), std::max(x[2], x[3]));
          return lo < 0 && hi > 0;
        };
        if (!sign_change(a) || !sign_change(b)) continue;
        cplx zz = 0.25 * (zs[j][k] + zs[j][k2] + zs[j + 1][k] + zs[j + 1][k2]);
        bool converged = false;
        auto fval = [&](cplx z, double& g1, double& g2) {
          PencilField::Fiber f = field.fiber(z);
          Mat a1 = field.quadric_mat(f, 0.0), a2 = field.quadric_mat(f, M_PI / 2);
          g1 = v.dot(a1 * v) / a1.norm();
          g2 = v.dot(a2 * v) / a2.norm();
        };
        for (int it = 0; it < 40; ++it) {
          double g1, g2;
          fval(zz, g1, g2);
          if (std::hypot(g1, g2) < 1e-10) {
            converged = true;
            break;
          }
          const double h = 1e-6;
          double gx1, gx2, gy1, gy2;
          fval(zz + h, gx1, gx2);
          fval(zz + cplx(0, h), gy1, gy2);
          Eigen::Matrix2d J;
          J << (gx1 - g1) / h, (gy1 - g1) / h, (gx2 - g2) / h, (gy2 - g2) / h;
          Eigen::Vector2d stepv = J.partialPivLu().solve(Eigen::Vector2d(g1, g2));
          zz -= cplx(stepv(0), stepv(1));
          if (zz.imag() < 1e-6) break;
        }
        if (!converged) continue;
        bool dup = false;
        for (const cplx& z0 : zeros)
          if (h2::dist(z0, zz) < 3.0 * mesh_radius / nr) dup = true;
        if (dup) continue;
        zeros.push_back(zz);
        if (h2::dist(cplx(0, 1), zz) > mesh_radius - 3.0 * mesh_radius / nr) near_edge = true;
      }
    return static_cast<int>(zeros.size());
  };

  out.multiplicity_histogram.assign(8, 0);
  Rng rng(mix64(seed ^ 0x1ce));
  int accepted = 0;
  int attempts = 0;
  while (accepted < interior_samples && attempts < 60 * interior_samples) {
    ++attempts;
    Vec v = rng.sphere_vec(dimv);
    if (limit_gap(v) < 0.05) continue;
    bool near_edge = false, min_on_edge = false;
    int fibers = count_fibers(v, near_edge, min_on_edge);
    if (near_edge || (fibers == 0 && min_on_edge)) {
      // the fiber sits at or beyond the meshed window: not robust here
      ++out.discarded;
      continue;
    }
    ++accepted;
    ++out.interior_samples;
    if (fibers == 1) ++out.interior_hits_one;
    if (fibers < static_cast<int>(out.multiplicity_histogram.size()))
      ++out.multiplicity_histogram[fibers];
  }

  for (int i = 0; i < limit_samples; ++i) {
    const auto& zeta = limit[i % limit.size()];
    Mat f = emb.boundary(zeta).orthonormal();
    Vec c = rng.gaussian_vec(static_cast<int>(f.cols()));
    Vec v = (f * c).normalized();
    bool near_edge = false, min_on_edge = false;
    int fibers = count_fibers(v, near_edge, min_on_edge);
    ++out.limit_samples;
    if (fibers == 0) ++out.limit_hits_zero;
  }
  return out;
}

}  // namespace pq
