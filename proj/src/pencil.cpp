#include "pq/pencil.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace pq {

Vec svec(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec v(n * (n + 1) / 2);
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    v(k++) = m(i, i);
    for (int j = i + 1; j < n; ++j) v(k++) = s * m(i, j);
  }
  return v;
}

Mat unsvec(const Vec& v, int n) {
  Mat m(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    m(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = s * v(k++);
    }
  }
  return m;
}

Pencil::Pencil(int ambient_dim, std::vector<Quadric> b) : dim(ambient_dim), d(static_cast<int>(b.size())), basis(std::move(b)) {
  if (d < 1) throw Error(ErrorCode::malformed_input, "Pencil: empty basis");
  Mat g(d, d);
  for (int i = 0; i < d; ++i) {
    basis[i].require_ambient();
    if (basis[i].dim != dim)
      throw Error(ErrorCode::malformed_input, "Pencil: basis dimension mismatch");
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = pairing(basis[i].mat, basis[j].mat);
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < 1e-12 * es.eigenvalues()(d - 1))
    throw Error(ErrorCode::degenerate_pencil, "Pencil: basis quadrics are dependent");
}

Mat Pencil::element(const Vec& coeffs) const {
  Mat m = coeffs(0) * basis[0].mat;
  for (int i = 1; i < d; ++i) m += coeffs(i) * basis[i].mat;
  return m;
}

std::vector<SymTensor> annihilator(const Pencil& P) {
  const int m = P.dim;
  const int N = m * (m + 1) / 2;
  Mat C(P.d, N);
  for (int i = 0; i < P.d; ++i) C.row(i) = svec(P.basis[i].mat).transpose();
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  std::vector<SymTensor> out;
  out.reserve(N - P.d);
  for (int j = P.d; j < N; ++j) out.emplace_back(m, unsvec(svd.matrixV().col(j), m));
  return out;
}

namespace {

// Generalized lambda_min of (F^T q F, F^T F): positivity of q on span(F),
// insensitive to the frame conditioning.
double restricted_margin(const Quadric& q, const Mat& frame, Vec* eigvec = nullptr) {
  Mat a = symmetrized(frame.transpose() * q.mat * frame);
  Mat b = symmetrized(frame.transpose() * frame);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, b);
  if (eigvec) *eigvec = es.eigenvectors().col(0);
  return es.eigenvalues()(0);
}

// One ascent run in graph charts around the current frame. The chart at an
// orthonormal Lagrangian frame F is T (symmetric) -> span(F - omega F T).
// When the restricted lambda_min is degenerate the supgradient step can
// stall, so failed line searches fall back to random chart directions.
double ascend_positive(const SymplecticSpace& sp, const Quadric& q, Lagrangian& l, int iters,
                       double target = std::numeric_limits<double>::infinity(),
                       std::uint64_t seed = 0x51de) {
  const int n = sp.n;
  Mat f = l.orthonormal();
  double best = restricted_margin(q, f);
  double step = 0.25;
  Rng rng(mix64(seed));
  for (int it = 0; it < iters && best < target; ++it) {
    Mat jf = sp.omega * f;
    Vec u;
    double lam = restricted_margin(q, f, &u);
    Vec gu = f * u;
    // d lambda = -2 (q gu - lam gu)^T (omega f) dT u
    Vec r = -2.0 * (jf.transpose() * (q.mat * gu - lam * gu));
    Mat grad = 0.5 * (u * r.transpose() + r * u.transpose());
    double gn = grad.norm();
    bool moved = false;
    auto try_direction = [&](const Mat& dir, double scale) {
      Mat gt = f - jf * (scale * dir);
      double m = restricted_margin(q, gt);
      if (m > lam + 1e-15) {
        Eigen::HouseholderQR<Mat> qr(gt);
        f = qr.householderQ() * Mat::Identity(2 * n, n);
        best = m;
        moved = true;
        return true;
      }
      return false;
    };
    if (gn > 1e-13) {
      while (step > 1e-13) {
        if (try_direction(grad, step / gn)) {
          step *= 1.7;
          break;
        }
        step *= 0.5;
      }
    }
    if (!moved) {
      // degenerate bottom eigenvalue: probe random symmetric directions
      double probe = std::max(step, 1e-6);
      for (int r2 = 0; r2 < 24 && !moved; ++r2) {
        Mat dir = rng.gaussian_sym(n);
        dir /= dir.norm();
        if (try_direction(dir, probe)) step = std::max(step, probe);
        probe *= 0.7;
      }
      if (!moved) break;
    }
  }
  l = Lagrangian(f);
  return best;
}

// Nearest-Lagrangian correction used to turn eigenvector spans into seeds.
Lagrangian lagrangize(const SymplecticSpace& sp, Mat f) {
  for (int it = 0; it < 8; ++it) {
    Eigen::HouseholderQR<Mat> qr(f);
    f = qr.householderQ() * Mat::Identity(f.rows(), f.cols());
    Mat w = f.transpose() * sp.omega * f;  // antisymmetric defect
    if (w.cwiseAbs().maxCoeff() < 1e-13) break;
    f = f - 0.5 * sp.omega * f * w;
  }
  return Lagrangian(f);
}

}  // namespace

std::optional<LagrangianWitness> positive_lagrangian(const SymplecticSpace& sp,
                                                     const Quadric& q, std::uint64_t seed,
                                                     int restarts, int iters,
                                                     const Lagrangian* warm_start,
                                                     double target_margin) {
  const int n = sp.n;
  std::vector<Lagrangian> seeds;
  if (warm_start) seeds.push_back(*warm_start);
  {
    // span of the top-n eigenvectors, pushed onto the Lagrangian Grassmannian
    Eigen::SelfAdjointEigenSolver<Mat> es(q.mat);
    Mat top = es.eigenvectors().rightCols(n);
    seeds.push_back(lagrangize(sp, top));
  }
  Rng rng(mix64(seed ^ 0xa5c9310fULL));
  for (int r = 0; r < restarts; ++r) seeds.push_back(random_lagrangian(sp, rng));

  std::optional<LagrangianWitness> best;
  for (auto& l : seeds) {
    if (!is_lagrangian(sp, l, 1e-8)) continue;
    Lagrangian cur = l;
    double m = ascend_positive(sp, q, cur, iters, target_margin);
    if (!best || m > best->margin) best = LagrangianWitness{cur, m};
    if (best->margin >= std::min(target_margin, 1e-6)) break;
  }
  if (best && best->margin > 0) return best;
  return std::nullopt;
}

namespace {

// Path between two q-positive Lagrangians inside the positive ball: the
// graph-coordinate segment over `from` along a strongly q-negative anchor
// stays positive (Lemma 6.2 star-shape computation). Returns interior
// samples, endpoints excluded.
std::vector<Lagrangian> ball_bridge(const SymplecticSpace& sp, const Quadric& q,
                                    const Lagrangian& from, const Lagrangian& to,
                                    std::uint64_t seed, int steps = 24) {
  auto negw = positive_lagrangian(sp, Quadric(q.dim, (-q.mat).eval()), mix64(seed ^ 0xbead),
                                  24, 200, nullptr, 0.05);
  if (!negw)
    throw Error(ErrorCode::continuation, "ball_bridge: no negative anchor for the chart");
  const int n = sp.n;
  Mat fplus = from.orthonormal(), fminus = negw->l.orthonormal();
  Mat kmat(2 * n, 2 * n);
  kmat << fplus, fminus;
  Mat coords = kmat.partialPivLu().solve(to.orthonormal());
  Mat p = coords.topRows(n), qq = coords.bottomRows(n);
  Eigen::JacobiSVD<Mat> psvd(p);
  if (psvd.singularValues()(n - 1) < 1e-10 * psvd.singularValues()(0))
    throw Error(ErrorCode::continuation, "ball_bridge: chart is degenerate");
  Mat graph = qq * p.inverse();
  std::vector<Lagrangian> out;
  for (int s = 1; s < steps; ++s) {
    double lam = static_cast<double>(s) / steps;
    Lagrangian l((fplus + fminus * (lam * graph)).eval());
    if (restricted_margin(q, l.orthonormal()) <= 0)
      throw Error(ErrorCode::continuation, "ball_bridge: segment left the positive set");
    out.push_back(l);
  }
  return out;
}

}  // namespace

BoundaryLoopResult boundary_loop(const SymplecticSpace& sp, const Pencil& P, int k,
                                 std::uint64_t seed) {
  if (P.d != 2)
    throw Error(ErrorCode::unsupported, "boundary_loop: defined for 2-dimensional pencils");
  if (P.dim != sp.dim())
    throw Error(ErrorCode::malformed_input, "boundary_loop: pencil/space dimension mismatch");
  // orthonormalize but keep the orientation of the given basis
  Mat a = P.basis[0].mat / P.basis[0].mat.norm();
  Mat b = P.basis[1].mat - pairing(P.basis[1].mat, a) * a;
  b /= b.norm();

  BoundaryLoopResult out;
  auto q_at = [&](double theta) {
    return Quadric(P.dim, (std::cos(theta) * a + std::sin(theta) * b).eval());
  };

  // the basis is orthonormalized, so |q_theta|_F = 1 and the margin drifts
  // by at most the theta step per ray; the floor, the ascent target and the
  // internal grid size are calibrated to the best margin available at
  // theta = 0 so kept witnesses survive between rays
  double scale_margin;
  {
    auto w0 = positive_lagrangian(sp, q_at(0.0), mix64(seed ^ 0x5eed), 24, 260);
    if (!w0) {
      out.failed_theta = 0.0;
      return out;
    }
    scale_margin = w0->margin;
  }
  const double floor_margin = std::min(0.05, scale_margin / 4);
  const double target_margin = 2.5 * floor_margin;
  const int k_int = std::max(k, static_cast<int>(std::ceil(4 * M_PI / floor_margin)));
  out.min_margin = std::numeric_limits<double>::infinity();
  Lagrangian prev;
  bool have_prev = false;

  auto witness_at = [&](double theta, const Lagrangian* warm, int restarts,
                        std::uint64_t s) -> std::optional<LagrangianWitness> {
    Quadric q = q_at(theta);
    if (warm) {
      double m = restricted_margin(q, warm->orthonormal());
      if (m >= floor_margin) return LagrangianWitness{*warm, m};
    }
    return positive_lagrangian(sp, q, s, restarts, 200, warm, target_margin);
  };

  // pushes a witness, bridging any in-ball jump through the positive ball
  // at the same ray so the sampled section stays continuous
  auto push_sample = [&](double theta, const LagrangianWitness& w) {
    if (have_prev && principal_angle(prev, w.l) > M_PI / 10) {
      Quadric q = q_at(theta);
      if (restricted_margin(q, prev.orthonormal()) <= 0)
        throw Error(ErrorCode::continuation, "boundary_loop: section lost positivity between rays");
      for (const auto& l : ball_bridge(sp, q, prev, w.l, mix64(seed + 131 * (int)(theta * 1e3)))) {
        out.loop.samples.push_back(l);
        out.loop.params.push_back(theta);
      }
    }
    out.loop.samples.push_back(w.l);
    out.loop.params.push_back(theta);
    out.min_margin = std::min(out.min_margin, w.margin);
    prev = w.l;
    have_prev = true;
  };

  for (int j = 0; j < k_int; ++j) {
    double theta = 2 * M_PI * j / k_int;
    auto w = witness_at(theta, have_prev ? &prev : nullptr, have_prev ? 6 : 24, mix64(seed + j));
    if (!w) {
      out.failed_theta = theta;
      return out;
    }
    push_sample(theta, *w);
  }

  // land the continuation on q_0 itself, then close inside its ball
  {
    auto w = witness_at(2 * M_PI, &prev, 6, mix64(seed + k_int));
    if (!w) {
      out.failed_theta = 2 * M_PI;
      return out;
    }
    push_sample(2 * M_PI, *w);
  }
  if (principal_angle(out.loop.samples.front(), out.loop.samples.back()) > M_PI / 10) {
    Quadric q0 = q_at(0.0);
    for (const auto& l :
         ball_bridge(sp, q0, out.loop.samples.back(), out.loop.samples.front(), mix64(seed ^ 0xc10e))) {
      out.loop.samples.push_back(l);
      out.loop.params.push_back(2 * M_PI);
    }
  }
  out.closed = principal_angle(out.loop.samples.front(), out.loop.samples.back()) < M_PI / 8;
  return out;
}

namespace {

// Exact (n,n)-regularity via generalized eigenvalues: the pencil contains a
// degenerate element iff det(A + tB) = 0 for real t or det B = 0.
void classify_nn(const Pencil& P, double tolerance, PencilClass& out) {
  const int m = P.dim;
  // find a nondegenerate element to anchor the eigenproblem
  Mat B;
  bool found = false;
  std::vector<Vec> tries;
  Vec e0(2), e1(2), h(2);
  e0 << 1, 0;
  e1 << 0, 1;
  h << std::sqrt(0.5), std::sqrt(0.5);
  tries = {e0, e1, h};
  Vec g(2);
  g << 0.6, -0.8;
  tries.push_back(g);
  for (const Vec& c : tries) {
    Mat cand = P.element(c);
    Vec ev = sym_eigenvalues(cand);
    if (ev.cwiseAbs().minCoeff() > tolerance * ev.cwiseAbs().maxCoeff()) {
      B = cand;
      found = true;
      break;
    }
  }
  if (!found) {
    out.nn_regular = Tri::no;  // every tried element is (near-)degenerate
    out.nn_margin = 0.0;
    return;
  }
  {
    Quadric qb(m, B);
    Signature sig = signature(qb, tolerance * spectral_norm(B));
    if (sig.pos != m / 2 || sig.neg != m / 2) {
      out.nn_regular = Tri::no;
      out.nn_margin = 0.0;
      return;
    }
  }
  // complementary element: any A independent of B in the pencil
  Mat A = P.basis[0].mat;
  if ((svec(A).normalized() - svec(B).normalized()).norm() < 1e-6 ||
      (svec(A).normalized() + svec(B).normalized()).norm() < 1e-6)
    A = P.basis[1].mat;

  Eigen::EigenSolver<Mat> es(B.partialPivLu().solve(A));
  double margin = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    double rel_im = std::abs(lam.imag()) / (1.0 + std::abs(lam));
    margin = std::min(margin, rel_im);
    if (rel_im <= tolerance) {
      Mat deg = A - lam.real() * B;
      Vec ev = sym_eigenvalues(deg);
      if (ev.cwiseAbs().minCoeff() <= 10 * tolerance * std::max(1e-300, ev.cwiseAbs().maxCoeff()))
        degenerate = true;
    }
  }
  out.nn_margin = margin;
  if (degenerate)
    out.nn_regular = Tri::no;
  else if (margin > tolerance)
    out.nn_regular = Tri::yes;
  else
    out.nn_regular = Tri::inconclusive;
}

}  // namespace

PencilClass classify(const Pencil& P, double tolerance, const ClassifyOptions& opt) {
  if (P.d != 2)
    throw Error(ErrorCode::unsupported, "classify: the tower is implemented for d = 2");
  PencilClass out;

  CircleReport sweep = circle_sweep(P.basis[0], P.basis[1], tolerance);
  out.mixed = sweep.mixed;
  out.mixed_margin = (sweep.mixed == Tri::yes) ? sweep.indef_margin : 0.0;

  classify_nn(P, tolerance, out);
  // tower consistency: nn-regular is decided exactly and implies mixed,
  // while a certified non-mixed pencil cannot be nn-regular
  if (out.mixed == Tri::no) out.nn_regular = Tri::no;
  if (out.nn_regular == Tri::yes && out.mixed == Tri::inconclusive) out.mixed = Tri::yes;

  if (out.nn_regular == Tri::no) {
    out.omega_regular = Tri::no;
    out.maximal = Tri::no;
    return out;
  }

  SymplecticSpace sp(P.dim / 2);
  try {
    BoundaryLoopResult loop = boundary_loop(sp, P, opt.loop_samples, opt.seed);
    if (loop.failed_theta || !loop.closed) {
      out.omega_regular = Tri::inconclusive;  // semi-decision: absence of witness
      out.maximal = Tri::inconclusive;
      return out;
    }
    out.omega_regular = (out.nn_regular == Tri::yes) ? Tri::yes : Tri::inconclusive;
    out.omega_margin = loop.min_margin;
    const auto& ls = loop.loop.samples;
    out.omega_witness = {ls[0], ls[ls.size() / 2]};
    int w = maslov_winding(sp, loop.loop);
    out.winding = w;
    out.boundary = loop.loop;
    if (out.omega_regular == Tri::yes)
      out.maximal = (std::abs(w) == sp.n) ? Tri::yes : Tri::no;
    else
      out.maximal = Tri::inconclusive;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::continuation) throw;
    out.omega_regular = Tri::inconclusive;
    out.maximal = Tri::inconclusive;
  }
  return out;
}

namespace {

std::vector<Quadric> independent_subset(const std::vector<Quadric>& qs, double rel_tol = 1e-6) {
  double scale = 0.0;
  for (const auto& q : qs) scale = std::max(scale, q.mat.norm());
  std::vector<Quadric> out;
  std::vector<Vec> ortho;
  for (const auto& q : qs) {
    Vec v = svec(q.mat);
    Vec r = v;
    for (const auto& o : ortho) r -= r.dot(o) * o;
    if (r.norm() > rel_tol * scale) {
      ortho.push_back(r.normalized());
      out.push_back(q);
    }
  }
  return out;
}

void require_mixed(const Pencil& P, double tolerance, const char* who) {
  if (P.d == 1) {
    // a line of quadrics is mixed iff its generator is indefinite
    Vec ev = sym_eigenvalues(P.basis[0].mat);
    double scale = ev.cwiseAbs().maxCoeff();
    if (ev(0) > -tolerance * scale || ev(ev.size() - 1) < tolerance * scale)
      throw Error(ErrorCode::malformed_input, std::string(who) + ": input pencil is not mixed");
    return;
  }
  CircleReport rep = circle_sweep(P.basis[0], P.basis[1], tolerance);
  if (rep.mixed == Tri::no)
    throw Error(ErrorCode::malformed_input,
                std::string(who) + ": input pencil is not mixed");
}

}  // namespace

FittingPairResult fitting_pair(const Pencil& P1, const Pencil& P2, int budget,
                               std::uint64_t seed) {
  if (P1.dim != P2.dim)
    throw Error(ErrorCode::malformed_input, "fitting_pair: ambient dimension mismatch");
  if (P1.d != 2 || P2.d != 2)
    throw Error(ErrorCode::unsupported, "fitting_pair: implemented for 2-dimensional pencils");
  require_mixed(P1, tol::eig_rel, "fitting_pair");
  require_mixed(P2, tol::eig_rel, "fitting_pair");

  FittingPairResult out;
  std::vector<Quadric> all = {P1.basis[0], P1.basis[1], P2.basis[0], P2.basis[1]};
  std::vector<Quadric> span = independent_subset(all);
  if (span.size() == 2) {
    // identical pencils: mixed, so their span contains no PD element
    out.fitting = Tri::no;
    return out;
  }

  PdFeasibility feas = pd_feasibility(span, budget, seed);
  out.fitting = feas.status;
  out.margin = feas.status == Tri::yes ? feas.witness->margin : feas.best;
  if (feas.status != Tri::yes) return out;

  // decompose the PD witness as q2 - q1 with q1 in P1, q2 in P2
  const int m = P1.dim;
  Mat W = Mat::Zero(m, m);
  for (std::size_t i = 0; i < span.size(); ++i) W += feas.witness->coeffs(i) * span[i].mat;
  Mat C(static_cast<int>(svec(W).size()), 4);
  C.col(0) = svec(P1.basis[0].mat);
  C.col(1) = svec(P1.basis[1].mat);
  C.col(2) = svec(P2.basis[0].mat);
  C.col(3) = svec(P2.basis[1].mat);
  Vec sol = C.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(svec(W));
  Mat q1 = -(sol(0) * P1.basis[0].mat + sol(1) * P1.basis[1].mat);
  Mat q2 = sol(2) * P2.basis[0].mat + sol(3) * P2.basis[1].mat;
  out.witness = {Quadric(m, q1), Quadric(m, q2)};

  // Prop 3.2 (iii) sampled cross-validation: {q1 >= 0} subset of {q2 > 0}
  Rng rng = Rng::stream(seed, 0x3f2b);
  double worst = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (int s = 0; s < 4000; ++s) {
    Vec v = rng.sphere_vec(m);
    if (v.dot(q1 * v) >= 0) {
      worst = std::min(worst, v.dot(q2 * v));
      ++checked;
    }
  }
  out.geometric_min = checked ? worst : std::numeric_limits<double>::quiet_NaN();
  out.samples = checked;
  return out;
}

TangentVector::TangentVector(Pencil P, std::vector<Mat> imgs) : base(std::move(P)), images(std::move(imgs)) {
  if (images.size() != static_cast<std::size_t>(base.d))
    throw Error(ErrorCode::malformed_input, "TangentVector: one image per basis quadric required");
  // reduce representatives against span(basis)
  std::vector<Vec> ortho;
  for (const auto& q : base.basis) ortho.push_back(svec(q.mat));
  // Gram-Schmidt on the pencil basis
  for (std::size_t i = 0; i < ortho.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) ortho[i] -= ortho[i].dot(ortho[j]) * ortho[j];
    ortho[i].normalize();
  }
  for (auto& img : images) {
    require_symmetric(img, "TangentVector image");
    Vec v = svec(img);
    for (const auto& o : ortho) v -= v.dot(o) * o;
    img = unsvec(v, base.dim);
  }
}

Pencil move_pencil(const TangentVector& v, double t) {
  std::vector<Quadric> b;
  for (int i = 0; i < v.base.d; ++i)
    b.emplace_back(v.base.dim, (v.base.basis[i].mat + t * v.images[i]).eval());
  return Pencil(v.base.dim, std::move(b));
}

FittingDirectionResult fitting_direction(const TangentVector& v, int budget, std::uint64_t seed) {
  FittingDirectionResult out;
  require_mixed(v.base, tol::eig_rel, "fitting_direction");

  double img_norm = 0.0;
  for (const auto& m : v.images) img_norm = std::max(img_norm, m.norm());
  double base_norm = 0.0;
  for (const auto& q : v.base.basis) base_norm = std::max(base_norm, q.mat.norm());
  if (img_norm < 1e-14 * std::max(1.0, base_norm)) {
    out.fitting = Tri::no;  // Im(v) = {0} carries no positive class
    return out;
  }

  std::vector<Quadric> span = v.base.basis;
  for (const auto& m : v.images)
    if (m.norm() > 1e-13 * std::max(1.0, base_norm)) span.emplace_back(v.base.dim, m);
  span = independent_subset(span);

  PdFeasibility feas = pd_feasibility(span, budget, seed);
  out.fitting = feas.status;
  out.margin = feas.status == Tri::yes ? feas.witness->margin : feas.best;
  if (feas.status == Tri::yes) {
    // mixed base: the witness necessarily uses the image components
    out.witness = feas.witness;
  }

  // dual criterion: Ker(v°) = annihilator of span(basis + images) must miss
  // the PSD cone; maximize lambda_min over its unit sphere and require a
  // strictly negative optimum.
  {
    Pencil full(v.base.dim, span);
    std::vector<SymTensor> ker = annihilator(full);
    if (ker.empty()) {
      out.dual_check = Tri::yes;
      out.dual_max = -std::numeric_limits<double>::infinity();
    } else {
      std::vector<Quadric> kq;
      kq.reserve(ker.size());
      for (const auto& p : ker) kq.emplace_back(p.dim, p.mat);
      PdFeasibility dual = pd_feasibility(kq, budget, mix64(seed ^ 0x77aa), 30, 1e-9);
      out.dual_max = dual.status == Tri::yes ? dual.witness->margin : dual.best;
      // Yes-case of the dual check is "max lambda_min < -tol" i.e. the
      // whole unit sphere of Ker(v°) sits outside PSD robustly.
      if (out.dual_max < -1e-7)
        out.dual_check = Tri::yes;
      else if (out.dual_max > 1e-7)
        out.dual_check = Tri::no;
      else
        out.dual_check = Tri::inconclusive;
    }
  }
  return out;
}

}  // namespace pq
