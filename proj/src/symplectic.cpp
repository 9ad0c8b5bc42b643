#include "pq/symplectic.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

namespace pq {

Mat Lagrangian::orthonormal() const {
  Eigen::HouseholderQR<Mat> qr(frame);
  return qr.householderQ() * Mat::Identity(frame.rows(), frame.cols());
}

bool is_lagrangian(const SymplecticSpace& sp, const Lagrangian& l, double tolerance) {
  if (l.dim() != sp.dim() || l.n() != sp.n) return false;
  Mat f = l.orthonormal();
  return (f.transpose() * sp.omega * f).cwiseAbs().maxCoeff() < tolerance;
}

double transversality_margin(const Lagrangian& l1, const Lagrangian& l2) {
  Mat k(l1.dim(), l1.n() + l2.n());
  k << l1.orthonormal(), l2.orthonormal();
  Vec sv = k.jacobiSvd().singularValues();
  return sv(sv.size() - 1) / sv(0);
}

double principal_angle(const Lagrangian& l1, const Lagrangian& l2) {
  Mat m = l1.orthonormal().transpose() * l2.orthonormal();
  Vec sv = m.jacobiSvd().singularValues();
  double c = std::clamp(sv(sv.size() - 1), -1.0, 1.0);
  return std::acos(c);
}

Quadric pair_quadric(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2) {
  const int n = sp.n, d = sp.dim();
  if (l1.dim() != d || l2.dim() != d || l1.n() != n || l2.n() != n)
    throw Error(ErrorCode::malformed_input, "pair_quadric: frame shapes do not match the space");
  Mat k(d, d);
  k << l1.frame, l2.frame;
  Eigen::PartialPivLU<Mat> lu(k);
  {
    Vec sv = k.jacobiSvd().singularValues();
    if (sv(sv.size() - 1) < tol::transversality_rel * sv(0))
      throw Error(ErrorCode::transversality, "pair_quadric: Lagrangians are not transverse");
  }
  Mat kinv = lu.inverse();
  Mat a = kinv.topRows(n);     // coordinates along l1
  Mat b = kinv.bottomRows(n);  // coordinates along l2
  Mat s = l1.frame.transpose() * sp.omega * l2.frame;
  Mat q = a.transpose() * s * b;
  return Quadric(d, symmetrized(q));
}

int maslov_index(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                 const Lagrangian& l3) {
  if (!transverse(l1, l2) || !transverse(l2, l3) || !transverse(l1, l3))
    throw Error(ErrorCode::transversality, "maslov_index: triple is not pairwise transverse");
  Quadric q13 = pair_quadric(sp, l1, l3);
  Quadric r = restrict_quadric(q13, l2.orthonormal());
  Vec ev = sym_eigenvalues(r.mat);
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  int pos = 0, neg = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol::eig_rel * scale)
      ++pos;
    else if (ev(i) < -tol::eig_rel * scale)
      ++neg;
    else
      throw Error(ErrorCode::transversality,
                  "maslov_index: restricted pair quadric is numerically degenerate");
  }
  return pos - neg;
}

bool is_maximal_triple(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                       const Lagrangian& l3) {
  return maslov_index(sp, l1, l2, l3) == sp.n;
}

bool is_maximal_quadruple(const SymplecticSpace& sp, const Lagrangian& l1, const Lagrangian& l2,
                          const Lagrangian& l3, const Lagrangian& l4) {
  return is_maximal_triple(sp, l1, l2, l3) && is_maximal_triple(sp, l2, l3, l4) &&
         is_maximal_triple(sp, l3, l4, l1) && is_maximal_triple(sp, l4, l1, l2);
}

namespace {

// det of the unitary symmetric representative of l under L_n ~ U(n)/O(n),
// squared. Orthonormal Lagrangian frames [X; Y] give unitary Z = X + iY.
std::complex<double> det_squared(const Lagrangian& l) {
  const int n = l.n();
  Mat f = l.orthonormal();
  Eigen::MatrixXcd z(n, n);
  z.real() = f.topRows(n);
  z.imag() = f.bottomRows(n);
  std::complex<double> dz = z.determinant();
  return dz * dz;
}

}  // namespace

int maslov_winding(const SymplecticSpace& sp, const LagrangianLoop& loop) {
  const auto& ls = loop.samples;
  if (ls.size() < 3)
    throw Error(ErrorCode::malformed_input, "maslov_winding: need at least 3 samples");
  for (const auto& l : ls)
    if (!is_lagrangian(sp, l, 1e-8))
      throw Error(ErrorCode::malformed_input, "maslov_winding: sample is not Lagrangian");
  const std::size_t k = ls.size();
  for (std::size_t i = 0; i < k; ++i) {
    double gap = principal_angle(ls[i], ls[(i + 1) % k]);
    if (gap > M_PI / 8)
      throw Error(ErrorCode::continuation,
                  "maslov_winding: consecutive samples too far apart for continuation");
  }
  double total = 0.0;
  std::complex<double> prev = det_squared(ls[0]);
  for (std::size_t i = 1; i <= k; ++i) {
    std::complex<double> cur = det_squared(ls[i % k]);
    total += std::arg(cur / prev);
    prev = cur;
  }
  double w = total / (2 * M_PI);
  long rounded = std::lround(w);
  if (std::abs(w - rounded) > 0.1)
    throw Error(ErrorCode::continuation, "maslov_winding: winding is not close to an integer");
  return static_cast<int>(rounded);
}

LagrangianLoop tau_loop(const SymplecticSpace& sp, int samples) {
  if (samples < 16)
    throw Error(ErrorCode::malformed_input, "tau_loop: need at least 16 samples");
  LagrangianLoop loop;
  const int n = sp.n, d = sp.dim();
  for (int k = 0; k < samples; ++k) {
    double theta = 2 * M_PI * k / samples;
    Mat f = Mat::Zero(d, n);
    f(0, 0) = std::cos(theta / 2);
    f(n, 0) = std::sin(theta / 2);
    for (int i = 1; i < n; ++i) f(i, i) = 1.0;
    loop.samples.emplace_back(f);
    loop.params.push_back(theta);
  }
  return loop;
}

Mat random_symplectic(const SymplecticSpace& sp, Rng& rng, double scale) {
  Mat s = rng.gaussian_sym(sp.dim()) * scale;
  Mat m = sp.omega * s;
  return m.exp();
}

Lagrangian random_lagrangian(const SymplecticSpace& sp, Rng& rng) {
  Mat g = random_symplectic(sp, rng);
  Mat f = Mat::Zero(sp.dim(), sp.n);
  f.topRows(sp.n) = Mat::Identity(sp.n, sp.n);
  return Lagrangian((g * f).eval());
}

NormalFormTriple normal_form_triple(const SymplecticSpace& sp, const std::vector<int>& eps) {
  const int n = sp.n, d = sp.dim();
  if (static_cast<int>(eps.size()) != n)
    throw Error(ErrorCode::malformed_input, "normal_form_triple: eps size must equal n");
  Mat f1 = Mat::Zero(d, n), f2 = Mat::Zero(d, n), f3 = Mat::Zero(d, n);
  for (int i = 0; i < n; ++i) {
    f1(i, i) = 1.0;
    f2(i, i) = 1.0;
    f2(n + i, i) = static_cast<double>(eps[i]);
    f3(n + i, i) = 1.0;
  }
  return {Lagrangian(f1), Lagrangian(f2), Lagrangian(f3)};
}

}  // namespace pq
