#include "pq/reps.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "pq/rng.hpp"

namespace pq {

using h2::Mat2;

h2::Mat2 FuchsianRep::word(const std::vector<int>& letters) const {
  Mat2 m = Mat2::Identity();
  for (int l : letters) {
    if (l == 0 || std::abs(l) > static_cast<int>(generators.size()))
      throw Error(ErrorCode::malformed_input, "word: letter out of range");
    const Mat2& g = generators[std::abs(l) - 1];
    m = m * (l > 0 ? g : g.inverse().eval());
  }
  return m;
}

namespace {

double rp1_angle(const Eigen::Vector2d& p) {
  double a = std::atan2(p(1), p(0));
  if (a < 0) a += M_PI;
  if (a >= M_PI) a -= M_PI;
  return a;
}

Eigen::Vector2d angle_point(double a) { return {std::cos(a), std::sin(a)}; }

double rp1_dist(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return std::min(d, M_PI - d);
}

struct FixedPoints {
  double attracting, repelling;  // RP^1 angles
};

FixedPoints fixed_points(const Mat2& g) {
  Eigen::EigenSolver<Mat2> es(g);
  auto ev = es.eigenvalues();
  if (std::abs(ev(0).imag()) > 1e-10 || std::abs(ev(1).imag()) > 1e-10)
    throw Error(ErrorCode::malformed_input, "fixed_points: element is not hyperbolic");
  int big = std::abs(ev(0).real()) >= std::abs(ev(1).real()) ? 0 : 1;
  Eigen::Vector2d va = es.eigenvectors().col(big).real();
  Eigen::Vector2d vr = es.eigenvectors().col(1 - big).real();
  return {rp1_angle(va), rp1_angle(vr)};
}

// Mobius maps are monotone circle homeomorphisms: the image of an arc is
// the arc between endpoint images containing the image of the midpoint.
struct Arc {
  double center, radius;  // in RP^1 angle, radius < pi/2
  bool contains(double a) const { return rp1_dist(a, center) <= radius; }
};

bool image_of_complement_inside(const Mat2& g, const Arc& src, const Arc& dst) {
  // complement of src is the arc centered at src.center + pi/2 of radius
  // pi/2 - src.radius; push endpoints and a fan of interior samples
  const int fan = 32;
  double c = src.center + M_PI / 2;
  double r = M_PI / 2 - src.radius;
  for (int i = 0; i <= fan; ++i) {
    double a = c - r + 2 * r * i / fan;
    Eigen::Vector2d img = h2::mobius_boundary(g, angle_point(a));
    if (!dst.contains(rp1_angle(img))) return false;
  }
  return true;
}

}  // namespace

FuchsianRep build_schottky(double t1, double t2, double separation) {
  if (t1 <= 0 || t2 <= 0)
    throw Error(ErrorCode::malformed_input, "build_schottky: translation lengths must be positive");
  if (std::abs(separation) < 1e-9)
    throw Error(ErrorCode::not_schottky, "build_schottky: separation 0 degenerates the second axis");

  Mat2 a;
  a << std::exp(t1 / 2), 0, 0, std::exp(-t1 / 2);
  Mat2 d2;
  d2 << std::exp(t2 / 2), 0, 0, std::exp(-t2 / 2);
  // conjugator sending the axis (0, inf) to (-separation, separation);
  // separation = 1 is the rotation by pi/2 about i
  Mat2 m;
  const double s = separation;
  m << s, -s, 1, 1;
  m /= std::sqrt(2 * s);
  Mat2 b = m * d2 * m.inverse();

  FuchsianRep rep{RepKind::schottky, {a, b}, 0.0, 0.0};

  FixedPoints fa = fixed_points(a), fb = fixed_points(b);
  double gaps[4] = {fa.attracting, fa.repelling, fb.attracting, fb.repelling};
  double min_gap = M_PI;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) min_gap = std::min(min_gap, rp1_dist(gaps[i], gaps[j]));

  bool ok = false;
  for (double r = std::min(0.6, 0.95 * min_gap / 2); r > 0.02; r *= 0.85) {
    Arc ia{fa.attracting, r}, ira{fa.repelling, r};
    Arc ib{fb.attracting, r}, irb{fb.repelling, r};
    Mat2 ainv = a.inverse(), binv = b.inverse();
    if (image_of_complement_inside(a, ira, ia) && image_of_complement_inside(ainv, ia, ira) &&
        image_of_complement_inside(b, irb, ib) && image_of_complement_inside(binv, ib, irb)) {
      rep.pingpong_radius = r;
      ok = true;
      break;
    }
  }
  if (!ok)
    throw Error(ErrorCode::not_schottky,
                "build_schottky: ping-pong intervals could not be verified");
  for (const Mat2& g : rep.generators)
    if (std::abs(g.trace()) <= 2.0)
      throw Error(ErrorCode::not_schottky, "build_schottky: generator is not hyperbolic");
  return rep;
}

FuchsianRep build_genus2() {
  // Bolza octagon: side pairings G_k = R_{k pi/4} T R_{k pi/4}^{-1},
  // translation length 2 arccosh(1 + sqrt 2) along the axis (-1, 1).
  const double ch = 1.0 + std::sqrt(2.0);
  const double sh = std::sqrt(ch * ch - 1.0);
  Mat2 t;
  t << ch, sh, sh, ch;
  auto rot = [](double psi) { return h2::rotation(psi); };
  Mat2 g0 = t;
  Mat2 g1 = rot(M_PI / 4) * t * rot(-M_PI / 4);
  Mat2 g2 = rot(M_PI / 2) * t * rot(-M_PI / 2);
  Mat2 g3 = rot(3 * M_PI / 4) * t * rot(-3 * M_PI / 4);

  // octagon relation g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3 = 1, rewritten to
  // the standard commutator presentation
  Mat2 a1 = g0;
  Mat2 b1 = g1.inverse() * g2 * g3.inverse();
  Mat2 a2 = g1.inverse() * g2;
  Mat2 b2 = g3.inverse() * g1;

  auto comm = [](const Mat2& u, const Mat2& v) {
    return (u * v * u.inverse() * v.inverse()).eval();
  };
  Mat2 rel = comm(a1, b1) * comm(a2, b2);
  double residual = std::min((rel - Mat2::Identity()).norm(), (rel + Mat2::Identity()).norm());
  if (residual > 1e-6)
    throw Error(ErrorCode::malformed_input, "build_genus2: relator residual is too large");

  FuchsianRep rep{RepKind::genus2_octagon, {a1, b1, a2, b2}, residual, 0.0};
  return rep;
}

namespace {

// coefficients of (vx x + vy y)^p (wx x + wy y)^q in the monomial basis
// x^{m-k} y^k, k = 0..m with m = p + q
Vec binary_form_power(const Eigen::Vector2d& v, int p, const Eigen::Vector2d& w, int q) {
  auto binom = [](int n, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
  };
  const int m = p + q;
  Vec out = Vec::Zero(m + 1);
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= q; ++j) {
      // term x^{(p-i)+(q-j)} y^{i+j}
      double c = binom(p, i) * std::pow(v(0), p - i) * std::pow(v(1), i) * binom(q, j) *
                 std::pow(w(0), q - j) * std::pow(w(1), j);
      out(i + j) += c;
    }
  }
  return out;
}

double binom_d(int n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

Embedding::Embedding(EmbedKind kind, int n) : kind_(kind), n_(n), sp_(n) {
  if (n < 1) throw Error(ErrorCode::malformed_input, "Embedding: n must be >= 1");
  if (kind_ == EmbedKind::irreducible) {
    // invariant symplectic pairing on Sym^{2n-1} R^2:
    // Omega(e_k, e_{m-k}) = (-1)^k / binom(m, k); Darboux-normalize it
    const int m = 2 * n - 1;
    auto build = [&](double sign) {
      Mat S = Mat::Zero(2 * n, 2 * n);
      for (int k = 0; k < n; ++k) {
        double c = sign * std::pow(-1.0, k) / binom_d(m, k);
        double r = 1.0 / std::sqrt(std::abs(c));
        S(k, k) = r;                                 // x_hat_k = r e_k
        S(m - k, n + k) = (c > 0 ? 1.0 : -1.0) * r;  // y_hat_k = sign r e_{m-k}
      }
      to_std_ = S.inverse();  // coordinates: monomial -> standard
      from_std_ = S;
    };
    build(1.0);
    // calibrate the overall sign of the pairing so that boundary triples at
    // ascending circle angles are maximal, matching the diagonal embedding
    Eigen::Vector2d p1(1.0, 0.0), p2(std::cos(0.7), std::sin(0.7)),
        p3(std::cos(1.5), std::sin(1.5));
    int idx = maslov_index(sp_, boundary(p1), boundary(p2), boundary(p3));
    if (idx == -n) build(-1.0);
  } else {
    to_std_ = Mat::Identity(2 * n, 2 * n);
    from_std_ = to_std_;
  }
}

Mat Embedding::lift(const Mat2& g) const {
  const int n = n_;
  if (kind_ == EmbedKind::diagonal) {
    Mat out = Mat::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = g(0, 0) * Mat::Identity(n, n);
    out.topRightCorner(n, n) = g(0, 1) * Mat::Identity(n, n);
    out.bottomLeftCorner(n, n) = g(1, 0) * Mat::Identity(n, n);
    out.bottomRightCorner(n, n) = g(1, 1) * Mat::Identity(n, n);
    return out;
  }
  const int m = 2 * n - 1;
  Eigen::Vector2d gx(g(0, 0), g(1, 0)), gy(g(0, 1), g(1, 1));
  Mat sym(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) sym.col(k) = binary_form_power(gx, m - k, gy, k);
  return to_std_ * sym * from_std_;
}

Mat Embedding::dlift(const h2::Mat2& X) const {
  const int n = n_;
  if (kind_ == EmbedKind::diagonal) {
    Mat out = Mat::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = X(0, 0) * Mat::Identity(n, n);
    out.topRightCorner(n, n) = X(0, 1) * Mat::Identity(n, n);
    out.bottomLeftCorner(n, n) = X(1, 0) * Mat::Identity(n, n);
    out.bottomRightCorner(n, n) = X(1, 1) * Mat::Identity(n, n);
    return out;
  }
  // derivative of the symmetric power on the monomial basis:
  // e_k = x^{m-k} y^k picks up contributions from each tensor slot
  const int m = 2 * n - 1;
  const double a = X(0, 0), b = X(0, 1), c = X(1, 0), d = X(1, 1);
  Mat D = Mat::Zero(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) {
    D(k, k) += a * (m - k) + d * k;
    if (k + 1 <= m) D(k + 1, k) += c * (m - k);
    if (k - 1 >= 0) D(k - 1, k) += b * k;
  }
  return to_std_ * D * from_std_;
}

Lagrangian Embedding::boundary(const Eigen::Vector2d& p) const {
  if (p.norm() < 1e-300)
    throw Error(ErrorCode::malformed_input, "boundary: zero homogeneous vector");
  Eigen::Vector2d v = p.normalized();
  const int n = n_;
  if (kind_ == EmbedKind::diagonal) {
    Mat f = Mat::Zero(2 * n, n);
    for (int i = 0; i < n; ++i) {
      f(i, i) = v(0);
      f(n + i, i) = v(1);
    }
    return Lagrangian(f);
  }
  const int m = 2 * n - 1;
  Eigen::Vector2d w(-v(1), v(0));
  Mat f(m + 1, n);
  for (int j = 0; j < n; ++j) f.col(j) = binary_form_power(v, m - j, w, j);
  return Lagrangian((to_std_ * f).eval());
}

namespace {

// indices of the k-subsets of {0..n-1} in lexicographic order
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      cur[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (k >= 0 && k <= n) rec(0, 0);
  return out;
}

Mat compound(const Mat& m, const std::vector<std::vector<int>>& idx) {
  const int s = static_cast<int>(idx.size());
  const int k = idx.empty() ? 0 : static_cast<int>(idx[0].size());
  Mat out(s, s);
  Mat sub(k, k);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) sub(r, c) = m(idx[i][r], idx[j][c]);
      out(i, j) = sub.determinant();
    }
  return out;
}

struct ScaledMat {
  Mat m;
  double logscale = 0.0;
  void renorm() {
    double n = m.cwiseAbs().maxCoeff();
    if (n > 0) {
      m /= n;
      logscale += std::log(n);
    }
  }
  double log_sigma_max() const { return std::log(spectral_norm(m)) + logscale; }
};

}  // namespace

GapReport anosov_gap_audit(const FuchsianRep& rep, const Embedding& emb, int maxlen,
                           long max_words) {
  if (maxlen > 14)
    throw Error(ErrorCode::malformed_input, "anosov_gap_audit: maxlen must be <= 14");
  const int gens = static_cast<int>(rep.generators.size());
  {
    long count = 0, level = 2 * gens;
    for (int l = 1; l <= maxlen; ++l) {
      count += level;
      level *= (2 * gens - 1);
      if (count > max_words)
        throw Error(ErrorCode::budget_exhausted, "anosov_gap_audit: word count guard tripped");
    }
  }

  const int n = emb.n(), d = 2 * n;
  auto idx_lo = subsets(d, n - 1);
  auto idx_mid = subsets(d, n);
  auto idx_hi = subsets(d, n + 1);

  struct Letter {
    Mat lo, mid, hi;
  };
  std::vector<Letter> letters;  // 2*gens letters: g_1..g_k, g_1^-1..g_k^-1
  for (int i = 0; i < gens; ++i) {
    Mat l = emb.lift(rep.generators[i]);
    letters.push_back({compound(l, idx_lo), compound(l, idx_mid), compound(l, idx_hi)});
  }
  for (int i = 0; i < gens; ++i) {
    Mat l = emb.lift(rep.generators[i].inverse().eval());
    letters.push_back({compound(l, idx_lo), compound(l, idx_mid), compound(l, idx_hi)});
  }
  auto inverse_letter = [&](int l) { return (l + gens) % (2 * gens); };

  GapReport out;
  struct Node {
    ScaledMat lo, mid, hi;
    int last;
    int len;
  };
  std::vector<Node> stack;
  stack.push_back({{Mat::Identity(static_cast<int>(idx_lo.size()), static_cast<int>(idx_lo.size())), 0.0},
                   {Mat::Identity(static_cast<int>(idx_mid.size()), static_cast<int>(idx_mid.size())), 0.0},
                   {Mat::Identity(static_cast<int>(idx_hi.size()), static_cast<int>(idx_hi.size())), 0.0},
                   -1,
                   0});

  std::function<void(const Node&)> dfs = [&](const Node& node) {
    if (node.len > 0) {
      double s_lo = node.lo.log_sigma_max();
      double s_mid = node.mid.log_sigma_max();
      double s_hi = node.hi.log_sigma_max();
      double gap = 2 * s_mid - s_lo - s_hi;
      out.per_word.push_back({node.len, gap});
      ++out.word_count;
    }
    if (node.len >= maxlen) return;
    for (int l = 0; l < 2 * gens; ++l) {
      if (node.last >= 0 && l == inverse_letter(node.last)) continue;
      Node next;
      next.lo.m = node.lo.m * letters[l].lo;
      next.lo.logscale = node.lo.logscale;
      next.lo.renorm();
      next.mid.m = node.mid.m * letters[l].mid;
      next.mid.logscale = node.mid.logscale;
      next.mid.renorm();
      next.hi.m = node.hi.m * letters[l].hi;
      next.hi.logscale = node.hi.logscale;
      next.hi.renorm();
      next.last = l;
      next.len = node.len + 1;
      dfs(next);
    }
  };
  dfs(stack.front());

  // Def 2.2 fit: largest A with positive B such that the bound holds on
  // every audited word; then a least-squares slope for reporting.
  double a_max = std::numeric_limits<double>::infinity();
  for (const auto& [len, gap] : out.per_word) a_max = std::min(a_max, gap / len);
  out.A = a_max * (1.0 - 1e-9);
  double b_min = std::numeric_limits<double>::infinity();
  for (const auto& [len, gap] : out.per_word) b_min = std::min(b_min, gap - out.A * len);
  out.B = b_min;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(out.per_word.size());
  for (const auto& [len, gap] : out.per_word) {
    sx += len;
    sy += gap;
    sxx += static_cast<double>(len) * len;
    sxy += len * gap;
  }
  double denom = count * sxx - sx * sx;
  out.ls_slope = (count * sxy - sx * sy) / denom;
  out.ls_intercept = (sy - out.ls_slope * sx) / count;
  double rss = 0;
  for (const auto& [len, gap] : out.per_word) {
    double r = gap - (out.ls_slope * len + out.ls_intercept);
    rss += r * r;
  }
  out.fit_rms = std::sqrt(rss / count);
  return out;
}

std::vector<Eigen::Vector2d> limit_set_sample(const FuchsianRep& rep, int count, int word_len,
                                              std::uint64_t seed) {
  std::vector<Eigen::Vector2d> out;
  const int gens = static_cast<int>(rep.generators.size());
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    std::vector<int> letters;
    int prev = 0;
    for (int k = 0; k < word_len; ++k) {
      int l;
      do {
        l = rng.uniform_int(1, gens) * (rng.uniform_int(0, 1) ? 1 : -1);
      } while (prev != 0 && l == -prev);
      letters.push_back(l);
      prev = l;
    }
    Mat2 w = rep.word(letters);
    out.push_back(angle_point(fixed_points(w).attracting));
  }
  return out;
}

}  // namespace pq
