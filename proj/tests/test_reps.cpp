#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pq/reps.hpp"

using namespace pq;

namespace {

double subspace_gap(const Lagrangian& a, const Lagrangian& b) {
  Mat pa = a.orthonormal() * a.orthonormal().transpose();
  Mat pb = b.orthonormal() * b.orthonormal().transpose();
  return (pa - pb).norm();
}

std::vector<std::vector<int>> reduced_words(int gens, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int depth) {
    if (depth == len) {
      out.push_back(cur);
      return;
    }
    for (int g = 1; g <= gens; ++g)
      for (int s : {1, -1}) {
        int l = s * g;
        if (!cur.empty() && cur.back() == -l) continue;
        cur.push_back(l);
        rec(depth + 1);
        cur.pop_back();
      }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("build_schottky validates ping-pong and rejects bad parameters") {
  FuchsianRep rep = build_schottky(2.0, 2.0, 1.0);
  CHECK(rep.generators.size() == 2);
  CHECK(rep.pingpong_radius > 0);
  for (const auto& g : rep.generators) {
    CHECK(std::abs(g.determinant() - 1.0) < 1e-12);
    CHECK(std::abs(g.trace()) > 2.0);
  }
  // traces of short words stay hyperbolic
  for (const auto& w : reduced_words(2, 3)) CHECK(std::abs(rep.word(w).trace()) > 2.0);

  CHECK_THROWS_AS(build_schottky(2.0, 2.0, 0.0), Error);
  CHECK_THROWS_AS(build_schottky(-1.0, 2.0, 1.0), Error);
  // tiny translation lengths cannot satisfy interval ping-pong
  CHECK_THROWS_AS(build_schottky(0.2, 0.2, 1.0), Error);
}

TEST_CASE("build_genus2 produces the octagon surface group") {
  FuchsianRep rep = build_genus2();
  REQUIRE(rep.generators.size() == 4);
  CHECK(rep.relator_residual < 1e-6);
  // relator residual recomputed directly
  auto comm = [](const h2::Mat2& u, const h2::Mat2& v) {
    return (u * v * u.inverse() * v.inverse()).eval();
  };
  h2::Mat2 rel = comm(rep.generators[0], rep.generators[1]) *
                 comm(rep.generators[2], rep.generators[3]);
  CHECK((rel - h2::Mat2::Identity()).norm() < 1e-6);

  std::vector<Eigen::Vector2d> fixed;
  for (const auto& g : rep.generators) {
    CHECK(std::abs(g.trace()) > 2.0);
    Eigen::EigenSolver<h2::Mat2> es(g);
    int big = std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(1)) ? 0 : 1;
    fixed.push_back(es.eigenvectors().col(big).real().normalized());
    fixed.push_back(es.eigenvectors().col(1 - big).real().normalized());
  }
  // axes pairwise distinct: no two generators share a fixed point
  for (std::size_t i = 0; i < fixed.size(); ++i)
    for (std::size_t j = i + 1; j < fixed.size(); ++j) {
      if (i / 2 == j / 2) continue;
      double cross = std::abs(fixed[i](0) * fixed[j](1) - fixed[i](1) * fixed[j](0));
      CHECK(cross > 1e-4);
    }
}

TEST_CASE("embeddings are symplectic homomorphisms") {
  Rng rng(117);
  SymplecticSpace s1(1);
  for (int n : {1, 2, 3}) {
    for (auto kind : {EmbedKind::irreducible, EmbedKind::diagonal}) {
      Embedding emb(kind, n);
      const SymplecticSpace& sp = emb.space();
      for (int t = 0; t < 15; ++t) {
        h2::Mat2 g = random_symplectic(s1, rng, 0.6);
        h2::Mat2 h = random_symplectic(s1, rng, 0.6);
        Mat G = emb.lift(g);
        CHECK((G.transpose() * sp.omega * G - sp.omega).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((emb.lift((g * h).eval()) - G * emb.lift(h)).cwiseAbs().maxCoeff() < 1e-10);
      }
      // derivative of the lift at the identity
      h2::Mat2 x;
      x << 0.3, 0.7, 0.1, -0.3;
      const double h = 1e-6;
      Mat fd = (emb.lift((h2::Mat2::Identity() + h * x).eval()) -
                emb.lift((h2::Mat2::Identity() - h * x).eval())) /
               (2 * h);
      CHECK((fd - emb.dlift(x)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("boundary Lagrangians: isotropy, equivariance, transversality") {
  Rng rng(119);
  SymplecticSpace s1(1);
  for (int n : {2, 3}) {
    for (auto kind : {EmbedKind::irreducible, EmbedKind::diagonal}) {
      Embedding emb(kind, n);
      const SymplecticSpace& sp = emb.space();
      for (int t = 0; t < 40; ++t) {
        Eigen::Vector2d p(rng.gaussian(), rng.gaussian());
        if (p.norm() < 0.1) continue;
        Lagrangian l = emb.boundary(p);
        CHECK(is_lagrangian(sp, l, 1e-10));

        h2::Mat2 g = random_symplectic(s1, rng, 0.6);
        Lagrangian lhs = emb.boundary(h2::mobius_boundary(g, p.normalized()));
        Lagrangian rhs((emb.lift(g) * l.frame).eval());
        CHECK(subspace_gap(lhs, rhs) < 1e-9);

        Eigen::Vector2d q(rng.gaussian(), rng.gaussian());
        if (q.norm() < 0.1) continue;
        double cross = std::abs(p.normalized()(0) * q.normalized()(1) -
                                p.normalized()(1) * q.normalized()(0));
        // the osculating pairing degenerates like cross^(2n-1), so ask for
        // separated points when asserting numerical transversality
        if (cross > 0.05) CHECK(transverse(l, emb.boundary(q)));
      }
      CHECK_THROWS_AS(emb.boundary(Eigen::Vector2d(0.0, 0.0)), Error);
    }
  }
}

TEST_CASE("positively ordered boundary triples are maximal (Thm 2.4)") {
  Rng rng(121);
  for (int n : {2, 3}) {
    for (auto kind : {EmbedKind::irreducible, EmbedKind::diagonal}) {
      Embedding emb(kind, n);
      const SymplecticSpace& sp = emb.space();
      int done = 0;
      for (int t = 0; t < 80 && done < 40; ++t) {
        double a1 = rng.uniform(0.0, M_PI);
        double a2 = a1 + rng.uniform(0.15, 1.2);
        double a3 = a2 + rng.uniform(0.15, 1.2);
        if (a3 - a1 > M_PI - 0.15) continue;  // keep the triple cyclically clean
        auto pt = [](double a) { return Eigen::Vector2d(std::cos(a), std::sin(a)); };
        int m = maslov_index(sp, emb.boundary(pt(a1)), emb.boundary(pt(a2)), emb.boundary(pt(a3)));
        CHECK(m == n);
        // reversed order gives the opposite extreme
        int mr = maslov_index(sp, emb.boundary(pt(a3)), emb.boundary(pt(a2)), emb.boundary(pt(a1)));
        CHECK(mr == -n);
        ++done;
      }
      CHECK(done == 40);
    }
  }
}

TEST_CASE("boundary loop of the full circle winds n times (Thm 2.5)") {
  for (int n : {1, 2, 3}) {
    for (auto kind : {EmbedKind::irreducible, EmbedKind::diagonal}) {
      Embedding emb(kind, n);
      LagrangianLoop loop;
      const int k = 96;
      for (int j = 0; j < k; ++j) {
        double a = M_PI * j / k;  // RP^1 is covered once by angles in [0, pi)
        loop.samples.push_back(emb.boundary(Eigen::Vector2d(std::cos(a), std::sin(a))));
        loop.params.push_back(2 * M_PI * j / k);
      }
      CHECK(maslov_winding(emb.space(), loop) == n);
    }
  }
}

TEST_CASE("anosov_gap_audit on the diagonal-generator Schottky") {
  FuchsianRep rep = build_schottky(4.0, 4.0, 1.0);
  Embedding emb(EmbedKind::irreducible, 1);
  GapReport g = anosov_gap_audit(rep, emb, 6);
  CHECK(g.word_count > 0);
  CHECK(g.A > 0);
  CHECK(g.B > 0);
  // the bound holds on every audited word by construction of the fit
  for (const auto& [len, gap] : g.per_word) CHECK(gap >= g.A * len + g.B - 1e-9);
  // pure powers of the diagonal generator have gap exactly 2 log(lambda) l
  for (const auto& [len, gap] : g.per_word) CHECK(gap <= 4.0 * len + 1e-9);
  double t = 4.0;
  int found = 0;
  for (const auto& [len, gap] : g.per_word)
    if (std::abs(gap - t * len) < 1e-6) ++found;
  CHECK(found >= 6);  // a^l and b^l for l = 1, 2, 3 at least
}

TEST_CASE("middle gap of the irreducible n = 2 lift doubles the base rate") {
  // Sym^3 of diag(e^{s}, e^{-s}) has exponents 3s, s, -s, -3s: the middle
  // gap sigma_2/sigma_3 equals e^{2s}, the same as the n = 1 gap
  Embedding emb(EmbedKind::irreducible, 2);
  for (double s : {0.5, 1.0, 1.7}) {
    h2::Mat2 a;
    a << std::exp(s), 0, 0, std::exp(-s);
    Mat lift = emb.lift(a);
    Vec sv = lift.jacobiSvd().singularValues();
    CHECK(std::log(sv(1) / sv(2)) == doctest::Approx(2 * s).epsilon(1e-10));
    CHECK(std::log(sv(0) / sv(3)) == doctest::Approx(6 * s).epsilon(1e-10));
  }
}

TEST_CASE("gap audit guards") {
  FuchsianRep rep = build_schottky(3.0, 3.0, 1.0);
  Embedding emb(EmbedKind::diagonal, 1);
  CHECK_THROWS_AS(anosov_gap_audit(rep, emb, 15), Error);
  FuchsianRep g2 = build_genus2();
  CHECK_THROWS_AS(anosov_gap_audit(g2, emb, 12), Error);  // word count guard
}

TEST_CASE("limit set samples are hyperbolic fixed points inside RP^1") {
  FuchsianRep rep = build_schottky(2.5, 2.5, 1.0);
  auto pts = limit_set_sample(rep, 40, 10, 5);
  CHECK(pts.size() == 40);
  for (const auto& p : pts) {
    CHECK(std::abs(p.norm() - 1.0) < 1e-12);
    // limit points of this Schottky group avoid a neighborhood of the
    // midpoint of the complementary intervals; weak sanity: finite entries
    CHECK(std::isfinite(p(0)));
  }
}
