#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "pq/flows.hpp"
#include "pq/pencil.hpp"

namespace pq {

using cdouble = std::complex<double>;

// --- the space of geodesics of H^3 as Hermitian pencils on C^2 ---

struct HermitianForm {
  Eigen::Matrix2cd mat;

  explicit HermitianForm(const Eigen::Matrix2cd& m) : mat(m) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::malformed_input, "HermitianForm: matrix is not Hermitian");
  }
};

// Unoriented geodesic of H^3, by its distinct endpoints on CP^1 held in
// homogeneous coordinates ([z : 1], infinity = [1 : 0]).
struct GeodesicH3 {
  Eigen::Vector2cd p1, p2;

  GeodesicH3(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b);
  static GeodesicH3 from_points(cdouble z1, cdouble z2);
  static GeodesicH3 through_infinity(cdouble z);
};

double cp1_chordal(const Eigen::Vector2cd& p, const Eigen::Vector2cd& q);

// Re h(v, v) as a real quadratic form on R^4 = C^2, coordinates
// (Re z1, Im z1, Re z2, Im z2).
Quadric hermitian_to_real(const HermitianForm& h);

// The real 2-dim pencil of (realified) Hermitian forms vanishing at both
// endpoints, and the inverse map recovering the endpoints.
Pencil geodesic_pencil(const GeodesicH3& g);
GeodesicH3 pencil_to_geodesic(const Pencil& P);

// Hyperbolic distance between two geodesics of H^3 (0 when they meet).
double geodesic_distance_h3(const GeodesicH3& g1, const GeodesicH3& g2);

struct H3CrossCheck {
  Tri disjoint = Tri::inconclusive;
  double distance = 0.0;
  Tri fitting = Tri::inconclusive;
  double margin = 0.0;
  bool agree = false;
};

// Prop A.1: fitting pair iff the geodesics are disjoint with disjoint
// endpoints; both routes computed independently and compared.
H3CrossCheck geodesics_fitting_crosscheck(const GeodesicH3& g1, const GeodesicH3& g2,
                                          int budget = 2000, std::uint64_t seed = 0);

// Signature (2,2) pairing on tangents of the space of geodesics, in the
// normalized chart where the geodesic is (0, infinity) and the midpoint
// identification is phi(v) = conj(v):
//   q((v1,w1),(v2,w2)) = q0(phi(v1), w2) + q0(phi(v2), w1),  q0(u,w) = Re(conj(u) w).
double geodesic_metric(cdouble v1, cdouble w1, cdouble v2, cdouble w2);
inline bool geodesic_spacelike(cdouble v, cdouble w) { return std::real(v * w) > 0; }

// Prop A.1 second part: (v, w) is fitting iff phi(v) and w are not
// positively anti-colinear.
bool geodesic_tangent_fitting(cdouble v, cdouble w, double tol = 1e-9);

// Tangent to the pencil curve of the moving geodesic (0,inf) -> (tv, inf + ...)
// realized by finite differences of geodesic_pencil.
TangentVector geodesic_tangent_vector(const GeodesicH3& g, cdouble v, cdouble w,
                                      double h = 1e-6);

// --- PSp(4,R) ~ SO_o(2,3) and H^{2,2} ---

// Appendix-B basis ordering (x1, y1, x2, y2); conversions to the standard
// (x1, x2, y1, y2) ordering used elsewhere.
Mat appendix_basis_permutation();  // v_app = P v_std
Quadric appendix_to_standard(const Quadric& q_app);
Lagrangian appendix_lagrangian_to_standard(const Lagrangian& l_app);
Mat omega_appendix();

// Induced 5x5 matrix on the omega-trace-free part of Lambda^2 R^4, in a
// basis where the invariant form is diag(1,1,-1,-1,-1).
Mat sp4_so23(const Mat& g_app);
Mat so23_gram();

Vec lagrangian_to_isotropic(const Lagrangian& l_app);
Lagrangian isotropic_to_lagrangian(const Vec& w);

// Pointed totally geodesic spacelike plane in H^{2,2} = {<p,p> = -1}.
struct SpacelikePlaneH22 {
  Vec p;        // base point, <p,p> = -1
  Mat tangent;  // 5x2, spacelike orthonormal, orthogonal to p

  SpacelikePlaneH22(const Vec& base, const Mat& frame);
};

SpacelikePlaneH22 standard_plane_h22();

// Boundary circle of Lagrangians of the plane and the associated pencil
// (Appendix B normalization: twice the pair quadric, integer entries at the
// standard plane).
Lagrangian plane_boundary_lagrangian(const SpacelikePlaneH22& pl, double theta);
Pencil spacelike_plane_pencil(const SpacelikePlaneH22& pl);
Mat plane_family_matrix(const Pencil& P, double theta);

// --- spacelike surface audit (Thm B.1 / Lemma B.2) ---

struct SurfaceH22 {
  std::function<Vec(double, double)> eval;  // into R^{2,3}, <s,s> = -1
};

SurfaceH22 totally_geodesic_surface(const SpacelikePlaneH22& pl);
// graph perturbation along a timelike normal, magnitude eps * f(a,b)
SurfaceH22 perturbed_surface(const SpacelikePlaneH22& pl, double eps);

struct GaussSampleCheck {
  double ii_norm = 0.0;              // timelike norm of II(gamma', gamma')
  double ii_mixed_norm = 0.0;        // of II(V, gamma')
  bool bound_ok = false;             // ||II(v,v)|| < ||v||
  double endpoint_spacelike = 0.0;   // min of <vdot+,vdot+>, <vdot-,vdot->
  Tri fitting = Tri::inconclusive;
  double fitting_margin = 0.0;
};

struct GaussAuditReport {
  std::vector<GaussSampleCheck> samples;
  int bound_violations = 0;
  int endpoint_failures = 0;
  int fitting_failures = 0;
};

GaussAuditReport spacelike_gauss_audit(const SurfaceH22& surface,
                                       const std::vector<std::pair<double, double>>& points,
                                       int directions_per_point = 4, double fd_step = 1e-5,
                                       std::uint64_t seed = 0);

}  // namespace pq
