#pragma once

#include <cmath>
#include <complex>

#include "pq/types.hpp"

namespace pq::h2 {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2d;

// Mobius action of SL(2,R) on the upper half plane.
inline cplx mobius(const Mat2& g, cplx z) {
  return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}

// Action on boundary points in homogeneous coordinates [x : y], z = x/y.
inline Eigen::Vector2d mobius_boundary(const Mat2& g, const Eigen::Vector2d& p) {
  Eigen::Vector2d q = g * p;
  double n = q.norm();
  if (n < 1e-300) throw Error(ErrorCode::malformed_input, "mobius_boundary: zero vector");
  return q / n;
}

inline double dist(cplx z, cplx w) {
  double num = std::norm(z - w);
  double den = 2.0 * z.imag() * w.imag();
  return std::acosh(1.0 + num / den);
}

// Unique g in SL(2,R) with g(i) = x and with real positive derivative at i
// (no tangent rotation); columns from the NA decomposition.
inline Mat2 frame_at(cplx x) {
  double y = x.imag();
  if (y <= 0) throw Error(ErrorCode::malformed_input, "frame_at: point not in upper half plane");
  Mat2 g;
  const double s = std::sqrt(y);
  g << s, x.real() / s, 0.0, 1.0 / s;
  return g;
}

// Rotation about i: acts on T_i H^2 by angle -phi twice half-angle; rotates
// the upward direction to direction (pi/2 - phi) ... see unit tests.
inline Mat2 rotation(double psi) {
  Mat2 r;
  const double c = std::cos(psi / 2), s = std::sin(psi / 2);
  r << c, -s, s, c;
  return r;
}

// Carrier of the unit tangent (x, angle phi): g * (i, up) = (x, phi).
inline Mat2 tangent_carrier(cplx x, double phi) {
  return frame_at(x) * rotation(M_PI / 2 - phi);
}

// Forward boundary endpoint of the geodesic from x with direction angle phi,
// in homogeneous coordinates on RP^1.
inline Eigen::Vector2d geodesic_endpoint(cplx x, double phi) {
  Mat2 g = tangent_carrier(x, phi);
  Eigen::Vector2d inf(1.0, 0.0);
  return mobius_boundary(g, inf);
}

struct UnitTangent {
  cplx x;
  double phi;  // angle of the tangent in the Euclidean chart at x
};

// Geodesic flow for time t.
inline UnitTangent flow(const UnitTangent& s, double t) {
  Mat2 g = tangent_carrier(s.x, s.phi);
  Mat2 a;
  a << std::exp(t / 2), 0, 0, std::exp(-t / 2);
  Mat2 gt = g * a;
  cplx xt = mobius(gt, cplx(0, 1));
  // d/dz mobius = 1/den^2; the up tangent at i maps to i/den^2
  cplx den = gt(1, 0) * cplx(0, 1) + gt(1, 1);
  cplx dir = cplx(0, 1) / (den * den);
  return {xt, std::arg(dir)};
}

// Tangent angle transport under g: the image of (x, phi).
inline UnitTangent push(const Mat2& g, const UnitTangent& s) {
  cplx den = g(1, 0) * s.x + g(1, 1);
  cplx dir = std::exp(cplx(0, s.phi)) / (den * den);
  return {mobius(g, s.x), std::arg(dir)};
}

}  // namespace pq::h2
