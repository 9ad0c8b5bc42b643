#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

namespace pq {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Three-valued verdict used by every predicate that relies on
// finite-precision certification. Inconclusive is never silently
// coerced to false.
enum class Tri { yes, no, inconclusive };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::yes: return "pass";
    case Tri::no: return "fail";
    default: return "inconclusive";
  }
}

inline Tri tri_and(Tri a, Tri b) {
  if (a == Tri::no || b == Tri::no) return Tri::no;
  if (a == Tri::inconclusive || b == Tri::inconclusive) return Tri::inconclusive;
  return Tri::yes;
}

enum class ErrorCode {
  malformed_input,
  degenerate_basis,
  degenerate_pencil,
  cone_membership,
  rank_deficient,
  transversality,
  continuation,
  not_schottky,
  budget_exhausted,
  unsupported,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace tol {
// Relative eigenvalue tolerance used by classification ops unless the
// caller passes an explicit one.
inline constexpr double eig_rel = 1e-9;
inline constexpr double symmetry_rel = 1e-12;
inline constexpr double lagrangian_abs = 1e-10;
inline constexpr double feasibility_band = 1e-7;
inline constexpr double transversality_rel = 1e-8;
}  // namespace tol

inline double spectral_norm(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

inline void require_symmetric(const Mat& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::malformed_input, std::string(what) + ": matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale * m.rows())
    throw Error(ErrorCode::malformed_input, std::string(what) + ": matrix not symmetric");
}

inline Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace pq
