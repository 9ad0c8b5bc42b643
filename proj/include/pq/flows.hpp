#pragma once

#include <optional>
#include <vector>

#include "pq/hyperbolic.hpp"
#include "pq/nesting.hpp"
#include "pq/pencil.hpp"
#include "pq/reps.hpp"

namespace pq {

// A point of the pulled-back sphere bundle: unit tangent plus the fiber
// quadric it selects under the tangent-to-fiber identification.
struct FlowSample {
  h2::UnitTangent ut;
  Quadric q;
};

// Equivariant pencil field over H^2. `averaged` realizes the Prop 6.13
// construction (quadrature over the unit tangent circle of pair quadrics
// of boundary Lagrangians); `gauss` is the Gauss map of the totally
// geodesic surface of the SL(2,R)-embedding.
class PencilField {
 public:
  enum class Kind { averaged, gauss };

  static PencilField averaged(const Embedding& emb, int quadrature = 256);
  static PencilField gauss(const Embedding& emb);

  Kind kind() const { return kind_; }
  int dim() const { return 2 * emb_->n(); }
  const Embedding& embedding() const { return *emb_; }
  int quadrature() const { return quadrature_; }

  // Per-point node cache; quadric(fiber, phi) is cheap for any phi.
  struct Fiber {
    h2::cplx x;
    std::vector<Mat> nodes;  // averaged: q°_{w_k}; gauss: conjugation data
    Mat frame_inv;           // gauss: lift(frame_at(x))^{-1}
    double weight = 0.0;
  };
  Fiber fiber(h2::cplx x) const;
  Mat quadric_mat(const Fiber& f, double phi) const;

  Quadric quadric(h2::cplx x, double phi) const;
  Pencil pencil(h2::cplx x) const;

 private:
  PencilField(Kind k, const Embedding& emb, int quadrature)
      : kind_(k), emb_(&emb), quadrature_(quadrature) {}
  Kind kind_;
  const Embedding* emb_;
  int quadrature_;
};

FlowSample flow_start(const PencilField& field, h2::cplx x, double phi);
FlowSample geodesic_flow_step(const FlowSample& s, const PencilField& field, double t);

// Flow line along the axis of a hyperbolic group element. Direct field
// evaluation far down a geodesic is numerically hopeless (the boundary
// pair collides), so values at large t come from the bounded fundamental
// window of the axis pushed by the equivariance q -> g^{-T} q g^{-1}.
class AxisFlow {
 public:
  AxisFlow(const PencilField& field, const h2::Mat2& gamma);

  Quadric at(double t) const;
  double translation_length() const { return length_; }
  const h2::UnitTangent& start() const { return start_; }
  Eigen::Vector2d forward_endpoint() const { return zplus_; }
  Eigen::Vector2d backward_endpoint() const { return zminus_; }

 private:
  const PencilField* field_;
  double length_;
  h2::UnitTangent start_;
  Eigen::Vector2d zplus_, zminus_;
  Mat push_, push_inv_;  // lift(gamma)^{-T} (.) lift(gamma)^{-1} and inverse
};

// Def 4.1 nestedness with the positive-scale freedom: best lambda_min of
// e^s q2 - q1 over |s| <= width after Frobenius normalization.
double nested_margin_scaled(const Quadric& q1, const Quadric& q2, double log_width = 5.0);

struct ContractionReport {
  std::vector<double> times;
  std::vector<double> log_cr;          // cr(pi(Phi_t q), pi(q))
  std::vector<double> nested_margins;  // per consecutive step, canonical scale
  double alpha = 0.0;                  // log cr >= alpha (t - 1) on the grid
  double ls_slope = 0.0;
  double ls_dev_rel = 0.0;  // max relative deviation of log cr from the ls line
  double superadd_slack = 0.0;
  bool nested_ok = false;
  std::optional<double> failed_t;
};

ContractionReport contraction_audit(const PencilField& field, const FlowSample& start,
                                    const std::vector<double>& tgrid, int cr_budget = 1500,
                                    std::uint64_t seed = 0);

// Same audit along a group axis, robust for large t.
ContractionReport contraction_audit(const AxisFlow& axis, const std::vector<double>& tgrid,
                                    int cr_budget = 1500, std::uint64_t seed = 0);

// Lemma 4.3: winding of the projected fiber circle around the base point.
int winding_audit(const PencilField& field, h2::cplx x, double t_small, int circle_samples = 64);

struct GaussGeodesic {
  Quadric q;      // q_t
  Mat dq;         // closed-form derivative
  std::optional<Pencil> pencil;  // span(q_t, dq_t) when independent
};

// Prop 7.1 eigen-data form along the geodesic e^{t lambda}.
GaussGeodesic gauss_map_geodesic(const Vec& lambda, double t);

// --- the Sp symmetric space model ---

double sp_membership(const SymplecticSpace& sp, const SymTensor& X);

// Basis of T_X X_Sp on the tensor side, transported from the base point.
std::vector<Mat> sp_tangent_frame(const SymplecticSpace& sp, const SymTensor& X);

// Newton retraction onto {X spd : (X omega)^2 = -Id}.
Mat sp_retract(const SymplecticSpace& sp, Mat S, int iters = 60);

struct TangentRegularity {
  Tri regular = Tri::inconclusive;
  double margin = 0.0;  // min |eig| of the corresponding quadric, scaled
  std::optional<LagrangianWitness> positive, negative;
};

TangentRegularity tangent_regularity(const SymplecticSpace& sp, const SymTensor& X,
                                     const Mat& Xdot, std::uint64_t seed = 0);

struct TransversalityReport {
  Tri status = Tri::inconclusive;
  double gap = 0.0;  // smallest singular value of the stacked tangent frame
  Mat point;         // the located intersection of P(P°) with X_Sp
  double membership_residual = 0.0;
  double pencil_residual = 0.0;
};

TransversalityReport transversality_audit(const SymplecticSpace& sp, const Pencil& P,
                                          const SymTensor& X0, int iters = 300);

struct FibrationReport {
  int interior_samples = 0;
  int interior_hits_one = 0;  // samples hitting exactly one fiber
  int limit_samples = 0;
  int limit_hits_zero = 0;
  std::vector<int> multiplicity_histogram;  // index = fiber count
  int discarded = 0;                        // non-robust samples (fiber near mesh edge)
};

// Prop 5.5 audit for n = 1: each robust point of the domain of
// discontinuity lies on exactly one fiber, limit points on none.
FibrationReport fibration_audit(const PencilField& field, const FuchsianRep& rep,
                                int interior_samples, int limit_samples, double mesh_radius = 3.2,
                                int mesh_steps = 96, std::uint64_t seed = 0);

}  // namespace pq
