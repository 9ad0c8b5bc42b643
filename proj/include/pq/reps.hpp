#pragma once

#include <vector>

#include "pq/hyperbolic.hpp"
#include "pq/symplectic.hpp"

namespace pq {

enum class RepKind { schottky, genus2_octagon };

// Desk-scale Fuchsian stand-ins: a Schottky free group or the regular
// octagon (Bolza) surface group in the standard presentation.
struct FuchsianRep {
  RepKind kind;
  std::vector<h2::Mat2> generators;
  double relator_residual = 0.0;  // genus2: |[a1,b1][a2,b2] - I|
  double pingpong_radius = 0.0;   // schottky: verified interval radius

  h2::Mat2 word(const std::vector<int>& letters) const;  // letters: +-1-based gen indices
};

FuchsianRep build_schottky(double t1, double t2, double separation);
FuchsianRep build_genus2();

enum class EmbedKind { irreducible, diagonal };

// SL(2,R) -> Sp(2n,R), realized on Sym^{2n-1} R^2 (irreducible, conjugated
// into the standard symplectic basis) or on the n-fold direct sum.
class Embedding {
 public:
  Embedding(EmbedKind kind, int n);

  int n() const { return n_; }
  EmbedKind kind() const { return kind_; }
  const SymplecticSpace& space() const { return sp_; }

  Mat lift(const h2::Mat2& g) const;
  Mat dlift(const h2::Mat2& X) const;  // derivative at the identity

  // Explicit boundary Lagrangian map RP^1 -> L_n: the osculating n-plane of
  // the rational normal curve (irreducible) or the diagonal of attracting
  // lines. Equivariant: xi(g p) = lift(g) xi(p).
  Lagrangian boundary(const Eigen::Vector2d& p) const;

 private:
  EmbedKind kind_;
  int n_;
  SymplecticSpace sp_;
  Mat to_std_;   // monomial -> standard symplectic coordinates (irreducible)
  Mat from_std_;
};

struct GapReport {
  std::vector<std::pair<int, double>> per_word;  // (word length, log sigma_n/sigma_{n+1})
  double A = 0.0;  // max slope with the Def 2.2 bound exact on all samples
  double B = 0.0;
  double ls_slope = 0.0;
  double ls_intercept = 0.0;
  double fit_rms = 0.0;
  long word_count = 0;
};

// Enumerates reduced words up to maxlen and certifies the singular value
// gap bound; log-scaled exterior-power accumulation keeps every gap at
// full relative accuracy on long products.
GapReport anosov_gap_audit(const FuchsianRep& rep, const Embedding& emb, int maxlen,
                           long max_words = 2'000'000);

// Attracting fixed points of sampled long words; a stand-in for the limit set.
std::vector<Eigen::Vector2d> limit_set_sample(const FuchsianRep& rep, int count, int word_len,
                                              std::uint64_t seed);

}  // namespace pq
