#pragma once

#include <cstdint>
#include <random>

#include "pq/types.hpp"

namespace pq {

// splitmix64; used to derive independent per-sample streams from one
// master seed so batch audits stay deterministic under any parallel
// schedule.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t id) {
    return Rng(mix64(master ^ mix64(id + 0x51ed2701a4362f35ULL)));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = gaussian();
    return v;
  }
  Vec sphere_vec(int n) {
    Vec v = gaussian_vec(n);
    double nv = v.norm();
    while (nv < 1e-12) {
      v = gaussian_vec(n);
      nv = v.norm();
    }
    return v / nv;
  }
  Mat gaussian_mat(int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gaussian();
    return m;
  }
  Mat gaussian_sym(int n) {
    Mat m = gaussian_mat(n, n);
    return symmetrized(m);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pq
