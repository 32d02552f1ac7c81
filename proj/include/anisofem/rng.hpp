#pragma once

#include <cstdint>

#include "anisofem/simplex.hpp"
#include "anisofem/standard_position.hpp"

namespace anisofem {

// splitmix64: tiny, seedable, identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

/// Random nondegenerate simplex with anisotropy up to ~10^max_aniso_exp,
/// randomly rotated and translated.
template <int Dim>
inline Simplex<Dim> random_simplex(Rng& rng, double max_aniso_exp = 6.0) {
  for (;;) {
    Simplex<Dim> s;
    for (int i = 0; i <= Dim; ++i)
      for (int j = 0; j < Dim; ++j) s.vertices[i][j] = rng.uniform(-1.0, 1.0);
    // squash along coordinate axes to reach large aspect ratios
    Vec<Dim> scale{};
    scale[0] = 1.0;
    for (int j = 1; j < Dim; ++j)
      scale[j] = std::pow(10.0, -rng.uniform(0.0, max_aniso_exp));
    for (int i = 0; i <= Dim; ++i)
      for (int j = 0; j < Dim; ++j) s.vertices[i][j] *= scale[j];
    // random rotation (and translation) to leave no axis alignment behind
    RigidMotion<Dim> motion;
    if constexpr (Dim == 2) {
      double a = rng.uniform(0.0, 2.0 * kPi);
      motion.rotation = make_mat2(std::cos(a), -std::sin(a), std::sin(a), std::cos(a));
    } else {
      Vec<3> u = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      if (norm(u) < 1e-3) continue;
      u = normalized(u);
      Vec<3> t = {1.0, 0.0, 0.0};
      if (std::abs(u[0]) > 0.9) t = {0.0, 1.0, 0.0};
      Vec<3> v = normalized(cross(u, t));
      Vec<3> w = cross(u, v);
      motion.rotation = make_mat3(u[0], v[0], w[0], u[1], v[1], w[1], u[2], v[2], w[2]);
    }
    for (int j = 0; j < Dim; ++j) motion.translation[j] = rng.uniform(-1.0, 1.0);
    s = apply_motion(motion, s);
    if (!is_degenerate(s)) return s;
  }
}

}  // namespace anisofem
