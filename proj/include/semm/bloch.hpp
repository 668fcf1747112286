#pragma once

// Per-center Bloch-vector maps. These are the reference semantics for the
// batched kernels in semm/simd/kernels.hpp.

#include <cmath>
#include <numbers>

namespace semm {

/// (u, v, w): u + i v is the coherence, w the population inversion (-1 = ground).
struct BlochVector {
  double u = 0.0;
  double v = 0.0;
  double w = -1.0;

  double norm() const { return std::sqrt(u * u + v * v + w * w); }
  bool operator==(const BlochVector&) const = default;
};

namespace bloch {

/// sin and cos of 2*pi*turns. The integer part of `turns` is removed exactly first.
inline void sincos_turns(double turns, double& s, double& c) {
  const double r = turns - std::nearbyint(turns);
  const double angle = 2.0 * std::numbers::pi * r;
  s = std::sin(angle);
  c = std::cos(angle);
}

/// Multiplies u + i v by exp(2 pi i turns) * decay.
inline void precess(double& u, double& v, double turns, double decay) {
  double s;
  double c;
  sincos_turns(turns, s, c);
  const double nu = (u * c - v * s) * decay;
  const double nv = (u * s + v * c) * decay;
  u = nu;
  v = nv;
}

/// Rotation by 2*pi*turns about the unit axis (nx, ny, nz) (Rodrigues).
inline void rotate_axis(double& u, double& v, double& w, double nx, double ny, double nz, double turns) {
  double s;
  double c;
  sincos_turns(turns, s, c);
  const double dot = nx * u + ny * v + nz * w;
  const double cx = ny * w - nz * v;
  const double cy = nz * u - nx * w;
  const double cz = nx * v - ny * u;
  const double k = dot * (1.0 - c);
  const double nu = u * c + cx * s + nx * k;
  const double nv = v * c + cy * s + ny * k;
  const double nw = w * c + cz * s + nz * k;
  u = nu;
  v = nv;
  w = nw;
}

/// Finite rectangular pulse of Rabi frequency `rabi` (Hz) and length `duration`
/// on a center detuned by `detuning` (Hz): rotation about (rabi cos phase,
/// rabi sin phase, detuning) by 2 pi sqrt(rabi^2 + detuning^2) duration.
inline void rotate_detuned(double& u, double& v, double& w, double detuning, double rabi, double cos_phase,
                           double sin_phase, double duration) {
  const double eff = std::sqrt(rabi * rabi + detuning * detuning);
  if (eff == 0.0) return;
  rotate_axis(u, v, w, rabi * cos_phase / eff, rabi * sin_phase / eff, detuning / eff, eff * duration);
}

}  // namespace bloch
}  // namespace semm
