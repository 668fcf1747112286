// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached through the
// runtime dispatch in dispatch.cpp after a CPU feature check.

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "semm/simd/kernels.hpp"

#ifndef __AVX2__
#error kernels_avx2.cpp must be compiled with -mavx2 -mfma
#endif

namespace semm::detail {

namespace {

// Tail elements are handled here rather than through semm/bloch.hpp so no
// inline function from a shared header is instantiated with AVX2 encoding.
void tail_sincos(double turns, double& s, double& c) {
  const double r = turns - std::nearbyint(turns);
  const double angle = 2.0 * std::numbers::pi * r;
  s = std::sin(angle);
  c = std::cos(angle);
}

inline __m256d horner6(__m256d z, const double (&k)[6]) {
  __m256d p = _mm256_set1_pd(k[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(k[i]));
  return p;
}

// sin and cos of 2*pi*t. Exact reduction to [-1/8, 1/8] turn, then the
// Cephes minimax polynomials on [-pi/4, pi/4].
inline void sincos_turns(__m256d t, __m256d& s, __m256d& c) {
  static constexpr double kSin[6] = {1.58962301576546568060E-10, -2.50507477628578072866E-8,
                                     2.75573136213857245213E-6,  -1.98412698295895385996E-4,
                                     8.33333333332211858878E-3,  -1.66666666666666307295E-1};
  static constexpr double kCos[6] = {-1.13585365213876817300E-11, 2.08757008419747316778E-9,
                                     -2.75573141792967388112E-7,  2.48015872888517045348E-5,
                                     -1.38888888888730564116E-3,  4.16666666666665929218E-2};
  constexpr int kNearest = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;
  const __m256d r = _mm256_sub_pd(t, _mm256_round_pd(t, kNearest));
  const __m256d r4 = _mm256_mul_pd(r, _mm256_set1_pd(4.0));
  const __m256d q = _mm256_round_pd(r4, kNearest);
  const __m256d y = _mm256_mul_pd(_mm256_sub_pd(r4, q), _mm256_set1_pd(0.5 * std::numbers::pi));
  const __m256d z = _mm256_mul_pd(y, y);

  const __m256d sin_y = _mm256_fmadd_pd(_mm256_mul_pd(y, z), horner6(z, kSin), y);
  const __m256d cos_y = _mm256_fmadd_pd(_mm256_mul_pd(z, z), horner6(z, kCos),
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  // Quadrant 0..3
  const __m256d qm = _mm256_sub_pd(
      q, _mm256_mul_pd(_mm256_set1_pd(4.0), _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25)))));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d is1 = _mm256_cmp_pd(qm, one, _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(qm, two, _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(qm, three, _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is1, is3);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d neg_s = _mm256_and_pd(_mm256_or_pd(is2, is3), sign);
  const __m256d neg_c = _mm256_and_pd(_mm256_or_pd(is1, is2), sign);
  s = _mm256_xor_pd(_mm256_blendv_pd(sin_y, cos_y, swap), neg_s);
  c = _mm256_xor_pd(_mm256_blendv_pd(cos_y, sin_y, swap), neg_c);
}

inline double lane_sum(__m256d x) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, x);
  return ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
}

void precess(double* u, double* v, const double* detuning, const double* stark, std::size_t n, double dt,
             double field_time, double decay) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vft = _mm256_set1_pd(field_time);
  const __m256d vdecay = _mm256_set1_pd(decay);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d turns =
        _mm256_fmadd_pd(_mm256_loadu_pd(detuning + i), vdt, _mm256_mul_pd(_mm256_loadu_pd(stark + i), vft));
    __m256d s;
    __m256d c;
    sincos_turns(turns, s, c);
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d y = _mm256_loadu_pd(v + i);
    const __m256d nx = _mm256_fmsub_pd(x, c, _mm256_mul_pd(y, s));
    const __m256d ny = _mm256_fmadd_pd(x, s, _mm256_mul_pd(y, c));
    _mm256_storeu_pd(u + i, _mm256_mul_pd(nx, vdecay));
    _mm256_storeu_pd(v + i, _mm256_mul_pd(ny, vdecay));
  }
  for (; i < n; ++i) {
    double s;
    double c;
    tail_sincos(detuning[i] * dt + stark[i] * field_time, s, c);
    const double nx = (u[i] * c - v[i] * s) * decay;
    const double ny = (u[i] * s + v[i] * c) * decay;
    u[i] = nx;
    v[i] = ny;
  }
}

std::complex<double> sample(const double* u, const double* v, const double* weight, const double* detuning,
                            const double* stark, std::size_t n, double dt, double field_time) {
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vft = _mm256_set1_pd(field_time);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d turns =
        _mm256_fmadd_pd(_mm256_loadu_pd(detuning + i), vdt, _mm256_mul_pd(_mm256_loadu_pd(stark + i), vft));
    __m256d s;
    __m256d c;
    sincos_turns(turns, s, c);
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d y = _mm256_loadu_pd(v + i);
    const __m256d wt = _mm256_loadu_pd(weight + i);
    acc_re = _mm256_fmadd_pd(wt, _mm256_fmsub_pd(x, c, _mm256_mul_pd(y, s)), acc_re);
    acc_im = _mm256_fmadd_pd(wt, _mm256_fmadd_pd(x, s, _mm256_mul_pd(y, c)), acc_im);
  }
  double re = lane_sum(acc_re);
  double im = lane_sum(acc_im);
  for (; i < n; ++i) {
    double s;
    double c;
    tail_sincos(detuning[i] * dt + stark[i] * field_time, s, c);
    re += weight[i] * (u[i] * c - v[i] * s);
    im += weight[i] * (u[i] * s + v[i] * c);
  }
  return {re, im};
}

void rotate_fixed(double* u, double* v, double* w, std::size_t n, const double* m) {
  __m256d mm[9];
  for (int k = 0; k < 9; ++k) mm[k] = _mm256_set1_pd(m[k]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d y = _mm256_loadu_pd(v + i);
    const __m256d z = _mm256_loadu_pd(w + i);
    _mm256_storeu_pd(u + i, _mm256_fmadd_pd(mm[2], z, _mm256_fmadd_pd(mm[1], y, _mm256_mul_pd(mm[0], x))));
    _mm256_storeu_pd(v + i, _mm256_fmadd_pd(mm[5], z, _mm256_fmadd_pd(mm[4], y, _mm256_mul_pd(mm[3], x))));
    _mm256_storeu_pd(w + i, _mm256_fmadd_pd(mm[8], z, _mm256_fmadd_pd(mm[7], y, _mm256_mul_pd(mm[6], x))));
  }
  for (; i < n; ++i) {
    const double x = u[i];
    const double y = v[i];
    const double z = w[i];
    u[i] = m[0] * x + m[1] * y + m[2] * z;
    v[i] = m[3] * x + m[4] * y + m[5] * z;
    w[i] = m[6] * x + m[7] * y + m[8] * z;
  }
}

void rotate_detuned(double* u, double* v, double* w, const double* detuning, std::size_t n, double rabi,
                    double phase, double duration) {
  const double cp = std::cos(phase);
  const double sp = std::sin(phase);
  const __m256d vrabi2 = _mm256_set1_pd(rabi * rabi);
  const __m256d vrc = _mm256_set1_pd(rabi * cp);
  const __m256d vrs = _mm256_set1_pd(rabi * sp);
  const __m256d vdur = _mm256_set1_pd(duration);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(detuning + i);
    const __m256d eff = _mm256_sqrt_pd(_mm256_fmadd_pd(d, d, vrabi2));
    const __m256d inv = _mm256_div_pd(one, eff);
    const __m256d nx = _mm256_mul_pd(vrc, inv);
    const __m256d ny = _mm256_mul_pd(vrs, inv);
    const __m256d nz = _mm256_mul_pd(d, inv);
    __m256d s;
    __m256d c;
    sincos_turns(_mm256_mul_pd(eff, vdur), s, c);
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d y = _mm256_loadu_pd(v + i);
    const __m256d z = _mm256_loadu_pd(w + i);
    const __m256d dot = _mm256_fmadd_pd(nz, z, _mm256_fmadd_pd(ny, y, _mm256_mul_pd(nx, x)));
    const __m256d cx = _mm256_fmsub_pd(ny, z, _mm256_mul_pd(nz, y));
    const __m256d cy = _mm256_fmsub_pd(nz, x, _mm256_mul_pd(nx, z));
    const __m256d cz = _mm256_fmsub_pd(nx, y, _mm256_mul_pd(ny, x));
    const __m256d k = _mm256_mul_pd(dot, _mm256_sub_pd(one, c));
    _mm256_storeu_pd(u + i, _mm256_fmadd_pd(nx, k, _mm256_fmadd_pd(cx, s, _mm256_mul_pd(x, c))));
    _mm256_storeu_pd(v + i, _mm256_fmadd_pd(ny, k, _mm256_fmadd_pd(cy, s, _mm256_mul_pd(y, c))));
    _mm256_storeu_pd(w + i, _mm256_fmadd_pd(nz, k, _mm256_fmadd_pd(cz, s, _mm256_mul_pd(z, c))));
  }
  for (; i < n; ++i) {
    const double eff = std::sqrt(rabi * rabi + detuning[i] * detuning[i]);
    const double nx = rabi * cp / eff;
    const double ny = rabi * sp / eff;
    const double nz = detuning[i] / eff;
    double s;
    double c;
    tail_sincos(eff * duration, s, c);
    const double x = u[i];
    const double y = v[i];
    const double z = w[i];
    const double dot = nx * x + ny * y + nz * z;
    const double k = dot * (1.0 - c);
    u[i] = x * c + (ny * z - nz * y) * s + nx * k;
    v[i] = y * c + (nz * x - nx * z) * s + ny * k;
    w[i] = z * c + (nx * y - ny * x) * s + nz * k;
  }
}

std::complex<double> coherence_sum(const double* u, const double* v, const double* weight, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wt = _mm256_loadu_pd(weight + i);
    acc_re = _mm256_fmadd_pd(wt, _mm256_loadu_pd(u + i), acc_re);
    acc_im = _mm256_fmadd_pd(wt, _mm256_loadu_pd(v + i), acc_im);
  }
  double re = lane_sum(acc_re);
  double im = lane_sum(acc_im);
  for (; i < n; ++i) {
    re += weight[i] * u[i];
    im += weight[i] * v[i];
  }
  return {re, im};
}

double population_sum(const double* w, const double* weight, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(weight + i), _mm256_loadu_pd(w + i), acc);
  double total = lane_sum(acc);
  for (; i < n; ++i) total += weight[i] * w[i];
  return total;
}

void relax_population(double* w, std::size_t n, double keep) {
  const __m256d vkeep = _mm256_set1_pd(keep);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(w + i);
    _mm256_storeu_pd(w + i, _mm256_fmsub_pd(_mm256_add_pd(x, one), vkeep, one));
  }
  for (; i < n; ++i) w[i] = -1.0 + (w[i] + 1.0) * keep;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2",         precess,        sample,          rotate_fixed,
                                 rotate_detuned, coherence_sum, population_sum, relax_population};
  return table;
}

}  // namespace semm::detail
